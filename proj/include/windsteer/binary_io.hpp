#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>

#include "windsteer/errors.hpp"

namespace windsteer::io {

// Little-endian primitive streams shared by the TBOX, DSUR and MNET formats.

template <typename T>
T to_little_endian(T value) {
  static_assert(std::is_arithmetic_v<T>);
  if constexpr (std::endian::native == std::endian::big) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    std::reverse(bytes.begin(), bytes.end());
    std::memcpy(&value, bytes.data(), sizeof(T));
  }
  return value;
}

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError(path, "cannot open for writing");
  }

  void magic(std::string_view tag) { out_.write(tag.data(), tag.size()); }

  template <typename T>
  void put(T value) {
    value = to_little_endian(value);
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  template <typename T>
  void put_array(std::span<const T> values) {
    if constexpr (std::endian::native == std::endian::little) {
      out_.write(reinterpret_cast<const char*>(values.data()),
                 static_cast<std::streamsize>(values.size_bytes()));
    } else {
      for (const T& v : values) put(v);
    }
  }

  void close() {
    out_.close();
    if (!out_) throw IoError(path_, "write failed");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError(path, "cannot open for reading");
  }

  void expect_magic(std::string_view tag) {
    std::string got(tag.size(), '\0');
    in_.read(got.data(), static_cast<std::streamsize>(tag.size()));
    if (!in_ || got != tag)
      throw IoError(path_, "bad magic, expected " + std::string(tag));
  }

  template <typename T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    check();
    return to_little_endian(value);
  }

  template <typename T>
  void get_array(std::span<T> values) {
    in_.read(reinterpret_cast<char*>(values.data()),
             static_cast<std::streamsize>(values.size_bytes()));
    check();
    if constexpr (std::endian::native == std::endian::big) {
      for (T& v : values) v = to_little_endian(v);
    }
  }

  const std::string& path() const { return path_; }

 private:
  void check() {
    if (!in_) throw IoError(path_, "truncated file");
  }

  std::string path_;
  std::ifstream in_;
};

}  // namespace windsteer::io

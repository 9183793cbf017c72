#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "windsteer/binary_io.hpp"
#include "windsteer/nn/mlp.hpp"

namespace windsteer::nn {

inline constexpr std::uint32_t kMnetVersion = 1;

/// Layer count, dims and activation codes.
inline void write_mlp_layout(io::BinaryWriter& out, const Mlp<double>& net) {
  out.put<std::uint32_t>(static_cast<std::uint32_t>(net.layer_count()));
  for (int d : net.dims()) out.put<std::uint32_t>(static_cast<std::uint32_t>(d));
  for (Activation a : net.activations()) out.put<std::uint32_t>(static_cast<std::uint32_t>(a));
}

/// u64 parameter count followed by the f64 parameters.
inline void write_mlp_params(io::BinaryWriter& out, const Mlp<double>& net) {
  out.put<std::uint64_t>(static_cast<std::uint64_t>(net.parameter_count()));
  out.put_array(std::span<const double>(net.parameters().data(), net.parameters().size()));
}

inline Mlp<double> read_mlp_layout(io::BinaryReader& in) {
  const auto layers = in.get<std::uint32_t>();
  if (layers == 0 || layers > 64) throw IoError(in.path(), "implausible layer count");
  std::vector<int> dims(layers + 1);
  for (auto& d : dims) {
    d = static_cast<int>(in.get<std::uint32_t>());
    if (d <= 0 || d > (1 << 20)) throw IoError(in.path(), "implausible layer width");
  }
  std::vector<Activation> acts(layers);
  for (auto& a : acts) {
    const auto code = in.get<std::uint32_t>();
    if (code > static_cast<std::uint32_t>(Activation::kSoftplus))
      throw IoError(in.path(), "unknown activation code");
    a = static_cast<Activation>(code);
  }
  return Mlp<double>(dims, acts);
}

inline void read_mlp_params(io::BinaryReader& in, Mlp<double>& net) {
  const auto count = in.get<std::uint64_t>();
  if (count != static_cast<std::uint64_t>(net.parameter_count()))
    throw IoError(in.path(), "parameter count does not match layer dims");
  in.get_array(std::span<double>(net.parameters().data(), net.parameters().size()));
}

/// "MNET" checkpoint of a single network.
inline void save_mlp(const Mlp<double>& net, const std::string& path) {
  io::BinaryWriter out(path);
  out.magic("MNET");
  out.put<std::uint32_t>(kMnetVersion);
  write_mlp_layout(out, net);
  write_mlp_params(out, net);
  out.close();
}

inline Mlp<double> load_mlp(const std::string& path) {
  io::BinaryReader in(path);
  in.expect_magic("MNET");
  const auto version = in.get<std::uint32_t>();
  if (version != kMnetVersion) throw IoError(path, "unsupported MNET version");
  Mlp<double> net = read_mlp_layout(in);
  read_mlp_params(in, net);
  return net;
}

}  // namespace windsteer::nn

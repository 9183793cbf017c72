#include "windsteer/turbwind/box_io.hpp"

#include <cstdio>
#include <span>

#include "windsteer/binary_io.hpp"

namespace windsteer::turbwind {

void save_box(const TurbulenceBox& box, const std::string& path) {
  io::BinaryWriter out(path);
  out.magic("TBOX");
  out.put<std::uint32_t>(kBoxFormatVersion);
  out.put<std::uint32_t>(static_cast<std::uint32_t>(box.nx));
  out.put<std::uint32_t>(static_cast<std::uint32_t>(box.ny));
  out.put<std::uint32_t>(static_cast<std::uint32_t>(box.nz));
  out.put(box.dx);
  out.put(box.dy);
  out.put(box.dz);
  out.put(box.sigma_u);
  out.put<std::uint64_t>(box.id);
  for (const auto& g : box.grid) out.put_array(std::span<const float>(g));
  out.close();
}

TurbulenceBox load_box(const std::string& path) {
  io::BinaryReader in(path);
  in.expect_magic("TBOX");
  const auto version = in.get<std::uint32_t>();
  if (version != kBoxFormatVersion)
    throw IoError(path, "unsupported TBOX version " + std::to_string(version));
  TurbulenceBox box;
  box.nx = static_cast<int>(in.get<std::uint32_t>());
  box.ny = static_cast<int>(in.get<std::uint32_t>());
  box.nz = static_cast<int>(in.get<std::uint32_t>());
  box.dx = in.get<double>();
  box.dy = in.get<double>();
  box.dz = in.get<double>();
  box.sigma_u = in.get<double>();
  box.id = in.get<std::uint64_t>();
  if (box.nx < 2 || box.ny < 2 || box.nz < 2 || box.nx > (1 << 20) ||
      box.ny > 4096 || box.nz > 4096)
    throw IoError(path, "implausible TBOX lattice dimensions");
  for (auto& g : box.grid) {
    g.resize(box.size());
    in.get_array(std::span<float>(g));
  }
  return box;
}

std::string box_filename(std::uint64_t id) {
  char name[64];
  std::snprintf(name, sizeof(name), "box_%04llu.tbox",
                static_cast<unsigned long long>(id));
  return name;
}

}  // namespace windsteer::turbwind

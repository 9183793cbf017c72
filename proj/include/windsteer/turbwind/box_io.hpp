#pragma once

#include <cstdint>
#include <string>

#include "windsteer/turbwind/types.hpp"

namespace windsteer::turbwind {

inline constexpr std::uint32_t kBoxFormatVersion = 1;

/// Writes the TBOX format: "TBOX", u32 version, u32 nx ny nz, f64 dx dy dz,
/// f64 sigma_u, u64 id, then the u, v, w f32 arrays in x-major order.
void save_box(const TurbulenceBox& box, const std::string& path);
TurbulenceBox load_box(const std::string& path);

/// Canonical file name inside a pool directory, e.g. "box_0007.tbox".
std::string box_filename(std::uint64_t id);

}  // namespace windsteer::turbwind

#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "windsteer/turbwind/types.hpp"

namespace windsteer::turbwind {

/// Shape of the synthetic spectrum. Each component is filtered white noise
/// with 3-D density (1 + (L k)^2)^(-11/6), which gives a -5/3 inertial range
/// in every 1-D cut. Length scales follow the Kaimal ratios 8.1 / 2.7 / 0.66
/// times the turbulence scale parameter.
struct SpectrumParams {
  double scale_parameter = 42.0;
  std::array<double, 3> length_ratio = {8.1, 2.7, 0.66};
  std::array<double, 3> sigma_ratio = {1.0, 0.8, 0.5};
};

/// Shortest box that still gives a full DEL window of non-repeating inflow to
/// every turbine: farm streamwise extent + 600 s of advection.
double required_box_length(const FarmLayout& layout, const InflowSpec& spec);

/// Generates box `id` by spectral synthesis. Deterministic in (id, spec, dims).
/// Throws ConfigError when dims.length_x < required_box_length(layout, spec).
TurbulenceBox generate_turbulence_box(std::uint64_t id, const InflowSpec& spec,
                                      const LatticeSpec& dims,
                                      const FarmLayout& layout,
                                      const SpectrumParams& spectrum = {});

/// Velocity at `point` (farm frame, m) and time t under Taylor's hypothesis:
/// mean wind plus the box fluctuation at x - ws*t, trilinearly interpolated on
/// the periodic lattice.
Eigen::Vector3d freestream_at(const TurbulenceBox& box, const InflowSpec& spec,
                              double t, const Eigen::Vector3d& point);

/// Streamwise component only; the hot path of rotor sampling.
double freestream_u_at(const TurbulenceBox& box, const InflowSpec& spec,
                       double t, const Eigen::Vector3d& point);

/// Box of zero fluctuations with the same lattice, used for quiescent runs.
TurbulenceBox quiescent_box(const LatticeSpec& dims, std::uint64_t id = 0);

}  // namespace windsteer::turbwind

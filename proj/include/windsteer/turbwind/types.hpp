#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace windsteer::turbwind {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kYawLimitDeg = 30.0;
inline constexpr double kYawRateDegPerS = 0.25;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Mean inflow: speed [m/s], meteorological direction [deg], turbulence intensity.
struct InflowSpec {
  double ws = 10.0;
  double wd = 270.0;
  double ti = 0.05;

  /// Throws ConfigError naming the violated field.
  void validate() const;
};

struct FarmLayout {
  double rotor_diameter = 93.0;
  double hub_height = 80.0;
  double rated_power = 2.3e6;
  /// Turbine (x, y) coordinates in metres, one column per turbine.
  Eigen::Matrix2Xd positions;

  int n_turbines() const { return static_cast<int>(positions.cols()); }

  /// Aligned row along +x with the given spacing in rotor diameters.
  static FarmLayout aligned_row(int n_turbines = 3, double spacing_d = 6.0,
                                double rotor_diameter = 93.0);

  void validate() const;
};

/// Rotor aerodynamics for the power and thrust curves.
struct RotorModel {
  double air_density = 1.225;
  double power_coefficient = 0.48;
  double power_yaw_exponent = 1.88;
  double thrust_coefficient = 0.8;  // Ct(yaw) = ct * cos^2(yaw)
};

/// Parameters of the Gaussian-packet wake model.
struct WakeParams {
  /// Linear wake expansion rate; see expansion_rate_from_ti().
  double expansion_rate = 0.38 * 0.05 + 0.004;
  double initial_width = 0.25;        // sigma/D at the rotor
  double deflection_gain = 0.3;       // theta0 = gain * Ct * sin(yaw) * cos^2(yaw)
  double deflection_sign = 1.0;       // +1: positive yaw pushes the wake to +y
  double meander_time_constant = 30.0;
  /// Packets are dropped this many diameters past the last rotor.
  double exit_margin_d = 2.0;
};

inline double expansion_rate_from_ti(double ti) { return 0.38 * ti + 0.004; }

/// Regular lattice of a turbulence box. dx follows from length_x / (nx - 1).
struct LatticeSpec {
  int nx = 1024;
  int ny = 16;
  int nz = 16;
  double length_x = 12276.0;
  double dy = 12.0;
  double dz = 12.0;

  double dx() const { return length_x / (nx - 1); }
};

/// Frozen velocity-fluctuation field. Immutable once generated; periodic in all
/// three directions with periods nx*dx, ny*dy, nz*dz.
struct TurbulenceBox {
  std::uint64_t id = 0;
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0, dz = 0.0;
  double sigma_u = 0.0;
  /// Fluctuations, x-major: index = (ix * ny + iy) * nz + iz.
  std::array<std::vector<float>, 3> grid;

  double length_x() const { return (nx - 1) * dx; }
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(ix) * ny + iy) * nz + iz;
  }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
  /// Lateral origin: box y spans [-ny*dy/2, ny*dy/2).
  double y0() const { return -0.5 * ny * dy; }
};

}  // namespace windsteer::turbwind

#pragma once

#include <deque>
#include <vector>

#include <Eigen/Core>

#include "windsteer/turbwind/types.hpp"

namespace windsteer::turbwind {

enum Sector : int { kLeft = 0, kRight = 1, kTop = 2, kBottom = 3 };
inline constexpr int kSectors = 4;
inline constexpr int kSensorsPerSector = 15;

using SectorSpeeds = Eigen::Matrix<double, kSensorsPerSector, kSectors>;

/// Rotor-plane sensor readings of one turbine at one instant.
struct SectorSamples {
  SectorSpeeds speeds = SectorSpeeds::Zero();  // one column per Sector
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  /// Spatial turbulence estimate: population std of the 15 sensors / mean.
  Eigen::Vector4d ti = Eigen::Vector4d::Zero();
  double rotor_average = 0.0;

  /// Fills mean, ti and rotor_average from speeds.
  void summarize();
};

/// Sensor offsets from the hub in the rotor plane, (y, z) in units of the rotor
/// radius. Per sector: radii {0.3, 0.6, 0.9} x polar offsets {-36, -18, 0, 18,
/// 36} deg about the sector axis (left +y, right -y, top +z, bottom -z);
/// column index = sector * 15 + radius_index * 5 + angle_index.
const Eigen::Matrix<double, 2, kSectors * kSensorsPerSector>& sensor_offsets();

struct WakePacket {
  int source = 0;
  double emit_time = 0.0;
  double strength = 0.0;     // Ct(yaw) * cos(yaw)
  double thrust = 0.0;       // Ct(yaw)
  double yaw_at_emit = 0.0;  // deg
  double lateral_offset = 0.0;
  double filtered_v = 0.0;   // low-passed transverse velocity driving meander
  double x_position = 0.0;   // wind frame, m
};

/// Layout plus turbine and wake parameters: everything static about a farm.
struct FarmModel {
  FarmLayout layout = FarmLayout::aligned_row();
  RotorModel rotor;
  WakeParams wake;

  /// Turbine hub positions in the wind frame (x downstream, y left, z up).
  Eigen::Matrix3Xd hub_positions(const InflowSpec& spec) const;
};

struct FarmState {
  double t = 0.0;
  Eigen::VectorXd yaw;    // deg, one per turbine
  Eigen::VectorXd power;  // W
  std::vector<SectorSamples> rotor_samples;
  /// Active packets per source turbine, oldest (furthest downstream) first.
  std::vector<std::deque<WakePacket>> packets;
  /// Per-turbine low-passed transverse velocity at the hub.
  Eigen::VectorXd filtered_v;
};

/// Zero yaw, no wakes, rotors sampled at t = 0.
FarmState initial_farm_state(const TurbulenceBox& box, const InflowSpec& spec,
                             const FarmModel& model);

double thrust_coefficient(double yaw_deg, const RotorModel& rotor);

/// min(rated, 0.5 rho A Cp u^3 cos^p(yaw)).
double turbine_power(double u_eff, double yaw_deg, const FarmLayout& layout,
                     const RotorModel& rotor = {});

/// Rate-limited move toward the (clamped) command over dt_control seconds.
double apply_yaw_command(double current, double command, double dt_control);

/// Wake width sigma/D at dx metres downstream.
double wake_width(double dx, double rotor_diameter, const WakeParams& wake);
/// Centreline deficit amplitude for a given Ct*cos(yaw) and sigma/D.
double wake_amplitude(double strength, double sigma_d);
/// Lateral wake-centre displacement at dx for the emitting thrust and yaw.
double wake_deflection(double dx, double thrust, double yaw_deg,
                       double rotor_diameter, const WakeParams& wake);

/// Advances all wake packets and rotor samples by dt (in place).
void advance(FarmState& state, const TurbulenceBox& box, const InflowSpec& spec,
             const FarmModel& model, double dt);

/// Value-returning form of advance().
FarmState step_physics(const FarmState& state, const TurbulenceBox& box,
                       const InflowSpec& spec, const FarmModel& model, double dt);

SectorSamples sample_rotor_sectors(const FarmState& state,
                                   const TurbulenceBox& box,
                                   const InflowSpec& spec,
                                   const FarmModel& model, int turbine);

/// Total farm power of a state.
inline double farm_power(const FarmState& state) { return state.power.sum(); }

}  // namespace windsteer::turbwind

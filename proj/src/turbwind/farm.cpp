#include "windsteer/turbwind/farm.hpp"

#include <algorithm>
#include <cmath>

#include "windsteer/errors.hpp"
#include "windsteer/turbwind/turbulence.hpp"

namespace windsteer::turbwind {

namespace {

// sin/cos that are exact at multiples of 90 degrees, so the default 270 deg
// inflow maps the layout onto the wind frame without rounding noise.
std::pair<double, double> sincos_deg(double deg) {
  const double q = deg / 90.0;
  if (q == std::floor(q)) {
    static constexpr double s[4] = {0.0, 1.0, 0.0, -1.0};
    static constexpr double c[4] = {1.0, 0.0, -1.0, 0.0};
    const int k = ((static_cast<int>(q) % 4) + 4) % 4;
    return {s[k], c[k]};
  }
  return {std::sin(deg2rad(deg)), std::cos(deg2rad(deg))};
}

Eigen::Matrix<double, 2, kSectors * kSensorsPerSector> build_sensor_offsets() {
  Eigen::Matrix<double, 2, kSectors * kSensorsPerSector> offsets;
  const double axis_deg[kSectors] = {0.0, 180.0, 90.0, 270.0};
  const double radii[3] = {0.3, 0.6, 0.9};
  const double spread_deg[5] = {-36.0, -18.0, 0.0, 18.0, 36.0};
  for (int s = 0; s < kSectors; ++s)
    for (int r = 0; r < 3; ++r)
      for (int a = 0; a < 5; ++a) {
        const double phi = deg2rad(axis_deg[s] + spread_deg[a]);
        const int col = s * kSensorsPerSector + r * 5 + a;
        offsets(0, col) = radii[r] * std::cos(phi);
        offsets(1, col) = radii[r] * std::sin(phi);
      }
  return offsets;
}

struct WakeView {
  bool active = false;
  double strength = 0.0;
  double thrust = 0.0;
  double yaw = 0.0;
  double offset = 0.0;
};

// Interpolates the packet state of one source at streamwise position x.
WakeView wake_at(const std::deque<WakePacket>& packets, double x) {
  WakeView view;
  // Youngest packet that has reached x; its younger neighbour lies behind.
  int ahead = -1;
  for (int k = static_cast<int>(packets.size()) - 1; k >= 0; --k) {
    if (packets[k].x_position >= x) {
      ahead = k;
      break;
    }
  }
  if (ahead < 0) return view;
  const WakePacket& a = packets[ahead];
  view.active = true;
  if (ahead + 1 >= static_cast<int>(packets.size()) || a.x_position == x) {
    view.strength = a.strength;
    view.thrust = a.thrust;
    view.yaw = a.yaw_at_emit;
    view.offset = a.lateral_offset;
    return view;
  }
  const WakePacket& b = packets[ahead + 1];
  const double wa = (x - b.x_position) / (a.x_position - b.x_position);
  const double wb = 1.0 - wa;
  view.strength = wa * a.strength + wb * b.strength;
  view.thrust = wa * a.thrust + wb * b.thrust;
  view.yaw = wa * a.yaw_at_emit + wb * b.yaw_at_emit;
  view.offset = wa * a.lateral_offset + wb * b.lateral_offset;
  return view;
}

Eigen::Vector3d packet_centre(const WakePacket& p, const Eigen::Vector3d& hub,
                              const FarmModel& model) {
  const double dx = p.x_position - hub.x();
  const double defl = wake_deflection(dx, p.thrust, p.yaw_at_emit,
                                      model.layout.rotor_diameter, model.wake);
  return {p.x_position, hub.y() + defl + p.lateral_offset, hub.z()};
}

}  // namespace

void SectorSamples::summarize() {
  for (int s = 0; s < kSectors; ++s) {
    const auto col = speeds.col(s);
    const double m = col.mean();
    mean(s) = m;
    const double var = (col.array() - m).square().mean();
    ti(s) = m > 0.0 ? std::sqrt(var) / m : 0.0;
  }
  rotor_average = speeds.mean();
}

const Eigen::Matrix<double, 2, kSectors * kSensorsPerSector>& sensor_offsets() {
  static const auto offsets = build_sensor_offsets();
  return offsets;
}

FarmLayout FarmLayout::aligned_row(int n_turbines, double spacing_d,
                                   double rotor_diameter) {
  FarmLayout layout;
  layout.rotor_diameter = rotor_diameter;
  layout.positions = Eigen::Matrix2Xd::Zero(2, n_turbines);
  for (int i = 0; i < n_turbines; ++i)
    layout.positions(0, i) = i * spacing_d * rotor_diameter;
  return layout;
}

void FarmLayout::validate() const {
  if (n_turbines() < 1) throw ConfigError("[farm].n_turbines", "must be >= 1");
  if (!(rotor_diameter > 0.0))
    throw ConfigError("[farm].rotor_diameter", "must be > 0");
  if (!(hub_height > 0.5 * rotor_diameter))
    throw ConfigError("[farm].hub_height", "rotor tip would be below ground");
  if (!(rated_power > 0.0))
    throw ConfigError("[farm].rated_power", "must be > 0");
  for (int i = 1; i < n_turbines(); ++i)
    if (!(positions(0, i) > positions(0, i - 1)))
      throw ConfigError("[farm].positions",
                        "x coordinates must be strictly increasing");
}

Eigen::Matrix3Xd FarmModel::hub_positions(const InflowSpec& spec) const {
  const auto [s, c] = sincos_deg(spec.wd);
  // Direction the wind blows toward, in (east, north).
  const double fx = -s, fy = -c;
  Eigen::Matrix3Xd hubs(3, layout.n_turbines());
  for (int i = 0; i < layout.n_turbines(); ++i) {
    const double e = layout.positions(0, i), n = layout.positions(1, i);
    hubs(0, i) = fx * e + fy * n;
    hubs(1, i) = -fy * e + fx * n;
    hubs(2, i) = layout.hub_height;
  }
  return hubs;
}

double thrust_coefficient(double yaw_deg, const RotorModel& rotor) {
  const double c = std::cos(deg2rad(yaw_deg));
  return rotor.thrust_coefficient * c * c;
}

double turbine_power(double u_eff, double yaw_deg, const FarmLayout& layout,
                     const RotorModel& rotor) {
  if (u_eff <= 0.0) return 0.0;
  const double radius = 0.5 * layout.rotor_diameter;
  const double area = kPi * radius * radius;
  const double cos_yaw = std::max(0.0, std::cos(deg2rad(yaw_deg)));
  const double p = 0.5 * rotor.air_density * area * rotor.power_coefficient *
                   u_eff * u_eff * u_eff *
                   std::pow(cos_yaw, rotor.power_yaw_exponent);
  return std::min(layout.rated_power, p);
}

double apply_yaw_command(double current, double command, double dt_control) {
  const double target = std::clamp(command, -kYawLimitDeg, kYawLimitDeg);
  const double max_step = kYawRateDegPerS * dt_control;
  const double moved = current + std::clamp(target - current, -max_step, max_step);
  return std::clamp(moved, -kYawLimitDeg, kYawLimitDeg);
}

double wake_width(double dx, double rotor_diameter, const WakeParams& wake) {
  return wake.expansion_rate * dx / rotor_diameter + wake.initial_width;
}

double wake_amplitude(double strength, double sigma_d) {
  const double ratio = std::min(1.0, strength / (8.0 * sigma_d * sigma_d));
  return 1.0 - std::sqrt(1.0 - ratio);
}

double wake_deflection(double dx, double thrust, double yaw_deg,
                       double rotor_diameter, const WakeParams& wake) {
  const double g = deg2rad(yaw_deg);
  const double c = std::cos(g);
  const double theta0 = wake.deflection_gain * thrust * std::sin(g) * c * c;
  const double decay = 1.0 + 2.0 * wake.expansion_rate * dx / rotor_diameter;
  return wake.deflection_sign * theta0 * dx / decay;
}

FarmState initial_farm_state(const TurbulenceBox& box, const InflowSpec& spec,
                             const FarmModel& model) {
  const int n = model.layout.n_turbines();
  FarmState state;
  state.yaw = Eigen::VectorXd::Zero(n);
  state.power = Eigen::VectorXd::Zero(n);
  state.filtered_v = Eigen::VectorXd::Zero(n);
  state.packets.assign(n, {});
  state.rotor_samples.resize(n);
  for (int i = 0; i < n; ++i) {
    state.rotor_samples[i] = sample_rotor_sectors(state, box, spec, model, i);
    state.power(i) = turbine_power(state.rotor_samples[i].rotor_average, 0.0,
                                   model.layout, model.rotor);
  }
  return state;
}

void advance(FarmState& state, const TurbulenceBox& box, const InflowSpec& spec,
             const FarmModel& model, double dt) {
  const int n = model.layout.n_turbines();
  const Eigen::Matrix3Xd hubs = model.hub_positions(spec);
  const double last_x = hubs.row(0).maxCoeff();
  const double exit_x = last_x + model.wake.exit_margin_d * model.layout.rotor_diameter;
  const double blend = dt / model.wake.meander_time_constant;

  for (int j = 0; j < n; ++j) {
    auto& packets = state.packets[j];
    const Eigen::Vector3d hub = hubs.col(j);
    for (auto& p : packets) {
      const Eigen::Vector3d vel =
          freestream_at(box, spec, state.t, packet_centre(p, hub, model));
      p.x_position += std::max(0.0, vel.x()) * dt;
      p.filtered_v += blend * (vel.y() - p.filtered_v);
      p.lateral_offset += p.filtered_v * dt;
    }
    while (packets.size() > 2 && packets[0].x_position > exit_x &&
           packets[1].x_position >= last_x)
      packets.pop_front();

    const double v_hub = freestream_at(box, spec, state.t, hub).y();
    state.filtered_v(j) += blend * (v_hub - state.filtered_v(j));
  }

  state.t += dt;
  for (int j = 0; j < n; ++j) {
    WakePacket p;
    p.source = j;
    p.emit_time = state.t;
    p.yaw_at_emit = state.yaw(j);
    p.thrust = thrust_coefficient(state.yaw(j), model.rotor);
    p.strength = p.thrust * std::cos(deg2rad(state.yaw(j)));
    p.filtered_v = state.filtered_v(j);
    p.x_position = hubs(0, j);
    state.packets[j].push_back(p);
  }

  for (int i = 0; i < n; ++i) {
    state.rotor_samples[i] = sample_rotor_sectors(state, box, spec, model, i);
    state.power(i) = turbine_power(state.rotor_samples[i].rotor_average,
                                   state.yaw(i), model.layout, model.rotor);
  }
}

FarmState step_physics(const FarmState& state, const TurbulenceBox& box,
                       const InflowSpec& spec, const FarmModel& model, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt", "physics step must be > 0");
  FarmState next = state;
  advance(next, box, spec, model, dt);
  return next;
}

SectorSamples sample_rotor_sectors(const FarmState& state,
                                   const TurbulenceBox& box,
                                   const InflowSpec& spec,
                                   const FarmModel& model, int turbine) {
  const Eigen::Matrix3Xd hubs = model.hub_positions(spec);
  const Eigen::Vector3d hub = hubs.col(turbine);
  const double diameter = model.layout.rotor_diameter;
  const double radius = 0.5 * diameter;

  struct Deficit {
    double amplitude, y_centre, z_centre, two_sigma_sq;
  };
  std::vector<Deficit> deficits;
  for (int j = 0; j < static_cast<int>(state.packets.size()); ++j) {
    const double dx = hub.x() - hubs(0, j);
    if (!(dx > 0.0)) continue;
    const WakeView view = wake_at(state.packets[j], hub.x());
    if (!view.active) continue;
    const double sigma_d = wake_width(dx, diameter, model.wake);
    const double sigma = sigma_d * diameter;
    deficits.push_back(
        {wake_amplitude(view.strength, sigma_d),
         hubs(1, j) + wake_deflection(dx, view.thrust, view.yaw, diameter,
                                      model.wake) +
             view.offset,
         hubs(2, j), 2.0 * sigma * sigma});
  }

  const auto& offsets = sensor_offsets();
  SectorSamples samples;
  for (int col = 0; col < offsets.cols(); ++col) {
    const Eigen::Vector3d point(hub.x(), hub.y() + radius * offsets(0, col),
                                hub.z() + radius * offsets(1, col));
    const double u_free = freestream_u_at(box, spec, state.t, point);
    double sum_sq = 0.0;
    for (const Deficit& d : deficits) {
      const double dy = point.y() - d.y_centre;
      const double dz = point.z() - d.z_centre;
      const double deficit = d.amplitude * std::exp(-(dy * dy + dz * dz) / d.two_sigma_sq);
      sum_sq += deficit * deficit;
    }
    const double u = u_free * (1.0 - std::sqrt(sum_sq));
    samples.speeds(col % kSensorsPerSector, col / kSensorsPerSector) = std::max(0.0, u);
  }
  samples.summarize();
  return samples;
}

}  // namespace windsteer::turbwind

#pragma once

#include <Eigen/Core>

namespace windsteer::loads {

inline constexpr int kFeatureCount = 9;
using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;

/// Window-averaged inputs of the blade-root flapwise DEL model. Sector order:
/// left, right, top, bottom.
struct DelFeatures {
  Eigen::Vector4d ws = Eigen::Vector4d::Zero();
  Eigen::Vector4d ti = Eigen::Vector4d::Zero();
  double yaw = 0.0;

  /// [ws(4), ti(4), yaw]
  FeatureVector to_vector() const;
  static DelFeatures from_vector(const FeatureVector& v);
};

/// Analytic stand-in for the aeroelastic load database:
///   DEL = c0 U^e1 (1 + a1 TI + a2 |ws_l - ws_r| / U + a3 (g/30)^2 + a4 (g/30))
/// with U, TI the sector means and g the yaw offset in degrees.
struct OracleCoefficients {
  double c0 = 120.0;
  double e1 = 1.4;
  double a1 = 8.0;
  double a2 = 3.0;
  double a3 = 0.6;
  double a4 = 0.25;
};

/// kN m; zero when the mean sector speed is zero.
double del_oracle(const DelFeatures& f, const OracleCoefficients& k = {});

}  // namespace windsteer::loads

#include "windsteer/loads/del_oracle.hpp"

#include <cmath>

namespace windsteer::loads {

FeatureVector DelFeatures::to_vector() const {
  FeatureVector v;
  v << ws, ti, yaw;
  return v;
}

DelFeatures DelFeatures::from_vector(const FeatureVector& v) {
  DelFeatures f;
  f.ws = v.head<4>();
  f.ti = v.segment<4>(4);
  f.yaw = v(8);
  return f;
}

double del_oracle(const DelFeatures& f, const OracleCoefficients& k) {
  const double u = f.ws.mean();
  if (u <= 0.0) return 0.0;
  const double ti = f.ti.mean();
  const double asym = std::abs(f.ws(0) - f.ws(1)) / u;
  const double g = f.yaw / 30.0;
  return k.c0 * std::pow(u, k.e1) *
         (1.0 + k.a1 * ti + k.a2 * asym + k.a3 * g * g + k.a4 * g);
}

}  // namespace windsteer::loads

#pragma once

#include <memory>

#include "windsteer/env/box_pool.hpp"
#include "windsteer/env/config.hpp"
#include "windsteer/loads/surrogate.hpp"
#include "windsteer/turbwind/turbulence.hpp"

namespace windsteer::testing {

// Coarse lattice that still satisfies the box-length rule at 10 m/s.
inline turbwind::LatticeSpec small_lattice() {
  turbwind::LatticeSpec d;
  d.nx = 256;
  d.ny = 8;
  d.nz = 8;
  return d;
}

// Cheap surrogate: a few epochs are enough for tests that only need a
// positive, smooth DEL map.
inline std::shared_ptr<const loads::SurrogateNet> quick_surrogate() {
  static const auto net = [] {
    loads::SurrogateSampleSpec spec;
    spec.samples = 3000;
    spec.max_epochs = 40;
    spec.target_relative_rmse = 1.0;
    return std::make_shared<const loads::SurrogateNet>(
        loads::train_surrogate(loads::OracleCoefficients{}, spec));
  }();
  return net;
}

inline env::EnvConfig small_env_config() {
  env::EnvConfig cfg;
  cfg.lattice = small_lattice();
  cfg.n_env = 2;
  cfg.pool_size = 4;
  return cfg;
}

// In-memory pool of ids [0, count) plus any extra ids.
inline std::shared_ptr<env::BoxPool> memory_pool(const env::EnvConfig& cfg, int count,
                                                 std::initializer_list<std::uint64_t> extra = {}) {
  auto pool = std::make_shared<env::BoxPool>("/nonexistent-windsteer-pool");
  auto add = [&](std::uint64_t id) {
    pool->insert(std::make_shared<const turbwind::TurbulenceBox>(turbwind::generate_turbulence_box(
        id, cfg.inflow, cfg.lattice, cfg.farm.layout, cfg.spectrum)));
  };
  for (int id = 0; id < count; ++id) add(id);
  for (auto id : extra) add(id);
  return pool;
}

}  // namespace windsteer::testing

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "windsteer/nn/mlp.hpp"
#include "windsteer/turbwind/types.hpp"

namespace windsteer::env {

using BoxPtr = std::shared_ptr<const turbwind::TurbulenceBox>;

/// Lazily loaded, read-only set of turbulence boxes in a directory.
class BoxPool {
 public:
  explicit BoxPool(std::string directory) : directory_(std::move(directory)) {}

  /// Loads (once) and returns box `id`; IoError naming the path if missing.
  BoxPtr get(std::uint64_t id);
  /// Registers an in-memory box, bypassing the directory.
  void insert(BoxPtr box);
  std::string path_for(std::uint64_t id) const;
  const std::string& directory() const { return directory_; }

 private:
  std::string directory_;
  std::mutex mutex_;
  std::map<std::uint64_t, BoxPtr> cache_;
};

/// Draws pool ids without replacement; reshuffles (seeded) once exhausted.
class BoxSampler {
 public:
  BoxSampler(std::vector<std::uint64_t> ids, std::uint64_t seed);
  std::uint64_t next();

 private:
  std::vector<std::uint64_t> ids_;
  std::vector<std::uint64_t> order_;
  std::size_t cursor_ = 0;
  nn::Rng rng_;
};

/// Ids 0 .. pool_size-1 form the training pool.
std::vector<std::uint64_t> training_pool_ids(int pool_size);

}  // namespace windsteer::env

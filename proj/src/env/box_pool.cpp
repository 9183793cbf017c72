#include "windsteer/env/box_pool.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "windsteer/errors.hpp"
#include "windsteer/turbwind/box_io.hpp"

namespace windsteer::env {

std::string BoxPool::path_for(std::uint64_t id) const {
  return (std::filesystem::path(directory_) / turbwind::box_filename(id)).string();
}

BoxPtr BoxPool::get(std::uint64_t id) {
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  const std::string path = path_for(id);
  if (!std::filesystem::exists(path)) throw IoError(path, "turbulence box not found");
  auto box = std::make_shared<const turbwind::TurbulenceBox>(turbwind::load_box(path));
  cache_.emplace(id, box);
  return box;
}

void BoxPool::insert(BoxPtr box) {
  std::lock_guard lock(mutex_);
  cache_[box->id] = std::move(box);
}

BoxSampler::BoxSampler(std::vector<std::uint64_t> ids, std::uint64_t seed)
    : ids_(std::move(ids)), rng_(seed) {
  if (ids_.empty()) throw ConfigError("[paths].pool_size", "box pool is empty");
}

std::uint64_t BoxSampler::next() {
  if (cursor_ == order_.size()) {
    order_ = ids_;
    std::shuffle(order_.begin(), order_.end(), rng_);
    cursor_ = 0;
  }
  return order_[cursor_++];
}

std::vector<std::uint64_t> training_pool_ids(int pool_size) {
  std::vector<std::uint64_t> ids(pool_size);
  std::iota(ids.begin(), ids.end(), std::uint64_t{0});
  return ids;
}

}  // namespace windsteer::env

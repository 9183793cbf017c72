#pragma once

#include <cstdint>
#include <vector>

#include "windsteer/env/vec_env.hpp"
#include "windsteer/isac/agent.hpp"

namespace windsteer::isac {

/// Fixed-capacity ring of joint transitions. Each slot holds every agent's
/// observation and action plus the shared reward; agents read their own slice.
class ReplayBuffer {
 public:
  ReplayBuffer(int capacity, int n_agents, int obs_dim, std::uint64_t seed);

  void add(const env::Transition& t);
  int size() const { return size_; }
  int capacity() const { return capacity_; }
  int cursor() const { return cursor_; }
  int n_agents() const { return n_agents_; }

  /// Uniform indices over the filled region.
  std::vector<int> sample_indices(int batch);
  /// Agent `agent`'s (o_i, a_i, r, o_i') for the given slots.
  Batch gather(int agent, const std::vector<int>& indices) const;
  Batch sample(int agent, int batch) { return gather(agent, sample_indices(batch)); }

 private:
  int capacity_;
  int n_agents_;
  int obs_dim_;
  int size_ = 0;
  int cursor_ = 0;
  Matrix obs_;       // (obs_dim * n_agents) x capacity
  Matrix next_obs_;
  Matrix actions_;   // n_agents x capacity
  RowVector reward_;
  RowVector terminal_;
  nn::Rng rng_;
};

}  // namespace windsteer::isac

#include "windsteer/isac/replay.hpp"

#include <random>

#include "windsteer/errors.hpp"

namespace windsteer::isac {

ReplayBuffer::ReplayBuffer(int capacity, int n_agents, int obs_dim, std::uint64_t seed)
    : capacity_(capacity), n_agents_(n_agents), obs_dim_(obs_dim), rng_(seed) {
  if (capacity <= 0) throw ConfigError("[training].replay_capacity", "must be positive");
  obs_ = Matrix::Zero(obs_dim * n_agents, capacity);
  next_obs_ = Matrix::Zero(obs_dim * n_agents, capacity);
  actions_ = Matrix::Zero(n_agents, capacity);
  reward_ = RowVector::Zero(capacity);
  terminal_ = RowVector::Zero(capacity);
}

void ReplayBuffer::add(const env::Transition& t) {
  if (t.obs.cols() != n_agents_ || t.next_obs.cols() != n_agents_ ||
      t.actions.size() != n_agents_)
    throw ShapeError("transition does not match the replay's agent count");
  for (int i = 0; i < n_agents_; ++i) {
    obs_.block(i * obs_dim_, cursor_, obs_dim_, 1) = t.obs.col(i);
    next_obs_.block(i * obs_dim_, cursor_, obs_dim_, 1) = t.next_obs.col(i);
  }
  actions_.col(cursor_) = t.actions;
  reward_(cursor_) = t.reward.r_total;
  terminal_(cursor_) = 0.0;  // truncation only; the task is continuing
  cursor_ = (cursor_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

std::vector<int> ReplayBuffer::sample_indices(int batch) {
  if (size_ == 0) throw TrainingError("cannot sample from an empty replay buffer");
  std::uniform_int_distribution<int> pick(0, size_ - 1);
  std::vector<int> idx(batch);
  for (auto& i : idx) i = pick(rng_);
  return idx;
}

Batch ReplayBuffer::gather(int agent, const std::vector<int>& indices) const {
  const int n = static_cast<int>(indices.size());
  Batch b;
  b.obs.resize(obs_dim_, n);
  b.next_obs.resize(obs_dim_, n);
  b.action.resize(n);
  b.reward.resize(n);
  b.terminal.resize(n);
  const int row = agent * obs_dim_;
  for (int j = 0; j < n; ++j) {
    const int k = indices[j];
    b.obs.col(j) = obs_.block(row, k, obs_dim_, 1);
    b.next_obs.col(j) = next_obs_.block(row, k, obs_dim_, 1);
    b.action(j) = actions_(agent, k);
    b.reward(j) = reward_(k);
    b.terminal(j) = terminal_(k);
  }
  return b;
}

}  // namespace windsteer::isac

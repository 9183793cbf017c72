#include "windsteer/env/vec_env.hpp"

#include <exception>
#include <thread>

#include "windsteer/errors.hpp"

namespace windsteer::env {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](int i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const int workers = std::min(threads, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) run(i);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < n; i += workers) run(i);
      });
  }
  for (int i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    const std::string where = "environment " + std::to_string(i) + ": ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const IoError& e) {
      throw IoError(e.path(), where + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(e.field(), where + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(where + e.what());
    }
  }
}

VecEnv::VecEnv(EnvConfig config, std::shared_ptr<const loads::SurrogateNet> surrogate,
               std::shared_ptr<BoxPool> pool)
    : config_(std::move(config)),
      pool_(std::move(pool)),
      sampler_(training_pool_ids(config_.pool_size), config_.seed) {
  for (int i = 0; i < config_.n_env; ++i) envs_.emplace_back(config_, surrogate);
  obs_.resize(config_.n_env);
}

const std::vector<Observations>& VecEnv::reset() {
  std::vector<BoxPtr> boxes(size());
  for (int i = 0; i < size(); ++i) {
    const auto id = sampler_.next();
    box_history_.push_back(id);
    boxes[i] = pool_->get(id);
  }
  parallel_for(size(), config_.threads, [&](int i) { obs_[i] = envs_[i].reset(boxes[i]); });
  return obs_;
}

std::vector<Transition> VecEnv::step(const std::vector<Eigen::VectorXd>& actions) {
  if (static_cast<int>(actions.size()) != size())
    throw ShapeError("VecEnv::step expects one action vector per environment");
  std::vector<Transition> out(size());
  parallel_for(size(), config_.threads, [&](int i) {
    StepResult r = envs_[i].step(actions[i]);
    out[i].obs = obs_[i];
    out[i].actions = actions[i];
    out[i].reward = r.reward;
    out[i].next_obs = std::move(r.obs);
    out[i].truncated = r.truncated;
  });

  std::vector<int> to_reset;
  std::vector<BoxPtr> boxes(size());
  for (int i = 0; i < size(); ++i) {
    obs_[i] = out[i].next_obs;
    if (!out[i].truncated) continue;
    const auto id = sampler_.next();
    box_history_.push_back(id);
    boxes[i] = pool_->get(id);
    to_reset.push_back(i);
  }
  parallel_for(static_cast<int>(to_reset.size()), config_.threads, [&](int k) {
    const int i = to_reset[k];
    obs_[i] = envs_[i].reset(boxes[i]);
  });
  return out;
}

}  // namespace windsteer::env

#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "windsteer/nn/adam.hpp"
#include "windsteer/nn/mlp.hpp"
#include "windsteer/nn/squashed_gaussian.hpp"

namespace windsteer::isac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

struct AgentSpec {
  int obs_dim = 8;
  int hidden = 64;
  double lr = 3e-4;
  double alpha_lr = 3e-4;
  double initial_alpha = 0.1;
  /// When set, the temperature is fixed to this value and never updated.
  std::optional<double> fixed_alpha;
  nn::SquashedGaussianHead head;
};

/// One turbine's learner: actor, twin critics with polyak targets, and the
/// entropy temperature with their optimizer states.
struct AgentNets {
  nn::Mlp<double> actor;  // obs -> (mean, raw log-std)
  nn::Mlp<double> q1, q2;  // (obs, action / scale) -> Q
  nn::Mlp<double> q1_target, q2_target;
  nn::SquashedGaussianHead head;
  double log_alpha = 0.0;
  bool learn_alpha = true;

  nn::AdamState<double> actor_opt, q1_opt, q2_opt, alpha_opt;

  double alpha() const { return std::exp(log_alpha); }
};

AgentNets make_agent(const AgentSpec& spec, nn::Rng& rng);

/// One agent's slice of a replay sample. Columns are samples; actions are in
/// degrees.
struct Batch {
  Matrix obs;       // obs_dim x B
  RowVector action;  // 1 x B
  RowVector reward;  // 1 x B
  Matrix next_obs;  // obs_dim x B
  RowVector terminal;  // 1 x B, always zero for truncations
  int size() const { return static_cast<int>(obs.cols()); }
};

/// Actor outputs for a set of observations and fixed standard-normal noise.
struct PolicySample {
  RowVector mean, raw_log_std, noise;
  RowVector squashed, action, log_prob;
  std::vector<nn::ActionSample> samples;
};

PolicySample sample_policy(const AgentNets& agent, const Matrix& obs, const RowVector& noise);
/// Deterministic action offset + scale * tanh(mean), degrees.
RowVector mean_action(const AgentNets& agent, const Matrix& obs);

/// Critic input: observation rows stacked over the action divided by the head scale.
Matrix critic_input(const AgentNets& agent, const Matrix& obs, const RowVector& action_deg);

/// Bellman targets y = r + g (1 - terminal) (min Q'(o', a') - alpha log pi(a'|o'))
/// for next actions reparameterised with `next_noise`.
RowVector critic_targets(const AgentNets& agent, const Batch& batch, double gamma,
                         const RowVector& next_noise);

struct CriticLosses {
  double q1 = 0.0;
  double q2 = 0.0;
};

/// Squared-error regression of both critics onto the targets, then one
/// optimizer step each.
CriticLosses critic_update(AgentNets& agent, const Batch& batch, double gamma,
                           const RowVector& next_noise);
CriticLosses critic_update(AgentNets& agent, const Batch& batch, double gamma, nn::Rng& rng);

struct ActorResult {
  double loss = 0.0;
  RowVector log_prob;  // of the reparameterised actions, before the step
  Vector gradient;     // d loss / d actor params
};

/// Loss and gradient of mean(alpha log pi(a~|o) - min(Q1, Q2)(o, a~)) with the
/// critics frozen. Does not modify the agent.
ActorResult actor_loss_and_gradient(const AgentNets& agent, const Matrix& obs,
                                    const RowVector& noise);
ActorResult actor_update(AgentNets& agent, const Batch& batch, const RowVector& noise);
ActorResult actor_update(AgentNets& agent, const Batch& batch, nn::Rng& rng);

/// Gradient step in log_alpha on alpha * mean(-log_prob - target_entropy). Returns alpha.
double temperature_update(AgentNets& agent, const RowVector& log_prob, double target_entropy);

/// Polyak averaging of both target critics.
void target_update(AgentNets& agent, double tau);

RowVector standard_normal_row(int n, nn::Rng& rng);

}  // namespace windsteer::isac

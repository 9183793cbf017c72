#include "windsteer/isac/agent.hpp"

#include <cmath>
#include <random>

#include "windsteer/errors.hpp"

namespace windsteer::isac {

using nn::Activation;

AgentNets make_agent(const AgentSpec& spec, nn::Rng& rng) {
  if (spec.hidden <= 0) throw ConfigError("[training].hidden", "must be positive");
  AgentNets a;
  const int h = spec.hidden;
  a.actor = nn::Mlp<double>::random({spec.obs_dim, h, h, 2},
                                    {Activation::kTanh, Activation::kTanh, Activation::kIdentity},
                                    rng);
  const std::vector<Activation> critic_acts = {Activation::kRelu, Activation::kRelu,
                                               Activation::kIdentity};
  a.q1 = nn::Mlp<double>::random({spec.obs_dim + 1, h, h, 1}, critic_acts, rng);
  a.q2 = nn::Mlp<double>::random({spec.obs_dim + 1, h, h, 1}, critic_acts, rng);
  a.q1_target = a.q1;
  a.q2_target = a.q2;
  a.head = spec.head;
  a.learn_alpha = !spec.fixed_alpha.has_value();
  const double alpha0 = spec.fixed_alpha.value_or(spec.initial_alpha);
  if (!(alpha0 > 0.0)) throw ConfigError("[training].alpha", "temperature must be positive");
  a.log_alpha = std::log(alpha0);
  a.actor_opt = nn::AdamState<double>(a.actor.parameter_count(), spec.lr);
  a.q1_opt = nn::AdamState<double>(a.q1.parameter_count(), spec.lr);
  a.q2_opt = nn::AdamState<double>(a.q2.parameter_count(), spec.lr);
  a.alpha_opt = nn::AdamState<double>(1, spec.alpha_lr);
  return a;
}

RowVector standard_normal_row(int n, nn::Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RowVector out(n);
  for (int i = 0; i < n; ++i) out(i) = normal(rng);
  return out;
}

namespace {

PolicySample sample_from_outputs(const AgentNets& agent, const Matrix& out,
                                 const RowVector& noise) {
  const int n = static_cast<int>(out.cols());
  if (noise.size() != n) throw ShapeError("policy noise must have one entry per sample");
  PolicySample p;
  p.mean = out.row(0);
  p.raw_log_std = out.row(1);
  p.noise = noise;
  p.squashed.resize(n);
  p.action.resize(n);
  p.log_prob.resize(n);
  p.samples.resize(n);
  for (int j = 0; j < n; ++j) {
    p.samples[j] = nn::sample_action(agent.head, p.mean(j), p.raw_log_std(j), noise(j));
    p.squashed(j) = p.samples[j].squashed;
    p.action(j) = p.samples[j].action;
    p.log_prob(j) = p.samples[j].log_prob;
  }
  return p;
}

Matrix stack(const Matrix& obs, const RowVector& scaled_action) {
  Matrix x(obs.rows() + 1, obs.cols());
  x.topRows(obs.rows()) = obs;
  x.bottomRows(1) = scaled_action;
  return x;
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

PolicySample sample_policy(const AgentNets& agent, const Matrix& obs, const RowVector& noise) {
  return sample_from_outputs(agent, agent.actor.forward(obs), noise);
}

RowVector mean_action(const AgentNets& agent, const Matrix& obs) {
  const Matrix out = agent.actor.forward(obs);
  return (agent.head.offset + agent.head.scale * out.row(0).array().tanh()).matrix();
}

Matrix critic_input(const AgentNets& agent, const Matrix& obs, const RowVector& action_deg) {
  return stack(obs, (action_deg.array() - agent.head.offset) / agent.head.scale);
}

RowVector critic_targets(const AgentNets& agent, const Batch& batch, double gamma,
                         const RowVector& next_noise) {
  const PolicySample next = sample_policy(agent, batch.next_obs, next_noise);
  const Matrix x = stack(batch.next_obs, next.squashed);
  const RowVector q = agent.q1_target.forward(x).row(0).cwiseMin(agent.q2_target.forward(x).row(0));
  const RowVector soft = q - agent.alpha() * next.log_prob;
  return batch.reward.array() + gamma * (1.0 - batch.terminal.array()) * soft.array();
}

CriticLosses critic_update(AgentNets& agent, const Batch& batch, double gamma,
                           const RowVector& next_noise) {
  const RowVector y = critic_targets(agent, batch, gamma, next_noise);
  const Matrix x = critic_input(agent, batch.obs, batch.action);
  const double n = batch.size();
  CriticLosses losses;
  auto regress = [&](nn::Mlp<double>& q, nn::AdamState<double>& opt) {
    nn::MlpTape<double> tape;
    const RowVector err = q.forward(x, tape).row(0) - y;
    const double loss = err.squaredNorm() / n;
    const auto grads = q.backward(tape, (2.0 / n) * err);
    if (finite(loss)) nn::adam_step(opt, q.parameters(), grads.params);
    return loss;
  };
  losses.q1 = regress(agent.q1, agent.q1_opt);
  losses.q2 = regress(agent.q2, agent.q2_opt);
  return losses;
}

CriticLosses critic_update(AgentNets& agent, const Batch& batch, double gamma, nn::Rng& rng) {
  return critic_update(agent, batch, gamma, standard_normal_row(batch.size(), rng));
}

ActorResult actor_loss_and_gradient(const AgentNets& agent, const Matrix& obs,
                                    const RowVector& noise) {
  const int n = static_cast<int>(obs.cols());
  nn::MlpTape<double> actor_tape, t1, t2;
  const Matrix out = agent.actor.forward(obs, actor_tape);
  const PolicySample p = sample_from_outputs(agent, out, noise);
  const Matrix x = stack(obs, p.squashed);
  const RowVector q1 = agent.q1.forward(x, t1).row(0);
  const RowVector q2 = agent.q2.forward(x, t2).row(0);
  const double alpha = agent.alpha();

  ActorResult r;
  RowVector up1 = RowVector::Zero(n), up2 = RowVector::Zero(n);
  double loss = 0.0;
  for (int j = 0; j < n; ++j) {
    const bool first = q1(j) <= q2(j);
    loss += alpha * p.log_prob(j) - (first ? q1(j) : q2(j));
    (first ? up1 : up2)(j) = -1.0 / n;
  }
  r.loss = loss / n;
  r.log_prob = p.log_prob;

  // Only the action input's gradient is used; critic parameter grads are discarded.
  const Matrix dx = agent.q1.backward(t1, up1).input + agent.q2.backward(t2, up2).input;
  Matrix upstream(2, n);
  for (int j = 0; j < n; ++j) {
    const auto g = nn::head_backward(agent.head, p.samples[j], p.raw_log_std(j),
                                     dx(obs.rows(), j), alpha / n);
    upstream(0, j) = g.mean;
    upstream(1, j) = g.raw_log_std;
  }
  r.gradient = agent.actor.backward(actor_tape, upstream).params;
  return r;
}

ActorResult actor_update(AgentNets& agent, const Batch& batch, const RowVector& noise) {
  ActorResult r = actor_loss_and_gradient(agent, batch.obs, noise);
  if (finite(r.loss)) nn::adam_step(agent.actor_opt, agent.actor.parameters(), r.gradient);
  return r;
}

ActorResult actor_update(AgentNets& agent, const Batch& batch, nn::Rng& rng) {
  return actor_update(agent, batch, standard_normal_row(batch.size(), rng));
}

double temperature_update(AgentNets& agent, const RowVector& log_prob, double target_entropy) {
  if (!agent.learn_alpha || log_prob.size() == 0) return agent.alpha();
  // loss = alpha * mean(-log_prob - target_entropy), differentiated in log_alpha
  Vector grad(1);
  grad(0) = agent.alpha() * (-log_prob.array() - target_entropy).mean();
  Vector param(1);
  param(0) = agent.log_alpha;
  nn::adam_step(agent.alpha_opt, param, grad);
  agent.log_alpha = param(0);
  return agent.alpha();
}

void target_update(AgentNets& agent, double tau) {
  nn::polyak_update(agent.q1_target, agent.q1, tau);
  nn::polyak_update(agent.q2_target, agent.q2, tau);
}

}  // namespace windsteer::isac

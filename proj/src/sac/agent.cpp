#include "antix/sac/agent.hpp"

#include <cmath>

namespace antix::sac {

using nets::Network;

namespace {

void require_frozen(const rnd::RndModel* rnd, const char* who) {
  if (rnd != nullptr && !rnd->frozen()) throw ContractViolation(std::string(who) + ": RND model must be frozen");
}

void check_finite(Scalar x, const std::string& what, std::int64_t step) {
  if (!std::isfinite(x)) throw NumericalError(what + " is not finite at step " + std::to_string(step));
}

}  // namespace

void SacConfig::validate() const {
  if (!(gamma > 0 && gamma <= 1)) throw ValidationError("gamma must lie in (0, 1], got " + std::to_string(gamma));
  if (!(tau > 0 && tau <= 1)) throw ValidationError("tau must lie in (0, 1], got " + std::to_string(tau));
  if (!(alpha_actor >= 0) || !(alpha_critic >= 0)) throw ValidationError("alpha_actor and alpha_critic must be >= 0");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (train_steps < 0) throw ValidationError("train_steps must be >= 0");
  if (!(actor_lr > 0) || !(critic_lr > 0) || !(beta_lr > 0)) throw ValidationError("learning rates must be > 0");
  if (!(init_beta > 0)) throw ValidationError("init_beta must be > 0");
  if (num_critics < 2) throw ValidationError("num_critics must be >= 2");
  if (hidden_dim < 1 || num_layers < 2) throw ValidationError("need hidden_dim >= 1 and num_layers >= 2");
}

nets::NetSpec CriticSet::critic_spec(Index s_dim, Index a_dim, Index hidden_dim, Index num_layers) {
  nets::NetSpec spec;
  spec.s_dim = s_dim;
  spec.a_dim = a_dim;
  spec.hidden_dim = hidden_dim;
  spec.num_layers = num_layers;
  spec.out_dim = 1;
  spec.fusion = nets::FusionKind::Concat;
  spec.use_layer_norm = true;
  return spec;
}

CriticSet CriticSet::build(Index s_dim, Index a_dim, Index hidden_dim, Index num_layers, Index n, Rng& rng) {
  if (n < 2) throw ValidationError("critic set needs at least 2 critics");
  CriticSet set;
  const auto spec = critic_spec(s_dim, a_dim, hidden_dim, num_layers);
  for (Index i = 0; i < n; ++i) {
    set.critics_.push_back(Network::build(spec, rng));
    set.targets_.push_back(set.critics_.back());
  }
  return set;
}

Var CriticSet::min_q(Tape& tape, const Var& s, const Var& a, Grad mode) {
  Var q = critics_[0].forward(tape, s, a, mode);
  for (std::size_t i = 1; i < critics_.size(); ++i) q = minimum(q, critics_[i].forward(tape, s, a, mode));
  return q;
}

Var CriticSet::min_target_q(Tape& tape, const Var& s, const Var& a) {
  Var q = targets_[0].forward(tape, s, a, Grad::Frozen);
  for (std::size_t i = 1; i < targets_.size(); ++i) q = minimum(q, targets_[i].forward(tape, s, a, Grad::Frozen));
  return q;
}

std::vector<ColVector> CriticSet::q_values(const Matrix& s, const Matrix& a) {
  std::vector<ColVector> out;
  for (Network& c : critics_) out.emplace_back(c.predict(s, a).col(0));
  return out;
}

void soft_update(const Network& source, Network& target, Scalar tau) {
  if (!(tau >= 0 && tau <= 1)) throw ValidationError("soft_update: tau must lie in [0, 1]");
  auto src = source.parameters();
  auto dst = target.parameters();
  if (src.size() != dst.size()) throw DimensionError("soft_update: parameter lists differ");
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i]->value.rows() != dst[i]->value.rows() || src[i]->value.cols() != dst[i]->value.cols())
      throw DimensionError("soft_update: shape mismatch for '" + src[i]->name + "'");
    dst[i]->value = (1 - tau) * dst[i]->value + tau * src[i]->value;
  }
}

void soft_update(CriticSet& set, Scalar tau) {
  for (Index i = 0; i < set.size(); ++i) soft_update(set.critics()[i], set.targets()[i], tau);
}

SacAgent SacAgent::create(Index s_dim, Index a_dim, const SacConfig& config, Rng& rng) {
  config.validate();
  SacAgent agent;
  agent.config = config;
  agent.policy = Policy::build(s_dim, a_dim, config.hidden_dim, config.num_layers, rng);
  agent.critics = CriticSet::build(s_dim, a_dim, config.hidden_dim, config.num_layers, config.num_critics, rng);
  agent.temperature.log_beta.value(0, 0) = std::log(config.init_beta);
  agent.actor_opt = Adam(agent.policy.parameters(), {.lr = config.actor_lr});
  for (Network& c : agent.critics.critics()) agent.critic_opts.emplace_back(c.parameters(), AdamConfig{.lr = config.critic_lr});
  agent.beta_opt = Adam({&agent.temperature.log_beta}, {.lr = config.beta_lr});
  return agent;
}

ColVector td_target_with_noise(const data::Batch& batch, SacAgent& agent, rnd::RndModel* rnd, const Matrix& noise) {
  require_frozen(rnd, "td_target");
  const SacConfig& cfg = agent.config;
  Tape tape;
  Var s2 = tape.constant(batch.s_next);
  auto next = agent.policy.sample_with_noise(tape, s2, noise, Grad::Frozen);
  ColVector inner = agent.critics.min_target_q(tape, s2, next.action).value().col(0) -
                    agent.temperature.beta() * next.log_prob.value().col(0);
  if (rnd != nullptr) inner -= cfg.alpha_critic * rnd->bonus_values(batch.s_next, next.action.value());
  const ColVector not_done = ColVector::Ones(batch.size()) - batch.done;
  return batch.r + cfg.gamma * not_done.cwiseProduct(inner);
}

ColVector td_target(const data::Batch& batch, SacAgent& agent, rnd::RndModel* rnd, Rng& rng) {
  return td_target_with_noise(batch, agent, rnd, standard_normal(batch.size(), agent.a_dim(), rng));
}

Scalar CriticStats::mean_loss() const {
  Scalar total = 0;
  for (Scalar l : losses) total += l;
  return losses.empty() ? Scalar(0) : total / static_cast<Scalar>(losses.size());
}

CriticStats critic_update(const data::Batch& batch, SacAgent& agent, const ColVector& y) {
  if (y.size() != batch.size()) throw DimensionError("critic_update: target length does not match batch");
  CriticStats stats;
  Tape tape;
  Var s = tape.constant(batch.s);
  Var a = tape.constant(batch.a);
  Var target = tape.constant(Matrix(y));
  Var total;
  for (Index i = 0; i < agent.critics.size(); ++i) {
    Network& critic = agent.critics.critics()[i];
    critic.zero_grad();
    Var q = critic.forward(tape, s, a, Grad::Track);
    stats.max_abs_q = std::max(stats.max_abs_q, q.value().cwiseAbs().maxCoeff());
    Var loss = mean(square(q - target));
    if (!std::isfinite(loss.item())) throw NumericalError("critic " + std::to_string(i) + " loss is not finite");
    stats.losses.push_back(loss.item());
    total = i == 0 ? loss : total + loss;
  }
  // Critic parameters are disjoint, so one sweep over the summed loss gives each its own gradient.
  tape.backward(total);
  for (Index i = 0; i < agent.critics.size(); ++i)
    agent.critic_opts[i].step(agent.critics.critics()[i].parameters());
  return stats;
}

ActorStats actor_update_with_noise(const data::Batch& batch, SacAgent& agent, rnd::RndModel* rnd,
                                   const Matrix& noise) {
  require_frozen(rnd, "actor_update");
  ActorStats stats;
  agent.policy.zero_grad();
  Tape tape;
  Var s = tape.constant(batch.s);
  auto smp = agent.policy.sample_with_noise(tape, s, noise, Grad::Track);
  Var q = agent.critics.min_q(tape, s, smp.action, Grad::Frozen);
  stats.max_abs_q = q.value().cwiseAbs().maxCoeff();
  Var per_row = agent.temperature.beta() * smp.log_prob - q;
  if (rnd != nullptr) {
    Var b = rnd->bonus(tape, s, smp.action);
    stats.mean_bonus = b.value().mean();
    per_row = per_row + agent.config.alpha_actor * b;
  }
  Var loss = mean(per_row);
  stats.loss = loss.item();
  if (!std::isfinite(stats.loss)) throw NumericalError("actor loss is not finite");
  stats.log_prob = smp.log_prob.value().col(0);
  tape.backward(loss);
  agent.actor_opt.step(agent.policy.parameters());
  return stats;
}

ActorStats actor_update(const data::Batch& batch, SacAgent& agent, rnd::RndModel* rnd, Rng& rng) {
  return actor_update_with_noise(batch, agent, rnd, standard_normal(batch.size(), agent.a_dim(), rng));
}

Scalar temperature_gradient(const ColVector& log_prob, Scalar target_entropy) {
  return -(log_prob.mean() + target_entropy);
}

Scalar temperature_update(const ColVector& log_prob, TemperatureState& temp, Adam& opt, const SacConfig& config,
                          Index a_dim) {
  if (!config.learn_beta) return temp.beta();
  temp.log_beta.grad(0, 0) = temperature_gradient(log_prob, config.entropy_target(a_dim));
  opt.step({&temp.log_beta});
  return temp.beta();
}

Scalar action_mse(Policy& policy, const Matrix& s, const Matrix& a) {
  return (policy.mean_action(s) - a).array().square().mean();
}

MetricRow sac_step(const data::Dataset& ds, SacAgent& agent, rnd::RndModel* rnd, Rng& rng) {
  const data::Batch batch = ds.sample(agent.config.batch_size, rng);
  const ColVector y = td_target(batch, agent, rnd, rng);
  const CriticStats cs = critic_update(batch, agent, y);
  const ActorStats as = actor_update(batch, agent, rnd, rng);
  MetricRow row;
  row.step = agent.step;
  row.beta = temperature_update(as.log_prob, agent.temperature, agent.beta_opt, agent.config, agent.a_dim());
  soft_update(agent.critics, agent.config.tau);
  row.critic_loss = cs.mean_loss();
  row.actor_loss = as.loss;
  row.mean_policy_bonus = as.mean_bonus;
  if (rnd != nullptr) row.mean_data_bonus = rnd->bonus_values(batch.s, batch.a).mean();
  row.action_mse = action_mse(agent.policy, batch.s, batch.a);
  row.max_abs_q = std::max(cs.max_abs_q, as.max_abs_q);
  row.entropy = as.entropy();
  check_finite(row.critic_loss, "critic loss", agent.step);
  check_finite(row.beta, "beta", agent.step);
  ++agent.step;
  return row;
}

void continue_sac_rnd(const data::Dataset& ds, SacAgent& agent, rnd::RndModel* rnd, std::int64_t until_step, Rng& rng,
                      std::vector<MetricRow>& log, const StepCallback& on_step) {
  if (ds.empty()) throw ContractViolation("train_sac_rnd: empty dataset");
  if (ds.s_dim() != agent.s_dim() || ds.a_dim() != agent.a_dim())
    throw DimensionError("train_sac_rnd: dataset dimensions do not match the agent");
  require_frozen(rnd, "train_sac_rnd");
  while (agent.step < until_step) {
    const std::int64_t at = agent.step;
    MetricRow row;
    try {
      row = sac_step(ds, agent, rnd, rng);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (training step " + std::to_string(at) + ")");
    }
    log.push_back(row);
    if (on_step) on_step(row, agent);
  }
}

SacResult train_sac_rnd(const data::Dataset& ds, rnd::RndModel* rnd, const SacConfig& config, Rng& rng,
                        const StepCallback& on_step) {
  SacResult out{SacAgent::create(ds.s_dim(), ds.a_dim(), config, rng), {}};
  out.log.reserve(static_cast<std::size_t>(config.train_steps));
  continue_sac_rnd(ds, out.agent, rnd, config.train_steps, rng, out.log, on_step);
  return out;
}

void BcConfig::validate() const {
  if (train_steps < 0 || batch_size < 1) throw ValidationError("bc: train_steps must be >= 0 and batch_size >= 1");
  if (!(lr > 0) || !(beta_lr > 0) || !(init_beta > 0)) throw ValidationError("bc: lr, beta_lr and init_beta must be > 0");
  if (hidden_dim < 1 || num_layers < 2) throw ValidationError("bc: need hidden_dim >= 1 and num_layers >= 2");
}

BcResult train_bc_rnd(const data::Dataset& ds, rnd::RndModel& rnd, const BcConfig& config, Rng& rng) {
  config.validate();
  if (ds.empty()) throw ContractViolation("train_bc_rnd: empty dataset");
  require_frozen(&rnd, "train_bc_rnd");
  BcResult out;
  out.policy = Policy::build(ds.s_dim(), ds.a_dim(), config.hidden_dim, config.num_layers, rng);
  out.temperature.log_beta.value(0, 0) = std::log(config.init_beta);
  Adam opt(out.policy.parameters(), {.lr = config.lr});
  Adam beta_opt({&out.temperature.log_beta}, {.lr = config.beta_lr});
  SacConfig temp_cfg;
  temp_cfg.learn_beta = config.learn_beta;
  temp_cfg.target_entropy = config.target_entropy;

  const Index n = config.eval_rows > 0 ? std::min<Index>(config.eval_rows, static_cast<Index>(ds.size()))
                                       : static_cast<Index>(ds.size());
  const Matrix eval_s = ds.states().topRows(n);
  const Matrix eval_a = ds.actions().topRows(n);
  out.initial_action_mse = action_mse(out.policy, eval_s, eval_a);

  out.log.reserve(static_cast<std::size_t>(config.train_steps));
  for (std::int64_t step = 0; step < config.train_steps; ++step) {
    const data::Batch batch = ds.sample(config.batch_size, rng);
    out.policy.zero_grad();
    Tape tape;
    Var s = tape.constant(batch.s);
    auto smp = out.policy.sample(tape, s, rng, Grad::Track);
    Var b = rnd.bonus(tape, s, smp.action);
    Var loss = mean(out.temperature.beta() * smp.log_prob + b);
    MetricRow row;
    row.step = step;
    row.actor_loss = loss.item();
    check_finite(row.actor_loss, "bc-rnd loss", step);
    row.mean_policy_bonus = b.value().mean();
    tape.backward(loss);
    opt.step(out.policy.parameters());
    const ColVector log_prob = smp.log_prob.value().col(0);
    row.beta = temperature_update(log_prob, out.temperature, beta_opt, temp_cfg, ds.a_dim());
    row.entropy = -log_prob.mean();
    row.mean_data_bonus = rnd.bonus_values(batch.s, batch.a).mean();
    row.action_mse = action_mse(out.policy, batch.s, batch.a);
    out.log.push_back(row);
  }
  out.final_action_mse = action_mse(out.policy, eval_s, eval_a);
  Tape tape;
  auto smp = out.policy.sample(tape, tape.constant(eval_s), rng, Grad::Frozen);
  out.final_policy_bonus = rnd.bonus_values(eval_s, smp.action.value()).mean();
  out.final_data_bonus = rnd.bonus_values(eval_s, eval_a).mean();
  return out;
}

}  // namespace antix::sac

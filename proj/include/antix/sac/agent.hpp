#pragma once

#include "antix/autodiff/adam.hpp"
#include "antix/data/dataset.hpp"
#include "antix/nets/network.hpp"
#include "antix/rnd/rnd.hpp"
#include "antix/sac/policy.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace antix::sac {

struct SacConfig {
  Scalar gamma = 0.99;
  Scalar tau = 5e-3;
  Scalar alpha_actor = 0;
  Scalar alpha_critic = 0;
  /// Defaults to −a_dim when unset.
  std::optional<Scalar> target_entropy;
  Index batch_size = 256;
  std::int64_t train_steps = 100000;
  Scalar actor_lr = 1e-3;
  Scalar critic_lr = 1e-3;
  Scalar beta_lr = 1e-3;
  Scalar init_beta = 1;
  bool learn_beta = true;
  Index num_critics = 2;
  Index hidden_dim = 256;
  Index num_layers = 4;

  void validate() const;
  Scalar entropy_target(Index a_dim) const { return target_entropy.value_or(-static_cast<Scalar>(a_dim)); }
};

/// Learnable log of the entropy coefficient β.
struct TemperatureState {
  Parameter log_beta{"log_beta", Matrix::Zero(1, 1)};
  Scalar beta() const { return std::exp(log_beta.value(0, 0)); }
};

/// N concatenation critics with layer norm, plus frozen target copies.
class CriticSet {
 public:
  CriticSet() = default;
  static CriticSet build(Index s_dim, Index a_dim, Index hidden_dim, Index num_layers, Index n, Rng& rng);

  Index size() const { return static_cast<Index>(critics_.size()); }
  std::vector<nets::Network>& critics() { return critics_; }
  std::vector<nets::Network>& targets() { return targets_; }
  const std::vector<nets::Network>& critics() const { return critics_; }
  const std::vector<nets::Network>& targets() const { return targets_; }

  /// Elementwise minimum over critics (or targets) of Q_i(s, a), [B x 1].
  Var min_q(Tape& tape, const Var& s, const Var& a, Grad mode);
  Var min_target_q(Tape& tape, const Var& s, const Var& a);
  /// One column per critic.
  std::vector<ColVector> q_values(const Matrix& s, const Matrix& a);

  static nets::NetSpec critic_spec(Index s_dim, Index a_dim, Index hidden_dim, Index num_layers);

 private:
  std::vector<nets::Network> critics_;
  std::vector<nets::Network> targets_;
};

/// target ← (1 − tau)·target + tau·source, parameter by parameter.
void soft_update(const nets::Network& source, nets::Network& target, Scalar tau);
void soft_update(CriticSet& set, Scalar tau);

struct SacAgent {
  SacConfig config;
  Policy policy;
  CriticSet critics;
  TemperatureState temperature;
  Adam actor_opt;
  std::vector<Adam> critic_opts;
  Adam beta_opt;
  std::int64_t step = 0;

  static SacAgent create(Index s_dim, Index a_dim, const SacConfig& config, Rng& rng);
  Index s_dim() const { return policy.s_dim(); }
  Index a_dim() const { return policy.a_dim(); }
};

struct MetricRow {
  std::int64_t step = 0;
  Scalar critic_loss = 0;
  Scalar actor_loss = 0;
  Scalar beta = 0;
  Scalar mean_policy_bonus = 0;
  Scalar mean_data_bonus = 0;
  Scalar action_mse = 0;
  Scalar max_abs_q = 0;
  Scalar entropy = 0;
  bool operator==(const MetricRow&) const = default;
};

/// y = r + γ(1 − done)[min_i Q̄_i(s′, a′) − β log π(a′|s′) − α_critic b(s′, a′)]
/// with a′ drawn from `noise`. `rnd` may be null (no bonus term).
ColVector td_target_with_noise(const data::Batch& batch, SacAgent& agent, rnd::RndModel* rnd,
                               const Matrix& noise);
ColVector td_target(const data::Batch& batch, SacAgent& agent, rnd::RndModel* rnd, Rng& rng);

struct CriticStats {
  std::vector<Scalar> losses;
  Scalar max_abs_q = 0;
  Scalar mean_loss() const;
};
/// One Adam step per critic on mean (Q_i(s, a) − y)².
CriticStats critic_update(const data::Batch& batch, SacAgent& agent, const ColVector& y);

struct ActorStats {
  Scalar loss = 0;
  Scalar mean_bonus = 0;
  Scalar max_abs_q = 0;
  /// log π(ã|s) per row, reused by the temperature step.
  ColVector log_prob;
  Scalar entropy() const { return -log_prob.mean(); }
};
/// Descent on mean(β log π(ã|s) − min_i Q_i(s, ã) + α_actor b(s, ã)).
ActorStats actor_update_with_noise(const data::Batch& batch, SacAgent& agent, rnd::RndModel* rnd,
                                   const Matrix& noise);
ActorStats actor_update(const data::Batch& batch, SacAgent& agent, rnd::RndModel* rnd, Rng& rng);

/// Gradient of −log_beta·mean(log π + target_entropy) wrt log_beta.
Scalar temperature_gradient(const ColVector& log_prob, Scalar target_entropy);
/// Descends that loss; returns the new β. No-op when learn_beta is off.
Scalar temperature_update(const ColVector& log_prob, TemperatureState& temp, Adam& opt,
                          const SacConfig& config, Index a_dim);

/// Mean over elements of (tanh μ(s) − a)².
Scalar action_mse(Policy& policy, const Matrix& s, const Matrix& a);

/// One full iteration: sample → td_target → critics → actor → temperature → targets.
MetricRow sac_step(const data::Dataset& ds, SacAgent& agent, rnd::RndModel* rnd, Rng& rng);

using StepCallback = std::function<void(const MetricRow&, SacAgent&)>;

struct SacResult {
  SacAgent agent;
  std::vector<MetricRow> log;
};

/// Runs config.train_steps iterations from a fresh agent. `rnd` may be null,
/// otherwise it must be frozen.
SacResult train_sac_rnd(const data::Dataset& ds, rnd::RndModel* rnd, const SacConfig& config, Rng& rng,
                        const StepCallback& on_step = {});
/// Continues an existing agent up to `until_step`.
void continue_sac_rnd(const data::Dataset& ds, SacAgent& agent, rnd::RndModel* rnd, std::int64_t until_step,
                      Rng& rng, std::vector<MetricRow>& log, const StepCallback& on_step = {});

struct BcConfig {
  std::int64_t train_steps = 20000;
  Index batch_size = 256;
  Scalar lr = 1e-3;
  Scalar beta_lr = 1e-3;
  Scalar init_beta = 1;
  bool learn_beta = true;
  std::optional<Scalar> target_entropy;
  Index hidden_dim = 256;
  Index num_layers = 4;
  /// Rows for the initial/final whole-data action MSE; 0 means all.
  Index eval_rows = 0;

  void validate() const;
};

struct BcResult {
  Policy policy;
  TemperatureState temperature;
  std::vector<MetricRow> log;
  Scalar initial_action_mse = 0;
  Scalar final_action_mse = 0;
  Scalar final_policy_bonus = 0;
  Scalar final_data_bonus = 0;
};

/// Actor-only descent on mean(β log π(ã|s) + b(s, ã)). Final bonus values
/// are averaged over the evaluation rows.
BcResult train_bc_rnd(const data::Dataset& ds, rnd::RndModel& rnd, const BcConfig& config, Rng& rng);

}  // namespace antix::sac

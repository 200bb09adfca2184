#pragma once

#include "antix/autodiff/adam.hpp"
#include "antix/data/dataset.hpp"
#include "antix/nets/network.hpp"
#include "antix/rnd/running_stat.hpp"

#include <vector>

namespace antix::rnd {

/// Frozen random prior, trainable predictor and the running scale of the
/// pretraining error.
class RndModel {
 public:
  RndModel() = default;
  RndModel(const nets::NetSpec& predictor_spec, const nets::NetSpec& prior_spec, Rng& rng);

  /// Predictor is an exact copy of the prior, so every bonus is zero.
  static RndModel null_model(const nets::NetSpec& spec, Rng& rng);

  /// Mean over the batch of ‖f(s,a) − f̄(s,a)‖². Gradients reach the
  /// predictor only. Requires an unfrozen model.
  Var loss(Tape& tape, const Var& s, const Var& a);

  /// Per-sample squared error [B x 1] with both networks read-only; a
  /// gradient can flow into s and a.
  Var error(Tape& tape, const Var& s, const Var& a);

  /// error / running std, [B x 1]. Requires a frozen model.
  Var bonus(Tape& tape, const Var& s, const Var& a);

  ColVector error_values(const Matrix& s, const Matrix& a);
  ColVector bonus_values(const Matrix& s, const Matrix& a);

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  nets::Network& prior() { return prior_; }
  nets::Network& predictor() { return predictor_; }
  const nets::Network& prior() const { return prior_; }
  const nets::Network& predictor() const { return predictor_; }
  RunningStat& running_stat() { return stat_; }
  const RunningStat& running_stat() const { return stat_; }

  /// Restores internal state, e.g. from a checkpoint.
  void set_state(RunningStat stat, bool frozen) {
    stat_ = stat;
    frozen_ = frozen;
  }

 private:
  nets::Network prior_;
  nets::Network predictor_;
  RunningStat stat_;
  bool frozen_ = false;
};

struct PretrainConfig {
  std::int64_t steps = 20000;
  Index batch_size = 256;
  AdamConfig adam{};
  /// Rows used for the initial/final full-data loss; 0 means the whole dataset.
  Index eval_rows = 0;
};

struct PretrainResult {
  RndModel model;
  Scalar initial_loss = 0;
  Scalar final_loss = 0;
  /// Per step: batch loss and the batch mean of the scaled bonus for the
  /// dataset actions under the running std at that step.
  std::vector<Scalar> loss_curve;
  std::vector<Scalar> data_bonus_curve;
};

/// Trains the predictor toward the frozen prior on dataset (s, a) pairs,
/// accumulating per-sample squared errors into the running statistic, then
/// freezes the model. Predictor depth must be at least the prior depth.
PretrainResult pretrain_rnd(const data::Dataset& ds, const nets::NetSpec& predictor_spec,
                            const nets::NetSpec& prior_spec, const PretrainConfig& config, Rng& rng);

/// Population standard deviation of critic outputs, one value per row.
/// Each entry of `q_values` is one critic's [B x 1] prediction.
ColVector ensemble_disagreement(const std::vector<ColVector>& q_values);

/// Canonical prior (FiLM, penultimate) and predictor (bilinear, first layer).
nets::NetSpec default_prior_spec(Index s_dim, Index a_dim);
nets::NetSpec default_predictor_spec(Index s_dim, Index a_dim);

}  // namespace antix::rnd

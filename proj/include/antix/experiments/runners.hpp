#pragma once

#include "antix/experiments/config.hpp"
#include "antix/experiments/csv.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace antix::experiments {

/// Independent stream for one purpose ("data", "rnd", "train", ...) of a run.
Rng stream(std::uint64_t seed, std::string_view purpose);

/// Builds the configured dataset (toy corner, point mass, or a saved file).
data::Dataset make_dataset(const ExperimentConfig& cfg);

/// Pretrains an RND with the given predictor and prior variants.
rnd::PretrainResult pretrain(const ExperimentConfig& cfg, const data::Dataset& ds, const Variant& predictor,
                             const Variant& prior, Rng& rng);

/// Writes config.txt into `out`. Every runner calls this first; an empty
/// path disables all file output.
void write_config_echo(const ExperimentConfig& cfg, const std::filesystem::path& out);

struct BonusSummary {
  std::string estimator;
  std::string perturbation;
  Scalar mean = 0;
  Scalar std = 0;
  Scalar hist_lo = 0;
  Scalar hist_hi = 0;
  std::vector<std::int64_t> histogram;
};

struct DiscriminativityResult {
  /// Perturbation labels in severity order: dataset, gaussian σ ascending, uniform.
  std::vector<std::string> perturbations;
  std::vector<BonusSummary> rows;
  const BonusSummary& at(const std::string& estimator, const std::string& perturbation) const;
  std::vector<Scalar> means(const std::string& estimator) const;
};

using BonusFn = std::function<ColVector(const Matrix& s, const Matrix& a)>;

/// Mean, std and a shared-range histogram of every estimator on the dataset
/// actions, each Gaussian perturbation in `sigmas` and uniform actions.
DiscriminativityResult summarize_bonuses(const data::Dataset& ds,
                                         const std::vector<std::pair<std::string, BonusFn>>& estimators,
                                         std::vector<Scalar> sigmas, Index bins, Rng& rng);

/// Bonus statistics for dataset actions and each perturbation, for the RND
/// and (when ensemble_size >= 2) the disagreement of a trained critic ensemble.
DiscriminativityResult run_discriminativity(const ExperimentConfig& cfg, const std::filesystem::path& out);

struct BonusMinimizationRun {
  Variant prior;
  /// (a) dataset-action bonus during pretraining, (b) policy-action bonus and
  /// (c) action MSE during actor training, one entry per step.
  std::vector<Scalar> pretrain_data_bonus;
  std::vector<Scalar> policy_bonus;
  std::vector<Scalar> action_mse;
  /// Whole-dataset values after training.
  Scalar final_data_bonus = 0;
  Scalar final_policy_bonus = 0;
  Scalar initial_action_mse = 0;
  Scalar final_action_mse = 0;
};

/// Pretrain, then train_bc_rnd, for every prior in prior_sweep.
std::vector<BonusMinimizationRun> run_bonus_minimization(const ExperimentConfig& cfg,
                                                         const std::filesystem::path& out);

struct FieldGrid {
  Index state = 0;
  Variant prior;
  Matrix actions;    // [n² x 2]
  Matrix anti_grad;  // [n² x 2], −∂b/∂a
  ColVector bonus;
  Scalar score = 0;
};

struct GradientFieldResult {
  std::vector<FieldGrid> grids;
  /// Smoothness score per prior label, one entry per toy state.
  std::map<std::string, std::vector<Scalar>> scores;
};

/// Evaluates −∂b/∂a of an RND on a res x res grid over [-1, 1]² for state `state`.
FieldGrid gradient_field(rnd::RndModel& model, Index state, Index s_dim, Index resolution);
/// Mean cosine between each cell's anti-gradient and the unit vector toward
/// `center`; cells at the center or with a zero gradient are skipped.
Scalar centroid_cosine(const Matrix& actions, const Matrix& anti_grad, const Eigen::Vector2d& center);

/// Two RNDs on the toy corner dataset, sharing the predictor variant and
/// differing in the prior, with their anti-gradient fields.
GradientFieldResult run_gradient_field(const ExperimentConfig& cfg, const std::filesystem::path& out);

struct AblationCell {
  Variant predictor;
  Variant prior;
  Scalar action_mse = 0;
  Scalar initial_action_mse = 0;
  Scalar final_policy_bonus = 0;
  Scalar final_data_bonus = 0;
  bool skipped = false;
  std::string reason;
};

struct AblationResult {
  std::vector<Variant> predictors;
  std::vector<Variant> priors;
  std::vector<AblationCell> cells;  // row-major: predictor x prior
  const AblationCell& cell(std::size_t predictor, std::size_t prior) const;
};

/// Pretraining plus critic-free actor training for each (predictor, prior) pair.
AblationResult run_conditioning_ablation(const ExperimentConfig& cfg, const std::filesystem::path& out);

struct EvalPoint {
  std::int64_t step = 0;
  Scalar mean_return = 0;
  Scalar normalized_score = 0;
};

struct OfflineRlReport {
  bool plain_sac = false;
  data::ScoreRefs refs;
  std::vector<EvalPoint> evals;
  std::vector<sac::MetricRow> log;
  Scalar final_return = 0;
  Scalar final_score = 0;
  Scalar max_abs_q = 0;
  /// max |r| over the dataset.
  Scalar r_max = 0;
  Scalar mean_policy_bonus = 0;
  Scalar mean_data_bonus = 0;
};

/// Pretrain RND → train_sac_rnd with periodic deterministic evaluation.
/// With plain_sac the RND is skipped and both alphas are zero.
OfflineRlReport run_offline_rl(const ExperimentConfig& cfg, const std::filesystem::path& out, bool plain_sac = false);

/// Mean return of the deterministic policy tanh(μ(s)).
data::EvalResult evaluate_policy(sac::Policy& policy, const data::PointMassEnv& env, int episodes, std::uint64_t seed);

}  // namespace antix::experiments

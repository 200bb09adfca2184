#include "antix/rnd/rnd.hpp"

#include <cmath>

namespace antix::rnd {

using nets::FusionKind;
using nets::NetSpec;
using nets::Network;
using nets::Placement;

RndModel::RndModel(const NetSpec& predictor_spec, const NetSpec& prior_spec, Rng& rng) {
  if (predictor_spec.s_dim != prior_spec.s_dim || predictor_spec.a_dim != prior_spec.a_dim ||
      predictor_spec.out_dim != prior_spec.out_dim)
    throw ValidationError("rnd: predictor and prior must agree on s_dim, a_dim and out_dim");
  if (predictor_spec.num_layers < prior_spec.num_layers)
    throw ValidationError("rnd: predictor depth " + std::to_string(predictor_spec.num_layers) +
                          " is below prior depth " + std::to_string(prior_spec.num_layers));
  prior_ = Network::build(prior_spec, rng);
  predictor_ = Network::build(predictor_spec, rng);
}

RndModel RndModel::null_model(const NetSpec& spec, Rng& rng) {
  RndModel m;
  m.prior_ = Network::build(spec, rng);
  m.predictor_ = m.prior_;
  m.frozen_ = true;
  return m;
}

Var RndModel::loss(Tape& tape, const Var& s, const Var& a) {
  if (frozen_) throw ContractViolation("rnd: loss() on a frozen model");
  if (s.rows() == 0) throw ContractViolation("rnd: empty batch");
  Var pred = predictor_.forward(tape, s, a, Grad::Track);
  Var target = prior_.forward(tape, s, a, Grad::Frozen);
  return mean(row_sum(square(pred - target)));
}

Var RndModel::error(Tape& tape, const Var& s, const Var& a) {
  Var pred = predictor_.forward(tape, s, a, Grad::Frozen);
  Var target = prior_.forward(tape, s, a, Grad::Frozen);
  return row_sum(square(pred - target));
}

Var RndModel::bonus(Tape& tape, const Var& s, const Var& a) {
  if (!frozen_) throw ContractViolation("rnd: bonus() requires a frozen model");
  return error(tape, s, a) * (Scalar(1) / stat_.scale());
}

ColVector RndModel::error_values(const Matrix& s, const Matrix& a) {
  Tape tape;
  return error(tape, tape.constant(s), tape.constant(a)).value();
}

ColVector RndModel::bonus_values(const Matrix& s, const Matrix& a) {
  if (!frozen_) throw ContractViolation("rnd: bonus() requires a frozen model");
  return error_values(s, a) / stat_.scale();
}

PretrainResult pretrain_rnd(const data::Dataset& ds, const NetSpec& predictor_spec,
                            const NetSpec& prior_spec, const PretrainConfig& config, Rng& rng) {
  if (ds.empty()) throw ContractViolation("pretrain_rnd: empty dataset");
  if (config.steps < 0 || config.batch_size < 1)
    throw ValidationError("pretrain_rnd: steps must be >= 0 and batch_size >= 1");
  PretrainResult out;
  out.model = RndModel(predictor_spec, prior_spec, rng);
  RndModel& m = out.model;

  Matrix eval_s = ds.states();
  Matrix eval_a = ds.actions();
  if (config.eval_rows > 0 && config.eval_rows < eval_s.rows()) {
    eval_s = ds.states().topRows(config.eval_rows);
    eval_a = ds.actions().topRows(config.eval_rows);
  }
  out.initial_loss = m.error_values(eval_s, eval_a).mean();

  Adam opt(m.predictor().parameters(), config.adam);
  out.loss_curve.reserve(static_cast<std::size_t>(config.steps));
  out.data_bonus_curve.reserve(static_cast<std::size_t>(config.steps));
  for (std::int64_t step = 0; step < config.steps; ++step) {
    const data::Batch batch = ds.sample(config.batch_size, rng);
    m.predictor().zero_grad();
    Tape tape;
    Var pred = m.predictor().forward(tape, tape.constant(batch.s), tape.constant(batch.a), Grad::Track);
    Var target = m.prior().forward(tape, tape.constant(batch.s), tape.constant(batch.a), Grad::Frozen);
    Var per_sample = row_sum(square(pred - target));
    Var loss = mean(per_sample);
    const Scalar loss_value = loss.item();
    if (!std::isfinite(loss_value))
      throw NumericalError("pretrain_rnd: non-finite loss at step " + std::to_string(step));
    m.running_stat().push_all(per_sample.value());
    out.loss_curve.push_back(loss_value);
    out.data_bonus_curve.push_back(loss_value / m.running_stat().scale());
    tape.backward(loss);
    opt.step(m.predictor().parameters());
  }
  out.final_loss = m.error_values(eval_s, eval_a).mean();
  m.freeze();
  return out;
}

ColVector ensemble_disagreement(const std::vector<ColVector>& q_values) {
  if (q_values.size() < 2) throw ContractViolation("ensemble_disagreement: need at least 2 critics");
  const Index n = q_values.front().size();
  ColVector mu = ColVector::Zero(n);
  for (const auto& q : q_values) {
    if (q.size() != n) throw DimensionError("ensemble_disagreement: critic outputs differ in length");
    mu += q;
  }
  mu /= static_cast<Scalar>(q_values.size());
  ColVector var = ColVector::Zero(n);
  for (const auto& q : q_values) var += (q - mu).array().square().matrix();
  var /= static_cast<Scalar>(q_values.size());
  return var.array().sqrt().matrix();
}

NetSpec default_prior_spec(Index s_dim, Index a_dim) {
  NetSpec s;
  s.s_dim = s_dim;
  s.a_dim = a_dim;
  s.fusion = FusionKind::Film;
  s.placement = Placement::PenultimateLayer;
  return s;
}

NetSpec default_predictor_spec(Index s_dim, Index a_dim) {
  NetSpec s;
  s.s_dim = s_dim;
  s.a_dim = a_dim;
  s.fusion = FusionKind::BilinearSimplified;
  s.placement = Placement::FirstLayer;
  return s;
}

}  // namespace antix::rnd

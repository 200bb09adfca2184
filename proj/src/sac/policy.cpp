#include "antix/sac/policy.hpp"

#include <numbers>

namespace antix::sac {

Matrix standard_normal(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  fill_normal(m, Scalar(1), rng);
  return m;
}

Policy Policy::build(Index s_dim, Index a_dim, Index hidden_dim, Index num_layers, Rng& rng) {
  if (num_layers < 2 || hidden_dim < 1 || a_dim < 1 || s_dim < 1)
    throw ValidationError("policy: need num_layers >= 2, hidden_dim >= 1 and non-empty s/a");
  Policy p;
  p.s_dim_ = s_dim;
  p.a_dim_ = a_dim;
  Index in = s_dim;
  for (Index i = 0; i + 1 < num_layers; ++i) {
    p.trunk_.emplace_back("policy.trunk" + std::to_string(i), in, hidden_dim);
    p.trunk_.back().init_fan_in(rng);
    in = hidden_dim;
  }
  p.mean_head_ = LinearParams("policy.mean", in, a_dim);
  p.mean_head_.init_fan_in(rng);
  p.log_std_head_ = LinearParams("policy.log_std", in, a_dim);
  p.log_std_head_.init_fan_in(rng);
  return p;
}

Policy::Heads Policy::heads(Tape& tape, const Var& s, Grad mode) {
  if (s.cols() != s_dim_) throw DimensionError("policy: state " + shape_str(s.value()) + " expected s_dim=" + std::to_string(s_dim_));
  Var h = s;
  for (LinearParams& layer : trunk_) h = relu(linear_forward(tape, h, layer, mode));
  return {linear_forward(tape, h, mean_head_, mode),
          clamp(linear_forward(tape, h, log_std_head_, mode), kLogStdMin, kLogStdMax)};
}

Policy::Sample Policy::sample_with_noise(Tape& tape, const Var& s, const Matrix& noise, Grad mode) {
  if (noise.rows() != s.rows() || noise.cols() != a_dim_)
    throw DimensionError("policy: noise " + shape_str(noise) + " for batch " + shape_str(s.value()));
  Heads hd = heads(tape, s, mode);
  Var xi = tape.constant(noise);
  Var pre = hd.mean + exp(hd.log_std) * xi;
  Var a = tanh(pre);
  // log N(pre; μ, σ) = −ξ²/2 − log σ − log(2π)/2, then the tanh Jacobian.
  const Scalar half_log_2pi = 0.5 * std::log(2 * std::numbers::pi);
  Matrix gauss_const = (-0.5 * noise.array().square() - half_log_2pi).matrix();
  Var log_gauss = tape.constant(std::move(gauss_const)) - hd.log_std;
  Var log_jac = log(add_scalar(-square(a), 1 + kTanhLogProbEps));
  return {a, row_sum(log_gauss - log_jac), pre};
}

Policy::Sample Policy::sample(Tape& tape, const Var& s, Rng& rng, Grad mode) {
  return sample_with_noise(tape, s, standard_normal(s.rows(), a_dim_, rng), mode);
}

Matrix Policy::mean_action(const Matrix& s) {
  Tape tape;
  return tanh(heads(tape, tape.constant(s), Grad::Frozen).mean).value();
}

std::vector<Parameter*> Policy::parameters() {
  std::vector<Parameter*> out;
  for (LinearParams& l : trunk_) l.collect(out);
  mean_head_.collect(out);
  log_std_head_.collect(out);
  return out;
}

void Policy::zero_grad() {
  for (Parameter* p : parameters()) p->zero_grad();
}

}  // namespace antix::sac

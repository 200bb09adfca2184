#include "antix/autodiff/adam.hpp"

#include <cmath>

namespace antix {

Adam::Adam(const std::vector<Parameter*>& params, AdamConfig config) : config_(config) {
  for (const Parameter* p : params) {
    state_.first_moment.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    state_.second_moment.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void adam_update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v, std::int64_t step,
                 const AdamConfig& c) {
  m = c.beta1 * m + (1 - c.beta1) * grad;
  v = c.beta2 * v + (1 - c.beta2) * grad.cwiseProduct(grad);
  const Scalar bc1 = 1 - std::pow(c.beta1, static_cast<Scalar>(step));
  const Scalar bc2 = 1 - std::pow(c.beta2, static_cast<Scalar>(step));
  param.array() -= c.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.eps);
}

void Adam::step(const std::vector<Parameter*>& params) {
  if (params.size() != state_.first_moment.size())
    throw ContractViolation("adam: expected " + std::to_string(state_.first_moment.size()) +
                            " parameters, got " + std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter* p = params[i];
    if (p->value.rows() != state_.first_moment[i].rows() || p->value.cols() != state_.first_moment[i].cols() ||
        p->grad.rows() != p->value.rows() || p->grad.cols() != p->value.cols())
      throw DimensionError("adam: shape mismatch for parameter '" + p->name + "'");
    if (!all_finite(p->grad))
      throw NumericalError("adam: non-finite gradient in parameter '" + p->name + "' at step " +
                           std::to_string(state_.step_count + 1));
  }
  ++state_.step_count;
  for (std::size_t i = 0; i < params.size(); ++i)
    adam_update(params[i]->value, params[i]->grad, state_.first_moment[i], state_.second_moment[i],
                state_.step_count, config_);
}

}  // namespace antix

#include "antix/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace antix {
namespace {

Scalar evaluate(const LossBuilder& loss) {
  Tape tape;
  return loss(tape).item();
}

}  // namespace

GradCheckReport grad_check(std::span<Parameter* const> params, const LossBuilder& loss, Scalar eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3))
    throw ContractViolation("grad_check: eps must lie in [1e-7, 1e-3], got " + std::to_string(eps));

  for (Parameter* p : params) p->zero_grad();
  {
    Tape tape;
    tape.backward(loss(tape));
  }

  GradCheckReport report;
  for (Parameter* p : params) {
    const Matrix analytic = p->grad;
    for (Index k = 0; k < p->value.size(); ++k) {
      Scalar& entry = p->value.data()[k];
      const Scalar saved = entry;
      entry = saved + eps;
      const Scalar up = evaluate(loss);
      entry = saved - eps;
      const Scalar down = evaluate(loss);
      entry = saved;
      const Scalar numeric = (up - down) / (2 * eps);
      const Scalar a = analytic.data()[k];
      const Scalar err = std::abs(a - numeric) / std::max(Scalar(1), std::abs(a));
      if (err > report.max_relative_error || report.worst_index < 0) {
        report.max_relative_error = std::max(report.max_relative_error, err);
        report.worst_parameter = p->name;
        report.worst_index = k;
      }
    }
  }
  for (Parameter* p : params) p->zero_grad();
  return report;
}

}  // namespace antix

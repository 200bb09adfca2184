#pragma once

#include "antix/autodiff/tape.hpp"

#include <functional>
#include <span>
#include <string>

namespace antix {

/// Builds a scalar loss on a fresh tape. Parameters under test must be bound
/// with Tape::param so their gradients are tracked.
using LossBuilder = std::function<Var(Tape&)>;

struct GradCheckReport {
  Scalar max_relative_error = 0;
  std::string worst_parameter;
  Index worst_index = -1;
};

/// Compares backward() against central differences for every entry of every
/// parameter. Error per entry is |analytic - numeric| / max(1, |analytic|).
/// eps must lie in [1e-7, 1e-3]. Parameter values are restored on return.
GradCheckReport grad_check(std::span<Parameter* const> params, const LossBuilder& loss, Scalar eps);

}  // namespace antix

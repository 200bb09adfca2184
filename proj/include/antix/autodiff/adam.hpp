#pragma once

#include "antix/autodiff/tape.hpp"

#include <span>
#include <vector>

namespace antix {

struct AdamConfig {
  Scalar lr = 1e-3;
  Scalar beta1 = 0.9;
  Scalar beta2 = 0.999;
  Scalar eps = 1e-8;
};

struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::int64_t step_count = 0;
};

/// Bias-corrected Adam. The optimizer keeps only moment buffers; the
/// parameter list is passed on every step and must keep the same order and
/// shapes as at construction.
class Adam {
 public:
  Adam() = default;
  Adam(const std::vector<Parameter*>& params, AdamConfig config);

  /// Applies one update from the accumulated Parameter::grad buffers.
  /// Throws NumericalError if any gradient is non-finite; nothing is modified then.
  void step(const std::vector<Parameter*>& params);

  const AdamConfig& config() const { return config_; }
  AdamConfig& config() { return config_; }
  const AdamState& state() const { return state_; }
  AdamState& state() { return state_; }

 private:
  AdamConfig config_;
  AdamState state_;
};

/// Functional form of a single Adam update on one parameter array.
void adam_update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v, std::int64_t step,
                 const AdamConfig& config);

}  // namespace antix

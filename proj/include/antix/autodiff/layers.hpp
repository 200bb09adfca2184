#pragma once

#include "antix/autodiff/ops.hpp"

#include <vector>

namespace antix {

/// Dense affine map, weight [out x in], bias [1 x out].
struct LinearParams {
  Parameter weight;
  Parameter bias;

  LinearParams() = default;
  LinearParams(std::string name, Index in, Index out);

  Index in_dim() const { return weight.value.cols(); }
  Index out_dim() const { return weight.value.rows(); }

  /// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) on weight and bias.
  void init_fan_in(Rng& rng);
  void collect(std::vector<Parameter*>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }
};

struct LayerNormParams {
  Parameter gain;
  Parameter shift;

  LayerNormParams() = default;
  LayerNormParams(std::string name, Index width);
  void collect(std::vector<Parameter*>& out) {
    out.push_back(&gain);
    out.push_back(&shift);
  }
};

/// Selects how parameters enter a tape: tracked (gradients accumulate into
/// Parameter::grad) or frozen (read-only constants).
enum class Grad { Track, Frozen };

inline Var bind(Tape& tape, Parameter& p, Grad mode) {
  return mode == Grad::Track ? tape.param(p) : tape.frozen(p);
}

Var linear_forward(Tape& tape, const Var& x, LinearParams& p, Grad mode = Grad::Track);
Var layer_norm_forward(Tape& tape, const Var& x, LayerNormParams& p, Grad mode = Grad::Track);

/// Untaped evaluation of p.weight·x + p.bias for a single vector.
RowVector linear_eval(const RowVector& x, const LinearParams& p);

}  // namespace antix

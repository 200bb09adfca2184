#include "antix/autodiff/layers.hpp"

#include <cmath>

namespace antix {

LinearParams::LinearParams(std::string name, Index in, Index out)
    : weight(name + ".weight", Matrix::Zero(out, in)), bias(name + ".bias", Matrix::Zero(1, out)) {}

void LinearParams::init_fan_in(Rng& rng) {
  const Scalar bound = in_dim() > 0 ? 1 / std::sqrt(static_cast<Scalar>(in_dim())) : Scalar(0);
  fill_uniform(weight.value, bound, rng);
  fill_uniform(bias.value, bound, rng);
}

LayerNormParams::LayerNormParams(std::string name, Index width)
    : gain(name + ".gain", Matrix::Ones(1, width)), shift(name + ".shift", Matrix::Zero(1, width)) {}

Var linear_forward(Tape& tape, const Var& x, LinearParams& p, Grad mode) {
  return linear(x, bind(tape, p.weight, mode), bind(tape, p.bias, mode));
}

Var layer_norm_forward(Tape& tape, const Var& x, LayerNormParams& p, Grad mode) {
  return layer_norm(x, bind(tape, p.gain, mode), bind(tape, p.shift, mode));
}

RowVector linear_eval(const RowVector& x, const LinearParams& p) {
  if (x.size() != p.in_dim())
    throw DimensionError("linear: input " + shape_str(1, x.size()) + " incompatible with weight " +
                         shape_str(p.weight.value));
  return (p.weight.value * x.transpose()).transpose() + p.bias.value.row(0);
}

}  // namespace antix

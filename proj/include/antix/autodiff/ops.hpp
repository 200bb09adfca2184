#pragma once

#include "antix/autodiff/tape.hpp"

namespace antix {

// Elementwise binary ops require identical shapes.
Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator*(const Var& a, Scalar c);
Var operator*(Scalar c, const Var& a);
Var operator-(const Var& a);
Var add_scalar(const Var& a, Scalar c);

/// x + 1·rowᵀ, row is [1 x C].
Var add_row(const Var& x, const Var& row);

/// x·Wᵀ + b for a batch x [B x in], weight [out x in], bias [1 x out].
Var linear(const Var& x, const Var& weight, const Var& bias);
/// x·Wᵀ without a bias.
Var matmul_nt(const Var& x, const Var& weight);

Var relu(const Var& x);
Var tanh(const Var& x);
Var sigmoid(const Var& x);
Var exp(const Var& x);
Var log(const Var& x);
Var square(const Var& x);
/// Clamps into [lo, hi]; the gradient is zero where clamping is active.
Var clamp(const Var& x, Scalar lo, Scalar hi);
Var minimum(const Var& a, const Var& b);

Var concat_cols(const Var& a, const Var& b);
Var slice_cols(const Var& x, Index start, Index count);

/// Per-row sum, [B x C] -> [B x 1].
Var row_sum(const Var& x);
Var sum(const Var& x);
Var mean(const Var& x);

inline constexpr Scalar kLayerNormEps = 1e-5;

/// Per-row normalisation (x - mean) / sqrt(var + eps) * gain + shift.
/// gain and shift are [1 x C].
Var layer_norm(const Var& x, const Var& gain, const Var& shift, Scalar eps = kLayerNormEps);

/// out[b,k] = sum_ij s[b,i] · W3[k,i,j] · x[b,j]. The 3-D weight is stored as
/// a [s_dim x (out·x_dim)] matrix with W3[k,i,j] at (i, k·x_dim + j).
Var bilinear(const Var& s, const Var& x, const Var& weight, Index out_dim);

}  // namespace antix

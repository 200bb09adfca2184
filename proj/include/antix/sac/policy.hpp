#pragma once

#include "antix/autodiff/layers.hpp"

#include <vector>

namespace antix::sac {

inline constexpr Scalar kLogStdMin = -5;
inline constexpr Scalar kLogStdMax = 2;
inline constexpr Scalar kTanhLogProbEps = 1e-6;

/// Tanh-squashed Gaussian policy: ReLU trunk on s, then mean and log-std heads.
class Policy {
 public:
  struct Sample {
    Var action;     // tanh(μ + σ·ξ), [B x a_dim]
    Var log_prob;   // [B x 1]
    Var pre_tanh;   // μ + σ·ξ
  };

  Policy() = default;
  /// num_layers counts linear stages on the path s -> action (trunk + head).
  static Policy build(Index s_dim, Index a_dim, Index hidden_dim, Index num_layers, Rng& rng);

  /// Hidden features and the two heads (log-std already clamped).
  struct Heads {
    Var mean;
    Var log_std;
  };
  Heads heads(Tape& tape, const Var& s, Grad mode = Grad::Track);

  /// Reparameterised sample with explicit standard-normal noise ξ [B x a_dim].
  Sample sample_with_noise(Tape& tape, const Var& s, const Matrix& noise, Grad mode = Grad::Track);
  Sample sample(Tape& tape, const Var& s, Rng& rng, Grad mode = Grad::Track);

  /// tanh(μ(s)), no tape kept.
  Matrix mean_action(const Matrix& s);

  std::vector<Parameter*> parameters();
  void zero_grad();
  Index s_dim() const { return s_dim_; }
  Index a_dim() const { return a_dim_; }
  Index hidden_dim() const { return mean_head_.in_dim(); }
  Index num_layers() const { return static_cast<Index>(trunk_.size()) + 1; }

 private:
  Index s_dim_ = 0;
  Index a_dim_ = 0;
  std::vector<LinearParams> trunk_;
  LinearParams mean_head_;
  LinearParams log_std_head_;
};

Matrix standard_normal(Index rows, Index cols, Rng& rng);

}  // namespace antix::sac

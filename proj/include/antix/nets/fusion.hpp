#pragma once

#include "antix/autodiff/layers.hpp"

#include <optional>
#include <string_view>

namespace antix::nets {

enum class FusionKind { Concat, Gating, BilinearFull, BilinearSimplified, Film };
enum class Placement { FirstLayer, PenultimateLayer, LastLayer, AllLayers };

std::string_view to_string(FusionKind kind);
std::string_view to_string(Placement placement);
FusionKind parse_fusion_kind(std::string_view text);
Placement parse_placement(std::string_view text);

/// tanh(W1 x + b1) ⊙ sigmoid(W2 s + b2). `stream` projects the conditioned
/// input x (the action or a hidden activation), `gate` projects the state.
struct GatingParams {
  LinearParams stream;
  LinearParams gate;

  GatingParams() = default;
  GatingParams(const std::string& name, Index s_dim, Index x_dim, Index out_dim);
  Index out_dim() const { return stream.out_dim(); }
  void init(Rng& rng);
  void collect(std::vector<Parameter*>& out);
};

/// sᵀ W3 x + U s + V x + b. When `full` is false the U, V terms are absent.
/// W3 is stored flattened as [s_dim x (out·x_dim)], see bilinear().
struct BilinearParams {
  Parameter weight;
  std::optional<Parameter> state_term;   // U [out x s_dim]
  std::optional<Parameter> stream_term;  // V [out x x_dim]
  Parameter bias;
  Index s_dim = 0;
  Index x_dim = 0;
  Index out = 0;

  BilinearParams() = default;
  BilinearParams(const std::string& name, Index s_dim, Index x_dim, Index out_dim, bool full);
  bool full() const { return stream_term.has_value(); }
  Index out_dim() const { return out; }
  /// Entry W3[k][i][j].
  Scalar& w3(Index k, Index i, Index j) { return weight.value(i, k * x_dim + j); }
  Scalar w3(Index k, Index i, Index j) const { return weight.value(i, k * x_dim + j); }
  Matrix& u() { return state_term->value; }
  Matrix& v() { return stream_term->value; }
  void init(Rng& rng);
  void collect(std::vector<Parameter*>& out);
};

/// Linear state encoder producing (γ ‖ β), each of the modulated width.
struct FilmParams {
  LinearParams encoder;

  FilmParams() = default;
  FilmParams(const std::string& name, Index s_dim, Index width);
  Index width() const { return encoder.out_dim() / 2; }
  void init(Rng& rng) { encoder.init_fan_in(rng); }
  void collect(std::vector<Parameter*>& out) { encoder.collect(out); }
};

Var fuse_concat(const Var& s, const Var& a);
Var fuse_gating(Tape& tape, const Var& s, const Var& x, GatingParams& p, Grad mode = Grad::Track);
Var fuse_bilinear(Tape& tape, const Var& s, const Var& x, BilinearParams& p, Grad mode = Grad::Track);
/// γ(s) ⊙ h + β(s).
Var film_modulate(Tape& tape, const Var& h, const Var& s, FilmParams& p, Grad mode = Grad::Track);

}  // namespace antix::nets

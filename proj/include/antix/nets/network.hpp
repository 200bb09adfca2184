#pragma once

#include "antix/nets/fusion.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace antix::nets {

struct NetSpec {
  Index s_dim = 0;
  Index a_dim = 0;
  Index hidden_dim = 256;
  Index num_layers = 4;
  Index out_dim = 32;
  FusionKind fusion = FusionKind::Concat;
  Placement placement = Placement::FirstLayer;
  bool use_layer_norm = false;

  /// Throws ValidationError on an unusable spec or (kind, placement) pair.
  void validate() const;
  /// Human-readable one-line echo, stable across runs.
  std::string describe() const;
  bool operator==(const NetSpec&) const = default;
};

/// Linear layer whose output is modulated by a FiLM encoder of the state.
struct FilmLinear {
  LinearParams linear;
  FilmParams film;
};

struct Layer {
  std::variant<LinearParams, GatingParams, BilinearParams, FilmLinear> body;
  std::optional<LayerNormParams> norm;
  bool hidden = true;
};

/// State-action MLP with one of the fusion kinds applied at a placement.
///
/// With L = num_layers linear stages, stage i maps width in_i to out_i
/// (hidden_dim except the last, which emits out_dim). Hidden stages are
/// followed by optional layer norm and ReLU. Conditioned stages are
///   first: {0}, penultimate: {L-2}, last: {L-1}, all: {0..L-2};
/// a conditioned stage is replaced by the fusion block (gating, bilinear) or
/// has its pre-activation modulated by FiLM. Concat networks consume [s, a];
/// every other kind feeds `a` to the trunk and lets `s` in only through the
/// conditioned stages.
class Network {
 public:
  Network() = default;
  static Network build(const NetSpec& spec, Rng& rng);

  /// s [B x s_dim], a [B x a_dim] -> [B x out_dim].
  Var forward(Tape& tape, const Var& s, const Var& a, Grad mode = Grad::Track);
  /// Untaped batch evaluation.
  Matrix predict(const Matrix& s, const Matrix& a);

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t parameter_count() const;
  void zero_grad();

  const NetSpec& spec() const { return spec_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  /// Width of the first trunk stage input.
  Index trunk_input_dim() const;

  /// Parameter-wise equality (bitwise on values).
  bool same_parameters(const Network& other) const;

 private:
  NetSpec spec_;
  std::vector<Layer> layers_;
};

/// Closed form count for a concatenation MLP.
std::size_t concat_parameter_count(const NetSpec& spec);

}  // namespace antix::nets

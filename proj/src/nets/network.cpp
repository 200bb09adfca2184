#include "antix/nets/network.hpp"

#include <algorithm>
#include <sstream>

namespace antix::nets {
namespace {

std::vector<Index> conditioned_stages(const NetSpec& spec) {
  const Index L = spec.num_layers;
  switch (spec.fusion == FusionKind::Concat ? Placement::FirstLayer : spec.placement) {
    case Placement::FirstLayer: return {0};
    case Placement::PenultimateLayer: return {L - 2};
    case Placement::LastLayer: return {L - 1};
    case Placement::AllLayers: {
      std::vector<Index> all;
      for (Index i = 0; i + 1 < L; ++i) all.push_back(i);
      return all;
    }
  }
  return {};
}

std::vector<Parameter*> layer_params(Layer& layer) {
  std::vector<Parameter*> out;
  std::visit(
      [&](auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, FilmLinear>) {
          body.linear.collect(out);
          body.film.collect(out);
        } else {
          body.collect(out);
        }
      },
      layer.body);
  if (layer.norm) layer.norm->collect(out);
  return out;
}

}  // namespace

void NetSpec::validate() const {
  if (num_layers < 2) throw ValidationError("num_layers must be >= 2, got " + std::to_string(num_layers));
  if (hidden_dim < 1) throw ValidationError("hidden_dim must be >= 1");
  if (out_dim < 1) throw ValidationError("out_dim must be >= 1");
  if (s_dim < 0 || a_dim < 0) throw ValidationError("input dims must be non-negative");
  if (fusion == FusionKind::Film && placement == Placement::FirstLayer)
    throw ValidationError("FiLM modulates hidden activations; placement 'first' is not allowed");
  if (fusion != FusionKind::Concat && a_dim < 1)
    throw ValidationError("conditioned networks need a non-empty action stream");
}

std::string NetSpec::describe() const {
  std::ostringstream os;
  os << "s_dim=" << s_dim << " a_dim=" << a_dim << " hidden_dim=" << hidden_dim
     << " num_layers=" << num_layers << " out_dim=" << out_dim << " fusion=" << to_string(fusion)
     << " placement=" << to_string(placement) << " layer_norm=" << (use_layer_norm ? 1 : 0);
  return os.str();
}

Network Network::build(const NetSpec& spec, Rng& rng) {
  spec.validate();
  Network net;
  net.spec_ = spec;
  const Index L = spec.num_layers;
  const auto cond = conditioned_stages(spec);
  const bool is_cond_kind = spec.fusion != FusionKind::Concat;
  for (Index i = 0; i < L; ++i) {
    const Index in = i == 0 ? net.trunk_input_dim() : spec.hidden_dim;
    const Index out = i + 1 == L ? spec.out_dim : spec.hidden_dim;
    const std::string name = "layer" + std::to_string(i);
    const bool conditioned = is_cond_kind && std::find(cond.begin(), cond.end(), i) != cond.end();
    Layer layer;
    layer.hidden = i + 1 < L;
    if (!conditioned) {
      LinearParams p(name, in, out);
      p.init_fan_in(rng);
      layer.body = std::move(p);
    } else {
      switch (spec.fusion) {
        case FusionKind::Gating: {
          GatingParams p(name, spec.s_dim, in, out);
          p.init(rng);
          layer.body = std::move(p);
          break;
        }
        case FusionKind::BilinearFull:
        case FusionKind::BilinearSimplified: {
          BilinearParams p(name, spec.s_dim, in, out, spec.fusion == FusionKind::BilinearFull);
          p.init(rng);
          layer.body = std::move(p);
          break;
        }
        case FusionKind::Film: {
          FilmLinear p{LinearParams(name, in, out), FilmParams(name, spec.s_dim, out)};
          p.linear.init_fan_in(rng);
          p.film.init(rng);
          layer.body = std::move(p);
          break;
        }
        case FusionKind::Concat: break;
      }
    }
    if (layer.hidden && spec.use_layer_norm) layer.norm.emplace(name + ".norm", out);
    net.layers_.push_back(std::move(layer));
  }
  return net;
}

Index Network::trunk_input_dim() const {
  return spec_.fusion == FusionKind::Concat ? spec_.s_dim + spec_.a_dim : spec_.a_dim;
}

Var Network::forward(Tape& tape, const Var& s, const Var& a, Grad mode) {
  if (s.cols() != spec_.s_dim || a.cols() != spec_.a_dim || s.rows() != a.rows())
    throw DimensionError("network: inputs " + shape_str(s.value()) + ", " + shape_str(a.value()) +
                         " do not match s_dim=" + std::to_string(spec_.s_dim) +
                         " a_dim=" + std::to_string(spec_.a_dim));
  Var h = spec_.fusion == FusionKind::Concat ? fuse_concat(s, a) : a;
  for (Layer& layer : layers_) {
    h = std::visit(
        [&](auto& body) -> Var {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, LinearParams>) {
            return linear_forward(tape, h, body, mode);
          } else if constexpr (std::is_same_v<T, GatingParams>) {
            return fuse_gating(tape, s, h, body, mode);
          } else if constexpr (std::is_same_v<T, BilinearParams>) {
            return fuse_bilinear(tape, s, h, body, mode);
          } else {
            return film_modulate(tape, linear_forward(tape, h, body.linear, mode), s, body.film, mode);
          }
        },
        layer.body);
    if (layer.norm) h = layer_norm_forward(tape, h, *layer.norm, mode);
    if (layer.hidden) h = relu(h);
  }
  return h;
}

Matrix Network::predict(const Matrix& s, const Matrix& a) {
  Tape tape;
  return forward(tape, tape.constant(s), tape.constant(a), Grad::Frozen).value();
}

std::vector<Parameter*> Network::parameters() {
  std::vector<Parameter*> out;
  for (Layer& layer : layers_)
    for (Parameter* p : layer_params(layer)) out.push_back(p);
  return out;
}

std::vector<const Parameter*> Network::parameters() const {
  // collect() only hands out addresses; the copy keeps this const.
  std::vector<const Parameter*> out;
  Network& self = const_cast<Network&>(*this);
  for (Layer& layer : self.layers_)
    for (Parameter* p : layer_params(layer)) out.push_back(p);
  return out;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void Network::zero_grad() {
  for (Parameter* p : parameters()) p->zero_grad();
}

bool Network::same_parameters(const Network& other) const {
  const auto a = parameters();
  const auto b = other.parameters();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]->value.rows() != b[i]->value.rows() || a[i]->value.cols() != b[i]->value.cols())
      return false;
    if (a[i]->value != b[i]->value) return false;
  }
  return true;
}

std::size_t concat_parameter_count(const NetSpec& spec) {
  std::size_t n = 0;
  Index in = spec.s_dim + spec.a_dim;
  for (Index i = 0; i < spec.num_layers; ++i) {
    const Index out = i + 1 == spec.num_layers ? spec.out_dim : spec.hidden_dim;
    n += static_cast<std::size_t>(in * out + out);
    if (i + 1 < spec.num_layers && spec.use_layer_norm) n += static_cast<std::size_t>(2 * out);
    in = out;
  }
  return n;
}

}  // namespace antix::nets

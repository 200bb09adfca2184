#include "antix/nets/fusion.hpp"

#include <cmath>

namespace antix::nets {

std::string_view to_string(FusionKind kind) {
  switch (kind) {
    case FusionKind::Concat: return "concat";
    case FusionKind::Gating: return "gating";
    case FusionKind::BilinearFull: return "bilinear_full";
    case FusionKind::BilinearSimplified: return "bilinear";
    case FusionKind::Film: return "film";
  }
  return "?";
}

std::string_view to_string(Placement placement) {
  switch (placement) {
    case Placement::FirstLayer: return "first";
    case Placement::PenultimateLayer: return "penultimate";
    case Placement::LastLayer: return "last";
    case Placement::AllLayers: return "all";
  }
  return "?";
}

FusionKind parse_fusion_kind(std::string_view text) {
  for (FusionKind k : {FusionKind::Concat, FusionKind::Gating, FusionKind::BilinearFull,
                       FusionKind::BilinearSimplified, FusionKind::Film})
    if (text == to_string(k)) return k;
  throw ValidationError("unknown fusion kind '" + std::string(text) +
                        "' (expected concat, gating, bilinear, bilinear_full, film)");
}

Placement parse_placement(std::string_view text) {
  for (Placement p : {Placement::FirstLayer, Placement::PenultimateLayer, Placement::LastLayer,
                      Placement::AllLayers})
    if (text == to_string(p)) return p;
  throw ValidationError("unknown placement '" + std::string(text) +
                        "' (expected first, penultimate, last, all)");
}

GatingParams::GatingParams(const std::string& name, Index s_dim, Index x_dim, Index out_dim)
    : stream(name + ".stream", x_dim, out_dim), gate(name + ".gate", s_dim, out_dim) {}

void GatingParams::init(Rng& rng) {
  stream.init_fan_in(rng);
  gate.init_fan_in(rng);
}

void GatingParams::collect(std::vector<Parameter*>& out) {
  stream.collect(out);
  gate.collect(out);
}

BilinearParams::BilinearParams(const std::string& name, Index s, Index x, Index o, bool full)
    : weight(name + ".w3", Matrix::Zero(s, o * x)),
      bias(name + ".bias", Matrix::Zero(1, o)),
      s_dim(s),
      x_dim(x),
      out(o) {
  if (full) {
    state_term.emplace(name + ".u", Matrix::Zero(o, s));
    stream_term.emplace(name + ".v", Matrix::Zero(o, x));
  }
}

void BilinearParams::init(Rng& rng) {
  // Bound from the width of the conditioned stream, so that with a one-hot
  // state each output behaves like a fan-in initialised linear unit.
  const Scalar bound = 1 / std::sqrt(static_cast<Scalar>(std::max<Index>(x_dim, 1)));
  fill_uniform(weight.value, bound, rng);
  if (full()) {
    fill_uniform(state_term->value, 1 / std::sqrt(static_cast<Scalar>(std::max<Index>(s_dim, 1))), rng);
    fill_uniform(stream_term->value, bound, rng);
  }
  fill_uniform(bias.value, bound, rng);
}

void BilinearParams::collect(std::vector<Parameter*>& out_params) {
  out_params.push_back(&weight);
  if (full()) {
    out_params.push_back(&*state_term);
    out_params.push_back(&*stream_term);
  }
  out_params.push_back(&bias);
}

FilmParams::FilmParams(const std::string& name, Index s_dim, Index width)
    : encoder(name + ".film", s_dim, 2 * width) {}

Var fuse_concat(const Var& s, const Var& a) { return concat_cols(s, a); }

Var fuse_gating(Tape& tape, const Var& s, const Var& x, GatingParams& p, Grad mode) {
  if (p.stream.out_dim() != p.gate.out_dim())
    throw DimensionError("gating: stream width " + std::to_string(p.stream.out_dim()) +
                         " != gate width " + std::to_string(p.gate.out_dim()));
  return tanh(linear_forward(tape, x, p.stream, mode)) * sigmoid(linear_forward(tape, s, p.gate, mode));
}

Var fuse_bilinear(Tape& tape, const Var& s, const Var& x, BilinearParams& p, Grad mode) {
  if (s.cols() != p.s_dim || x.cols() != p.x_dim)
    throw DimensionError("bilinear: inputs " + shape_str(s.value()) + ", " + shape_str(x.value()) +
                         " do not match layer dims s=" + std::to_string(p.s_dim) +
                         " x=" + std::to_string(p.x_dim));
  Var out = add_row(bilinear(s, x, bind(tape, p.weight, mode), p.out), bind(tape, p.bias, mode));
  if (p.full()) {
    out = out + matmul_nt(s, bind(tape, *p.state_term, mode));
    out = out + matmul_nt(x, bind(tape, *p.stream_term, mode));
  }
  return out;
}

Var film_modulate(Tape& tape, const Var& h, const Var& s, FilmParams& p, Grad mode) {
  if (p.encoder.out_dim() != 2 * h.cols())
    throw DimensionError("film: encoder width " + std::to_string(p.encoder.out_dim()) +
                         " is not twice the modulated width " + std::to_string(h.cols()));
  Var enc = linear_forward(tape, s, p.encoder, mode);
  Var gamma = slice_cols(enc, 0, h.cols());
  Var beta = slice_cols(enc, h.cols(), h.cols());
  return gamma * h + beta;
}

}  // namespace antix::nets

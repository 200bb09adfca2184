#pragma once

#include "antix/data/dataset.hpp"

namespace antix::data {

struct PerturbMode {
  enum class Kind { Gaussian, UniformRandom };
  Kind kind = Kind::Gaussian;
  Scalar sigma = 0;

  static PerturbMode gaussian(Scalar sigma) { return {Kind::Gaussian, sigma}; }
  static PerturbMode uniform() { return {Kind::UniformRandom, 0}; }
  std::string label() const;
};

struct StateActionPairs {
  Matrix s;
  Matrix a;
};

/// Gaussian mode adds N(0, σ²I) to each dataset action and clips to [-1, 1];
/// uniform mode replaces actions with U([-1, 1]^a_dim). States are kept.
StateActionPairs perturb_actions(const Dataset& ds, const PerturbMode& mode, Rng& rng);

/// Same as perturb_actions but on explicit pairs.
StateActionPairs perturb_actions(const StateActionPairs& pairs, const PerturbMode& mode, Rng& rng);

}  // namespace antix::data

#include "antix/data/perturb.hpp"

#include <sstream>

namespace antix::data {

std::string PerturbMode::label() const {
  if (kind == Kind::UniformRandom) return "uniform";
  std::ostringstream os;
  os << "gaussian_" << sigma;
  return os.str();
}

StateActionPairs perturb_actions(const StateActionPairs& pairs, const PerturbMode& mode, Rng& rng) {
  if (pairs.s.rows() == 0) throw ContractViolation("perturb_actions: empty input");
  StateActionPairs out{pairs.s, pairs.a};
  if (mode.kind == PerturbMode::Kind::UniformRandom) {
    std::uniform_real_distribution<Scalar> u(-1, 1);
    for (Index i = 0; i < out.a.rows(); ++i)
      for (Index j = 0; j < out.a.cols(); ++j) out.a(i, j) = u(rng);
    return out;
  }
  if (!(mode.sigma >= 0)) throw ValidationError("perturb_actions: sigma must be >= 0");
  if (mode.sigma == 0) return out;
  std::normal_distribution<Scalar> n(0, mode.sigma);
  for (Index i = 0; i < out.a.rows(); ++i)
    for (Index j = 0; j < out.a.cols(); ++j) out.a(i, j) = std::clamp(out.a(i, j) + n(rng), Scalar(-1), Scalar(1));
  return out;
}

StateActionPairs perturb_actions(const Dataset& ds, const PerturbMode& mode, Rng& rng) {
  if (ds.empty()) throw ContractViolation("perturb_actions: empty dataset");
  return perturb_actions(StateActionPairs{ds.states(), ds.actions()}, mode, rng);
}

}  // namespace antix::data

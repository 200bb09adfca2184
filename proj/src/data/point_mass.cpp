#include "antix/data/point_mass.hpp"

#include <sstream>

namespace antix::data {

RowVector PointMassEnv::reset(Rng& rng) {
  std::uniform_real_distribution<Scalar> u(-1, 1);
  state_ = RowVector::Zero(kStateDim);
  state_(0) = u(rng);
  state_(1) = u(rng);
  state_(4) = u(rng);
  state_(5) = u(rng);
  t_ = 0;
  return state_;
}

void PointMassEnv::set_state(const RowVector& s, int t) {
  if (s.size() != kStateDim) throw DimensionError("point_mass: state must have 6 entries");
  state_ = s;
  t_ = t;
}

RowVector PointMassEnv::dynamics(const RowVector& s, const RowVector& a) {
  RowVector next = s;
  for (Index d = 0; d < 2; ++d) {
    const Scalar v = kDamping * s(2 + d) + kGain * a(d);
    next(2 + d) = v;
    next(d) = std::clamp(s(d) + kDt * v, Scalar(-1), Scalar(1));
  }
  return next;
}

Scalar PointMassEnv::reward(const RowVector& s_next) {
  return -(s_next.head<2>() - s_next.tail<2>()).norm();
}

PointMassEnv::StepResult PointMassEnv::step(const RowVector& a) {
  if (a.size() != kActionDim) throw DimensionError("point_mass: action must have 2 entries");
  RowVector clipped = a;
  if ((a.array().abs() > 1).any()) {
    ++clipped_;
    clipped = a.cwiseMax(-1).cwiseMin(1);
  }
  StepResult out;
  out.s_next = dynamics(state_, clipped);
  out.r = reward(out.s_next);
  ++t_;
  out.done = -out.r < goal_radius || t_ >= horizon;
  state_ = out.s_next;
  return out;
}

RowVector ScriptedController::operator()(const RowVector& s) const {
  RowVector a(2);
  for (Index d = 0; d < 2; ++d) a(d) = std::clamp(kp * (s(4 + d) - s(d)) - kd * s(2 + d), Scalar(-1), Scalar(1));
  return a;
}

std::string Behavior::label() const {
  switch (kind) {
    case Kind::Scripted: return "scripted";
    case Kind::Random: return "random";
    case Kind::NoisyExpert: {
      std::ostringstream os;
      os << "noisy_expert(" << sigma << ")";
      return os.str();
    }
  }
  return "?";
}

Behavior Behavior::parse(const std::string& tier, Scalar sigma) {
  if (tier == "scripted") return {Kind::Scripted, 0};
  if (tier == "random") return {Kind::Random, 0};
  if (tier == "noisy_expert") {
    if (!(sigma >= 0)) throw ValidationError("noisy_expert sigma must be >= 0");
    return {Kind::NoisyExpert, sigma};
  }
  throw ValidationError("unknown behavior tier '" + tier + "' (expected scripted, noisy_expert, random)");
}

Dataset gen_offline_dataset(PointMassEnv env, const Behavior& behavior, std::size_t n, Rng& rng,
                            std::uint64_t seed) {
  if (n < 1) throw ValidationError("gen_offline_dataset: n must be >= 1");
  std::ostringstream gen;
  gen << "point_mass behavior=" << behavior.label() << " horizon=" << env.horizon
      << " goal_radius=" << env.goal_radius;
  Dataset ds(DatasetMeta{1, "point_mass_" + behavior.label(), PointMassEnv::kStateDim,
                         PointMassEnv::kActionDim, seed, gen.str()});
  ds.reserve(n);
  const ScriptedController expert;
  std::uniform_real_distribution<Scalar> u(-1, 1);
  std::normal_distribution<Scalar> noise(0, behavior.sigma > 0 ? behavior.sigma : 1);
  while (ds.size() < n) {
    RowVector s = env.reset(rng);
    bool done = false;
    while (!done && ds.size() < n) {
      RowVector a(2);
      switch (behavior.kind) {
        case Behavior::Kind::Scripted: a = expert(s); break;
        case Behavior::Kind::Random:
          a(0) = u(rng);
          a(1) = u(rng);
          break;
        case Behavior::Kind::NoisyExpert:
          a = expert(s);
          if (behavior.sigma > 0)
            for (Index d = 0; d < 2; ++d) a(d) = std::clamp(a(d) + noise(rng), Scalar(-1), Scalar(1));
          break;
      }
      const auto res = env.step(a);
      ds.push_back(Transition{s, a, res.r, res.s_next, res.done});
      s = res.s_next;
      done = res.done;
    }
  }
  return ds;
}

EvalResult evaluate(PointMassEnv env, const ActionFn& act, int episodes, std::uint64_t seed) {
  Rng reset_rng(seed);
  Rng action_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  EvalResult out;
  Scalar total_len = 0;
  for (int e = 0; e < episodes; ++e) {
    RowVector s = env.reset(reset_rng);
    Scalar ret = 0;
    bool done = false;
    while (!done) {
      const auto res = env.step(act(s, action_rng));
      ret += res.r;
      s = res.s_next;
      done = res.done;
    }
    total_len += env.t();
    out.returns.push_back(ret);
  }
  Scalar sum = 0;
  for (Scalar r : out.returns) sum += r;
  out.mean_return = episodes > 0 ? sum / episodes : 0;
  out.mean_length = episodes > 0 ? total_len / episodes : 0;
  return out;
}

ScoreRefs point_mass_refs(const PointMassEnv& env, int episodes, std::uint64_t seed) {
  const ScriptedController expert;
  ScoreRefs refs;
  refs.expert_return = evaluate(env, [&](const RowVector& s, Rng&) { return expert(s); }, episodes, seed).mean_return;
  refs.random_return = evaluate(
                           env,
                           [](const RowVector&, Rng& rng) {
                             std::uniform_real_distribution<Scalar> u(-1, 1);
                             RowVector a(2);
                             a(0) = u(rng);
                             a(1) = u(rng);
                             return a;
                           },
                           episodes, seed)
                           .mean_return;
  return refs;
}

}  // namespace antix::data

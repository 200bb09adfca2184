#pragma once

#include "antix/data/dataset.hpp"

#include <functional>

namespace antix::data {

/// 2-D damped point mass reaching a goal.
///   v' = 0.9·v + 0.1·a,  x' = clip(x + 0.1·v', [-1, 1]²),  r = −‖x' − goal‖₂
/// Observation s = (x, v, goal) ∈ R⁶. An episode ends after `horizon` steps
/// or once ‖x' − goal‖ < goal_radius.
class PointMassEnv {
 public:
  static constexpr Index kStateDim = 6;
  static constexpr Index kActionDim = 2;
  static constexpr Scalar kDamping = 0.9;
  static constexpr Scalar kGain = 0.1;
  static constexpr Scalar kDt = 0.1;

  struct StepResult {
    RowVector s_next;
    Scalar r = 0;
    bool done = false;
  };

  int horizon = 100;
  Scalar goal_radius = 0.05;

  /// Position and goal uniform in [-1, 1]², zero velocity.
  RowVector reset(Rng& rng);
  /// Out-of-box actions are clipped and counted in clipped_actions().
  StepResult step(const RowVector& a);

  const RowVector& state() const { return state_; }
  void set_state(const RowVector& s, int t = 0);
  int t() const { return t_; }
  std::int64_t clipped_actions() const { return clipped_; }

  /// Pure dynamics without the episode clock.
  static RowVector dynamics(const RowVector& s, const RowVector& a);
  static Scalar reward(const RowVector& s_next);

 private:
  RowVector state_ = RowVector::Zero(kStateDim);
  int t_ = 0;
  std::int64_t clipped_ = 0;
};

/// Proportional-derivative controller toward the goal: clip(kp·(g − x) − kd·v).
struct ScriptedController {
  Scalar kp = 5;
  Scalar kd = 5;
  RowVector operator()(const RowVector& s) const;
};

struct Behavior {
  enum class Kind { Scripted, NoisyExpert, Random };
  Kind kind = Kind::NoisyExpert;
  Scalar sigma = 0.3;

  std::string label() const;
  static Behavior parse(const std::string& tier, Scalar sigma);
};

/// Concatenates behaviour rollouts until exactly n transitions are stored.
Dataset gen_offline_dataset(PointMassEnv env, const Behavior& behavior, std::size_t n, Rng& rng,
                            std::uint64_t seed = 0);

using ActionFn = std::function<RowVector(const RowVector& s, Rng& rng)>;

struct EvalResult {
  Scalar mean_return = 0;
  Scalar mean_length = 0;
  std::vector<Scalar> returns;
};

/// Runs `episodes` episodes with resets drawn from Rng(seed).
EvalResult evaluate(PointMassEnv env, const ActionFn& act, int episodes, std::uint64_t seed);

struct ScoreRefs {
  Scalar random_return = 0;
  Scalar expert_return = 0;
};

/// Monte-Carlo references on the evaluation episode seeds: uniform random
/// policy and the scripted controller.
ScoreRefs point_mass_refs(const PointMassEnv& env, int episodes, std::uint64_t seed);

}  // namespace antix::data

#pragma once

#include "antix/data/dataset.hpp"

#include <array>

namespace antix::data {

/// Four one-hot states, each paired with actions drawn uniformly from a
/// square around one corner of the action box.
struct ToyCornerConfig {
  Index n_per_state = 4096;
  std::array<Eigen::Vector2d, 4> corner_centers{Eigen::Vector2d(-0.75, -0.75), Eigen::Vector2d(0.75, -0.75),
                                                Eigen::Vector2d(-0.75, 0.75), Eigen::Vector2d(0.75, 0.75)};
  Scalar half_width = 0.2;

  void validate() const;
  std::string describe() const;
};

/// State k is one-hot(k); rewards are 0, s_next = s, done = false.
/// Transitions are emitted state-major: all of state 0, then state 1, ...
Dataset gen_toy_corner_dataset(const ToyCornerConfig& config, Rng& rng, std::uint64_t seed = 0);

RowVector one_hot(Index k, Index n);

}  // namespace antix::data

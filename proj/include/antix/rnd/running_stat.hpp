#pragma once

#include "antix/autodiff/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace antix::rnd {

/// Welford online mean/variance over the full history.
struct RunningStat {
  static constexpr Scalar kStdFloor = 1e-8;

  std::int64_t count = 0;
  Scalar mean = 0;
  Scalar m2 = 0;

  void push(Scalar x) {
    ++count;
    const Scalar delta = x - mean;
    mean += delta / static_cast<Scalar>(count);
    m2 += delta * (x - mean);
  }

  template <typename Derived>
  void push_all(const Eigen::DenseBase<Derived>& xs) {
    for (Index i = 0; i < xs.rows(); ++i)
      for (Index j = 0; j < xs.cols(); ++j) push(xs(i, j));
  }

  /// Population variance m2 / count; 0 when empty.
  Scalar variance() const { return count > 0 ? std::max(Scalar(0), m2 / static_cast<Scalar>(count)) : 0; }
  Scalar stddev() const { return std::max(std::sqrt(variance()), kStdFloor); }

  /// Divisor applied to raw bonuses. An empty statistic leaves bonuses unscaled.
  Scalar scale() const { return count > 0 ? stddev() : Scalar(1); }

  bool operator==(const RunningStat&) const = default;
};

}  // namespace antix::rnd

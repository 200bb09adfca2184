#include "antix/data/toy_corner.hpp"

#include <sstream>

namespace antix::data {

RowVector one_hot(Index k, Index n) {
  RowVector v = RowVector::Zero(n);
  v(k) = 1;
  return v;
}

void ToyCornerConfig::validate() const {
  if (n_per_state < 1) throw ValidationError("toy corner: n_per_state must be >= 1");
  if (!(half_width > 0)) throw ValidationError("toy corner: half_width must be > 0");
  for (const auto& c : corner_centers)
    if ((c.array().abs() + half_width > 1).any())
      throw ValidationError("toy corner: square around (" + std::to_string(c.x()) + ", " +
                            std::to_string(c.y()) + ") exceeds the action box");
}

std::string ToyCornerConfig::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "toy_corner n_per_state=" << n_per_state << " half_width=" << half_width << " centers=";
  for (const auto& c : corner_centers) os << "(" << c.x() << "," << c.y() << ")";
  return os.str();
}

Dataset gen_toy_corner_dataset(const ToyCornerConfig& config, Rng& rng, std::uint64_t seed) {
  config.validate();
  Dataset ds(DatasetMeta{1, "toy_corner", 4, 2, seed, config.describe()});
  ds.reserve(static_cast<std::size_t>(4 * config.n_per_state));
  std::uniform_real_distribution<Scalar> u(-config.half_width, config.half_width);
  for (Index k = 0; k < 4; ++k) {
    const RowVector s = one_hot(k, 4);
    for (Index i = 0; i < config.n_per_state; ++i) {
      Transition t;
      t.s = s;
      t.a = RowVector(2);
      t.a(0) = config.corner_centers[k].x() + u(rng);
      t.a(1) = config.corner_centers[k].y() + u(rng);
      t.s_next = s;
      ds.push_back(t);
    }
  }
  return ds;
}

}  // namespace antix::data

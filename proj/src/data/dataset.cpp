#include "antix/data/dataset.hpp"

#include <cmath>

namespace antix::data {

Dataset::Dataset(DatasetMeta meta) : meta_(std::move(meta)) {
  if (meta_.s_dim < 0 || meta_.a_dim < 1)
    throw ValidationError("dataset: invalid dims s_dim=" + std::to_string(meta_.s_dim) +
                          " a_dim=" + std::to_string(meta_.a_dim));
}

void Dataset::reserve(std::size_t n) {
  states_.reserve(n * meta_.s_dim);
  next_states_.reserve(n * meta_.s_dim);
  actions_.reserve(n * meta_.a_dim);
  rewards_.reserve(n);
  dones_.reserve(n);
}

void Dataset::push_back(const Transition& t) {
  const std::string where = "dataset: transition " + std::to_string(size());
  if (t.s.size() != meta_.s_dim || t.s_next.size() != meta_.s_dim || t.a.size() != meta_.a_dim)
    throw ValidationError(where + " has dims s=" + std::to_string(t.s.size()) +
                          " a=" + std::to_string(t.a.size()) + " s_next=" +
                          std::to_string(t.s_next.size()) + ", expected s_dim=" +
                          std::to_string(meta_.s_dim) + " a_dim=" + std::to_string(meta_.a_dim));
  if (!all_finite(t.s) || !all_finite(t.a) || !all_finite(t.s_next) || !std::isfinite(t.r))
    throw ValidationError(where + " contains non-finite values");
  if ((t.a.array().abs() > 1).any()) throw ValidationError(where + " has an action outside [-1, 1]");
  states_.insert(states_.end(), t.s.data(), t.s.data() + t.s.size());
  actions_.insert(actions_.end(), t.a.data(), t.a.data() + t.a.size());
  rewards_.push_back(t.r);
  next_states_.insert(next_states_.end(), t.s_next.data(), t.s_next.data() + t.s_next.size());
  dones_.push_back(t.done ? 1 : 0);
}

Transition Dataset::at(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("dataset index " + std::to_string(i));
  Transition t;
  t.s = states().row(static_cast<Index>(i));
  t.a = actions().row(static_cast<Index>(i));
  t.r = rewards_[i];
  t.s_next = next_states().row(static_cast<Index>(i));
  t.done = dones_[i] != 0;
  return t;
}

Eigen::Map<const Matrix> Dataset::states() const {
  return {states_.data(), static_cast<Index>(size()), meta_.s_dim};
}
Eigen::Map<const Matrix> Dataset::actions() const {
  return {actions_.data(), static_cast<Index>(size()), meta_.a_dim};
}
Eigen::Map<const Matrix> Dataset::next_states() const {
  return {next_states_.data(), static_cast<Index>(size()), meta_.s_dim};
}
Eigen::Map<const ColVector> Dataset::rewards() const {
  return {rewards_.data(), static_cast<Index>(size())};
}

Batch Dataset::gather(const std::vector<Index>& rows) const {
  const Index n = static_cast<Index>(rows.size());
  Batch b{Matrix(n, meta_.s_dim), Matrix(n, meta_.a_dim), ColVector(n), Matrix(n, meta_.s_dim),
          ColVector(n)};
  const auto S = states();
  const auto A = actions();
  const auto S2 = next_states();
  for (Index i = 0; i < n; ++i) {
    const Index r = rows[static_cast<std::size_t>(i)];
    b.s.row(i) = S.row(r);
    b.a.row(i) = A.row(r);
    b.r(i) = rewards_[static_cast<std::size_t>(r)];
    b.s_next.row(i) = S2.row(r);
    b.done(i) = dones_[static_cast<std::size_t>(r)];
  }
  return b;
}

Batch Dataset::sample(Index batch_size, Rng& rng) const {
  if (empty()) throw ContractViolation("dataset: cannot sample from an empty dataset");
  std::uniform_int_distribution<Index> pick(0, static_cast<Index>(size()) - 1);
  std::vector<Index> rows(static_cast<std::size_t>(batch_size));
  for (Index& r : rows) r = pick(rng);
  return gather(rows);
}

Batch Dataset::all() const {
  std::vector<Index> rows(size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Index>(i);
  return gather(rows);
}

bool Dataset::operator==(const Dataset& o) const {
  return meta_ == o.meta_ && states_ == o.states_ && actions_ == o.actions_ &&
         rewards_ == o.rewards_ && next_states_ == o.next_states_ && dones_ == o.dones_;
}

Scalar normalized_score(Scalar mean_return, Scalar random_ref, Scalar expert_ref) {
  if (!(std::abs(expert_ref - random_ref) > 0) || !std::isfinite(expert_ref - random_ref))
    throw ValidationError("normalized_score: degenerate references random=" +
                          std::to_string(random_ref) + " expert=" + std::to_string(expert_ref));
  return 100 * (mean_return - random_ref) / (expert_ref - random_ref);
}

}  // namespace antix::data

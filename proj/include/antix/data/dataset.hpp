#pragma once

#include "antix/autodiff/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace antix::data {

struct Transition {
  RowVector s;
  RowVector a;
  Scalar r = 0;
  RowVector s_next;
  bool done = false;
};

struct DatasetMeta {
  int version = 1;
  std::string name;
  Index s_dim = 0;
  Index a_dim = 0;
  std::uint64_t seed = 0;
  /// Free-form description of the generator configuration.
  std::string generator;

  bool operator==(const DatasetMeta&) const = default;
};

/// Mini-batch in matrix form, one transition per row.
struct Batch {
  Matrix s;
  Matrix a;
  ColVector r;
  Matrix s_next;
  ColVector done;

  Index size() const { return s.rows(); }
};

/// Offline transitions stored column-wise for cheap batch gathers.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(DatasetMeta meta);

  /// Validates dimensions, finiteness and the action box [-1, 1].
  void push_back(const Transition& t);
  void reserve(std::size_t n);

  Transition at(std::size_t i) const;
  std::size_t size() const { return rewards_.size(); }
  bool empty() const { return rewards_.empty(); }

  const DatasetMeta& meta() const { return meta_; }
  DatasetMeta& meta() { return meta_; }
  Index s_dim() const { return meta_.s_dim; }
  Index a_dim() const { return meta_.a_dim; }

  Eigen::Map<const Matrix> states() const;
  Eigen::Map<const Matrix> actions() const;
  Eigen::Map<const Matrix> next_states() const;
  Eigen::Map<const ColVector> rewards() const;

  Batch gather(const std::vector<Index>& rows) const;
  /// Uniform sampling with replacement.
  Batch sample(Index batch_size, Rng& rng) const;
  Batch all() const;

  bool operator==(const Dataset& other) const;

 private:
  DatasetMeta meta_;
  std::vector<Scalar> states_;
  std::vector<Scalar> actions_;
  std::vector<Scalar> rewards_;
  std::vector<Scalar> next_states_;
  std::vector<std::uint8_t> dones_;
};

/// D4RL-style normalisation: 100·(x − random)/(expert − random).
Scalar normalized_score(Scalar mean_return, Scalar random_ref, Scalar expert_ref);

}  // namespace antix::data

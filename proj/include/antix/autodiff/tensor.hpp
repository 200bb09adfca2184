#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace antix {

using Scalar = double;

/// Dense row-major storage. Batched values keep one sample per row.
template <typename T>
using MatrixT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowVectorT = Eigen::Matrix<T, 1, Eigen::Dynamic>;
template <typename T>
using ColVectorT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Matrix = MatrixT<Scalar>;
using RowVector = RowVectorT<Scalar>;
using ColVector = ColVectorT<Scalar>;
using Index = Eigen::Index;

using Rng = std::mt19937_64;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition was violated by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Training produced a NaN/inf or otherwise diverged.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Derived>
std::string shape_str(const Eigen::DenseBase<Derived>& m) {
  return "[" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "]";
}

inline std::string shape_str(Index rows, Index cols) {
  return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().array().isFinite().all();
}

/// Fill with U(-bound, bound).
template <typename Derived>
void fill_uniform(Eigen::DenseBase<Derived>& m, typename Derived::Scalar bound, Rng& rng) {
  std::uniform_real_distribution<typename Derived::Scalar> dist(-bound, bound);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = dist(rng);
}

template <typename Derived>
void fill_normal(Eigen::DenseBase<Derived>& m, typename Derived::Scalar stddev, Rng& rng) {
  std::normal_distribution<typename Derived::Scalar> dist(0, stddev);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = dist(rng);
}

}  // namespace antix

#pragma once

#include "antix/autodiff/tensor.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace antix {

/// A named trainable array together with its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)) {
    grad.setZero(value.rows(), value.cols());
  }
  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

class Tape;

/// Handle to a node recorded on a Tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  /// Adjoint after backward(); an empty matrix if no gradient reached this node.
  const Matrix& grad() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  bool requires_grad() const;
  /// Scalar payload of a 1x1 node.
  Scalar item() const;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Define-by-run reverse-mode tape. Nodes are appended in evaluation order,
/// so every node's parents precede it and backward() is a single reverse sweep.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;
  static constexpr std::size_t kMaxParents = 4;

  Tape() { nodes_.reserve(256); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that never receives a gradient.
  Var constant(Matrix value);
  /// Leaf whose adjoint is kept and readable through Var::grad().
  Var input(Matrix value);
  /// Leaf bound to a parameter; backward() adds the adjoint into p.grad.
  Var param(Parameter& p);
  /// Leaf that reads a parameter without tracking it.
  Var frozen(const Parameter& p);

  /// Records an interior node. The backward function receives this tape and
  /// the node id, and pushes adjoints to parents via accumulate().
  Var record(Matrix value, std::initializer_list<Var> parents, BackwardFn backward);

  void backward(const Var& loss);
  bool backward_done() const { return backward_done_; }

  std::size_t size() const { return nodes_.size(); }

  const Matrix& value(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.external ? *n.external : n.value;
  }
  const Matrix& grad(std::size_t id) const { return nodes_[id].grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t parent(std::size_t id, std::size_t k) const { return nodes_[id].parents[k]; }

  template <typename Expr>
  void accumulate(std::size_t id, const Expr& adjoint) {
    Node& n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = adjoint;
    } else {
      n.grad += adjoint;
    }
  }

 private:
  struct Node {
    Matrix value;
    const Matrix* external = nullptr;
    Matrix grad;
    std::array<std::size_t, kMaxParents> parents{};
    std::size_t n_parents = 0;
    bool requires_grad = false;
    Parameter* param = nullptr;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace antix

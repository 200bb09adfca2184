#include "antix/autodiff/tape.hpp"

namespace antix {

const Matrix& Var::value() const { return tape_->value(id_); }
const Matrix& Var::grad() const { return tape_->grad(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Scalar Var::item() const {
  const Matrix& v = value();
  if (v.size() != 1) throw DimensionError("item() on non-scalar node of shape " + shape_str(v));
  return v(0, 0);
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::input(Matrix value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::param(Parameter& p) {
  Node n;
  n.external = &p.value;
  n.requires_grad = true;
  n.param = &p;
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::frozen(const Parameter& p) {
  Node n;
  n.external = &p.value;
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::record(Matrix value, std::initializer_list<Var> parents, BackwardFn backward) {
  if (parents.size() > kMaxParents) throw ContractViolation("too many parents for a tape node");
  Node n;
  n.value = std::move(value);
  for (const Var& p : parents) {
    if (p.tape() != this) throw ContractViolation("operand recorded on a different tape");
    n.parents[n.n_parents++] = p.id();
    n.requires_grad = n.requires_grad || nodes_[p.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

void Tape::backward(const Var& loss) {
  if (loss.tape() != this) throw ContractViolation("loss belongs to a different tape");
  if (backward_done_) throw StateError("backward() called twice on the same tape; re-record the graph");
  const Matrix& lv = value(loss.id());
  if (lv.size() != 1) throw ContractViolation("backward() needs a scalar loss, got shape " + shape_str(lv));
  backward_done_ = true;
  if (!nodes_[loss.id()].requires_grad) return;

  nodes_[loss.id()].grad = Matrix::Ones(1, 1);
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

}  // namespace antix

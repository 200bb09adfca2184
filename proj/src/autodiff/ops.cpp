#include "antix/autodiff/ops.hpp"

#include <cmath>

namespace antix {
namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.value()) + " vs " +
                         shape_str(b.value()));
}

using RowMajorMap = Eigen::Map<const Matrix>;

}  // namespace

Var operator+(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  return a.tape()->record(a.value() + b.value(), {a, b}, [](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    t.accumulate(t.parent(self, 0), g);
    t.accumulate(t.parent(self, 1), g);
  });
}

Var operator-(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  return a.tape()->record(a.value() - b.value(), {a, b}, [](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    t.accumulate(t.parent(self, 0), g);
    t.accumulate(t.parent(self, 1), -g);
  });
}

Var operator*(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  return a.tape()->record(a.value().cwiseProduct(b.value()), {a, b}, [](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const std::size_t pa = t.parent(self, 0), pb = t.parent(self, 1);
    if (t.requires_grad(pa)) t.accumulate(pa, g.cwiseProduct(t.value(pb)));
    if (t.requires_grad(pb)) t.accumulate(pb, g.cwiseProduct(t.value(pa)));
  });
}

Var operator*(const Var& a, Scalar c) {
  return a.tape()->record(a.value() * c, {a}, [c](Tape& t, std::size_t self) {
    t.accumulate(t.parent(self, 0), t.grad(self) * c);
  });
}

Var operator*(Scalar c, const Var& a) { return a * c; }
Var operator-(const Var& a) { return a * Scalar(-1); }

Var add_scalar(const Var& a, Scalar c) {
  return a.tape()->record((a.value().array() + c).matrix(), {a}, [](Tape& t, std::size_t self) {
    t.accumulate(t.parent(self, 0), t.grad(self));
  });
}

Var add_row(const Var& x, const Var& row) {
  if (row.rows() != 1 || row.cols() != x.cols())
    throw DimensionError("add_row: row " + shape_str(row.value()) + " does not broadcast over " +
                         shape_str(x.value()));
  Matrix out = x.value().rowwise() + row.value().row(0);
  return x.tape()->record(std::move(out), {x, row}, [](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    t.accumulate(t.parent(self, 0), g);
    if (t.requires_grad(t.parent(self, 1))) t.accumulate(t.parent(self, 1), g.colwise().sum());
  });
}

Var linear(const Var& x, const Var& weight, const Var& bias) {
  const Matrix& w = weight.value();
  if (x.cols() != w.cols())
    throw DimensionError("linear: input " + shape_str(x.value()) + " incompatible with weight " +
                         shape_str(w));
  if (bias.rows() != 1 || bias.cols() != w.rows())
    throw DimensionError("linear: bias " + shape_str(bias.value()) + " incompatible with weight " +
                         shape_str(w));
  Matrix out(x.rows(), w.rows());
  out.noalias() = x.value() * w.transpose();
  out.rowwise() += bias.value().row(0);
  return x.tape()->record(std::move(out), {x, weight, bias}, [](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const std::size_t px = t.parent(self, 0), pw = t.parent(self, 1), pb = t.parent(self, 2);
    if (t.requires_grad(px)) {
      Matrix dx(g.rows(), t.value(pw).cols());
      dx.noalias() = g * t.value(pw);
      t.accumulate(px, dx);
    }
    if (t.requires_grad(pw)) {
      Matrix dw(g.cols(), t.value(px).cols());
      dw.noalias() = g.transpose() * t.value(px);
      t.accumulate(pw, dw);
    }
    if (t.requires_grad(pb)) t.accumulate(pb, g.colwise().sum());
  });
}

Var matmul_nt(const Var& x, const Var& weight) {
  const Matrix& w = weight.value();
  if (x.cols() != w.cols())
    throw DimensionError("matmul: input " + shape_str(x.value()) + " incompatible with weight " +
                         shape_str(w));
  Matrix out(x.rows(), w.rows());
  out.noalias() = x.value() * w.transpose();
  return x.tape()->record(std::move(out), {x, weight}, [](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const std::size_t px = t.parent(self, 0), pw = t.parent(self, 1);
    if (t.requires_grad(px)) {
      Matrix dx(g.rows(), t.value(pw).cols());
      dx.noalias() = g * t.value(pw);
      t.accumulate(px, dx);
    }
    if (t.requires_grad(pw)) {
      Matrix dw(g.cols(), t.value(px).cols());
      dw.noalias() = g.transpose() * t.value(px);
      t.accumulate(pw, dw);
    }
  });
}

Var relu(const Var& x) {
  Matrix out = x.value().cwiseMax(Scalar(0));
  return x.tape()->record(std::move(out), {x}, [](Tape& t, std::size_t self) {
    // Subgradient 0 at the kink.
    const Matrix& in = t.value(t.parent(self, 0));
    t.accumulate(t.parent(self, 0), (in.array() > 0).select(t.grad(self), Scalar(0)));
  });
}

Var tanh(const Var& x) {
  Matrix out = x.value().array().tanh().matrix();
  return x.tape()->record(std::move(out), {x}, [](Tape& t, std::size_t self) {
    const auto y = t.value(self).array();
    t.accumulate(t.parent(self, 0), (t.grad(self).array() * (1 - y.square())).matrix());
  });
}

Var sigmoid(const Var& x) {
  Matrix out = (1 / (1 + (-x.value().array()).exp())).matrix();
  return x.tape()->record(std::move(out), {x}, [](Tape& t, std::size_t self) {
    const auto y = t.value(self).array();
    t.accumulate(t.parent(self, 0), (t.grad(self).array() * y * (1 - y)).matrix());
  });
}

Var exp(const Var& x) {
  Matrix out = x.value().array().exp().matrix();
  return x.tape()->record(std::move(out), {x}, [](Tape& t, std::size_t self) {
    t.accumulate(t.parent(self, 0), t.grad(self).cwiseProduct(t.value(self)));
  });
}

Var log(const Var& x) {
  Matrix out = x.value().array().log().matrix();
  return x.tape()->record(std::move(out), {x}, [](Tape& t, std::size_t self) {
    const Matrix& in = t.value(t.parent(self, 0));
    t.accumulate(t.parent(self, 0), t.grad(self).cwiseQuotient(in));
  });
}

Var square(const Var& x) {
  Matrix out = x.value().array().square().matrix();
  return x.tape()->record(std::move(out), {x}, [](Tape& t, std::size_t self) {
    const Matrix& in = t.value(t.parent(self, 0));
    t.accumulate(t.parent(self, 0), (2 * t.grad(self).array() * in.array()).matrix());
  });
}

Var clamp(const Var& x, Scalar lo, Scalar hi) {
  if (!(lo <= hi)) throw ContractViolation("clamp: lo > hi");
  Matrix out = x.value().cwiseMax(lo).cwiseMin(hi);
  return x.tape()->record(std::move(out), {x}, [lo, hi](Tape& t, std::size_t self) {
    const auto in = t.value(t.parent(self, 0)).array();
    t.accumulate(t.parent(self, 0), ((in >= lo) && (in <= hi)).select(t.grad(self), Scalar(0)));
  });
}

Var minimum(const Var& a, const Var& b) {
  require_same_shape(a, b, "minimum");
  Matrix out = a.value().cwiseMin(b.value());
  return a.tape()->record(std::move(out), {a, b}, [](Tape& t, std::size_t self) {
    // Ties route the gradient to the first operand.
    const auto va = t.value(t.parent(self, 0)).array();
    const auto vb = t.value(t.parent(self, 1)).array();
    const Matrix& g = t.grad(self);
    t.accumulate(t.parent(self, 0), (va <= vb).select(g, Scalar(0)));
    t.accumulate(t.parent(self, 1), (va <= vb).select(Scalar(0), g));
  });
}

Var concat_cols(const Var& a, const Var& b) {
  if (a.rows() != b.rows())
    throw DimensionError("concat_cols: row mismatch " + shape_str(a.value()) + " vs " +
                         shape_str(b.value()));
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a.value(), b.value();
  const Index ca = a.cols();
  return a.tape()->record(std::move(out), {a, b}, [ca](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    t.accumulate(t.parent(self, 0), g.leftCols(ca));
    t.accumulate(t.parent(self, 1), g.rightCols(g.cols() - ca));
  });
}

Var slice_cols(const Var& x, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > x.cols())
    throw DimensionError("slice_cols: [" + std::to_string(start) + ", +" + std::to_string(count) +
                         ") out of range for " + shape_str(x.value()));
  Matrix out = x.value().middleCols(start, count);
  const Index total = x.cols();
  return x.tape()->record(std::move(out), {x}, [start, count, total](Tape& t, std::size_t self) {
    Matrix g = Matrix::Zero(t.grad(self).rows(), total);
    g.middleCols(start, count) = t.grad(self);
    t.accumulate(t.parent(self, 0), g);
  });
}

Var row_sum(const Var& x) {
  Matrix out = x.value().rowwise().sum();
  const Index cols = x.cols();
  return x.tape()->record(std::move(out), {x}, [cols](Tape& t, std::size_t self) {
    t.accumulate(t.parent(self, 0), t.grad(self).replicate(1, cols));
  });
}

Var sum(const Var& x) {
  Matrix out(1, 1);
  out(0, 0) = x.value().sum();
  const Index r = x.rows(), c = x.cols();
  return x.tape()->record(std::move(out), {x}, [r, c](Tape& t, std::size_t self) {
    t.accumulate(t.parent(self, 0), Matrix::Constant(r, c, t.grad(self)(0, 0)));
  });
}

Var mean(const Var& x) {
  if (x.value().size() == 0) throw DimensionError("mean of an empty tensor");
  return sum(x) * (Scalar(1) / static_cast<Scalar>(x.value().size()));
}

Var layer_norm(const Var& x, const Var& gain, const Var& shift, Scalar eps) {
  const Index c = x.cols();
  if (gain.rows() != 1 || gain.cols() != c || shift.rows() != 1 || shift.cols() != c)
    throw DimensionError("layer_norm: gain " + shape_str(gain.value()) + " / shift " +
                         shape_str(shift.value()) + " do not match features of " +
                         shape_str(x.value()));
  const Matrix& in = x.value();
  ColVector mu = in.rowwise().mean();
  Matrix centered = in.colwise() - mu;
  ColVector inv_std =
      ((centered.array().square().rowwise().sum() / static_cast<Scalar>(c)) + eps).rsqrt().matrix();
  Matrix xhat = centered.array().colwise() * inv_std.array();
  Matrix out = (xhat.array().rowwise() * gain.value().row(0).array()).matrix();
  out.rowwise() += shift.value().row(0);
  return x.tape()->record(
      std::move(out), {x, gain, shift},
      [xhat = std::move(xhat), inv_std = std::move(inv_std), c](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        const std::size_t px = t.parent(self, 0), pg = t.parent(self, 1), ps = t.parent(self, 2);
        if (t.requires_grad(px)) {
          Matrix dxhat = g.array().rowwise() * t.value(pg).row(0).array();
          ColVector m1 = dxhat.rowwise().mean();
          ColVector m2 = dxhat.cwiseProduct(xhat).rowwise().mean();
          Matrix dx = dxhat.colwise() - m1;
          dx -= (xhat.array().colwise() * m2.array()).matrix();
          dx = dx.array().colwise() * inv_std.array();
          t.accumulate(px, dx);
        }
        if (t.requires_grad(pg)) t.accumulate(pg, g.cwiseProduct(xhat).colwise().sum());
        if (t.requires_grad(ps)) t.accumulate(ps, g.colwise().sum());
        (void)c;
      });
}

Var bilinear(const Var& s, const Var& x, const Var& weight, Index out_dim) {
  const Index batch = s.rows(), sd = s.cols(), xd = x.cols();
  const Matrix& w = weight.value();
  if (x.rows() != batch)
    throw DimensionError("bilinear: batch mismatch " + shape_str(s.value()) + " vs " +
                         shape_str(x.value()));
  if (w.rows() != sd || w.cols() != out_dim * xd)
    throw DimensionError("bilinear: weight " + shape_str(w) + " expected " +
                         shape_str(sd, out_dim * xd));
  Matrix proj(batch, out_dim * xd);
  proj.noalias() = s.value() * w;
  Matrix out(batch, out_dim);
  for (Index b = 0; b < batch; ++b) {
    RowMajorMap block(proj.row(b).data(), out_dim, xd);
    out.row(b).noalias() = (block * x.value().row(b).transpose()).transpose();
  }
  return s.tape()->record(
      std::move(out), {s, x, weight},
      [proj = std::move(proj), out_dim, xd](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        const std::size_t ps = t.parent(self, 0), px = t.parent(self, 1), pw = t.parent(self, 2);
        const Matrix& xv = t.value(px);
        const Index batch = g.rows();
        if (t.requires_grad(px)) {
          Matrix dx(batch, xd);
          for (Index b = 0; b < batch; ++b) {
            RowMajorMap block(proj.row(b).data(), out_dim, xd);
            dx.row(b).noalias() = g.row(b) * block;
          }
          t.accumulate(px, dx);
        }
        if (t.requires_grad(ps) || t.requires_grad(pw)) {
          Matrix dproj(batch, out_dim * xd);
          for (Index b = 0; b < batch; ++b) {
            Eigen::Map<Matrix> block(dproj.row(b).data(), out_dim, xd);
            block.noalias() = g.row(b).transpose() * xv.row(b);
          }
          if (t.requires_grad(ps)) {
            Matrix ds(batch, t.value(pw).rows());
            ds.noalias() = dproj * t.value(pw).transpose();
            t.accumulate(ps, ds);
          }
          if (t.requires_grad(pw)) {
            Matrix dw(t.value(ps).cols(), out_dim * xd);
            dw.noalias() = t.value(ps).transpose() * dproj;
            t.accumulate(pw, dw);
          }
        }
      });
}

}  // namespace antix

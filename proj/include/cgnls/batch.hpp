#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cgnls/core.hpp"
#include "cgnls/net.hpp"

namespace cgnls {

/// Affine map taking the physical domain to the network's own coordinates
/// (usually [-1, 1]^2, which keeps tanh layers away from saturation). The
/// derivative seeds below chain-rule the jets back, so every Jet2 leaving
/// the evaluator is a derivative with respect to physical x and t.
struct InputScaling {
  double x_mid = 0.0;
  double x_half = 1.0;
  double t_mid = 0.0;
  double t_half = 1.0;

  static InputScaling identity() { return {}; }

  static InputScaling from_domain(const Domain& d) {
    d.validate();
    return {0.5 * (d.x_lo + d.x_hi), 0.5 * (d.x_hi - d.x_lo),
            0.5 * (d.t_lo + d.t_hi), 0.5 * (d.t_hi - d.t_lo)};
  }
};

/// Batched jet evaluator and reverse pass. Activations are stored
/// column-major with four consecutive columns per point, one per jet slot
/// (value, d_t, d_x, d_xx); every layer is then a single GEMM over all
/// points and slots at once.
class JetBatch {
 public:
  JetBatch() = default;

  void configure(const NetworkShape& shape, const InputScaling& scaling) {
    shape.validate();
    shape_ = shape;
    layout_ = NetLayout::make(shape);
    scaling_ = scaling;
    const int L = layout_.layers();
    Z_.assign(static_cast<std::size_t>(L) + 1, Eigen::MatrixXd());
    A_.assign(static_cast<std::size_t>(L) + 1, Eigen::MatrixXd());
    n_ = 0;
  }

  const NetworkShape& shape() const { return shape_; }
  int size() const { return n_; }

  void forward(std::span<const double> params, std::span<const Point> pts) {
    const int L = layout_.layers();
    n_ = static_cast<int>(pts.size());
    if (n_ == 0) throw UsageError("JetBatch: empty point batch");
    if (static_cast<int>(params.size()) != layout_.total)
      throw UsageError("JetBatch: parameter count does not match the shape");
    const int cols = 4 * n_;

    // Parameters are staged into an Eigen-aligned buffer: mapping caller
    // memory directly would make SIMD peeling (and thus low-order result
    // bits) depend on the allocation's 64-byte phase.
    pbuf_.resize(layout_.total);
    for (int i = 0; i < layout_.total; ++i) pbuf_[i] = params[static_cast<std::size_t>(i)];

    A_[0].resize(2, cols);
    for (int p = 0; p < n_; ++p) {
      const double xv = (pts[static_cast<std::size_t>(p)].x - scaling_.x_mid) / scaling_.x_half;
      const double tv = (pts[static_cast<std::size_t>(p)].t - scaling_.t_mid) / scaling_.t_half;
      A_[0].col(4 * p) << xv, tv;
      A_[0].col(4 * p + 1) << 0.0, 1.0 / scaling_.t_half;
      A_[0].col(4 * p + 2) << 1.0 / scaling_.x_half, 0.0;
      A_[0].col(4 * p + 3) << 0.0, 0.0;
    }

    for (int l = 1; l <= L; ++l) {
      const int dl = layout_.dims[static_cast<std::size_t>(l)];
      const int dp = layout_.dims[static_cast<std::size_t>(l) - 1];
      Z_[static_cast<std::size_t>(l)].resize(dl, cols);
      auto W = Eigen::Map<const Eigen::MatrixXd>(pbuf_.data() + layout_.w_off[static_cast<std::size_t>(l)], dl, dp);
      auto b = Eigen::Map<const Eigen::VectorXd>(pbuf_.data() + layout_.b_off[static_cast<std::size_t>(l)], dl);
      Z_[static_cast<std::size_t>(l)].noalias() = W * A_[static_cast<std::size_t>(l) - 1];
      slot(Z_[static_cast<std::size_t>(l)], 0).colwise() += b;

      if (l == L) break;
      Eigen::MatrixXd& A = A_[static_cast<std::size_t>(l)];
      A.resize(dl, cols);
      const Eigen::MatrixXd& Z = Z_[static_cast<std::size_t>(l)];
      auto zv = cslot(Z, 0), zt = cslot(Z, 1), zx = cslot(Z, 2), zxx = cslot(Z, 3);
      auto av = slot(A, 0), at = slot(A, 1), ax = slot(A, 2), axx = slot(A, 3);
      if (shape_.activation == Activation::Tanh) {
        // tanh via exp keeps the whole slab on vectorized kernels
        av.array() = 1.0 - 2.0 / ((2.0 * zv.array()).exp() + 1.0);
        auto s1 = (1.0 - av.array().square());
        at.array() = s1 * zt.array();
        ax.array() = s1 * zx.array();
        axx.array() = (-2.0 * av.array() * s1) * zx.array().square() + s1 * zxx.array();
      } else {
        A = Z;
      }
    }
    if (!Z_[static_cast<std::size_t>(L)].allFinite())
      throw NumericError("JetBatch: non-finite network output");
  }

  /// Output jets, shape output_dim x 4n; columns grouped per point.
  const Eigen::MatrixXd& outputs() const { return Z_.back(); }

  Jet2 jet(int output, int point) const {
    const Eigen::MatrixXd& O = Z_.back();
    return Jet2{O(output, 4 * point), O(output, 4 * point + 1),
                O(output, 4 * point + 2), O(output, 4 * point + 3)};
  }

  double value(int output, int point) const { return Z_.back()(output, 4 * point); }

  /// Adjoint slab for the outputs (same shape as outputs()); reset to zero.
  Eigen::MatrixXd& adjoints() {
    adj_.setZero(shape_.output_dim, 4 * n_);
    return adj_;
  }

  /// Accumulates d(loss)/d(params) into grad, given d(loss)/d(outputs) in
  /// the adjoint slab. Must follow a forward() with the same params.
  void backward(std::span<const double> params, std::span<double> grad) {
    if (grad.size() != params.size())
      throw UsageError("JetBatch: grad/params size mismatch");
    gbuf_.setZero(layout_.total);
    const int L = layout_.layers();
    Eigen::MatrixXd* G = &adj_;       // adjoint of Z_l for the current layer
    Eigen::MatrixXd* next = &bwd_;    // scratch for the layer below
    Eigen::MatrixXd* spare = &bwd2_;
    for (int l = L; l >= 1; --l) {
      const int dl = layout_.dims[static_cast<std::size_t>(l)];
      const int dp = layout_.dims[static_cast<std::size_t>(l) - 1];
      auto W = Eigen::Map<const Eigen::MatrixXd>(pbuf_.data() + layout_.w_off[static_cast<std::size_t>(l)], dl, dp);
      auto gW = Eigen::Map<Eigen::MatrixXd>(gbuf_.data() + layout_.w_off[static_cast<std::size_t>(l)], dl, dp);
      auto gb = Eigen::Map<Eigen::VectorXd>(gbuf_.data() + layout_.b_off[static_cast<std::size_t>(l)], dl);
      gW.noalias() += (*G) * A_[static_cast<std::size_t>(l) - 1].transpose();
      gb.noalias() += cslot(*G, 0).rowwise().sum();
      if (l == 1) break;

      next->resize(dp, 4 * n_);
      next->noalias() = W.transpose() * (*G);

      // convert the adjoint of A_{l-1} into the adjoint of Z_{l-1} through
      // the activation jets, in place. The value slot is rewritten first
      // while the derivative-slot adjoints it reads are still intact.
      if (shape_.activation == Activation::Tanh) {
        const Eigen::MatrixXd& Z = Z_[static_cast<std::size_t>(l) - 1];
        const Eigen::MatrixXd& A = A_[static_cast<std::size_t>(l) - 1];
        auto av = cslot(A, 0);
        auto zt = cslot(Z, 1), zx = cslot(Z, 2), zxx = cslot(Z, 3);
        auto bv = slot(*next, 0), bt = slot(*next, 1), bx = slot(*next, 2), bxx = slot(*next, 3);
        auto s1 = (1.0 - av.array().square());
        auto s2 = (-2.0) * av.array() * s1;
        auto s3 = s1 * (6.0 * av.array().square() - 2.0);
        bv.array() = bv.array() * s1 + bt.array() * s2 * zt.array() +
                     bx.array() * s2 * zx.array() +
                     bxx.array() * (s3 * zx.array().square() + s2 * zxx.array());
        bt.array() *= s1;
        bx.array() = bx.array() * s1 + bxx.array() * (2.0 * s2 * zx.array());
        bxx.array() *= s1;
      }
      G = next;
      std::swap(next, spare);  // never write into the slab G points at
    }
    for (int i = 0; i < layout_.total; ++i) grad[static_cast<std::size_t>(i)] += gbuf_[i];
  }

 private:
  using Stride = Eigen::OuterStride<>;
  using SlotView = Eigen::Map<Eigen::MatrixXd, 0, Stride>;
  using CSlotView = Eigen::Map<const Eigen::MatrixXd, 0, Stride>;

  static SlotView slot(Eigen::MatrixXd& m, int s) {
    return SlotView(m.data() + static_cast<std::ptrdiff_t>(s) * m.rows(), m.rows(),
                    m.cols() / 4, Stride(4 * m.rows()));
  }
  static CSlotView cslot(const Eigen::MatrixXd& m, int s) {
    return CSlotView(m.data() + static_cast<std::ptrdiff_t>(s) * m.rows(), m.rows(),
                     m.cols() / 4, Stride(4 * m.rows()));
  }

  NetworkShape shape_;
  NetLayout layout_;
  InputScaling scaling_;
  std::vector<Eigen::MatrixXd> Z_, A_;
  Eigen::MatrixXd adj_, bwd_, bwd2_;
  Eigen::VectorXd pbuf_, gbuf_;
  int n_ = 0;
};

}  // namespace cgnls

#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "cgnls/batch.hpp"
#include "cgnls/core.hpp"
#include "cgnls/physics.hpp"

namespace cgnls {

/// Initial- or boundary-condition record: a point with the supervised field
/// values (u1, v1, u2, v2).
struct SupervisedRecord {
  Point p;
  std::array<double, 4> value{};
};

enum class BoundaryMode { Periodic, Supervised };

/// The three training point sets. For the periodic boundary mode taub_times
/// holds the shared times of the pairs (x_lo, t) / (x_hi, t); for the
/// supervised mode taub holds records pinned to the x edges.
struct TrainingDataSets {
  Domain domain;
  BoundaryMode boundary_mode = BoundaryMode::Periodic;
  std::vector<SupervisedRecord> tau0;
  std::vector<double> taub_times;
  std::vector<SupervisedRecord> taub;
  std::vector<Point> tauf;

  int n0() const { return static_cast<int>(tau0.size()); }
  int nb() const {
    return boundary_mode == BoundaryMode::Periodic ? static_cast<int>(taub_times.size())
                                                   : static_cast<int>(taub.size());
  }
  int nf() const { return static_cast<int>(tauf.size()); }

  void validate() const {
    domain.validate();
    if (tauf.empty()) throw ConfigError("TrainingDataSets: tauf must be non-empty");
    for (const auto& r : tau0)
      if (r.p.t != domain.t_lo)
        throw ConfigError("TrainingDataSets: tau0 points must sit at t = t_lo");
    for (const auto& r : taub)
      if (r.p.x != domain.x_lo && r.p.x != domain.x_hi)
        throw ConfigError("TrainingDataSets: taub points must sit on the x edges");
  }
};

struct LossBreakdown {
  double loss0 = 0.0;
  double lossb = 0.0;
  double lossf = 0.0;
  double total = 0.0;
};

/// Residual evaluation mode: fixed forward coefficients, or the
/// lambda-scaled inverse form.
using ResidualMode = std::variant<CGNLSCoefficients, LambdaVector>;

namespace detail {

// Adds the adjoint of (1/n) sum of squared residual components at point p
// into the batch adjoint slab, and returns the residual components.
// Outputs are ordered (u1, v1, u2, v2); jet slots (value, d_t, d_x, d_xx).
struct ResidualAdjointSeeder {
  const ResidualMode& mode;
  double inv_n;

  // Writes lambda-gradient contributions when lam_grad is non-null
  // (inverse mode with trainable coefficients).
  std::array<double, 4> seed(JetBatch& batch, Eigen::MatrixXd* adj, int p,
                             double* lam_grad = nullptr) const {
    const Jet2 ju1 = batch.jet(0, p), jv1 = batch.jet(1, p);
    const Jet2 ju2 = batch.jet(2, p), jv2 = batch.jet(3, p);
    const double u1 = ju1.value, v1 = jv1.value, u2 = ju2.value, v2 = jv2.value;

    std::array<double, 4> f{};
    // q_c = d(loss_f)/d(f_c) = 2 f_c / n
    std::array<double, 4> q{};
    // d f_c / d value of (u1, v1, u2, v2)
    double du1[4], dv1[4], du2[4], dv2[4];
    double l1 = 1.0, l3 = 1.0;  // d_xx multipliers per component

    if (const auto* c = std::get_if<CGNLSCoefficients>(&mode)) {
      const double gr = c->gamma.real(), gi = c->gamma.imag();
      const double g = coupling(u1, v1, u2, v2, c->alpha, c->beta, gr, gi);
      f[0] = jv1.d_t - ju1.d_xx - 2.0 * g * u1;
      f[1] = ju1.d_t + jv1.d_xx + 2.0 * g * v1;
      f[2] = jv2.d_t - ju2.d_xx - 2.0 * g * u2;
      f[3] = ju2.d_t + jv2.d_xx + 2.0 * g * v2;
      if (adj == nullptr) return f;
      const double gu1 = 2.0 * c->alpha * u1 + 2.0 * gr * u2 + 2.0 * gi * v2;
      const double gv1 = 2.0 * c->alpha * v1 + 2.0 * gr * v2 - 2.0 * gi * u2;
      const double gu2 = 2.0 * c->beta * u2 + 2.0 * gr * u1 - 2.0 * gi * v1;
      const double gv2 = 2.0 * c->beta * v2 + 2.0 * gr * v1 + 2.0 * gi * u1;
      du1[0] = -2.0 * (gu1 * u1 + g); dv1[0] = -2.0 * gv1 * u1; du2[0] = -2.0 * gu2 * u1; dv2[0] = -2.0 * gv2 * u1;
      du1[1] = 2.0 * gu1 * v1; dv1[1] = 2.0 * (gv1 * v1 + g); du2[1] = 2.0 * gu2 * v1; dv2[1] = 2.0 * gv2 * v1;
      du1[2] = -2.0 * gu1 * u2; dv1[2] = -2.0 * gv1 * u2; du2[2] = -2.0 * (gu2 * u2 + g); dv2[2] = -2.0 * gv2 * u2;
      du1[3] = 2.0 * gu1 * v2; dv1[3] = 2.0 * gv1 * v2; du2[3] = 2.0 * gu2 * v2; dv2[3] = 2.0 * (gv2 * v2 + g);
    } else {
      const auto& lam = std::get<LambdaVector>(mode);
      l1 = lam.l1;
      l3 = lam.l3;
      const double s = coupling(u1, v1, u2, v2, 1.0, 1.0, 1.0, 0.0);
      f[0] = jv1.d_t - lam.l1 * ju1.d_xx - lam.l2 * s * u1;
      f[1] = ju1.d_t + lam.l1 * jv1.d_xx + lam.l2 * s * v1;
      f[2] = jv2.d_t - lam.l3 * ju2.d_xx - lam.l4 * s * u2;
      f[3] = ju2.d_t + lam.l3 * jv2.d_xx + lam.l4 * s * v2;
      if (adj == nullptr) return f;
      const double su = 2.0 * (u1 + u2), sv = 2.0 * (v1 + v2);
      du1[0] = -lam.l2 * (su * u1 + s); dv1[0] = -lam.l2 * sv * u1; du2[0] = -lam.l2 * su * u1; dv2[0] = -lam.l2 * sv * u1;
      du1[1] = lam.l2 * su * v1; dv1[1] = lam.l2 * (sv * v1 + s); du2[1] = lam.l2 * su * v1; dv2[1] = lam.l2 * sv * v1;
      du1[2] = -lam.l4 * su * u2; dv1[2] = -lam.l4 * sv * u2; du2[2] = -lam.l4 * (su * u2 + s); dv2[2] = -lam.l4 * sv * u2;
      du1[3] = lam.l4 * su * v2; dv1[3] = lam.l4 * sv * v2; du2[3] = lam.l4 * su * v2; dv2[3] = lam.l4 * (sv * v2 + s);
      if (lam_grad != nullptr) {
        const double q0 = 2.0 * inv_n * f[0], q1 = 2.0 * inv_n * f[1];
        const double q2 = 2.0 * inv_n * f[2], q3 = 2.0 * inv_n * f[3];
        lam_grad[0] += q0 * (-ju1.d_xx) + q1 * jv1.d_xx;
        lam_grad[1] += q0 * (-s * u1) + q1 * (s * v1);
        lam_grad[2] += q2 * (-ju2.d_xx) + q3 * jv2.d_xx;
        lam_grad[3] += q2 * (-s * u2) + q3 * (s * v2);
      }
    }

    for (int c = 0; c < 4; ++c) q[c] = 2.0 * inv_n * f[c];

    auto& a = *adj;
    const int col = 4 * p;
    // value-slot adjoints
    a(0, col) += q[0] * du1[0] + q[1] * du1[1] + q[2] * du1[2] + q[3] * du1[3];
    a(1, col) += q[0] * dv1[0] + q[1] * dv1[1] + q[2] * dv1[2] + q[3] * dv1[3];
    a(2, col) += q[0] * du2[0] + q[1] * du2[1] + q[2] * du2[2] + q[3] * du2[3];
    a(3, col) += q[0] * dv2[0] + q[1] * dv2[1] + q[2] * dv2[2] + q[3] * dv2[3];
    // d_t slots: f1u carries v1t, f1v carries u1t, and likewise for c2
    a(0, col + 1) += q[1];
    a(1, col + 1) += q[0];
    a(2, col + 1) += q[3];
    a(3, col + 1) += q[2];
    // d_xx slots
    a(0, col + 3) += -l1 * q[0];
    a(1, col + 3) += l1 * q[1];
    a(2, col + 3) += -l3 * q[2];
    a(3, col + 3) += l3 * q[3];
    return f;
  }
};

}  // namespace detail

/// Loss of Eq.-style forward training: mean squared initial mismatch, mean
/// squared boundary mismatch (periodic value + x-derivative pairing or
/// supervised records), and mean squared residual over collocation points.
/// Evaluates the value and, when requested, the exact parameter gradient.
class ForwardObjective {
 public:
  ForwardObjective(const NetworkShape& shape, const InputScaling& scaling,
                   const TrainingDataSets* data, ResidualMode residual)
      : shape_(shape), scaling_(scaling), data_(data), residual_(std::move(residual)) {
    shape.validate();
    if (shape.output_dim != 4)
      throw ConfigError("ForwardObjective: output_dim must be 4 (u1, v1, u2, v2)");
    data_->validate();
    b0_.configure(shape, scaling);
    bb_.configure(shape, scaling);
    bf_.configure(shape, scaling);
  }

  double operator()(std::span<const double> params, std::span<double> grad) {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
    LossBreakdown out;
    const auto& d = *data_;

    if (!d.tau0.empty()) {
      pts_.clear();
      for (const auto& r : d.tau0) pts_.push_back(r.p);
      out.loss0 = supervised_term(b0_, params, grad, pts_, d.tau0);
    }

    if (d.boundary_mode == BoundaryMode::Periodic) {
      if (!d.taub_times.empty()) out.lossb = periodic_term(params, grad);
    } else if (!d.taub.empty()) {
      pts_.clear();
      for (const auto& r : d.taub) pts_.push_back(r.p);
      out.lossb = supervised_term(bb_, params, grad, pts_, d.taub);
    }

    out.lossf = residual_term(params, grad);
    out.total = out.loss0 + out.lossb + out.lossf;
    last_ = out;
    return out.total;
  }

  const LossBreakdown& breakdown() const { return last_; }
  const ResidualMode& residual_mode() const { return residual_; }

 private:
  double supervised_term(JetBatch& batch, std::span<const double> params,
                         std::span<double> grad, const std::vector<Point>& pts,
                         const std::vector<SupervisedRecord>& recs) {
    batch.forward(params, pts);
    const double inv_n = 1.0 / static_cast<double>(recs.size());
    Eigen::MatrixXd* adj = grad.empty() ? nullptr : &batch.adjoints();
    double sum = 0.0;
    for (int p = 0; p < static_cast<int>(recs.size()); ++p) {
      for (int o = 0; o < 4; ++o) {
        const double diff = batch.value(o, p) - recs[static_cast<std::size_t>(p)].value[static_cast<std::size_t>(o)];
        sum += diff * diff;
        if (adj != nullptr) (*adj)(o, 4 * p) = 2.0 * inv_n * diff;
      }
    }
    if (adj != nullptr) batch.backward(params, grad);
    return sum * inv_n;
  }

  double periodic_term(std::span<const double> params, std::span<double> grad) {
    const auto& d = *data_;
    const int nb = static_cast<int>(d.taub_times.size());
    pts_.clear();
    for (const double t : d.taub_times) pts_.push_back({d.domain.x_lo, t});
    for (const double t : d.taub_times) pts_.push_back({d.domain.x_hi, t});
    bb_.forward(params, pts_);
    const double inv_n = 1.0 / static_cast<double>(nb);
    Eigen::MatrixXd* adj = grad.empty() ? nullptr : &bb_.adjoints();
    double sum = 0.0;
    for (int j = 0; j < nb; ++j) {
      for (int o = 0; o < 4; ++o) {
        const Jet2 lo = bb_.jet(o, j);
        const Jet2 hi = bb_.jet(o, j + nb);
        const double dv = lo.value - hi.value;
        const double dd = lo.d_x - hi.d_x;
        sum += dv * dv + dd * dd;
        if (adj != nullptr) {
          (*adj)(o, 4 * j) = 2.0 * inv_n * dv;
          (*adj)(o, 4 * (j + nb)) = -2.0 * inv_n * dv;
          (*adj)(o, 4 * j + 2) = 2.0 * inv_n * dd;
          (*adj)(o, 4 * (j + nb) + 2) = -2.0 * inv_n * dd;
        }
      }
    }
    if (adj != nullptr) bb_.backward(params, grad);
    return sum * inv_n;
  }

  double residual_term(std::span<const double> params, std::span<double> grad) {
    const auto& tauf = data_->tauf;
    bf_.forward(params, tauf);
    const double inv_n = 1.0 / static_cast<double>(tauf.size());
    Eigen::MatrixXd* adj = grad.empty() ? nullptr : &bf_.adjoints();
    detail::ResidualAdjointSeeder seeder{residual_, inv_n};
    double sum = 0.0;
    for (int p = 0; p < static_cast<int>(tauf.size()); ++p) {
      const auto f = seeder.seed(bf_, adj, p);
      sum += f[0] * f[0] + f[1] * f[1] + f[2] * f[2] + f[3] * f[3];
    }
    if (adj != nullptr) bf_.backward(params, grad);
    return sum * inv_n;
  }

  NetworkShape shape_;
  InputScaling scaling_;
  const TrainingDataSets* data_;
  ResidualMode residual_;
  JetBatch b0_, bb_, bf_;
  std::vector<Point> pts_;
  LossBreakdown last_;
};

/// Loss of Eqs. (6)-(9) evaluated without a gradient.
inline LossBreakdown compute_loss(const NetworkShape& shape, const InputScaling& scaling,
                                  const ParameterVector& params,
                                  const TrainingDataSets& data,
                                  const ResidualMode& residual) {
  ForwardObjective obj(shape, scaling, &data, residual);
  obj(std::span<const double>(params.values), std::span<double>());
  return obj.breakdown();
}

struct InverseLoss {
  double mse_p = 0.0;
  double mse_f = 0.0;
  double total = 0.0;
};

/// Joint data-misfit + residual loss of the inverse problem. The parameter
/// vector is the network parameters followed by (l1, l2, l3, l4); both MSE
/// terms run over the same sample locations.
class InverseObjective {
 public:
  InverseObjective(const NetworkShape& shape, const InputScaling& scaling,
                   const std::vector<FieldSample>* data)
      : shape_(shape), scaling_(scaling), data_(data),
        net_params_(NetLayout::make(shape).total) {
    if (shape.output_dim != 4)
      throw ConfigError("InverseObjective: output_dim must be 4");
    if (data_->empty()) throw ConfigError("InverseObjective: empty dataset");
    batch_.configure(shape, scaling);
  }

  int net_param_count() const { return net_params_; }
  int param_count() const { return net_params_ + 4; }

  double operator()(std::span<const double> x, std::span<double> grad) {
    if (static_cast<int>(x.size()) != param_count())
      throw UsageError("InverseObjective: parameter vector must carry 4 lambda entries");
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
    const std::span<const double> net = x.first(static_cast<std::size_t>(net_params_));
    const LambdaVector lam{x[static_cast<std::size_t>(net_params_)], x[static_cast<std::size_t>(net_params_) + 1],
                           x[static_cast<std::size_t>(net_params_) + 2], x[static_cast<std::size_t>(net_params_) + 3]};
    const auto& rows = *data_;
    pts_.clear();
    pts_.reserve(rows.size());
    for (const auto& r : rows) pts_.push_back(r.point);
    batch_.forward(net, pts_);

    const double inv_n = 1.0 / static_cast<double>(rows.size());
    Eigen::MatrixXd* adj = grad.empty() ? nullptr : &batch_.adjoints();
    double* lam_grad = grad.empty() ? nullptr : grad.data() + net_params_;
    ResidualMode mode = lam;
    detail::ResidualAdjointSeeder seeder{mode, inv_n};

    InverseLoss out;
    for (int p = 0; p < static_cast<int>(rows.size()); ++p) {
      const auto& r = rows[static_cast<std::size_t>(p)];
      const std::array<double, 4> target{r.u1, r.v1, r.u2, r.v2};
      for (int o = 0; o < 4; ++o) {
        const double diff = batch_.value(o, p) - target[static_cast<std::size_t>(o)];
        out.mse_p += diff * diff;
        if (adj != nullptr) (*adj)(o, 4 * p) += 2.0 * inv_n * diff;
      }
      const auto f = seeder.seed(batch_, adj, p, lam_grad);
      out.mse_f += f[0] * f[0] + f[1] * f[1] + f[2] * f[2] + f[3] * f[3];
    }
    out.mse_p *= inv_n;
    out.mse_f *= inv_n;
    out.total = out.mse_p + out.mse_f;
    if (adj != nullptr) batch_.backward(net, grad.first(static_cast<std::size_t>(net_params_)));
    last_ = out;
    return out.total;
  }

  const InverseLoss& breakdown() const { return last_; }

 private:
  NetworkShape shape_;
  InputScaling scaling_;
  const std::vector<FieldSample>* data_;
  int net_params_;
  JetBatch batch_;
  std::vector<Point> pts_;
  InverseLoss last_;
};

/// Residual score |f1u|+|f1v|+|f2u|+|f2v| of the surrogate at each point,
/// evaluated in bounded-size batches.
inline std::vector<double> residual_scores(const NetworkShape& shape,
                                           const InputScaling& scaling,
                                           std::span<const double> params,
                                           const ResidualMode& mode,
                                           std::span<const Point> pts) {
  std::vector<double> scores(pts.size());
  JetBatch batch;
  batch.configure(shape, scaling);
  detail::ResidualAdjointSeeder seeder{mode, 1.0};
  constexpr std::size_t kChunk = 4096;
  for (std::size_t start = 0; start < pts.size(); start += kChunk) {
    const std::size_t len = std::min(kChunk, pts.size() - start);
    batch.forward(params, pts.subspan(start, len));
    for (std::size_t p = 0; p < len; ++p) {
      const auto f = seeder.seed(batch, nullptr, static_cast<int>(p));
      scores[start + p] = std::abs(f[0]) + std::abs(f[1]) + std::abs(f[2]) + std::abs(f[3]);
    }
  }
  return scores;
}

}  // namespace cgnls

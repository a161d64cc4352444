#pragma once

#include <algorithm>
#include <complex>
#include <utility>
#include <vector>

#include "cgnls/core.hpp"
#include "cgnls/physics.hpp"

namespace cgnls {

/// Parameters of the closed-form one-soliton solution
///   h1 = a e^theta / (1 + e^(theta + theta* + c)),  h2 = (b/a) h1,
/// with theta = k x + i k^2 t and
///   e^c = (|a|^2 alpha + |b|^2 beta + a b* gamma + a* b gamma*) / (k + k*)^2.
struct OneSolitonSpec {
  std::complex<double> a{1.0, 0.0};
  std::complex<double> b{2.0, 0.0};
  std::complex<double> k{1.5, 1.0};
  CGNLSCoefficients coeffs{};

  void validate() const {
    if (k.real() == 0.0)
      throw ConfigError("OneSolitonSpec: Re(k) must be nonzero");
    const std::complex<double> num =
        std::norm(a) * coeffs.alpha + std::norm(b) * coeffs.beta +
        a * std::conj(b) * coeffs.gamma + std::conj(a) * b * std::conj(coeffs.gamma);
    if (std::abs(num) == 0.0)
      throw ConfigError("OneSolitonSpec: e^c numerator vanishes");
  }
};

/// Parameters of the closed-form two-soliton solution. xi_mj is the seed
/// amplitude of soliton m in component j; collisions are elastic or
/// shape-changing depending on these.
struct TwoSolitonSpec {
  std::complex<double> k1{1.0, 1.0};
  std::complex<double> k2{2.0, -1.0};
  std::complex<double> xi11{1.0, 0.0};  // soliton 1, component 1
  std::complex<double> xi12{1.0, 0.0};  // soliton 1, component 2
  std::complex<double> xi21{1.0, 0.0};  // soliton 2, component 1
  std::complex<double> xi22{1.0, 0.0};  // soliton 2, component 2
  CGNLSCoefficients coeffs{};

  void validate() const {
    if (k1.real() == 0.0) throw ConfigError("TwoSolitonSpec: Re(k1) must be nonzero");
    if (k2.real() == 0.0) throw ConfigError("TwoSolitonSpec: Re(k2) must be nonzero");
    if (std::abs(k1 + std::conj(k2)) == 0.0)
      throw ConfigError("TwoSolitonSpec: k1 + conj(k2) must be nonzero");
    if (std::abs(k1 - k2) == 0.0)
      throw ConfigError("TwoSolitonSpec: k1 and k2 must differ");
  }
};

namespace detail {

template <typename Real>
using Cx = std::complex<Real>;

template <typename Real>
Cx<Real> widen(const std::complex<double>& z) {
  return Cx<Real>(static_cast<Real>(z.real()), static_cast<Real>(z.imag()));
}

// Sesquilinear interaction kernel between the seed polarizations
// (xi_m1, xi_m2) and (xi_n1, xi_n2):
//   (alpha xi_m1 xi_n1* + beta xi_m2 xi_n2*
//    + gamma xi_m1 xi_n2* + gamma* xi_m2 xi_n1*) / (k_m + k_n*).
// With a single seed (a, b) this reduces to the one-soliton e^c numerator.
template <typename Real>
Cx<Real> phi_kernel(const Cx<Real>& xm1, const Cx<Real>& xm2, const Cx<Real>& xn1,
                    const Cx<Real>& xn2, const Cx<Real>& km, const Cx<Real>& kn,
                    Real alpha, Real beta, const Cx<Real>& gamma) {
  const Cx<Real> num = alpha * xm1 * std::conj(xn1) + beta * xm2 * std::conj(xn2) +
                       gamma * xm1 * std::conj(xn2) +
                       std::conj(gamma) * xm2 * std::conj(xn1);
  return num / (km + std::conj(kn));
}

template <typename Real>
struct OneSolitonConstants {
  Cx<Real> a, b, k, ratio;  // ratio = b / a
  Cx<Real> ec;              // e^c

  static OneSolitonConstants make(const OneSolitonSpec& s) {
    s.validate();
    OneSolitonConstants c;
    c.a = widen<Real>(s.a);
    c.b = widen<Real>(s.b);
    c.k = widen<Real>(s.k);
    c.ratio = c.b / c.a;
    const Cx<Real> gamma = widen<Real>(s.coeffs.gamma);
    const Cx<Real> num = static_cast<Real>(s.coeffs.alpha) * std::norm(c.a) +
                         static_cast<Real>(s.coeffs.beta) * std::norm(c.b) +
                         c.a * std::conj(c.b) * gamma +
                         std::conj(c.a) * c.b * std::conj(gamma);
    const Cx<Real> kk = c.k + std::conj(c.k);
    c.ec = num / (kk * kk);
    return c;
  }

  std::pair<Cx<Real>, Cx<Real>> eval(Real x, Real t) const {
    const Cx<Real> theta = k * x + Cx<Real>(0, 1) * (k * k) * t;
    const Cx<Real> e = std::exp(theta);
    const Cx<Real> h1 = a * e / (Real(1) + std::exp(Real(2) * theta.real()) * ec);
    return {h1, ratio * h1};
  }
};

template <typename Real>
struct TwoSolitonConstants {
  Cx<Real> k1, k2, xi11, xi12, xi21, xi22;
  Cx<Real> ed0, er1, er2, er3;          // e^{delta_0}, e^{R_1}, e^{R_2}, e^{R_3}
  Cx<Real> ed11, ed21, ed12, ed22;      // e^{delta_mj}

  static TwoSolitonConstants make(const TwoSolitonSpec& s) {
    s.validate();
    TwoSolitonConstants c;
    c.k1 = widen<Real>(s.k1);
    c.k2 = widen<Real>(s.k2);
    c.xi11 = widen<Real>(s.xi11);
    c.xi12 = widen<Real>(s.xi12);
    c.xi21 = widen<Real>(s.xi21);
    c.xi22 = widen<Real>(s.xi22);
    const Real alpha = static_cast<Real>(s.coeffs.alpha);
    const Real beta = static_cast<Real>(s.coeffs.beta);
    const Cx<Real> gamma = widen<Real>(s.coeffs.gamma);

    auto phi = [&](int m, int n) {
      const Cx<Real> xm1 = m == 1 ? c.xi11 : c.xi21;
      const Cx<Real> xm2 = m == 1 ? c.xi12 : c.xi22;
      const Cx<Real> xn1 = n == 1 ? c.xi11 : c.xi21;
      const Cx<Real> xn2 = n == 1 ? c.xi12 : c.xi22;
      const Cx<Real> km = m == 1 ? c.k1 : c.k2;
      const Cx<Real> kn = n == 1 ? c.k1 : c.k2;
      return phi_kernel(xm1, xm2, xn1, xn2, km, kn, alpha, beta, gamma);
    };
    const Cx<Real> p11 = phi(1, 1), p12 = phi(1, 2), p21 = phi(2, 1), p22 = phi(2, 2);
    const Cx<Real> s1 = c.k1 + std::conj(c.k1);  // 2 Re k1
    const Cx<Real> s2 = c.k2 + std::conj(c.k2);
    const Cx<Real> s12 = c.k1 + std::conj(c.k2);
    const Cx<Real> s21 = c.k2 + std::conj(c.k1);
    const Cx<Real> dk = c.k1 - c.k2;

    c.ed0 = p12 / s12;
    c.er1 = p11 / s1;
    c.er2 = p22 / s2;
    c.er3 = std::norm(dk) * (p11 * p22 - p12 * p21) / (s1 * s2 * std::norm(s12));
    c.ed11 = dk * (c.xi11 * p21 - c.xi21 * p11) / (s1 * s21);
    c.ed21 = -dk * (c.xi21 * p12 - c.xi11 * p22) / (s2 * s12);
    c.ed12 = dk * (c.xi12 * p21 - c.xi22 * p11) / (s1 * s21);
    c.ed22 = -dk * (c.xi22 * p12 - c.xi12 * p22) / (s2 * s12);
    return c;
  }

  std::pair<Cx<Real>, Cx<Real>> eval(Real x, Real t) const {
    const Cx<Real> i{0, 1};
    const Cx<Real> eta1 = k1 * (x + i * k1 * t);
    const Cx<Real> eta2 = k2 * (x + i * k2 * t);
    const Cx<Real> e1 = std::exp(eta1);
    const Cx<Real> e2 = std::exp(eta2);
    const Real e11 = std::exp(Real(2) * eta1.real());  // e^{eta1 + eta1*}
    const Real e22 = std::exp(Real(2) * eta2.real());
    const Cx<Real> e12 = std::exp(eta1 + std::conj(eta2));
    const Cx<Real> cross = e12 * ed0;
    const Cx<Real> den = Real(1) + e11 * er1 + cross + std::conj(cross) +
                         e22 * er2 + e11 * e22 * er3;
    const Cx<Real> num1 = xi11 * e1 + xi21 * e2 + e11 * e2 * ed11 + e22 * e1 * ed21;
    const Cx<Real> num2 = xi12 * e1 + xi22 * e2 + e11 * e2 * ed12 + e22 * e1 * ed22;
    return {num1 / den, num2 / den};
  }
};

}  // namespace detail

/// Interaction constant phi_mn of the two-soliton solution (already divided
/// by k_m + k_n*).
inline std::complex<double> phi_mn(const TwoSolitonSpec& spec, int m, int n) {
  if (m < 1 || m > 2 || n < 1 || n > 2)
    throw UsageError("phi_mn: indices must be 1 or 2");
  const auto km = m == 1 ? spec.k1 : spec.k2;
  const auto kn = n == 1 ? spec.k1 : spec.k2;
  if (std::abs(km + std::conj(kn)) == 0.0)
    throw ConfigError("phi_mn: k_m + conj(k_n) vanishes");
  const auto xm1 = m == 1 ? spec.xi11 : spec.xi21;
  const auto xm2 = m == 1 ? spec.xi12 : spec.xi22;
  const auto xn1 = n == 1 ? spec.xi11 : spec.xi21;
  const auto xn2 = n == 1 ? spec.xi12 : spec.xi22;
  return detail::phi_kernel(xm1, xm2, xn1, xn2, km, kn, spec.coeffs.alpha,
                            spec.coeffs.beta, spec.coeffs.gamma);
}

/// One-soliton field with precomputed constants; evaluable in double or, for
/// finite-difference probes, in long double.
class OneSolitonField {
 public:
  explicit OneSolitonField(const OneSolitonSpec& spec)
      : spec_(spec),
        cd_(detail::OneSolitonConstants<double>::make(spec)),
        cl_(detail::OneSolitonConstants<long double>::make(spec)) {}

  const OneSolitonSpec& spec() const { return spec_; }
  const CGNLSCoefficients& coeffs() const { return spec_.coeffs; }

  std::pair<std::complex<double>, std::complex<double>> operator()(const Point& p) const {
    return cd_.eval(p.x, p.t);
  }
  std::pair<std::complex<long double>, std::complex<long double>> eval_ld(
      long double x, long double t) const {
    return cl_.eval(x, t);
  }

 private:
  OneSolitonSpec spec_;
  detail::OneSolitonConstants<double> cd_;
  detail::OneSolitonConstants<long double> cl_;
};

/// Two-soliton field; see OneSolitonField.
class TwoSolitonField {
 public:
  explicit TwoSolitonField(const TwoSolitonSpec& spec)
      : spec_(spec),
        cd_(detail::TwoSolitonConstants<double>::make(spec)),
        cl_(detail::TwoSolitonConstants<long double>::make(spec)) {}

  const TwoSolitonSpec& spec() const { return spec_; }
  const CGNLSCoefficients& coeffs() const { return spec_.coeffs; }

  std::pair<std::complex<double>, std::complex<double>> operator()(const Point& p) const {
    return cd_.eval(p.x, p.t);
  }
  std::pair<std::complex<long double>, std::complex<long double>> eval_ld(
      long double x, long double t) const {
    return cl_.eval(x, t);
  }

 private:
  TwoSolitonSpec spec_;
  detail::TwoSolitonConstants<double> cd_;
  detail::TwoSolitonConstants<long double> cl_;
};

inline std::pair<std::complex<double>, std::complex<double>> one_soliton(
    const OneSolitonSpec& spec, const Point& p) {
  return OneSolitonField(spec)(p);
}

inline std::pair<std::complex<double>, std::complex<double>> two_soliton(
    const TwoSolitonSpec& spec, const Point& p) {
  return TwoSolitonField(spec)(p);
}

/// Samples a field on the uniform tensor grid, t varying slowest (row-major
/// in t, then x), split into real/imaginary parts.
template <typename Field>
std::vector<FieldSample> sample_grid(const Field& field, const GridSpec& grid) {
  grid.validate();
  std::vector<FieldSample> rows;
  rows.reserve(static_cast<std::size_t>(grid.size()));
  for (int it = 0; it < grid.nt; ++it) {
    const double t = grid.t_min + it * grid.dt();
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x_min + ix * grid.dx();
      const auto [h1, h2] = field(Point{x, t});
      rows.push_back({Point{x, t}, h1.real(), h1.imag(), h2.real(), h2.imag()});
    }
  }
  return rows;
}

/// Max-component residual of the governing equations over the grid interior,
/// with derivatives taken by central finite differences of the field. The
/// probe runs in extended precision: at step 1e-5 the second-difference
/// round-off in plain double (~4 eps |h| / step^2) would drown the 1e-6
/// scale this check certifies.
template <typename Field>
double pde_selfcheck(const Field& field, const GridSpec& grid, double fd_step) {
  grid.validate();
  if (!(fd_step > 0.0)) throw UsageError("pde_selfcheck: fd_step must be positive");
  if (grid.nx < 3 || grid.nt < 3)
    throw UsageError("pde_selfcheck: grid interior is empty");
  using Real = long double;
  const Real h = static_cast<Real>(fd_step);
  const auto& c = field.coeffs();
  const Real alpha = c.alpha, beta = c.beta, gr = c.gamma.real(), gi = c.gamma.imag();
  long double worst = 0.0L;
  for (int it = 1; it + 1 < grid.nt; ++it) {
    const Real t = static_cast<Real>(grid.t_min) + it * static_cast<Real>(grid.dt());
    for (int ix = 1; ix + 1 < grid.nx; ++ix) {
      const Real x = static_cast<Real>(grid.x_min) + ix * static_cast<Real>(grid.dx());
      const auto f0 = field.eval_ld(x, t);
      const auto fxp = field.eval_ld(x + h, t);
      const auto fxm = field.eval_ld(x - h, t);
      const auto ftp = field.eval_ld(x, t + h);
      const auto ftm = field.eval_ld(x, t - h);
      const auto d_t = [&](auto sel) { return (sel(ftp) - sel(ftm)) / (2 * h); };
      const auto d_xx = [&](auto sel) {
        return (sel(fxp) - Real(2) * sel(f0) + sel(fxm)) / (h * h);
      };
      const auto h1 = [](const auto& f) { return f.first; };
      const auto h2 = [](const auto& f) { return f.second; };
      const auto h1t = d_t(h1), h2t = d_t(h2), h1xx = d_xx(h1), h2xx = d_xx(h2);
      const auto r = detail::split_residual<Real>(
          f0.first.real(), f0.first.imag(), f0.second.real(), f0.second.imag(),
          h1t.real(), h1t.imag(), h2t.real(), h2t.imag(),
          h1xx.real(), h1xx.imag(), h2xx.real(), h2xx.imag(),
          alpha, beta, gr, gi);
      for (const Real v : r) worst = std::max(worst, std::abs(v));
    }
  }
  return static_cast<double>(worst);
}

}  // namespace cgnls

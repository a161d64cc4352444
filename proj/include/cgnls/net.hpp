#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cgnls/core.hpp"
#include "cgnls/rng.hpp"

namespace cgnls {

enum class Activation { Tanh, Identity };

/// Fully connected surrogate architecture: inputs (x, t), `hidden_layers`
/// tanh layers of `hidden_width` neurons, linear output layer of
/// `output_dim` neurons ordered (u1, v1, u2, v2, ...).
struct NetworkShape {
  int input_dim = 2;
  int hidden_layers = 1;
  int hidden_width = 1;
  int output_dim = 2;
  Activation activation = Activation::Tanh;

  void validate() const {
    if (input_dim != 2)
      throw ConfigError("NetworkShape: input_dim must be 2 (x, t)");
    if (output_dim < 2 || output_dim % 2 != 0)
      throw ConfigError("NetworkShape: output_dim must be even and >= 2");
    if (hidden_layers < 1 || hidden_width < 1)
      throw ConfigError("NetworkShape: hidden_layers and hidden_width must be >= 1");
  }

  int components() const { return output_dim / 2; }
};

/// Deterministic offset table for the flat parameter vector. Layer l
/// (1-based, hidden_layers + 1 total) owns a column-major weight block of
/// size dims[l] x dims[l-1] followed by a bias block of size dims[l].
struct NetLayout {
  std::vector<int> dims;    // dims[0] = input_dim ... dims[L] = output_dim
  std::vector<int> w_off;   // weight block offset per layer, index 1..L
  std::vector<int> b_off;   // bias block offset per layer, index 1..L
  int total = 0;

  static NetLayout make(const NetworkShape& shape) {
    shape.validate();
    NetLayout lo;
    const int L = shape.hidden_layers + 1;
    lo.dims.resize(L + 1);
    lo.dims[0] = shape.input_dim;
    for (int l = 1; l <= shape.hidden_layers; ++l) lo.dims[l] = shape.hidden_width;
    lo.dims[L] = shape.output_dim;
    lo.w_off.assign(L + 1, 0);
    lo.b_off.assign(L + 1, 0);
    int off = 0;
    for (int l = 1; l <= L; ++l) {
      lo.w_off[l] = off;
      off += lo.dims[l] * lo.dims[l - 1];
      lo.b_off[l] = off;
      off += lo.dims[l];
    }
    lo.total = off;
    return lo;
  }

  int layers() const { return static_cast<int>(dims.size()) - 1; }
};

/// Flat trainable parameters (weights and biases of every layer).
struct ParameterVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double* data() { return values.data(); }
  const double* data() const { return values.data(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  void validate(const NetworkShape& shape) const {
    const NetLayout lo = NetLayout::make(shape);
    if (static_cast<int>(values.size()) != lo.total)
      throw ConfigError("ParameterVector: size " + std::to_string(values.size()) +
                        " does not match shape (expected " + std::to_string(lo.total) + ")");
    for (const double v : values)
      if (!is_finite(v)) throw NumericError("ParameterVector: non-finite entry");
  }
};

/// Value and the input derivatives carried through the network at one point.
struct Jet2 {
  double value = 0.0;
  double d_t = 0.0;
  double d_x = 0.0;
  double d_xx = 0.0;
};

/// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
inline ParameterVector init_params(const NetworkShape& shape, std::uint64_t seed) {
  const NetLayout lo = NetLayout::make(shape);
  ParameterVector p;
  p.values.assign(static_cast<std::size_t>(lo.total), 0.0);
  Rng rng(seed);
  for (int l = 1; l <= lo.layers(); ++l) {
    const int fan_in = lo.dims[l - 1];
    const int fan_out = lo.dims[l];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    double* w = p.values.data() + lo.w_off[l];
    for (int j = 0; j < fan_in * fan_out; ++j) w[j] = rng.uniform(-bound, bound);
    // biases stay zero
  }
  return p;
}

namespace detail {

inline double act_value(Activation a, double z) {
  return a == Activation::Tanh ? std::tanh(z) : z;
}

// Applies the activation to a pre-activation jet using the second-order
// chain rule. For s = act(z): s_t = s' z_t, s_x = s' z_x,
// s_xx = s'' z_x^2 + s' z_xx. Only d/dt first order is carried (no mixed
// or second time derivatives are needed by the residuals).
inline Jet2 act_jet(Activation a, const Jet2& z) {
  if (a == Activation::Identity) return z;
  const double s = std::tanh(z.value);
  const double s1 = 1.0 - s * s;
  const double s2 = -2.0 * s * s1;
  Jet2 out;
  out.value = s;
  out.d_t = s1 * z.d_t;
  out.d_x = s1 * z.d_x;
  out.d_xx = s2 * z.d_x * z.d_x + s1 * z.d_xx;
  return out;
}

// One affine layer over 4-component jet bundles.
inline void affine4(const double* w, const double* b, const double* in, int n_in,
                    double* out, int n_out) {
  for (int i = 0; i < n_out; ++i) {
    double acc[4] = {b[i], 0.0, 0.0, 0.0};
    for (int j = 0; j < n_in; ++j) {
      const double wij = w[i + static_cast<std::ptrdiff_t>(j) * n_out];
      for (int c = 0; c < 4; ++c) acc[c] += wij * in[j * 4 + c];
    }
    for (int c = 0; c < 4; ++c) out[i * 4 + c] = acc[c];
  }
}

// Shared propagation kernel. The value lane never reads the derivative
// lanes, so running it with zeroed seeds IS the plain forward pass,
// bit for bit.
inline std::vector<double> propagate4(const NetworkShape& shape,
                                      const ParameterVector& params, const Point& p,
                                      bool seed_derivatives) {
  const NetLayout lo = NetLayout::make(shape);
  const double sx = seed_derivatives ? 1.0 : 0.0;
  std::vector<double> a = {p.x, 0.0, sx, 0.0, p.t, sx, 0.0, 0.0};
  std::vector<double> z;
  for (int l = 1; l <= lo.layers(); ++l) {
    z.assign(static_cast<std::size_t>(lo.dims[l]) * 4, 0.0);
    affine4(params.data() + lo.w_off[l], params.data() + lo.b_off[l], a.data(),
            lo.dims[l - 1], z.data(), lo.dims[l]);
    for (const double v : z)
      if (!is_finite(v))
        throw NumericError("forward_jet: non-finite value in layer " + std::to_string(l));
    if (l < lo.layers()) {
      for (int i = 0; i < lo.dims[l]; ++i) {
        const Jet2 zi{z[i * 4], z[i * 4 + 1], z[i * 4 + 2], z[i * 4 + 3]};
        const Jet2 ai = act_jet(shape.activation, zi);
        z[i * 4] = ai.value;
        z[i * 4 + 1] = ai.d_t;
        z[i * 4 + 2] = ai.d_x;
        z[i * 4 + 3] = ai.d_xx;
      }
    }
    a.swap(z);
  }
  return a;
}

}  // namespace detail

/// Plain forward pass; derivatives are not propagated (zero seeds ride
/// along and are discarded).
inline std::vector<double> forward_values(const NetworkShape& shape,
                                          const ParameterVector& params,
                                          const Point& p) {
  const auto a = detail::propagate4(shape, params, p, false);
  std::vector<double> out(static_cast<std::size_t>(shape.output_dim));
  for (int i = 0; i < shape.output_dim; ++i) out[static_cast<std::size_t>(i)] = a[i * 4];
  return out;
}

/// Evaluates every output together with its exact (d_t, d_x, d_xx) at one
/// point, by layer-wise propagation of the 4-component jet.
inline std::vector<Jet2> forward_jet(const NetworkShape& shape,
                                     const ParameterVector& params,
                                     const Point& p) {
  const auto a = detail::propagate4(shape, params, p, true);
  std::vector<Jet2> out(static_cast<std::size_t>(shape.output_dim));
  for (int i = 0; i < shape.output_dim; ++i)
    out[static_cast<std::size_t>(i)] = Jet2{a[i * 4], a[i * 4 + 1], a[i * 4 + 2], a[i * 4 + 3]};
  return out;
}

}  // namespace cgnls

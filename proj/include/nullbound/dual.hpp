#pragma once

#include <cmath>

#include "nullbound/types.hpp"

namespace nullbound {

/// Second-order forward-mode dual number: a value together with its full
/// gradient and Hessian with respect to the chart coordinates.
///
/// Storage is dense but bounded by kMaxDimension so that no arithmetic
/// touches the heap.
struct SecondOrderDual {
  using Gradient = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDimension, 1>;
  using Hessian = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                                kMaxDimension, kMaxDimension>;

  double value = 0.0;
  Gradient gradient;
  Hessian hessian;

  static SecondOrderDual constant(double c, int dim) {
    SecondOrderDual d;
    d.value = c;
    d.gradient = Gradient::Zero(dim);
    d.hessian = Hessian::Zero(dim, dim);
    return d;
  }

  /// The coordinate function x_index evaluated at `x`.
  static SecondOrderDual variable(double x, int index, int dim) {
    SecondOrderDual d = constant(x, dim);
    d.gradient(index) = 1.0;
    return d;
  }

  int dimension() const { return static_cast<int>(gradient.size()); }
};

/// Applies a scalar function given its value and first two derivatives at
/// the argument's value (chain rule to second order).
inline SecondOrderDual chain(const SecondOrderDual& a, double f, double df,
                             double d2f) {
  SecondOrderDual r;
  r.value = f;
  r.gradient = df * a.gradient;
  r.hessian = df * a.hessian;
  if (d2f != 0.0) r.hessian.noalias() += d2f * a.gradient * a.gradient.transpose();
  return r;
}

inline SecondOrderDual operator-(const SecondOrderDual& a) {
  SecondOrderDual r;
  r.value = -a.value;
  r.gradient = -a.gradient;
  r.hessian = -a.hessian;
  return r;
}

inline SecondOrderDual operator+(const SecondOrderDual& a, const SecondOrderDual& b) {
  SecondOrderDual r;
  r.value = a.value + b.value;
  r.gradient = a.gradient + b.gradient;
  r.hessian = a.hessian + b.hessian;
  return r;
}

inline SecondOrderDual operator-(const SecondOrderDual& a, const SecondOrderDual& b) {
  SecondOrderDual r;
  r.value = a.value - b.value;
  r.gradient = a.gradient - b.gradient;
  r.hessian = a.hessian - b.hessian;
  return r;
}

inline SecondOrderDual operator*(const SecondOrderDual& a, const SecondOrderDual& b) {
  SecondOrderDual r;
  r.value = a.value * b.value;
  r.gradient = a.value * b.gradient + b.value * a.gradient;
  r.hessian = a.value * b.hessian + b.value * a.hessian;
  r.hessian.noalias() += a.gradient * b.gradient.transpose();
  r.hessian.noalias() += b.gradient * a.gradient.transpose();
  return r;
}

inline SecondOrderDual reciprocal(const SecondOrderDual& a) {
  const double inv = 1.0 / a.value;
  return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline SecondOrderDual operator/(const SecondOrderDual& a, const SecondOrderDual& b) {
  return a * reciprocal(b);
}

inline SecondOrderDual sin(const SecondOrderDual& a) {
  const double s = std::sin(a.value);
  return chain(a, s, std::cos(a.value), -s);
}

inline SecondOrderDual cos(const SecondOrderDual& a) {
  const double c = std::cos(a.value);
  return chain(a, c, -std::sin(a.value), -c);
}

inline SecondOrderDual exp(const SecondOrderDual& a) {
  const double e = std::exp(a.value);
  return chain(a, e, e, e);
}

inline SecondOrderDual log(const SecondOrderDual& a) {
  const double inv = 1.0 / a.value;
  return chain(a, std::log(a.value), inv, -inv * inv);
}

inline SecondOrderDual sqrt(const SecondOrderDual& a) {
  const double s = std::sqrt(a.value);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.value));
}

// abs'(0) = 0 by convention.
inline SecondOrderDual abs(const SecondOrderDual& a) {
  const double sign = a.value > 0.0 ? 1.0 : (a.value < 0.0 ? -1.0 : 0.0);
  return chain(a, std::abs(a.value), sign, 0.0);
}

inline SecondOrderDual tanh(const SecondOrderDual& a) {
  const double t = std::tanh(a.value);
  const double dt = 1.0 - t * t;
  return chain(a, t, dt, -2.0 * t * dt);
}

/// a^c for a constant exponent c.
inline SecondOrderDual pow(const SecondOrderDual& a, double c) {
  if (c == 0.0) return SecondOrderDual::constant(1.0, a.dimension());
  if (c == 1.0) return a;
  const double f = std::pow(a.value, c);
  const double df = c * std::pow(a.value, c - 1.0);
  const double d2f = c == 2.0 ? 2.0 : c * (c - 1.0) * std::pow(a.value, c - 2.0);
  return chain(a, f, df, d2f);
}

inline double value_of(double x) { return x; }
inline double value_of(const SecondOrderDual& x) { return x.value; }

inline bool all_finite(double x) { return std::isfinite(x); }
inline bool all_finite(const SecondOrderDual& x) {
  return std::isfinite(x.value) && x.gradient.allFinite() && x.hessian.allFinite();
}

}  // namespace nullbound

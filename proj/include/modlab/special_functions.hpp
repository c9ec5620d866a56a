#pragma once

#include "modlab/common.hpp"

namespace modlab {

// Gaussian heat kernel h_t on R^n, (4 pi t)^{-n/2} e^{-|x|^2/(4t)}.
template <typename Scalar>
Scalar heat_kernel_r2(Scalar t, Scalar r2, int n) {
  if (!(t > Scalar(0))) throw std::invalid_argument("heat_kernel: t must be > 0");
  return std::pow(Scalar(4) * Scalar(kPi) * t, Scalar(-0.5) * n) * std::exp(-r2 / (Scalar(4) * t));
}
inline Real heat_kernel(Real t, const Point& x, int dim) {
  return heat_kernel_r2(t, norm_sq(x, dim), dim);
}
inline Real heat_kernel(Real t, Real x) { return heat_kernel_r2(t, x * x, 1); }

// Poisson kernel p_t on R^n, Gamma((n+1)/2) pi^{-(n+1)/2} (t/(t^2+|x|^2))^{(n+1)/2}.
template <typename Scalar>
Scalar poisson_kernel_r2(Scalar t, Scalar r2, int n) {
  if (!(t > Scalar(0))) throw std::invalid_argument("poisson_kernel: t must be > 0");
  Scalar a = Scalar(0.5) * (n + 1);
  return std::tgamma(a) * std::pow(Scalar(kPi), -a) * std::pow(t / (t * t + r2), a);
}
inline Real poisson_kernel(Real t, const Point& x, int dim) {
  return poisson_kernel_r2(t, norm_sq(x, dim), dim);
}
inline Real poisson_kernel(Real t, Real x) { return poisson_kernel_r2(t, x * x, 1); }

// Two-sided envelope of the Hermite-Poisson kernel:
// e^{-r^2/2} (1+r)^{-n/2} [ln(e+r)]^{-3/2}.
template <typename Scalar>
Scalar omega_weight_r(Scalar r, int n) {
  return std::exp(Scalar(-0.5) * r * r) * std::pow(Scalar(1) + r, Scalar(-0.5) * n) *
         std::pow(std::log(std::exp(Scalar(1)) + r), Scalar(-1.5));
}
inline Real omega_weight(const Point& y, int dim) { return omega_weight_r(norm(y, dim), dim); }
inline Real omega_weight(Real y) { return omega_weight_r(std::abs(y), 1); }

// Normalized 1D Hermite functions via the stable three-term recurrence
//   h_{k+1}(x) = x sqrt(2/(k+1)) h_k(x) - sqrt(k/(k+1)) h_{k-1}(x),
// h_0 = pi^{-1/4} e^{-x^2/2}. No factorials, no overflow for k <= 512, |x| <= 40.
template <typename Scalar>
Scalar hermite_function(int k, Scalar x) {
  if (k < 0) throw std::invalid_argument("hermite_function: k must be >= 0");
  Scalar h0 = std::pow(Scalar(kPi), Scalar(-0.25)) * std::exp(Scalar(-0.5) * x * x);
  if (k == 0) return h0;
  Scalar h1 = std::sqrt(Scalar(2)) * x * h0;
  for (int j = 1; j < k; ++j) {
    Scalar h2 = x * std::sqrt(Scalar(2) / (j + 1)) * h1 - std::sqrt(Scalar(j) / (j + 1)) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// All orders 0..kmax at once (one recurrence pass).
inline ArrayXr hermite_function_row(int kmax, Real x) {
  ArrayXr h(kmax + 1);
  h[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (kmax >= 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (int j = 1; j < kmax; ++j)
    h[j + 1] = x * std::sqrt(2.0 / (j + 1)) * h[j] - std::sqrt(Real(j) / (j + 1)) * h[j - 1];
  return h;
}

// Hermite heat kernel, coth/tanh parametrization:
//   (2 pi sinh 2t)^{-n/2} exp(-[ |x-y|^2 coth(2t)/2 + (x.y) tanh t ]).
inline Real hermite_heat_coth_form(Real t, const Point& x, const Point& y, int dim) {
  if (!(t > 0)) throw std::invalid_argument("hermite_heat: t must be > 0");
  Real dot = dim == 1 ? x[0] * y[0] : x[0] * y[0] + x[1] * y[1];
  Point d{x[0] - y[0], x[1] - y[1]};
  Real s2 = std::sinh(2 * t);
  Real expo = 0.5 * norm_sq(d, dim) * (std::cosh(2 * t) / s2) + dot * std::tanh(t);
  return std::pow(2 * kPi * s2, -0.5 * dim) * std::exp(-expo);
}

// Same kernel under s = tanh t:
//   ((1-s^2)/(4 pi s))^{n/2} exp(-[ s|x+y|^2 + |x-y|^2/s ]/4).
// Stable as s -> 0+, so this is the evaluation route of record.
inline Real hermite_heat_meda_form(Real s, const Point& x, const Point& y, int dim) {
  if (!(s > 0) || !(s < 1)) throw std::invalid_argument("hermite_heat: need 0 < s < 1");
  Point p{x[0] + y[0], x[1] + y[1]};
  Point d{x[0] - y[0], x[1] - y[1]};
  Real expo = 0.25 * (s * norm_sq(p, dim) + norm_sq(d, dim) / s);
  return std::pow((1 - s * s) / (4 * kPi * s), 0.5 * dim) * std::exp(-expo);
}

// Evaluation of record in the time variable. 1-s^2 is computed as sech^2(t),
// which stays exact after tanh saturates to 1 in floating point (t >~ 19),
// where the kernel has already collapsed onto e^{-tn} Phi_0(x) Phi_0(y).
inline Real hermite_heat_kernel(Real t, const Point& x, const Point& y, int dim) {
  if (!(t > 0)) throw std::invalid_argument("hermite_heat: t must be > 0");
  Real s = std::tanh(t);
  Real sech2 = 1.0 / (std::cosh(t) * std::cosh(t));
  Point p{x[0] + y[0], x[1] + y[1]};
  Point d{x[0] - y[0], x[1] - y[1]};
  Real expo = 0.25 * (s * norm_sq(p, dim) + norm_sq(d, dim) / s);
  return std::pow(sech2 / (4 * kPi * s), 0.5 * dim) * std::exp(-expo);
}
inline Real hermite_heat_kernel(Real t, Real x, Real y) {
  return hermite_heat_kernel(t, Point{x, 0}, Point{y, 0}, 1);
}

}  // namespace modlab

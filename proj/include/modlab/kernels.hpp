#pragma once

#include "modlab/grid.hpp"
#include "modlab/special_functions.hpp"

#include <vector>

namespace modlab {

struct KernelSpec {
  enum class Tag { heat, poisson, hermite_heat, hermite_poisson };
  Tag tag = Tag::heat;
  Real t = 1.0;
  int quad_nodes = 64;  // hermite_poisson only

  static KernelSpec heat(Real t) { return make(Tag::heat, t, 64); }
  static KernelSpec poisson(Real t) { return make(Tag::poisson, t, 64); }
  static KernelSpec hermite_heat(Real t) { return make(Tag::hermite_heat, t, 64); }
  static KernelSpec hermite_poisson(Real t, int M = 64) { return make(Tag::hermite_poisson, t, M); }

 private:
  static KernelSpec make(Tag tag, Real t, int M) {
    if (!(t > 0)) throw std::invalid_argument("kernel: t must be > 0");
    if (M < 8) throw std::invalid_argument("kernel: quadrature needs M >= 8");
    return KernelSpec{tag, t, M};
  }
};

// Quadrature for e^{-t sqrt(H)} = pi^{-1/2} int_0^inf e^{-tau} tau^{-1/2}
// e^{-(t^2/4 tau) H} dtau. Rewritten over heat time s = t^2/(4 tau) and
// discretized by the trapezoid rule in log s: both tails of the transformed
// integrand decay double-exponentially, so M = 64 nodes already reproduce the
// scalar multipliers e^{-t sqrt(lambda)} to machine precision for every
// lambda >= n (plain Gauss-Laguerre in tau stalls near 1e-3 here).
struct SubordinationRule {
  std::vector<Real> heat_times;
  std::vector<Real> weights;
};

inline SubordinationRule subordination_rule(Real t, int n, int M) {
  if (!(t > 0)) throw std::invalid_argument("subordination: t must be > 0");
  if (M < 8) throw std::invalid_argument("subordination: M >= 8");
  // window: (t^2/4) e^{-v} <= 46 on the left, n e^v <= 46 on the right
  Real vlo = std::log(t * t / 184.0);
  Real vhi = std::log(46.0 / n);
  Real h = (vhi - vlo) / (M - 1);
  SubordinationRule rule;
  rule.heat_times.resize(M);
  rule.weights.resize(M);
  Real c = t / (2 * std::sqrt(kPi));
  for (int i = 0; i < M; ++i) {
    Real v = vlo + i * h;
    Real s = std::exp(v);
    rule.heat_times[i] = s;
    rule.weights[i] = c * h * std::exp(-0.5 * v) * std::exp(-(t * t / 4) / s);
  }
  return rule;
}

inline Real hermite_poisson_kernel(Real t, const Point& x, const Point& y, int dim, int M = 64) {
  SubordinationRule rule = subordination_rule(t, dim, M);
  KahanSum acc;
  for (size_t i = 0; i < rule.heat_times.size(); ++i)
    acc.add(rule.weights[i] * hermite_heat_kernel(rule.heat_times[i], x, y, dim));
  return acc.value();
}
inline Real hermite_poisson_kernel(Real t, Real x, Real y, int M = 64) {
  return hermite_poisson_kernel(t, Point{x, 0}, Point{y, 0}, 1, M);
}

// Node-doubling guard; flags a non-converged quadrature.
struct QuadratureCheck {
  Real value;
  Real doubling_delta;
  bool converged;
};

inline QuadratureCheck hermite_poisson_kernel_checked(Real t, const Point& x, const Point& y,
                                                      int dim, int M = 64, Real tol = 1e-8) {
  Real v1 = hermite_poisson_kernel(t, x, y, dim, M);
  Real v2 = hermite_poisson_kernel(t, x, y, dim, 2 * M);
  Real d = std::abs(v1 - v2);
  return {v1, d, d <= tol * std::max(1.0, std::abs(v2))};
}

// Pointwise evaluation of a kernel profile (heat/poisson take the difference
// x - y; Hermite kernels are genuinely two-point).
inline Real kernel_value(const KernelSpec& k, const Point& x, const Point& y, int dim) {
  Point d{x[0] - y[0], x[1] - y[1]};
  switch (k.tag) {
    case KernelSpec::Tag::heat:
      return heat_kernel(k.t, d, dim);
    case KernelSpec::Tag::poisson:
      return poisson_kernel(k.t, d, dim);
    case KernelSpec::Tag::hermite_heat:
      return hermite_heat_kernel(k.t, x, y, dim);
    case KernelSpec::Tag::hermite_poisson:
      return hermite_poisson_kernel(k.t, x, y, dim, k.quad_nodes);
  }
  return 0.0;
}

// Upper Gaussian comparison: h^H_t(x,y) <= (1-s^2)^{n/2} h_s(x-y), s = tanh t,
// with equality at x = y = 0. Returns the largest signed excess over the
// (x,y) grid square; a correct kernel keeps it at roundoff level.
inline Real check_upper_bound(Real t, const Grid& grid) {
  if (!(t > 0)) throw std::invalid_argument("check_upper_bound: t must be > 0");
  Real s = std::tanh(t);
  Real pref = std::pow(1 - s * s, 0.5 * grid.dim);
  long n = grid.size();
  std::vector<Real> row_max(n);
  parallel_for(n, [&](long i) {
    Point x = grid.point(i);
    Real worst = -kInf;
    for (long j = 0; j < n; ++j) {
      Point y = grid.point(j);
      Point d{x[0] - y[0], x[1] - y[1]};
      Real lhs = hermite_heat_meda_form(s, x, y, grid.dim);
      Real rhs = pref * heat_kernel(s, d, grid.dim);
      worst = std::max(worst, lhs - rhs);
    }
    row_max[i] = worst;
  });
  Real worst = -kInf;
  for (Real v : row_max) worst = std::max(worst, v);
  return worst;
}

// Lower comparison: h^H_t(x,y) >= e^{-9s|x|^2/4} ((1-s^2)/(1+9s^2))^{n/2}
// h_{s/(1+9s^2)}(x-y). Returns the largest signed deficit.
inline Real check_lower_bound(Real t, const Grid& grid) {
  if (!(t > 0)) throw std::invalid_argument("check_lower_bound: t must be > 0");
  Real s = std::tanh(t);
  Real pref = std::pow((1 - s * s) / (1 + 9 * s * s), 0.5 * grid.dim);
  Real s_eff = s / (1 + 9 * s * s);
  long n = grid.size();
  std::vector<Real> row_max(n);
  parallel_for(n, [&](long i) {
    Point x = grid.point(i);
    Real xs = norm_sq(x, grid.dim);
    Real worst = -kInf;
    for (long j = 0; j < n; ++j) {
      Point y = grid.point(j);
      Point d{x[0] - y[0], x[1] - y[1]};
      Real lhs = std::exp(-9 * s * xs / 4) * pref * heat_kernel(s_eff, d, grid.dim);
      Real rhs = hermite_heat_meda_form(s, x, y, grid.dim);
      worst = std::max(worst, lhs - rhs);
    }
    row_max[i] = worst;
  });
  Real worst = -kInf;
  for (Real v : row_max) worst = std::max(worst, v);
  return worst;
}

// Two-sided envelope of the Hermite-Poisson kernel against omega:
// c_min = min_y p^H_t(x,y)/omega(y), c_max = max_y. Both finite and positive
// when the sandwich holds on the window.
struct SandwichResult {
  Real c_min;
  Real c_max;
};

inline SandwichResult check_poisson_sandwich(Real t, const Point& x, const Grid& grid_y,
                                             int M = 64) {
  SubordinationRule rule = subordination_rule(t, grid_y.dim, M);
  std::vector<Real> ratio(grid_y.size());
  parallel_for(grid_y.size(), [&](long j) {
    Point y = grid_y.point(j);
    KahanSum acc;
    for (size_t i = 0; i < rule.heat_times.size(); ++i)
      acc.add(rule.weights[i] * hermite_heat_kernel(rule.heat_times[i], x, y, grid_y.dim));
    ratio[j] = acc.value() / omega_weight(y, grid_y.dim);
  });
  SandwichResult r{kInf, -kInf};
  for (Real v : ratio) {
    r.c_min = std::min(r.c_min, v);
    r.c_max = std::max(r.c_max, v);
  }
  return r;
}

// Chapman-Kolmogorov residual sup_{x,y} |int h^H_t(x,z) h^H_s(z,y) dz - h^H_{t+s}(x,y)|
// on the grid (quadrature in z over the window).
inline Real chapman_kolmogorov_residual(Real t, Real s, const Grid& grid) {
  long n = grid.size();
  if (grid.dim != 1) throw std::invalid_argument("chapman_kolmogorov: 1d sweep only");
  MatrixXr Kt(n, n), Ks(n, n), Kts(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      Kt(i, j) = hermite_heat_kernel(t, grid.point(i), grid.point(j), 1);
      Ks(i, j) = hermite_heat_kernel(s, grid.point(i), grid.point(j), 1);
      Kts(i, j) = hermite_heat_kernel(t + s, grid.point(i), grid.point(j), 1);
    }
  MatrixXr prod = Kt * Ks * grid.step();
  return (prod - Kts).cwiseAbs().maxCoeff();
}

}  // namespace modlab

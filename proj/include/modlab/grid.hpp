#pragma once

#include "modlab/common.hpp"
#include "modlab/special_functions.hpp"
#include "modlab/weight.hpp"

#include <optional>
#include <string>

namespace modlab {

enum class Offset { none, half_step };

// Uniform sampling lattice of [-L, L]^dim. Coordinates per axis are
// x_j = -L + (j + o) * step, o in {0, 1/2}; with half_step no coordinate is 0.
struct Grid {
  int dim = 1;
  Real half_width = 1.0;
  long points_per_axis = 8;
  Offset offset = Offset::none;

  Real step() const { return 2 * half_width / points_per_axis; }
  long size() const {
    return dim == 1 ? points_per_axis : points_per_axis * points_per_axis;
  }
  Real coord(long j) const {
    Real o = offset == Offset::half_step ? 0.5 : 0.0;
    return -half_width + (j + o) * step();
  }
  Point point(long flat) const {
    if (dim == 1) return {coord(flat), 0.0};
    return {coord(flat / points_per_axis), coord(flat % points_per_axis)};
  }
  bool operator==(const Grid& g) const {
    return dim == g.dim && half_width == g.half_width &&
           points_per_axis == g.points_per_axis && offset == g.offset;
  }
};

inline Grid make_grid(int dim, Real L, long N, Offset offset) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("make_grid: dim must be 1 or 2");
  if (!(L > 0)) throw std::invalid_argument("make_grid: half width must be > 0");
  if (!is_pow2(N) || N < 8)
    throw std::invalid_argument("make_grid: N must be a power of two >= 8");
  return Grid{dim, L, N, offset};
}

// Frequency lattice dual to g under f^(xi) = int f(y) e^{-2 pi i y.xi} dy:
// step 1/(2L), same point count and offset. Involutive.
inline Grid reciprocal_grid(const Grid& g) {
  return Grid{g.dim, g.points_per_axis / (4.0 * g.half_width), g.points_per_axis, g.offset};
}

// Complex samples on a Grid; immutable by convention once constructed.
struct SampledFunction {
  Grid grid;
  ArrayXc values;

  SampledFunction() = default;
  SampledFunction(Grid g, ArrayXc v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
      throw std::invalid_argument("SampledFunction: value count does not match grid");
    for (long i = 0; i < values.size(); ++i)
      if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
        throw std::invalid_argument("SampledFunction: non-finite sample");
  }
};

struct FunctionDescriptor {
  enum class Tag { gaussian, poisson, indicator, f_alpha, hermite, omega, table };
  Tag tag = Tag::gaussian;
  Real param = 1.0;  // t, radius or alpha
  int order = 0;     // hermite k
  std::shared_ptr<SampledFunction> tab;
  std::string name;  // mini-language string, kept for report rows

  static FunctionDescriptor gaussian(Real t) { return checked(Tag::gaussian, t, "t > 0", t > 0); }
  static FunctionDescriptor poisson(Real t) { return checked(Tag::poisson, t, "t > 0", t > 0); }
  static FunctionDescriptor indicator(Real r) {
    return checked(Tag::indicator, r, "radius > 0", r > 0);
  }
  static FunctionDescriptor f_alpha(Real a, int dim) {
    return checked(Tag::f_alpha, a, "0 < alpha < dim", a > 0 && a < dim);
  }
  static FunctionDescriptor hermite(int k) {
    FunctionDescriptor d = checked(Tag::hermite, 0, "k >= 0", k >= 0);
    d.order = k;
    return d;
  }
  static FunctionDescriptor omega() { return checked(Tag::omega, 0, "", true); }
  static FunctionDescriptor table(SampledFunction f) {
    FunctionDescriptor d = checked(Tag::table, 0, "", true);
    d.tab = std::make_shared<SampledFunction>(std::move(f));
    return d;
  }

  Complex eval(const Point& x, int dim) const;

 private:
  static FunctionDescriptor checked(Tag tag, Real p, const char* what, bool ok) {
    if (!ok) throw std::invalid_argument(std::string("descriptor: parameter out of range, need ") + what);
    FunctionDescriptor d;
    d.tag = tag;
    d.param = p;
    return d;
  }
};

// Bilinear interpolation of samples at an arbitrary point; clamps to the
// window and returns 0 beyond the outermost sample ring.
inline Complex interp_eval(const SampledFunction& f, const Point& x) {
  const Grid& g = f.grid;
  Real o = g.offset == Offset::half_step ? 0.5 : 0.0;
  auto axis_pos = [&](Real c) { return (c + g.half_width) / g.step() - o; };
  long N = g.points_per_axis;
  auto bracket = [&](Real u, long& i0, Real& w) -> bool {
    if (u < -0.5 || u > N - 0.5) return false;
    i0 = static_cast<long>(std::floor(u));
    w = u - i0;
    if (i0 < 0) { i0 = 0; w = 0; }
    if (i0 > N - 2) { i0 = N - 2; w = 1; }
    return true;
  };
  long i0;
  Real wu;
  if (!bracket(axis_pos(x[0]), i0, wu)) return 0.0;
  if (g.dim == 1) return (1 - wu) * f.values[i0] + wu * f.values[i0 + 1];
  long j0;
  Real wv;
  if (!bracket(axis_pos(x[1]), j0, wv)) return 0.0;
  auto at = [&](long i, long j) { return f.values[i * N + j]; };
  return (1 - wu) * ((1 - wv) * at(i0, j0) + wv * at(i0, j0 + 1)) +
         wu * ((1 - wv) * at(i0 + 1, j0) + wv * at(i0 + 1, j0 + 1));
}

inline Complex FunctionDescriptor::eval(const Point& x, int dim) const {
  switch (tag) {
    case Tag::gaussian:
      return heat_kernel(param, x, dim);
    case Tag::poisson:
      return poisson_kernel(param, x, dim);
    case Tag::indicator:
      return norm(x, dim) <= param ? 1.0 : 0.0;
    case Tag::f_alpha:
      return std::pow(norm(x, dim), -param);
    case Tag::hermite: {
      Real v = hermite_function(order, x[0]);
      if (dim == 2) v *= hermite_function(order, x[1]);
      return v;
    }
    case Tag::omega:
      return omega_weight(x, dim);
    case Tag::table:
      return interp_eval(*tab, x);
  }
  return 0.0;
}

inline SampledFunction sample(const FunctionDescriptor& desc, const Grid& grid) {
  if (desc.tag == FunctionDescriptor::Tag::f_alpha && grid.offset != Offset::half_step)
    throw std::invalid_argument("sample: singular sample point (f_alpha needs half_step offset)");
  ArrayXc v(grid.size());
  parallel_for(grid.size(), [&](long i) { v[i] = desc.eval(grid.point(i), grid.dim); });
  return SampledFunction(grid, std::move(v));
}

template <typename Fn>
SampledFunction sample_fn(const Grid& grid, Fn&& fn) {
  ArrayXc v(grid.size());
  parallel_for(grid.size(), [&](long i) { v[i] = Complex(fn(grid.point(i))); });
  return SampledFunction(grid, std::move(v));
}

// Riemann-sum quadrature: sum of samples * step^dim, compensated.
inline Complex integrate(const SampledFunction& f) {
  KahanSumC acc;
  for (long i = 0; i < f.values.size(); ++i) acc.add(f.values[i]);
  Real meas = std::pow(f.grid.step(), f.grid.dim);
  return acc.value() * meas;
}

inline Complex inner_product(const SampledFunction& f, const SampledFunction& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("inner_product: grid mismatch");
  KahanSumC acc;
  for (long i = 0; i < f.values.size(); ++i) acc.add(f.values[i] * std::conj(g.values[i]));
  return acc.value() * std::pow(f.grid.step(), f.grid.dim);
}

// (sum |f|^p v step^dim)^{1/p}, sup |f| v for p = inf. Terms are assembled in
// the exponent so Gaussian-type weights cannot poison the sum with 0 * inf.
inline Real lp_norm(const SampledFunction& f, Real p,
                    const std::optional<Weight>& v = std::nullopt) {
  if (!(p >= 1))
    throw std::invalid_argument("lp_norm: p must be >= 1 or inf");
  const int dim = f.grid.dim;
  auto log_w = [&](long i) {
    return v ? v->log_space(f.grid.point(i), dim) : 0.0;
  };
  if (p == kInf) {
    Real m = 0;
    for (long i = 0; i < f.values.size(); ++i) {
      Real a = std::abs(f.values[i]);
      if (a > 0) m = std::max(m, std::exp(std::log(a) + log_w(i)));
    }
    return m;
  }
  KahanSum acc;
  for (long i = 0; i < f.values.size(); ++i) {
    Real a = std::abs(f.values[i]);
    if (a > 0) acc.add(std::exp(p * std::log(a) + log_w(i)));
  }
  Real total = acc.value() * std::pow(f.grid.step(), dim);
  return std::pow(total, 1.0 / p);
}

}  // namespace modlab

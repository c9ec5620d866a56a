#pragma once

#include "modlab/fft.hpp"
#include "modlab/grid.hpp"

#include <functional>

namespace modlab {

namespace detail {

// One axis of the continuum-consistent transform
//   F_k = step * sum_j f_j e^{-2 pi i x_j xi_k}
// on x_j = -L + (j+o) step, xi_k = -Xi + (k+o) dxi. Expanding the phase gives
// a plain DFT framed by twiddles:
//   pre_j = e^{i pi j} e^{-2 pi i o j / N},  post_k = e^{i pi k} e^{-2 pi i o k / N},
//   const = step e^{-i pi N/2} e^{2 pi i o} e^{-2 pi i o^2 / N}.
struct AxisTwiddles {
  ArrayXc pre, post;
  Complex constant;
};

inline AxisTwiddles axis_twiddles(const Grid& g) {
  long N = g.points_per_axis;
  Real o = g.offset == Offset::half_step ? 0.5 : 0.0;
  AxisTwiddles tw;
  tw.pre.resize(N);
  tw.post.resize(N);
  for (long j = 0; j < N; ++j) {
    Real ph = kPi * j - 2 * kPi * o * j / N;
    tw.pre[j] = Complex(std::cos(ph), std::sin(ph));
  }
  tw.post = tw.pre;
  Real cph = -kPi * N / 2 + 2 * kPi * o - 2 * kPi * o * o / N;
  tw.constant = g.step() * Complex(std::cos(cph), std::sin(cph));
  return tw;
}

}  // namespace detail

// Samples of f^(xi) = int f(y) e^{-2 pi i y.xi} dy on the reciprocal grid.
inline SampledFunction fourier(const SampledFunction& f) {
  const Grid& g = f.grid;
  long N = g.points_per_axis;
  auto tw = detail::axis_twiddles(g);
  ArrayXc a = f.values;
  if (g.dim == 1) {
    a *= tw.pre;
    ArrayXc out;
    dft(a, out);
    out *= tw.post;
    out *= tw.constant;
    return SampledFunction(reciprocal_grid(g), std::move(out));
  }
  for (long r = 0; r < N; ++r)
    for (long c = 0; c < N; ++c) a[r * N + c] *= tw.pre[r] * tw.pre[c];
  dft2(a, N, false);
  Complex cc = tw.constant * tw.constant;
  for (long r = 0; r < N; ++r)
    for (long c = 0; c < N; ++c) a[r * N + c] *= cc * tw.post[r] * tw.post[c];
  return SampledFunction(reciprocal_grid(g), std::move(a));
}

// Exact algebraic inverse; also the Riemann sum of the continuum inverse
// transform, since step_x * step_xi * N = 1.
inline SampledFunction inverse_fourier(const SampledFunction& F) {
  SampledFunction conj_in(F.grid, F.values.conjugate());
  SampledFunction out = fourier(conj_in);
  return SampledFunction(out.grid, out.values.conjugate());
}

namespace detail {

// Samples of g at the difference lattice k*step, k = -(N-1)..N-1, wrapped into
// a length-2N circular buffer. Offset-none grids contain these points exactly;
// half_step grids use the two neighbouring samples (second-order, matching the
// midpoint-rule error already present).
inline ArrayXc difference_lattice_1d(const ArrayXc& g, long N, Offset offset) {
  long M = 2 * N;
  ArrayXc w = ArrayXc::Zero(M);
  auto at = [&](long idx) -> Complex {
    return (idx >= 0 && idx < N) ? g[idx] : Complex(0, 0);
  };
  for (long k = -(N - 1); k <= N - 1; ++k) {
    Complex val = offset == Offset::none
                      ? at(k + N / 2)
                      : Real(0.5) * (at(k + N / 2 - 1) + at(k + N / 2));
    w[(k + M) % M] = val;
  }
  return w;
}

template <typename KernelFn>
ArrayXc difference_lattice_profile_1d(KernelFn&& fn, long N, Real step) {
  long M = 2 * N;
  ArrayXc w = ArrayXc::Zero(M);
  for (long k = -(N - 1); k <= N - 1; ++k) w[(k + M) % M] = Complex(fn(k * step));
  return w;
}

// Circular convolution core: result_m = step^dim * sum_j f_j W_{(m-j) mod 2N},
// restricted to the original window. The 2N buffer holds every difference in
// [-(N-1), N-1] exactly once, so this is the zero-extended linear convolution.
inline ArrayXc convolve_wrapped_1d(const SampledFunction& f, const ArrayXc& W1) {
  long N = f.grid.points_per_axis, M = 2 * N;
  ArrayXc fp = ArrayXc::Zero(M);
  fp.head(N) = f.values;
  ArrayXc F, W;
  dft(fp, F);
  dft(W1, W);
  F *= W;
  ArrayXc c;
  idft(F, c);
  return (c.head(N) * f.grid.step()).eval();
}

inline ArrayXc convolve_wrapped_2d(const SampledFunction& f, ArrayXc W) {
  long N = f.grid.points_per_axis, M = 2 * N;
  ArrayXc fp = ArrayXc::Zero(M * M);
  for (long r = 0; r < N; ++r) fp.segment(r * M, N) = f.values.segment(r * N, N);
  dft2(fp, M, false);
  dft2(W, M, false);
  fp *= W;
  dft2(fp, M, true);
  ArrayXc out(N * N);
  Real scale = f.grid.step() * f.grid.step();
  for (long r = 0; r < N; ++r) out.segment(r * N, N) = fp.segment(r * M, N) * scale;
  return out;
}

}  // namespace detail

// Linear convolution int f(y) g(x-y) dy restricted to the grid window.
inline SampledFunction convolve(const SampledFunction& f, const SampledFunction& g) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("convolve: grid mismatch");
  long N = f.grid.points_per_axis, M = 2 * N;
  if (f.grid.dim == 1) {
    ArrayXc W = detail::difference_lattice_1d(g.values, N, f.grid.offset);
    return SampledFunction(f.grid, detail::convolve_wrapped_1d(f, W));
  }
  // 2D difference lattice, separable index map per axis
  ArrayXc W = ArrayXc::Zero(M * M);
  auto at = [&](long i, long j) -> Complex {
    return (i >= 0 && i < N && j >= 0 && j < N) ? g.values[i * N + j] : Complex(0, 0);
  };
  bool half = f.grid.offset == Offset::half_step;
  for (long k1 = -(N - 1); k1 <= N - 1; ++k1)
    for (long k2 = -(N - 1); k2 <= N - 1; ++k2) {
      Complex val;
      if (!half)
        val = at(k1 + N / 2, k2 + N / 2);
      else
        val = Real(0.25) * (at(k1 + N / 2 - 1, k2 + N / 2 - 1) + at(k1 + N / 2 - 1, k2 + N / 2) +
                            at(k1 + N / 2, k2 + N / 2 - 1) + at(k1 + N / 2, k2 + N / 2));
      W[((k1 + M) % M) * M + (k2 + M) % M] = val;
    }
  return SampledFunction(f.grid, detail::convolve_wrapped_2d(f, std::move(W)));
}

// Convolution against an analytic kernel profile, evaluated exactly on the
// difference lattice; the route of record for semigroup kernels on half_step
// grids (no neighbour averaging).
template <typename KernelFn>
SampledFunction convolve_profile(const SampledFunction& f, KernelFn&& kernel) {
  const Grid& g = f.grid;
  long N = g.points_per_axis, M = 2 * N;
  if (g.dim == 1) {
    ArrayXc W = detail::difference_lattice_profile_1d(
        [&](Real d) { return kernel(Point{d, 0}); }, N, g.step());
    return SampledFunction(g, detail::convolve_wrapped_1d(f, W));
  }
  ArrayXc W = ArrayXc::Zero(M * M);
  Real step = g.step();
  for (long k1 = -(N - 1); k1 <= N - 1; ++k1)
    for (long k2 = -(N - 1); k2 <= N - 1; ++k2)
      W[((k1 + M) % M) * M + (k2 + M) % M] = Complex(kernel(Point{k1 * step, k2 * step}));
  return SampledFunction(g, detail::convolve_wrapped_2d(f, std::move(W)));
}

}  // namespace modlab

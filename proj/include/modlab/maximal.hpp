#pragma once

#include "modlab/fourier.hpp"
#include "modlab/modnorm.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace modlab {

// Grid-commensurate ball radii: positive multiples of the step, at most the
// window diameter.
struct RadiiSet {
  std::vector<long> steps;  // radius = steps[i] * grid step
  Real delta = 0;

  std::vector<Real> radii() const {
    std::vector<Real> r(steps.size());
    for (size_t i = 0; i < steps.size(); ++i) r[i] = steps[i] * delta;
    return r;
  }
};

inline RadiiSet make_radii(const Grid& g, Real r_max) {
  RadiiSet rs;
  rs.delta = g.step();
  long cap = static_cast<long>(std::floor(std::min(r_max, 2 * g.half_width) / g.step() + 1e-9));
  for (long k = 1; k <= cap; ++k) rs.steps.push_back(k);
  if (rs.steps.empty()) throw std::invalid_argument("radii: empty set (r_max below the step)");
  return rs;
}

inline RadiiSet make_radii(const Grid& g, const std::vector<Real>& radii) {
  RadiiSet rs;
  rs.delta = g.step();
  long prev = 0;
  for (Real r : radii) {
    Real pos = r / g.step();
    long k = std::lround(pos);
    if (std::abs(pos - k) > 1e-9)
      throw std::invalid_argument("radii: radius is not a multiple of the grid step");
    if (k < 1 || k <= prev || r > 2 * g.half_width + 1e-12)
      throw std::invalid_argument("radii: need strictly increasing radii in [step, 2L]");
    rs.steps.push_back(k);
    prev = k;
  }
  if (rs.steps.empty()) throw std::invalid_argument("radii: empty set");
  return rs;
}

namespace detail {

inline ArrayXr nonnegative_real(const SampledFunction& f) {
  Real scale = f.values.abs().maxCoeff();
  Real tol = 1e-12 * std::max(scale, 1.0);
  ArrayXr v(f.values.size());
  for (long i = 0; i < f.values.size(); ++i) {
    Complex z = f.values[i];
    if (std::abs(z.imag()) > tol || z.real() < -tol)
      throw std::invalid_argument("maximal_function: nonnegativity required");
    v[i] = std::max(z.real(), 0.0);
  }
  return v;
}

}  // namespace detail

// Centered Hardy-Littlewood maximal function over the given radii. Balls are
// averaged over their intersection with the window (sample counts as the
// measure). Prefix sums give O(#radii) work per sample in 1D; in 2D each disc
// row is a prefix-sum difference.
inline SampledFunction maximal_function(const SampledFunction& f, const RadiiSet& radii) {
  const Grid& g = f.grid;
  ArrayXr v = detail::nonnegative_real(f);
  long N = g.points_per_axis;
  ArrayXc out(g.size());
  if (g.dim == 1) {
    std::vector<Real> prefix(N + 1, 0.0);
    for (long j = 0; j < N; ++j) prefix[j + 1] = prefix[j] + v[j];
    parallel_for(N, [&](long i) {
      Real best = 0;
      for (long k : radii.steps) {
        long lo = std::max<long>(0, i - k), hi = std::min<long>(N - 1, i + k);
        Real avg = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
        best = std::max(best, avg);
      }
      out[i] = best;
    });
    return SampledFunction(g, std::move(out));
  }
  // row prefix sums; disc rows clipped at the window
  std::vector<std::vector<Real>> prefix(N, std::vector<Real>(N + 1, 0.0));
  for (long r = 0; r < N; ++r)
    for (long c = 0; c < N; ++c) prefix[r][c + 1] = prefix[r][c] + v[r * N + c];
  long kmax = radii.steps.back();
  std::vector<std::vector<long>> half(kmax + 1);
  for (long k = 1; k <= kmax; ++k) {
    half[k].resize(k + 1);
    for (long d = 0; d <= k; ++d)
      half[k][d] = static_cast<long>(std::floor(std::sqrt(Real(k) * k - Real(d) * d) + 1e-9));
  }
  parallel_for(N * N, [&](long idx) {
    long i1 = idx / N, i2 = idx % N;
    Real best = 0;
    for (long k : radii.steps) {
      Real sum = 0;
      long cnt = 0;
      for (long d = -k; d <= k; ++d) {
        long r = i1 + d;
        if (r < 0 || r >= N) continue;
        long h = half[k][std::abs(d)];
        long lo = std::max<long>(0, i2 - h), hi = std::min<long>(N - 1, i2 + h);
        sum += prefix[r][hi + 1] - prefix[r][lo];
        cnt += hi - lo + 1;
      }
      if (cnt > 0) best = std::max(best, sum / cnt);
    }
    out[idx] = best;
  });
  return SampledFunction(g, std::move(out));
}

inline SampledFunction maximal_function(const SampledFunction& f) {
  return maximal_function(f, make_radii(f.grid, f.grid.half_width));
}

// sup_t |phi_t * f| over a finite dilation set, phi_t = t^{-n} phi(./t).
template <typename ProfileFn>
SampledFunction dilation_sup(const SampledFunction& f, ProfileFn&& profile,
                             const std::vector<Real>& t_list) {
  if (t_list.empty()) throw std::invalid_argument("dilation_sup: empty dilation set");
  const Grid& g = f.grid;
  ArrayXr sup = ArrayXr::Zero(g.size());
  for (Real t : t_list) {
    if (!(t > 0)) throw std::invalid_argument("dilation_sup: dilations must be positive");
    Real scale = std::pow(t, -g.dim);
    SampledFunction conv = convolve_profile(f, [&](const Point& d) {
      return scale * profile(Point{d[0] / t, d[1] / t});
    });
    for (long i = 0; i < sup.size(); ++i) sup[i] = std::max(sup[i], std::abs(conv.values[i]));
  }
  return SampledFunction(g, sup.cast<Complex>());
}

inline SampledFunction dilation_sup(const SampledFunction& f, const SampledFunction& phi,
                                    const std::vector<Real>& t_list) {
  if (!(f.grid == phi.grid)) throw std::invalid_argument("dilation_sup: grid mismatch");
  return dilation_sup(f, [&](const Point& x) { return interp_eval(phi, x); }, t_list);
}

// Least decreasing radial majorant psi(x) = sup_{|y| >= |x|} |phi(y)| on the
// grid, and its mass A = int psi.
struct RadialMajorant {
  ArrayXr psi;
  Real mass = 0;
};

inline RadialMajorant least_decreasing_radial_majorant(const SampledFunction& phi) {
  const Grid& g = phi.grid;
  long n = g.size();
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Real> r(n);
  for (long i = 0; i < n; ++i) r[i] = norm(g.point(i), g.dim);
  std::sort(order.begin(), order.end(), [&](long a, long b) { return r[a] > r[b]; });
  RadialMajorant out;
  out.psi = ArrayXr::Zero(n);
  Real running = 0;
  for (long idx : order) {
    running = std::max(running, std::abs(phi.values[idx]));
    out.psi[idx] = running;
  }
  KahanSum acc;
  for (long i = 0; i < n; ++i) acc.add(out.psi[i]);
  out.mass = acc.value() * std::pow(g.step(), g.dim);
  return out;
}

// max over the grid of sup_t |phi_t * f| / (A M f); at most 1 + mesh slack
// when the radial-majorant domination holds.
template <typename ProfileFn>
Real check_domination(const SampledFunction& f, ProfileFn&& profile,
                      const std::vector<Real>& t_list, const RadiiSet& radii) {
  const Grid& g = f.grid;
  SampledFunction sup = dilation_sup(f, profile, t_list);
  SampledFunction phi_sampled = sample_fn(g, [&](const Point& x) { return profile(x); });
  RadialMajorant maj = least_decreasing_radial_majorant(phi_sampled);
  SampledFunction mf = maximal_function(f, radii);
  Real floor = 1e-9 * f.values.abs().maxCoeff();
  Real worst = 0;
  for (long i = 0; i < g.size(); ++i) {
    Real denom = maj.mass * mf.values[i].real();
    if (denom > floor) worst = std::max(worst, std::abs(sup.values[i]) / denom);
  }
  return worst;
}

// Modulated-window comparison: |(M f) * M_xi phi|(x) <= M(f * |phi|)(x) up to
// mesh slack. Returns the largest violation.
template <typename ProfileFn>
Real check_stft_maximal_inequality(const SampledFunction& f, ProfileFn&& profile,
                                   const Point& xi, const RadiiSet& radii) {
  const Grid& g = f.grid;
  SampledFunction mf = maximal_function(f, radii);
  SampledFunction lhs = convolve_profile(mf, [&](const Point& d) {
    Real ph = 2 * kPi * (xi[0] * d[0] + (g.dim == 2 ? xi[1] * d[1] : 0.0));
    return Complex(profile(d)) * Complex(std::cos(ph), std::sin(ph));
  });
  SampledFunction conv = convolve_profile(f, [&](const Point& d) {
    return std::abs(profile(d));
  });
  ArrayXc cleaned(conv.values.size());
  for (long i = 0; i < conv.values.size(); ++i)
    cleaned[i] = std::max(conv.values[i].real(), 0.0);
  SampledFunction rhs = maximal_function(SampledFunction(g, std::move(cleaned)), radii);
  Real worst = -kInf;
  for (long i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(lhs.values[i]) - rhs.values[i].real());
  return worst;
}

// M^{p, infty} norms of Mf and f; finiteness of the first realizes the
// invariance of nonnegative M^{p, infty} data under M.
struct MaximalNormPair {
  Real norm_Mf = 0;
  Real norm_f = 0;
};

inline MaximalNormPair maximal_modnorm_check(const SampledFunction& f, Real p,
                                             const RadiiSet& radii) {
  if (!(p > 1)) throw std::invalid_argument("maximal_modnorm_check: need 1 < p <= inf");
  MixedNormParams pq(p, kInf);
  Weight one = Weight::constant(1.0);
  MaximalNormPair out;
  out.norm_f = modulation_norm(f, pq, one);
  SampledFunction mf = maximal_function(f, radii);
  out.norm_Mf = modulation_norm(mf, pq, one);
  return out;
}

}  // namespace modlab

#pragma once

#include "modlab/stft.hpp"
#include "modlab/weight.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace modlab {

struct MixedNormParams {
  Real p = 2;
  Real q = 2;

  MixedNormParams() = default;
  MixedNormParams(Real p_, Real q_) : p(p_), q(q_) {
    if (!(p >= 1) || !(q >= 1))
      throw std::invalid_argument("mixed norm: p, q must be >= 1 or inf");
  }
  MixedNormParams conjugate() const {
    auto conj = [](Real e) {
      if (e == kInf) return 1.0;
      if (e == 1.0) return kInf;
      return e / (e - 1);
    };
    return MixedNormParams(conj(p), conj(q));
  }
};

using LogWeightFn = std::function<Real(const Point& x, const Point& xi)>;

// ( int ( int |F|^p v dx )^{q/p} dxi )^{1/q}; sup over the grid for infinite
// exponents. Terms are exp(p log|F| + log v): a zero sample contributes zero
// regardless of the weight, and a genuinely divergent integrand overflows to
// inf instead of poisoning the sum with NaN.
//
// Every x-row of a PhaseSpaceFunction comes out of one transform, so entries
// more than 13 orders below their row's peak sit at that transform's roundoff
// floor. They are treated as exact zeros; otherwise an inverse Gaussian
// weight amplifies pure noise into phantom norm growth.
inline Real mixed_norm(const PhaseSpaceFunction& F, const MixedNormParams& params,
                       const LogWeightFn& log_v) {
  const long nx = F.grid_x.size(), nxi = F.grid_xi.size();
  const Real meas_x = std::pow(F.grid_x.step(), F.grid_x.dim);
  const Real meas_xi = std::pow(F.grid_xi.step(), F.grid_xi.dim);
  ArrayXr row_floor(nx);
  for (long j = 0; j < nx; ++j) {
    Real m = 0;
    for (long k = 0; k < nxi; ++k) m = std::max(m, std::abs(F.values(j, k)));
    row_floor[j] = 1e-13 * m;
  }
  std::vector<Real> inner(nxi);
  parallel_for(nxi, [&](long k) {
    Point xi = F.grid_xi.point(k);
    if (params.p == kInf) {
      Real m = 0;
      for (long j = 0; j < nx; ++j) {
        Real a = std::abs(F.values(j, k));
        if (a > row_floor[j])
          m = std::max(m, std::exp(std::log(a) + log_v(F.grid_x.point(j), xi)));
      }
      inner[k] = m;
    } else {
      KahanSum acc;
      for (long j = 0; j < nx; ++j) {
        Real a = std::abs(F.values(j, k));
        if (a > row_floor[j])
          acc.add(std::exp(params.p * std::log(a) + log_v(F.grid_x.point(j), xi)));
      }
      inner[k] = std::pow(acc.value() * meas_x, 1.0 / params.p);
    }
  });
  if (params.q == kInf) {
    Real m = 0;
    for (Real v : inner) m = std::max(m, v);
    return m;
  }
  KahanSum acc;
  for (Real v : inner) {
    if (v > 0) acc.add(std::exp(params.q * std::log(v)));
  }
  return std::pow(acc.value() * meas_xi, 1.0 / params.q);
}

inline Real mixed_norm(const PhaseSpaceFunction& F, const MixedNormParams& params,
                       const Weight& v) {
  int dim = F.grid_x.dim;
  return mixed_norm(F, params, [&](const Point& x, const Point& xi) {
    Real lw = v.log_phase(x, xi, dim);
    if (std::isnan(lw)) throw std::invalid_argument("mixed_norm: non-positive weight sample");
    return lw;
  });
}

// || V_phi f ||_{L_v^{p,q}} on the reciprocal frequency lattice.
inline Real modulation_norm(const SampledFunction& f, const SampledFunction& window,
                            const MixedNormParams& params, const Weight& v) {
  return mixed_norm(stft(f, window), params, v);
}
inline Real modulation_norm(const SampledFunction& f, const WindowFn& window,
                            const MixedNormParams& params, const Weight& v) {
  return mixed_norm(stft(f, window), params, v);
}
inline Real modulation_norm(const SampledFunction& f, const MixedNormParams& params,
                            const Weight& v) {
  return modulation_norm(f, canonical_window(f.grid.dim), params, v);
}

enum class WeightClassTag { Dh, DP, Domega };
enum class Verdict { member, non_member, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::member: return "member";
    case Verdict::non_member: return "non_member";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

// Norm sequences over growing truncation radii, one row per kernel time.
// member needs the last three values Cauchy at relative tolerance 1e-3;
// clear growth or overflow reads as divergence.
struct WeightClassReport {
  WeightClassTag class_tag = WeightClassTag::Dh;
  std::vector<Real> t0_tested;
  std::vector<Real> truncation_radii;
  std::vector<std::vector<Real>> norms;  // [t0][radius]
  std::vector<Verdict> per_t0;
  Verdict verdict = Verdict::inconclusive;
};

struct TruncationLevel {
  Real L;
  long N;
};

inline std::vector<TruncationLevel> default_truncations() {
  return {{8, 256}, {16, 512}, {32, 1024}};
}

inline Verdict sequence_verdict(const std::vector<Real>& seq) {
  size_t n = seq.size();
  if (n < 3) return Verdict::inconclusive;
  for (Real v : seq)
    if (!std::isfinite(v)) return Verdict::non_member;
  Real a = seq[n - 3], b = seq[n - 2], c = seq[n - 1];
  Real scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0) return Verdict::member;
  if (std::abs(b - a) <= 1e-3 * scale && std::abs(c - b) <= 1e-3 * scale)
    return Verdict::member;
  if (c > 1.5 * b && b > 1.5 * a) return Verdict::non_member;
  return Verdict::inconclusive;
}

// Membership of v in D^h / D^P / D^omega for exponents (p, q): does the
// kernel (h_t0, p_t0, omega) lie in M^{p', q'}_{1/v}? Decided by norm
// stabilization across truncation radii; the raw sequences ride along in the
// report. An explicitly heuristic finiteness proxy.
inline WeightClassReport weight_class_membership(
    WeightClassTag tag, const Weight& v, const MixedNormParams& params,
    const std::vector<Real>& t0_candidates, int dim = 1,
    const std::vector<TruncationLevel>& levels = default_truncations()) {
  WeightClassReport rep;
  rep.class_tag = tag;
  for (const auto& lv : levels) rep.truncation_radii.push_back(lv.L);
  MixedNormParams conj = params.conjugate();
  Weight vinv = v.inverse();

  std::vector<Real> times = tag == WeightClassTag::Domega ? std::vector<Real>{0.0} : t0_candidates;
  if (times.empty()) throw std::invalid_argument("weight_class_membership: no kernel times");
  for (Real t0 : times) {
    if (tag != WeightClassTag::Domega && !(t0 > 0))
      throw std::invalid_argument("weight_class_membership: kernel time must be > 0");
    std::vector<Real> seq;
    for (const auto& lv : levels) {
      Grid g = make_grid(dim, lv.L, lv.N, Offset::none);
      FunctionDescriptor desc =
          tag == WeightClassTag::Dh
              ? FunctionDescriptor::gaussian(t0)
              : (tag == WeightClassTag::DP ? FunctionDescriptor::poisson(t0)
                                           : FunctionDescriptor::omega());
      SampledFunction kernel = sample(desc, g);
      seq.push_back(modulation_norm(kernel, conj, vinv));
    }
    rep.t0_tested.push_back(t0);
    rep.norms.push_back(seq);
    rep.per_t0.push_back(sequence_verdict(seq));
  }
  bool any_member = false, all_non = true;
  for (Verdict w : rep.per_t0) {
    any_member |= w == Verdict::member;
    all_non &= w == Verdict::non_member;
  }
  rep.verdict = any_member ? Verdict::member
                           : (all_non ? Verdict::non_member : Verdict::inconclusive);
  return rep;
}

// Norm inequality behind the characterization: || k_t0 * f ||_{M_u^{p,q}}
// against || f ||_{M_v^{p,q}}, with u built from the translated-kernel norm
//   g_t0(x) = || k_t0(x - .) ||_{M^{p',q'}_{1/v}}
// by damping u' = e^{-(|x|+|xi|)} wherever |V_phi g_t0| exceeds it.
struct CharacterizationReport {
  Real lhs = 0;
  Real rhs = 0;
  Real ratio = 0;
  std::vector<Real> g_values;  // translated-kernel norms along the grid
};

inline CharacterizationReport characterization_check(WeightClassTag tag, const Weight& v,
                                                     const MixedNormParams& params,
                                                     const SampledFunction& f, Real t0) {
  if (tag == WeightClassTag::Domega)
    throw std::invalid_argument("characterization_check: convolution classes only (Dh, DP)");
  const Grid& g = f.grid;
  const int dim = g.dim;
  MixedNormParams conj = params.conjugate();
  Weight vinv = v.inverse();

  FunctionDescriptor kdesc = tag == WeightClassTag::Dh ? FunctionDescriptor::gaussian(t0)
                                                       : FunctionDescriptor::poisson(t0);
  SampledFunction kernel = sample(kdesc, g);

  // |V_phi k| once; translated norms via the covariance
  // |V_phi(T_a k)|(x, xi) = |V_phi k|(x - a, xi).
  PhaseSpaceFunction Vk = stft(kernel, canonical_window(dim));
  long nx = g.size(), nxi = Vk.grid_xi.size();
  Real meas_x = std::pow(g.step(), dim), meas_xi = std::pow(Vk.grid_xi.step(), dim);
  ArrayXr kfloor(nx);
  for (long j = 0; j < nx; ++j) {
    Real m = 0;
    for (long k = 0; k < nxi; ++k) m = std::max(m, std::abs(Vk.values(j, k)));
    kfloor[j] = 1e-13 * m;
  }
  std::vector<Real> gvals(nx);
  parallel_for(nx, [&](long a) {
    // norm over the overlapping translate window
    KahanSum outer;
    for (long k = 0; k < nxi; ++k) {
      Point xi = Vk.grid_xi.point(k);
      KahanSum inner;
      for (long j = 0; j < nx; ++j) {
        long src = j - a + nx / 2;  // x_j - x_a on the difference lattice
        if (dim == 2) {
          long N = g.points_per_axis;
          long j1 = j / N - a / N + N / 2, j2 = j % N - a % N + N / 2;
          src = (j1 >= 0 && j1 < N && j2 >= 0 && j2 < N) ? j1 * N + j2 : -1;
        }
        if (src < 0 || src >= nx) continue;
        Real mag = std::abs(Vk.values(src, k));
        if (mag > kfloor[src])
          inner.add(std::exp(conj.p * std::log(mag) + vinv.log_phase(g.point(j), xi, dim)));
      }
      Real ip = std::pow(inner.value() * meas_x, 1.0 / conj.p);
      if (ip > 0) outer.add(std::exp(conj.q * std::log(ip)));
    }
    gvals[a] = std::pow(outer.value() * meas_xi, 1.0 / conj.q);
  });

  CharacterizationReport rep;
  rep.g_values = gvals;
  ArrayXc gv(nx);
  bool g_finite = true;
  for (long a = 0; a < nx; ++a) {
    if (!std::isfinite(gvals[a])) g_finite = false;
    // the u recipe only needs where |V_phi g| exceeds the tiny u', so a cap
    // keeps the transform overflow-free without changing the damping
    gv[a] = std::min(gvals[a], 1e30);
  }

  rep.rhs = modulation_norm(f, params, v);
  SampledFunction conv = convolve_profile(f, [&](const Point& d) {
    return kdesc.eval(d, dim).real();
  });

  if (!g_finite) {
    rep.lhs = kInf;
    rep.ratio = kInf;
    return rep;
  }
  PhaseSpaceFunction Vg = stft(SampledFunction(g, gv), canonical_window(dim));
  PhaseSpaceFunction Vconv = stft(conv, canonical_window(dim));
  auto log_u = [&](long j, long k, const Point& x, const Point& xi) {
    Real uprime = -(norm(x, dim) + norm(xi, dim));
    Real mag = std::abs(Vg.values(j, k));
    if (mag <= 0) return 0.0;  // u = 1
    Real lm = std::log(mag);
    return lm <= uprime ? 0.0 : uprime - lm;
  };
  // lhs with u evaluated per phase-space node
  KahanSum outer;
  std::vector<Real> inner(nxi);
  parallel_for(nxi, [&](long k) {
    Point xi = Vconv.grid_xi.point(k);
    KahanSum acc;
    for (long j = 0; j < nx; ++j) {
      Real a = std::abs(Vconv.values(j, k));
      if (a > 0) acc.add(std::exp(params.p * std::log(a) + log_u(j, k, g.point(j), xi)));
    }
    inner[k] = std::pow(acc.value() * meas_x, 1.0 / params.p);
  });
  for (Real ip : inner)
    if (ip > 0) outer.add(std::exp(params.q * std::log(ip)));
  rep.lhs = std::pow(outer.value() * meas_xi, 1.0 / params.q);
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

}  // namespace modlab

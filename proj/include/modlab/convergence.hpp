#pragma once

#include "modlab/hermite.hpp"
#include "modlab/kernels.hpp"
#include "modlab/maximal.hpp"
#include "modlab/modnorm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace modlab {

struct SemigroupSpec {
  enum class Tag { heat, poisson, hermite_heat, hermite_poisson };
  enum class Method { kernel_convolution, spectral };
  Tag tag = Tag::heat;
  Method method = Method::kernel_convolution;
  int quad_nodes = 64;  // hermite_poisson kernel route
  int order = 128;      // spectral truncation per axis

  SemigroupSpec() = default;
  SemigroupSpec(Tag tag_, Method method_) : tag(tag_), method(method_) {
    bool hermite = tag == Tag::hermite_heat || tag == Tag::hermite_poisson;
    if (method == Method::spectral && !hermite)
      throw std::invalid_argument("semigroup: spectral method is for Hermite tags");
  }
};

inline const char* to_string(SemigroupSpec::Tag t) {
  switch (t) {
    case SemigroupSpec::Tag::heat: return "heat";
    case SemigroupSpec::Tag::poisson: return "poisson";
    case SemigroupSpec::Tag::hermite_heat: return "hermite_heat";
    case SemigroupSpec::Tag::hermite_poisson: return "hermite_poisson";
  }
  return "?";
}

namespace detail {

inline SampledFunction hermite_kernel_apply(const SampledFunction& f, Real t,
                                            SemigroupSpec::Tag tag, int quad_nodes) {
  const Grid& g = f.grid;
  long N = g.points_per_axis;
  auto axis_matrix = [&](Real s) {
    MatrixXr K(N, N);
    for (long i = 0; i < N; ++i)
      for (long j = 0; j < N; ++j)
        K(i, j) = hermite_heat_kernel(s, Point{g.coord(i), 0}, Point{g.coord(j), 0}, 1);
    return K;
  };
  auto apply_axis = [&](const MatrixXr& K, const ArrayXc& v) -> ArrayXc {
    if (g.dim == 1) return (K.cast<Complex>() * v.matrix() * g.step()).array();
    Eigen::Map<const MatrixXc> F(v.data(), N, N);
    MatrixXc R = K.cast<Complex>() * F.transpose().eval() * K.transpose().cast<Complex>() *
                 (g.step() * g.step());
    ArrayXc out(N * N);
    for (long i = 0; i < N; ++i)
      for (long j = 0; j < N; ++j) out[i * N + j] = R(i, j);
    return out;
  };
  if (tag == SemigroupSpec::Tag::hermite_heat)
    return SampledFunction(g, apply_axis(axis_matrix(t), f.values));
  SubordinationRule rule = subordination_rule(t, g.dim, quad_nodes);
  ArrayXc acc = ArrayXc::Zero(g.size());
  for (size_t i = 0; i < rule.heat_times.size(); ++i)
    acc += rule.weights[i] * apply_axis(axis_matrix(rule.heat_times[i]), f.values);
  return SampledFunction(g, std::move(acc));
}

}  // namespace detail

// u(., t) = e^{-tL} f by the method of the spec; an optional prebuilt basis
// serves the spectral routes across a t-sweep.
inline SampledFunction apply_semigroup(const SemigroupSpec& spec, const SampledFunction& f,
                                       Real t, const HermiteBasis* basis = nullptr) {
  if (!(t > 0)) throw std::invalid_argument("apply_semigroup: t must be > 0");
  const int dim = f.grid.dim;
  switch (spec.tag) {
    case SemigroupSpec::Tag::heat:
      return convolve_profile(f, [&](const Point& d) { return heat_kernel(t, d, dim); });
    case SemigroupSpec::Tag::poisson:
      return convolve_profile(f, [&](const Point& d) { return poisson_kernel(t, d, dim); });
    default:
      break;
  }
  if (spec.method == SemigroupSpec::Method::kernel_convolution)
    return detail::hermite_kernel_apply(f, t, spec.tag, spec.quad_nodes);
  std::optional<HermiteBasis> local;
  if (!basis) {
    local.emplace(f.grid, spec.order);
    basis = &*local;
  }
  return spec.tag == SemigroupSpec::Tag::hermite_heat
             ? hermite_heat_spectral(*basis, f, t).u
             : hermite_poisson_spectral(*basis, f, t).u;
}

enum class ConvergenceVerdict { converges, stagnates, diverges };

inline const char* to_string(ConvergenceVerdict v) {
  switch (v) {
    case ConvergenceVerdict::converges: return "converges";
    case ConvergenceVerdict::stagnates: return "stagnates";
    case ConvergenceVerdict::diverges: return "diverges";
  }
  return "?";
}

// Per-t pointwise error statistics on the admissible subgrid
// { excluded_radius < |x| < L/2 }; converges iff the max error is
// nonincreasing within 10% slack over the last four t and ends below eps.
struct ExperimentReport {
  std::vector<Real> t_values;
  std::vector<Real> max_errors;
  std::vector<Real> mean_errors;
  Real excluded_radius = 0;
  Real eps = 1e-2;
  ConvergenceVerdict verdict = ConvergenceVerdict::stagnates;
};

inline ConvergenceVerdict judge(const std::vector<Real>& max_errors, Real eps) {
  size_t n = max_errors.size();
  bool finite = true;
  for (Real e : max_errors) finite &= std::isfinite(e);
  Real final_err = max_errors.back();
  bool tail_monotone = true;
  size_t lo = n >= 4 ? n - 4 : 0;
  for (size_t i = lo; i + 1 < n; ++i)
    if (max_errors[i + 1] > 1.10 * max_errors[i]) tail_monotone = false;
  if (finite && tail_monotone && final_err <= eps) return ConvergenceVerdict::converges;
  if (!finite || (final_err > eps && final_err > 10 * max_errors.front()))
    return ConvergenceVerdict::diverges;
  return ConvergenceVerdict::stagnates;
}

inline ExperimentReport convergence_experiment(const SemigroupSpec& spec,
                                               const SampledFunction& f,
                                               const std::vector<Real>& t_values,
                                               Real excluded_radius, Real eps,
                                               const HermiteBasis* basis = nullptr) {
  if (t_values.empty()) throw std::invalid_argument("experiment: empty t sweep");
  for (size_t i = 0; i + 1 < t_values.size(); ++i)
    if (!(t_values[i + 1] < t_values[i]))
      throw std::invalid_argument("experiment: t values must decrease");
  if (!(excluded_radius >= 0)) throw std::invalid_argument("experiment: excluded_radius >= 0");

  const Grid& g = f.grid;
  std::vector<long> admissible;
  for (long i = 0; i < g.size(); ++i) {
    Real r = norm(g.point(i), g.dim);
    if (r > excluded_radius && r < g.half_width / 2) admissible.push_back(i);
  }
  if (admissible.empty()) throw std::invalid_argument("experiment: empty admissible subgrid");

  ExperimentReport rep;
  rep.t_values = t_values;
  rep.excluded_radius = excluded_radius;
  rep.eps = eps;
  rep.max_errors.resize(t_values.size());
  rep.mean_errors.resize(t_values.size());
  for (size_t ti = 0; ti < t_values.size(); ++ti) {
    SampledFunction u = apply_semigroup(spec, f, t_values[ti], basis);
    Real mx = 0;
    KahanSum mean;
    for (long i : admissible) {
      Real e = std::abs(u.values[i] - f.values[i]);
      mx = std::max(mx, e);
      mean.add(e);
    }
    rep.max_errors[ti] = mx;
    rep.mean_errors[ti] = mean.value() / admissible.size();
  }
  rep.verdict = judge(rep.max_errors, eps);
  return rep;
}

// Dyadic sweep 2^{-k_min}..2^{-k_max}; kernel-convolution methods are floored
// so the kernel width stays >= 4 grid steps (heat width sqrt(2t), poisson
// width t, hermite heat sqrt(2 tanh t)).
inline std::vector<Real> dyadic_sweep(const SemigroupSpec& spec, const Grid& g, int k_min = 2,
                                      int k_max = 12) {
  std::vector<Real> ts;
  Real floor_width = 4 * g.step();
  for (int k = k_min; k <= k_max; ++k) {
    Real t = std::pow(2.0, -k);
    if (spec.method == SemigroupSpec::Method::kernel_convolution) {
      Real width = spec.tag == SemigroupSpec::Tag::poisson ? t : std::sqrt(2 * t);
      if (spec.tag == SemigroupSpec::Tag::hermite_heat ||
          spec.tag == SemigroupSpec::Tag::hermite_poisson)
        width = std::sqrt(2 * std::tanh(t));
      if (width < floor_width) break;
    }
    ts.push_back(t);
  }
  if (ts.empty()) throw std::invalid_argument("dyadic_sweep: no resolvable t");
  return ts;
}

// One row of the forward-direction suite: a weight, a data descriptor and a
// semigroup; member weights must converge.
struct SuiteRow {
  std::string weight_label;
  Weight weight = Weight::constant(1.0);
  std::string data_label;
  FunctionDescriptor data = FunctionDescriptor::gaussian(0.25);
  SemigroupSpec spec;
  MixedNormParams params{2, 2};
  std::vector<Real> t0_candidates{0.25};
  Grid grid = make_grid(1, 16, 1024, Offset::none);
  std::vector<Real> t_values;
  Real excluded_radius = 0;
  Real eps = 1e-2;
  std::vector<TruncationLevel> truncations = default_truncations();
};

struct SuiteRowResult {
  SuiteRow row;
  WeightClassReport membership;
  ExperimentReport experiment;
  Real domination_excess = 0;  // heat rows: max(u_t - A M f), at most ~1e-6
  bool pass = false;
};

inline WeightClassTag class_for(SemigroupSpec::Tag tag) {
  switch (tag) {
    case SemigroupSpec::Tag::heat:
    case SemigroupSpec::Tag::hermite_heat:
      return WeightClassTag::Dh;  // the D^h and Hermite-heat classes coincide
    case SemigroupSpec::Tag::poisson:
      return WeightClassTag::DP;
    case SemigroupSpec::Tag::hermite_poisson:
      return WeightClassTag::Domega;
  }
  return WeightClassTag::Dh;
}

inline SuiteRowResult run_suite_row(const SuiteRow& row) {
  SuiteRowResult out;
  out.row = row;
  out.membership = weight_class_membership(class_for(row.spec.tag), row.weight, row.params,
                                           row.t0_candidates, row.grid.dim, row.truncations);
  SampledFunction f = sample(row.data, row.grid);
  std::vector<Real> ts =
      row.t_values.empty() ? dyadic_sweep(row.spec, row.grid) : row.t_values;
  std::optional<HermiteBasis> basis;
  const HermiteBasis* bp = nullptr;
  if (row.spec.method == SemigroupSpec::Method::spectral) {
    basis.emplace(row.grid, row.spec.order);
    bp = &*basis;
  }
  out.experiment = convergence_experiment(row.spec, f, ts, row.excluded_radius, row.eps, bp);

  if (row.spec.tag == SemigroupSpec::Tag::heat) {
    // domination sanity: u_t <= A M f pointwise, A = mass of the radial
    // majorant of the widest swept heat profile (h_t is its own majorant)
    SampledFunction mf = maximal_function(f, make_radii(row.grid, row.grid.half_width));
    Real excess = -kInf;
    for (Real t : {ts.front(), ts.back()}) {
      SampledFunction u = apply_semigroup(row.spec, f, t);
      SampledFunction prof = sample_fn(row.grid, [&](const Point& d) {
        return heat_kernel(t, d, row.grid.dim);
      });
      Real A = least_decreasing_radial_majorant(prof).mass;
      for (long i = 0; i < row.grid.size(); ++i)
        excess = std::max(excess, std::abs(u.values[i]) - A * mf.values[i].real());
    }
    out.domination_excess = excess;
  }
  bool member_implication = !(out.membership.verdict == Verdict::member &&
                              out.experiment.verdict != ConvergenceVerdict::converges);
  bool domination_ok = out.domination_excess <= 1e-6;
  out.pass = member_implication && domination_ok &&
             out.experiment.verdict == ConvergenceVerdict::converges;
  return out;
}

// The default forward-direction table: every row pairs a member weight with
// nonnegative data; includes the f_{1/2} heat row and the Phi_0
// Hermite-Poisson row.
inline std::vector<SuiteRow> default_theorem_suite() {
  std::vector<SuiteRow> rows;
  {
    SuiteRow r;
    r.weight_label = "const";
    r.data_label = "gaussian:0.25";
    r.spec = SemigroupSpec(SemigroupSpec::Tag::heat, SemigroupSpec::Method::kernel_convolution);
    r.grid = make_grid(1, 16, 4096, Offset::none);
    rows.push_back(r);
  }
  {
    SuiteRow r;
    r.weight_label = "prod(exp:-1,2;exp:-1,2)";
    r.weight = Weight::product(Weight::exp_power(-1, 2), Weight::exp_power(-1, 2));
    r.data_label = "falpha:0.5";
    r.data = FunctionDescriptor::f_alpha(0.5, 1);
    r.spec = SemigroupSpec(SemigroupSpec::Tag::heat, SemigroupSpec::Method::kernel_convolution);
    r.params = MixedNormParams(4, 4);
    r.t0_candidates = {0.05, 0.1, 0.2};
    r.grid = make_grid(1, 16, 16384, Offset::half_step);
    r.excluded_radius = 0.5;
    SemigroupSpec probe = r.spec;
    r.t_values = dyadic_sweep(probe, r.grid, 2, 14);
    rows.push_back(r);
  }
  {
    SuiteRow r;
    r.weight_label = "const";
    r.data_label = "gaussian:0.25";
    r.spec = SemigroupSpec(SemigroupSpec::Tag::poisson, SemigroupSpec::Method::kernel_convolution);
    r.t0_candidates = {0.5};
    r.grid = make_grid(1, 16, 8192, Offset::none);
    rows.push_back(r);
  }
  {
    SuiteRow r;
    r.weight_label = "const";
    r.data_label = "falpha:0.5";
    r.data = FunctionDescriptor::f_alpha(0.5, 1);
    r.spec = SemigroupSpec(SemigroupSpec::Tag::poisson, SemigroupSpec::Method::kernel_convolution);
    r.params = MixedNormParams(4, 4);
    r.t0_candidates = {0.5};
    r.grid = make_grid(1, 16, 65536, Offset::half_step);
    r.excluded_radius = 1.0;
    // poisson-tail decay |V|^{4/3} ~ |x|^{-8/3} needs wider truncations to
    // stabilize at the 1e-3 Cauchy tolerance
    r.truncations = {{32, 1024}, {64, 2048}, {128, 4096}};
    rows.push_back(r);
  }
  {
    SuiteRow r;
    r.weight_label = "const";
    r.data_label = "hermite:0";
    r.data = FunctionDescriptor::hermite(0);
    r.spec = SemigroupSpec(SemigroupSpec::Tag::hermite_heat, SemigroupSpec::Method::spectral);
    r.t0_candidates = {0.25};
    r.grid = make_grid(1, 24, 1024, Offset::none);
    rows.push_back(r);
  }
  {
    SuiteRow r;
    r.weight_label = "const";
    r.data_label = "hermite:0";
    r.data = FunctionDescriptor::hermite(0);
    r.spec = SemigroupSpec(SemigroupSpec::Tag::hermite_poisson, SemigroupSpec::Method::spectral);
    r.grid = make_grid(1, 24, 1024, Offset::none);
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<SuiteRowResult> theorem_suite(const std::vector<SuiteRow>& rows) {
  std::vector<SuiteRowResult> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(run_suite_row(row));
  return out;
}

}  // namespace modlab

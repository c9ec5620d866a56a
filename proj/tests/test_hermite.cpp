#include "modlab/hermite.hpp"

#include <doctest.h>

#include <cstdio>

#include "oracles.hpp"

using namespace modlab;

namespace {
Grid basis_grid() { return make_grid(1, 24, 1024, Offset::none); }
}  // namespace

TEST_CASE("hermite function values and normalization") {
  CHECK(hermite_function(0, 0.0) == doctest::Approx(std::pow(kPi, -0.25)));
  CHECK(hermite_function(1, 0.0) == doctest::Approx(0.0));
  CHECK(std::isfinite(hermite_function(512, 40.0)));
  CHECK_THROWS_AS(hermite_function(-1, 0.0), std::invalid_argument);

  Grid g = make_grid(1, 16, 1024, Offset::none);
  for (int k : {0, 7, 31, 64}) {
    SampledFunction hk = sample(FunctionDescriptor::hermite(k), g);
    CHECK(lp_norm(hk, 2.0) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("discrete orthonormality across the basis") {
  HermiteBasis basis(basis_grid(), 128);
  const MatrixXr& A = basis.axis_samples();
  MatrixXr G = A.transpose() * A * basis.grid().step();
  Real err = (G - MatrixXr::Identity(129, 129)).cwiseAbs().maxCoeff();
  CHECK(err < 1e-8);
}

TEST_CASE("recurrence residual at every sample") {
  Grid g = basis_grid();
  HermiteBasis basis(g, 64);
  const MatrixXr& A = basis.axis_samples();
  Real worst = 0;
  for (long j = 0; j < g.points_per_axis; ++j) {
    Real x = g.coord(j);
    for (int k = 1; k < 64; ++k) {
      Real pred = x * std::sqrt(2.0 / (k + 1)) * A(j, k) - std::sqrt(Real(k) / (k + 1)) * A(j, k - 1);
      worst = std::max(worst, std::abs(pred - A(j, k + 1)));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("basis window guard") {
  CHECK_THROWS_AS(HermiteBasis(make_grid(1, 8, 256, Offset::none), 128), std::invalid_argument);
}

TEST_CASE("projection is idempotent, eigen-selective, complete") {
  Grid g = basis_grid();
  HermiteBasis basis(g, 80);
  SampledFunction h3 = sample(FunctionDescriptor::hermite(3), g);
  SampledFunction p3 = basis.project(h3, 3);
  CHECK((p3.values - h3.values).abs().maxCoeff() < 1e-8);
  SampledFunction p2 = basis.project(h3, 2);
  CHECK(p2.values.abs().maxCoeff() < 1e-8);
  SampledFunction pp = basis.project(basis.project(h3, 3), 3);
  CHECK((pp.values - p3.values).abs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(basis.project(h3, 81), std::invalid_argument);

  // completeness on a gaussian: sum_{k<=64} P_k f recovers f
  SampledFunction f = sample(FunctionDescriptor::gaussian(0.25), g);
  ArrayXc acc = ArrayXc::Zero(g.size());
  for (int k = 0; k <= 64; ++k) acc += basis.project(f, k).values;
  CHECK((acc - f.values).abs().maxCoeff() < 1e-6);
}

TEST_CASE("heat semigroup: eigenfunction decay and closed-form error") {
  Grid g = basis_grid();
  HermiteBasis basis(g, 32);
  SampledFunction phi0 = sample(FunctionDescriptor::hermite(0), g);
  Real t = 0.37;
  SpectralResult r = hermite_heat_spectral(basis, phi0, t);
  CHECK((r.u.values - std::exp(-t) * phi0.values).abs().maxCoeff() < 1e-12);

  // t -> 0 error on Phi_0 is (1 - e^{-tn}) pi^{-1/4}
  SpectralResult r01 = hermite_heat_spectral(basis, phi0, 0.1);
  Real err = (r01.u.values - phi0.values).abs().maxCoeff();
  CHECK(err == doctest::Approx((1 - std::exp(-0.1)) * std::pow(kPi, -0.25)).epsilon(1e-6));
}

TEST_CASE("heat semigroup: spectral route agrees with kernel quadrature") {
  Grid g = basis_grid();
  HermiteBasis basis(g, 128);
  SampledFunction f = sample(FunctionDescriptor::gaussian(0.25), g);
  long N = g.points_per_axis;
  for (Real t : {0.1, 0.5}) {
    SpectralResult spec = hermite_heat_spectral(basis, f, t);
    MatrixXr K(N, N);
    for (long i = 0; i < N; ++i)
      for (long j = 0; j < N; ++j) K(i, j) = hermite_heat_kernel(t, g.point(i), g.point(j), 1);
    ArrayXc viaker = (K.cast<Complex>() * f.values.matrix() * g.step()).array();
    CHECK((spec.u.values - viaker).abs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("semigroup law and positivity in the multipliers") {
  Grid g = basis_grid();
  HermiteBasis basis(g, 96);
  SampledFunction f = oracles::random_smooth(g, 77);
  SpectralResult ab = hermite_heat_spectral(basis, hermite_heat_spectral(basis, f, 0.2).u, 0.3);
  SpectralResult once = hermite_heat_spectral(basis, f, 0.5);
  CHECK((ab.u.values - once.u.values).abs().maxCoeff() < 1e-10);

  SampledFunction pos = sample(FunctionDescriptor::gaussian(0.5), g);
  SpectralResult heat = hermite_heat_spectral(basis, pos, 0.25);
  Real min_re = kInf;
  for (long i = 0; i < heat.u.values.size(); ++i)
    min_re = std::min(min_re, heat.u.values[i].real());
  CHECK(min_re >= -1e-10);
}

TEST_CASE("poisson semigroup: spectral vs subordination routes") {
  Grid g = basis_grid();
  HermiteBasis basis(g, 128);
  SampledFunction f = sample(FunctionDescriptor::gaussian(0.25), g);
  long N = g.points_per_axis;
  Real t = 0.5;
  SpectralResult spec = hermite_poisson_spectral(basis, f, t);
  SubordinationRule rule = subordination_rule(t, 1, 64);
  ArrayXc viaker = ArrayXc::Zero(N);
  MatrixXr K(N, N);
  for (size_t q = 0; q < rule.heat_times.size(); ++q) {
    for (long i = 0; i < N; ++i)
      for (long j = 0; j < N; ++j)
        K(i, j) = hermite_heat_kernel(rule.heat_times[q], g.point(i), g.point(j), 1);
    viaker += rule.weights[q] * (K.cast<Complex>() * f.values.matrix() * g.step()).array();
  }
  CHECK((spec.u.values - viaker).abs().maxCoeff() < 1e-6);

  SampledFunction phi0 = sample(FunctionDescriptor::hermite(0), g);
  SpectralResult p0 = hermite_poisson_spectral(basis, phi0, t);
  CHECK((p0.u.values - std::exp(-t) * phi0.values).abs().maxCoeff() < 1e-12);
  SpectralResult pid = hermite_poisson_spectral(basis, f, 0.0);
  CHECK((pid.u.values - f.values).abs().maxCoeff() < 1e-12);
}

TEST_CASE("mehler identity: series vs closed form") {
  MehlerPair m = mehler_check(0.5, 0.0, 0.0, 200);
  CHECK(m.closed == doctest::Approx(std::pow(0.75, -0.5)).epsilon(1e-12));
  CHECK(std::abs(m.series - m.closed) < 1e-10);

  MehlerPair m0 = mehler_check(0.0, 0.7, -0.4, 10);
  CHECK(m0.closed == doctest::Approx(std::exp(-0.5 * (0.49 + 0.16))));
  CHECK(m0.series == doctest::Approx(std::sqrt(kPi) * hermite_function(0, 0.7) *
                                     hermite_function(0, -0.4)));

  MehlerPair m9 = mehler_check(0.9, 1.0, -1.0, 300);
  CHECK(std::abs(m9.series - m9.closed) < 1e-8);

  CHECK_THROWS_AS(mehler_check(1.0, 0, 0, 10), std::invalid_argument);
}

TEST_CASE("discrete eigen-relation residual shrinks at second order") {
  auto residual = [](long N) {
    Grid g = make_grid(1, 16, N, Offset::none);
    SampledFunction h4 = sample(FunctionDescriptor::hermite(4), g);
    Real d = g.step();
    long n = g.points_per_axis;
    ArrayXc r(n);
    for (long j = 0; j < n; ++j) {
      Complex lap = j > 0 && j < n - 1
                        ? (h4.values[j - 1] - 2.0 * h4.values[j] + h4.values[j + 1]) / (d * d)
                        : Complex(0, 0);
      Real x = g.coord(j);
      r[j] = -lap + x * x * h4.values[j] - 9.0 * h4.values[j];
    }
    KahanSum acc;
    for (long j = 1; j + 1 < n; ++j) acc.add(std::norm(r[j]));
    return std::sqrt(acc.value() * d);
  };
  Real r1 = residual(512), r2 = residual(1024);
  CHECK(r2 < r1 / 3.0);  // second-order consistency: near 4x per refinement
  // (2k+1)^2/12 * step^2 with k = 4 bounds the residual at this mesh
  CHECK(r1 < 81.0 / 12 * std::pow(2 * 16.0 / 512, 2) * 1.5);
}

TEST_CASE("ou transfer: constants fixed, identity limit, transfer identity") {
  Grid g = make_grid(1, 16, 1024, Offset::none);
  SampledFunction one = sample_fn(g, [](const Point&) { return 1.0; });
  int clipped = -1;
  SampledFunction r = ou_transfer(one, 0.3, &clipped);
  CHECK(clipped == 0);
  CHECK((r.values - one.values).abs().maxCoeff() < 1e-6);

  // identity limit, resolved kernel widths: error shrinks roughly linearly in t
  SampledFunction gs = sample(FunctionDescriptor::gaussian(0.5), g);
  Real e1 = (ou_transfer(gs, 0.02).values - gs.values).abs().maxCoeff();
  Real e2 = (ou_transfer(gs, 0.01).values - gs.values).abs().maxCoeff();
  CHECK(e1 < 0.05);
  CHECK(e2 < 0.7 * e1);

  // literal composition on an interior sub-window agrees with the combined kernel
  SampledFunction gauss = sample(FunctionDescriptor::gaussian(0.5), g);
  Real t = 0.25;
  HermiteBasis basis(g, 63);
  ArrayXc tilde = gauss.values;
  for (long j = 0; j < g.size(); ++j) tilde[j] *= std::exp(-0.5 * std::pow(g.coord(j), 2));
  SpectralResult inner = hermite_heat_spectral(basis, SampledFunction(g, tilde), t);
  SampledFunction combined = ou_transfer(gauss, t);
  for (long j = 0; j < g.size(); ++j) {
    Real x = g.coord(j);
    if (std::abs(x) > 4) continue;
    Complex literal = std::exp(t) * std::exp(0.5 * x * x) * inner.u.values[j];
    CHECK(std::abs(literal - combined.values[j]) < 1e-8);
  }
}

TEST_CASE("basis cache round trip") {
  Grid g = make_grid(1, 16, 256, Offset::none);
  HermiteBasis basis(g, 40);
  std::string path = "/tmp/modlab_basis_cache_test.csv";
  save_basis_cache(basis, path);
  HermiteBasis loaded = load_basis_cache(path, g);
  CHECK((loaded.axis_samples() - basis.axis_samples()).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("2d projection and heat route agreement") {
  Grid g = make_grid(2, 12, 64, Offset::none);
  HermiteBasis basis(g, 32);
  SampledFunction f = sample(FunctionDescriptor::gaussian(0.25), g);
  // projection onto k = 0 equals <f, Phi_00> Phi_00
  SampledFunction p0 = basis.project(f, 0);
  SampledFunction phi00 = sample(FunctionDescriptor::hermite(0), g);
  Complex c = inner_product(f, phi00);
  CHECK((p0.values - c * phi00.values).abs().maxCoeff() < 1e-10);

  Real t = 0.5;
  SpectralResult spec = hermite_heat_spectral(basis, f, t);
  // separable kernel route
  long N = g.points_per_axis;
  MatrixXr K(N, N);
  for (long i = 0; i < N; ++i)
    for (long j = 0; j < N; ++j)
      K(i, j) = hermite_heat_kernel(t, Point{g.coord(i), 0}, Point{g.coord(j), 0}, 1);
  Eigen::Map<const MatrixXc> F(f.values.data(), N, N);
  MatrixXc R = K.cast<Complex>() * F.transpose().eval() * K.transpose().cast<Complex>() *
               (g.step() * g.step());
  Real worst = 0;
  for (long i = 0; i < N; ++i)
    for (long j = 0; j < N; ++j)
      worst = std::max(worst, std::abs(spec.u.values[i * N + j] - R(i, j)));
  CHECK(worst < 1e-6);
}

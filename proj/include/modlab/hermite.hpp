#pragma once

#include "modlab/grid.hpp"
#include "modlab/kernels.hpp"
#include "modlab/special_functions.hpp"

#include <fstream>
#include <utility>

namespace modlab {

// Per-axis table of normalized Hermite function samples. The window must
// contain the turning points +-sqrt(2k+1) of every retained order, otherwise
// discrete orthonormality degrades; hence L >= sqrt(2 (2 K_max + dim)).
class HermiteBasis {
 public:
  HermiteBasis(Grid grid, int K_max) : grid_(grid), K_max_(K_max) {
    if (K_max < 0) throw std::invalid_argument("HermiteBasis: K_max >= 0");
    Real need = std::sqrt(2.0 * (2 * K_max + grid.dim));
    if (grid.half_width < need)
      throw std::invalid_argument("HermiteBasis: window too small for K_max, need L >= " +
                                  std::to_string(need));
    long N = grid.points_per_axis;
    axis_ = MatrixXr(N, K_max + 1);
    for (long j = 0; j < N; ++j) axis_.row(j) = hermite_function_row(K_max, grid.coord(j)).matrix();
  }

  // Rebuild from a cache dump; the table is trusted but revalidated cheaply
  // against the recurrence at one interior sample.
  HermiteBasis(Grid grid, int K_max, MatrixXr axis_samples)
      : grid_(grid), K_max_(K_max), axis_(std::move(axis_samples)) {
    if (axis_.rows() != grid.points_per_axis || axis_.cols() != K_max + 1)
      throw std::invalid_argument("HermiteBasis: cache shape mismatch");
    long j = grid.points_per_axis / 2;
    if (std::abs(axis_(j, 0) - hermite_function(0, grid.coord(j))) > 1e-12)
      throw std::invalid_argument("HermiteBasis: cache does not match grid");
  }

  const Grid& grid() const { return grid_; }
  int order() const { return K_max_; }
  const MatrixXr& axis_samples() const { return axis_; }

  // Coefficients <f, Phi_alpha> by quadrature; 1D vector or (K+1)^2 matrix.
  Eigen::VectorXcd coefficients_1d(const SampledFunction& f) const {
    require_grid(f);
    return axis_.transpose() * f.values.matrix() * grid_.step();
  }
  MatrixXc coefficients_2d(const SampledFunction& f) const {
    require_grid(f);
    long N = grid_.points_per_axis;
    Eigen::Map<const MatrixXc> F(f.values.data(), N, N);
    // F(i,j) = f(x_i, y_j), row-major flat storage maps column index to axis 1
    return axis_.transpose().cast<Complex>() * F.transpose().eval() * axis_.cast<Complex>() *
           (grid_.step() * grid_.step());
  }

  // Orthogonal projection onto the eigenspace of eigenvalue 2k + dim.
  SampledFunction project(const SampledFunction& f, int k) const {
    require_grid(f);
    if (k > K_max_) throw std::invalid_argument("project: k exceeds K_max");
    long N = grid_.points_per_axis;
    if (grid_.dim == 1) {
      Complex c = (axis_.col(k).transpose() * f.values.matrix())(0) * grid_.step();
      return SampledFunction(grid_, (c * axis_.col(k).array().cast<Complex>()).eval());
    }
    MatrixXc C = coefficients_2d(f);
    ArrayXc out = ArrayXc::Zero(N * N);
    for (int k1 = 0; k1 <= k; ++k1) {
      int k2 = k - k1;
      if (k2 > K_max_) continue;
      Complex c = C(k1, k2);
      for (long i = 0; i < N; ++i)
        for (long j = 0; j < N; ++j) out[i * N + j] += c * axis_(i, k1) * axis_(j, k2);
    }
    return SampledFunction(grid_, std::move(out));
  }

  // sum_k m(k) P_k f with a spectral multiplier on the total degree.
  template <typename MultFn>
  SampledFunction apply_multiplier(const SampledFunction& f, MultFn&& mult) const {
    require_grid(f);
    long N = grid_.points_per_axis;
    if (grid_.dim == 1) {
      Eigen::VectorXcd c = coefficients_1d(f);
      for (int k = 0; k <= K_max_; ++k) c[k] *= mult(k);
      return SampledFunction(grid_, (axis_.cast<Complex>() * c).array().eval());
    }
    MatrixXc C = coefficients_2d(f);
    for (int k1 = 0; k1 <= K_max_; ++k1)
      for (int k2 = 0; k2 <= K_max_; ++k2) C(k1, k2) *= mult(k1 + k2);
    MatrixXc R = axis_.cast<Complex>() * C * axis_.transpose().cast<Complex>();
    ArrayXc out(N * N);
    for (long i = 0; i < N; ++i)
      for (long j = 0; j < N; ++j) out[i * N + j] = R(i, j);
    return SampledFunction(grid_, std::move(out));
  }

 private:
  void require_grid(const SampledFunction& f) const {
    if (!(f.grid == grid_)) throw std::invalid_argument("HermiteBasis: grid mismatch");
  }
  Grid grid_;
  int K_max_;
  MatrixXr axis_;
};

// Truncation order for tolerance: tail of e^{-tH} beyond K is bounded by
// e^{-t(2K+n)} ||f||_2.
inline int select_heat_order(Real t, Real l2, Real tol, int dim, int K_cap) {
  if (l2 <= 0) return 0;
  Real need = std::log(l2 / tol);
  int K = need <= 0 ? 0 : static_cast<int>(std::ceil((need / t - dim) / 2)) + 1;
  return std::min(std::max(K, 8), K_cap);
}

struct SpectralResult {
  SampledFunction u;
  Real tail_bound;
};

// e^{-tH} f = sum_k e^{-t(2k+n)} P_k f.
inline SpectralResult hermite_heat_spectral(const HermiteBasis& basis, const SampledFunction& f,
                                            Real t) {
  if (!(t > 0)) throw std::invalid_argument("hermite_heat_spectral: t must be > 0");
  int n = basis.grid().dim;
  SampledFunction u =
      basis.apply_multiplier(f, [&](int k) { return std::exp(-t * (2.0 * k + n)); });
  Real tail = std::exp(-t * (2.0 * basis.order() + n)) * lp_norm(f, 2.0);
  return {std::move(u), tail};
}

// e^{-t sqrt(H)} f = sum_k e^{-t sqrt(2k+n)} P_k f.
inline SpectralResult hermite_poisson_spectral(const HermiteBasis& basis,
                                               const SampledFunction& f, Real t) {
  if (!(t >= 0)) throw std::invalid_argument("hermite_poisson_spectral: t must be >= 0");
  int n = basis.grid().dim;
  SampledFunction u =
      basis.apply_multiplier(f, [&](int k) { return std::exp(-t * std::sqrt(2.0 * k + n)); });
  Real tail = std::exp(-t * std::sqrt(2.0 * basis.order() + n)) * lp_norm(f, 2.0);
  return {std::move(u), tail};
}

// Generating identity for Hermite functions, |w| < 1:
//   sum_k [H_k(x) e^{-x^2/2}][H_k(y) e^{-y^2/2}] w^k / (2^k k!)
//     = (1-w^2)^{-1/2} exp(-[(1+w^2)(x^2+y^2)/2 - 2 w x y]/(1-w^2)).
// The series is summed as sqrt(pi) h_k(x) h_k(y) w^k, the same summands in
// normalized form, so no factorial overflow.
struct MehlerPair {
  Real series;
  Real closed;
};

inline MehlerPair mehler_check(Real w, Real x, Real y, int K) {
  if (!(std::abs(w) < 1)) throw std::invalid_argument("mehler_check: need |w| < 1");
  if (K < 0) throw std::invalid_argument("mehler_check: K >= 0");
  ArrayXr hx = hermite_function_row(K, x), hy = hermite_function_row(K, y);
  KahanSum acc;
  Real wk = 1.0;
  Real rtpi = std::sqrt(kPi);
  for (int k = 0; k <= K; ++k) {
    acc.add(rtpi * hx[k] * hy[k] * wk);
    wk *= w;
  }
  Real closed = std::pow(1 - w * w, -0.5) *
                std::exp(-0.5 * (1 + w * w) / (1 - w * w) * (x * x + y * y) +
                         2 * w / (1 - w * w) * x * y);
  return {acc.value(), closed};
}

// Ornstein-Uhlenbeck transfer e^{-tO} f = e^{|x|^2/2} e^{tn} e^{-tH}(e^{-|y|^2/2} f).
// Evaluated through the combined kernel
//   e^{tn} e^{(|x|^2-|y|^2)/2} h^H_t(x,y),
// which regroups the same operator so no e^{+|x|^2/2} factor ever meets a
// truncated intermediate at the window edge. Non-finite results (possible for
// data growing faster than the window allows) are clipped to 0 and counted.
inline SampledFunction ou_transfer(const SampledFunction& f, Real t, int* clipped = nullptr) {
  if (!(t > 0)) throw std::invalid_argument("ou_transfer: t must be > 0");
  const Grid& g = f.grid;
  long N = g.points_per_axis;
  MatrixXr K(N, N);
  for (long i = 0; i < N; ++i) {
    Real xi = g.coord(i);
    for (long j = 0; j < N; ++j) {
      Real yj = g.coord(j);
      K(i, j) = std::exp(t + 0.5 * (xi * xi - yj * yj)) *
                hermite_heat_kernel(t, Point{xi, 0}, Point{yj, 0}, 1);
    }
  }
  int clip_count = 0;
  ArrayXc out;
  if (g.dim == 1) {
    out = (K.cast<Complex>() * f.values.matrix() * g.step()).array();
  } else {
    Eigen::Map<const MatrixXc> F(f.values.data(), N, N);
    MatrixXc R = K.cast<Complex>() * F.transpose().eval() * K.transpose().cast<Complex>() *
                 (g.step() * g.step());
    out.resize(N * N);
    for (long i = 0; i < N; ++i)
      for (long j = 0; j < N; ++j) out[i * N + j] = R(i, j);
  }
  for (long i = 0; i < out.size(); ++i)
    if (!std::isfinite(out[i].real()) || !std::isfinite(out[i].imag())) {
      out[i] = 0;
      ++clip_count;
    }
  if (clipped) *clipped = clip_count;
  return SampledFunction(g, std::move(out));
}

// Basis cache: CSV keyed by (L, N, K_max); per-axis samples row by row.
inline void save_basis_cache(const HermiteBasis& basis, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("basis cache: cannot open " + path);
  const Grid& g = basis.grid();
  char buf[64];
  out << "# hermite-basis-cache,L,N,K\n";
  std::snprintf(buf, sizeof buf, "%.17g", g.half_width);
  out << "# " << buf << "," << g.points_per_axis << "," << basis.order() << "\n";
  const MatrixXr& A = basis.axis_samples();
  for (long j = 0; j < A.rows(); ++j) {
    for (int k = 0; k <= basis.order(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", A(j, k));
      out << buf << (k == basis.order() ? '\n' : ',');
    }
  }
}

inline HermiteBasis load_basis_cache(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("basis cache: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# hermite-basis-cache", 0) != 0)
    throw std::runtime_error("basis cache: bad header in " + path);
  if (!std::getline(in, line) || line.size() < 3)
    throw std::runtime_error("basis cache: missing key line in " + path);
  Real L;
  long N;
  int K;
  if (std::sscanf(line.c_str(), "# %lf,%ld,%d", &L, &N, &K) != 3)
    throw std::runtime_error("basis cache: malformed key line in " + path);
  if (L != grid.half_width || N != grid.points_per_axis)
    throw std::runtime_error("basis cache: key mismatch for " + path);
  MatrixXr A(N, K + 1);
  for (long j = 0; j < N; ++j) {
    if (!std::getline(in, line)) throw std::runtime_error("basis cache: truncated " + path);
    const char* p = line.c_str();
    char* end = nullptr;
    for (int k = 0; k <= K; ++k) {
      A(j, k) = std::strtod(p, &end);
      if (p == end) throw std::runtime_error("basis cache: malformed row in " + path);
      p = *end == ',' ? end + 1 : end;
    }
  }
  return HermiteBasis(grid, K, std::move(A));
}

}  // namespace modlab

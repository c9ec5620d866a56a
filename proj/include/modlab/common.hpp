#pragma once

#include <Eigen/Dense>

#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace modlab {

using Real = double;
using Complex = std::complex<Real>;
using ArrayXc = Eigen::ArrayXcd;
using ArrayXr = Eigen::ArrayXd;
using MatrixXc = Eigen::MatrixXcd;
using MatrixXr = Eigen::MatrixXd;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;
inline constexpr Real kInf = std::numeric_limits<Real>::infinity();

// Point in R^1 or R^2; the active dimension is carried by the Grid.
using Point = std::array<Real, 2>;

inline Real norm_sq(const Point& p, int dim) {
  return dim == 1 ? p[0] * p[0] : p[0] * p[0] + p[1] * p[1];
}
inline Real norm(const Point& p, int dim) { return std::sqrt(norm_sq(p, dim)); }

// Neumaier compensated accumulator; reductions stay order-independent to
// roundoff, which keeps every CSV byte-identical across runs.
class KahanSum {
 public:
  void add(Real x) {
    Real t = sum_ + x;
    if (!std::isfinite(t)) {  // keep inf as inf instead of inf - inf = NaN
      sum_ = t;
      comp_ = 0.0;
      return;
    }
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  Real value() const { return sum_ + comp_; }

 private:
  Real sum_ = 0.0;
  Real comp_ = 0.0;
};

class KahanSumC {
 public:
  void add(Complex z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  Complex value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum re_, im_;
};

// Thread cap from MODLAB_THREADS (>=1). Work items are independent output
// slots, so the schedule cannot change results.
inline int thread_cap() {
  static const int cap = [] {
    if (const char* env = std::getenv("MODLAB_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }();
  return cap;
}

template <typename Fn>
void parallel_for(long n, Fn&& fn) {
  int nt = std::min<long>(thread_cap(), n);
  if (nt <= 1 || n < 2) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        long i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

inline bool is_pow2(long n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace modlab

#pragma once

#include "modlab/common.hpp"

#include <unsupported/Eigen/FFT>

namespace modlab {

namespace detail {
inline Eigen::FFT<Real>& fft_engine() {
  thread_local Eigen::FFT<Real> engine;  // plans cached per size per thread
  return engine;
}
}  // namespace detail

// Plain unscaled DFT: out_k = sum_j in_j e^{-2 pi i jk/N}.
inline void dft(const ArrayXc& in, ArrayXc& out) {
  Eigen::VectorXcd tmp;
  detail::fft_engine().fwd(tmp, Eigen::VectorXcd(in.matrix()));
  out = tmp.array();
}

// Unscaled inverse: out_j = (1/N) sum_k in_k e^{+2 pi i jk/N}.
inline void idft(const ArrayXc& in, ArrayXc& out) {
  dft(in.conjugate(), out);
  out = out.conjugate() / Real(in.size());
}

// In-place DFT along both axes of a row-major N x N flat array.
inline void dft2(ArrayXc& a, long N, bool inverse) {
  auto pass = [&](ArrayXc& v) {
    ArrayXc o;
    if (inverse)
      idft(v, o);
    else
      dft(v, o);
    v = o;
  };
  ArrayXc line(N);
  for (long r = 0; r < N; ++r) {  // rows (contiguous)
    line = a.segment(r * N, N);
    pass(line);
    a.segment(r * N, N) = line;
  }
  for (long c = 0; c < N; ++c) {  // columns
    for (long r = 0; r < N; ++r) line[r] = a[r * N + c];
    pass(line);
    for (long r = 0; r < N; ++r) a[r * N + c] = line[r];
  }
}

}  // namespace modlab

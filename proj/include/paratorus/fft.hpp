#pragma once

// Thin wrapper over FFTW's 2D complex transforms. Plans are created once per
// (size, direction) under a lock and then executed through the thread-safe
// new-array interface, so transforms may run from concurrent workers.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace paratorus {

using cplx = std::complex<double>;

namespace detail {

inline fftw_plan fft_plan(int n, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(n, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  std::vector<cplx> a(static_cast<std::size_t>(n) * n), b(a.size());
  // FFTW_ESTIMATE keeps the algorithm choice (and hence the rounding) fixed
  // from run to run.
  fftw_plan p = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(a.data()),
                                 reinterpret_cast<fftw_complex*>(b.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(key, p);
  return p;
}

}  // namespace detail

/// Coefficients c(k) = n^{-2} sum_x u(x) e^{-i k.x}.
inline void fft_forward(int n, const cplx* in, cplx* out) {
  fftw_execute_dft(detail::fft_plan(n, FFTW_FORWARD),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  const double scale = 1.0 / (static_cast<double>(n) * n);
  const std::size_t size = static_cast<std::size_t>(n) * n;
  for (std::size_t i = 0; i < size; ++i) out[i] *= scale;
}

/// Values u(x) = sum_k c(k) e^{i k.x}.
inline void fft_inverse(int n, const cplx* in, cplx* out) {
  fftw_execute_dft(detail::fft_plan(n, FFTW_BACKWARD),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

inline std::vector<cplx> fft_forward(int n, const std::vector<cplx>& in) {
  std::vector<cplx> out(in.size());
  fft_forward(n, in.data(), out.data());
  return out;
}

inline std::vector<cplx> fft_inverse(int n, const std::vector<cplx>& in) {
  std::vector<cplx> out(in.size());
  fft_inverse(n, in.data(), out.data());
  return out;
}

}  // namespace paratorus

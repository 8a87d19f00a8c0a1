#pragma once
// Thin wrapper around FFTW complex-to-complex transforms.
//
// Plans are cached per (size, direction). Plan creation is serialized behind
// a mutex (the FFTW planner is not thread-safe); execution goes through the
// new-array interface, which is safe to call concurrently on distinct buffers.
// All transforms are unnormalized: FORWARD sums e^{-i...}, BACKWARD e^{+i...}.

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "vfil/grid.hpp"

namespace vfil {

namespace detail {

struct PlanCache {
  std::map<std::tuple<int, int, int>, fftw_plan> plans;
  std::mutex mtx;
  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

inline fftw_plan fft_plan(int n0, int n1, int sign) {
  static PlanCache cache;
  std::lock_guard<std::mutex> lock(cache.mtx);
  const auto key = std::make_tuple(n0, n1, sign);
  if (auto it = cache.plans.find(key); it != cache.plans.end()) return it->second;
  std::vector<cplx> tmp(static_cast<size_t>(n0) * (n1 > 0 ? n1 : 1));
  auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
  fftw_plan plan =
      n1 > 0 ? fftw_plan_dft_2d(n0, n1, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
             : fftw_plan_dft_1d(n0, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.plans.emplace(key, plan);
  return plan;
}

}  // namespace detail

/// In-place unnormalized transform of a row-major n0 x n1 complex array.
inline void fft2(cplx* data, int n0, int n1, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(detail::fft_plan(n0, n1, sign), p, p);
}

/// In-place unnormalized transform of a length-n complex array.
inline void fft1(cplx* data, int n, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(detail::fft_plan(n, 0, sign), p, p);
}

}  // namespace vfil

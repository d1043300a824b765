#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

// Thin FFTW wrapper. Plans are created once per (kind, shape) under a mutex and
// executed through the new-array interface, which FFTW guarantees thread-safe.

namespace fracsol::fft {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

namespace detail {

enum class PlanKind { R2C, C2R, C2CForward, C2CBackward, R2C2D, C2R2D };

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(PlanKind kind, std::size_t n0, std::size_t n1 = 0) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(kind, n0, n1);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const int a = static_cast<int>(n0);
    const int b = static_cast<int>(n1);
    fftw_plan plan = nullptr;
    switch (kind) {
      case PlanKind::R2C: {
        std::vector<double> in(n0);
        std::vector<Complex> out(n0 / 2 + 1);
        plan = fftw_plan_dft_r2c_1d(a, in.data(), as_fftw(out.data()), flags);
        break;
      }
      case PlanKind::C2R: {
        std::vector<Complex> in(n0 / 2 + 1);
        std::vector<double> out(n0);
        plan = fftw_plan_dft_c2r_1d(a, as_fftw(in.data()), out.data(), flags);
        break;
      }
      case PlanKind::C2CForward:
      case PlanKind::C2CBackward: {
        std::vector<Complex> in(n0), out(n0);
        const int sign = kind == PlanKind::C2CForward ? FFTW_FORWARD : FFTW_BACKWARD;
        plan = fftw_plan_dft_1d(a, as_fftw(in.data()), as_fftw(out.data()), sign, flags);
        break;
      }
      case PlanKind::R2C2D: {
        std::vector<double> in(n0 * n1);
        std::vector<Complex> out(n0 * (n1 / 2 + 1));
        plan = fftw_plan_dft_r2c_2d(a, b, in.data(), as_fftw(out.data()), flags);
        break;
      }
      case PlanKind::C2R2D: {
        std::vector<Complex> in(n0 * (n1 / 2 + 1));
        std::vector<double> out(n0 * n1);
        plan = fftw_plan_dft_c2r_2d(a, b, as_fftw(in.data()), out.data(), flags);
        break;
      }
    }
    plans_.emplace(key, plan);
    return plan;
  }

  static fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<PlanKind, std::size_t, std::size_t>, fftw_plan> plans_;
};

inline fftw_plan plan(PlanKind kind, std::size_t n0, std::size_t n1 = 0) {
  return PlanCache::instance().get(kind, n0, n1);
}

}  // namespace detail

/// Unnormalized real-to-half-complex transform; output has n/2+1 entries.
inline void forward(std::span<const double> in, std::span<Complex> out) {
  fftw_execute_dft_r2c(detail::plan(detail::PlanKind::R2C, in.size()),
                       const_cast<double*>(in.data()), detail::PlanCache::as_fftw(out.data()));
}

inline Spectrum forward(std::span<const double> in) {
  Spectrum out(in.size() / 2 + 1);
  forward(in, out);
  return out;
}

/// Inverse of forward(), including the 1/n normalization. `scratch` is overwritten.
inline void inverse(std::span<Complex> scratch, std::span<double> out) {
  const std::size_t n = out.size();
  fftw_execute_dft_c2r(detail::plan(detail::PlanKind::C2R, n),
                       detail::PlanCache::as_fftw(scratch.data()), out.data());
  const double inv = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= inv;
}

inline std::vector<double> inverse(Spectrum spectrum, std::size_t n) {
  std::vector<double> out(n);
  inverse(spectrum, out);
  return out;
}

/// Unnormalized complex transforms (forward: e^{-i}, backward: e^{+i}).
inline void complex_forward(std::span<Complex> in, std::span<Complex> out) {
  fftw_execute_dft(detail::plan(detail::PlanKind::C2CForward, in.size()),
                   detail::PlanCache::as_fftw(in.data()), detail::PlanCache::as_fftw(out.data()));
}

inline void complex_backward(std::span<Complex> in, std::span<Complex> out) {
  fftw_execute_dft(detail::plan(detail::PlanKind::C2CBackward, in.size()),
                   detail::PlanCache::as_fftw(in.data()), detail::PlanCache::as_fftw(out.data()));
}

/// Row-major n0 x n1 real array to n0 x (n1/2+1) half spectrum.
inline Spectrum forward_2d(std::span<const double> in, std::size_t n0, std::size_t n1) {
  Spectrum out(n0 * (n1 / 2 + 1));
  fftw_execute_dft_r2c(detail::plan(detail::PlanKind::R2C2D, n0, n1),
                       const_cast<double*>(in.data()), detail::PlanCache::as_fftw(out.data()));
  return out;
}

inline std::vector<double> inverse_2d(Spectrum spectrum, std::size_t n0, std::size_t n1) {
  std::vector<double> out(n0 * n1);
  fftw_execute_dft_c2r(detail::plan(detail::PlanKind::C2R2D, n0, n1),
                       detail::PlanCache::as_fftw(spectrum.data()), out.data());
  const double inv = 1.0 / static_cast<double>(n0 * n1);
  for (double& v : out) v *= inv;
  return out;
}

}  // namespace fracsol::fft

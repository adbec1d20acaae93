#pragma once

// Sampled functions on uniform grids and the FFT plumbing shared by the
// transforms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "cohspec/errors.hpp"

namespace cohspec {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void require_pow2(std::size_t n, const char* what) {
  if (n < 8 || !is_pow2(n))
    throw DomainError(std::string(what) + ": size must be a power of two >= 8");
}

// Unnormalized forward DFT: X_k = sum_j x_j e^{-2 pi i jk/N}.
inline CVec fft_forward(const CVec& x) {
  Eigen::FFT<double> fft;
  CVec out;
  fft.fwd(out, x);
  return out;
}

// Inverse DFT including the 1/N factor.
inline CVec fft_inverse(const CVec& x) {
  Eigen::FFT<double> fft;
  CVec out;
  fft.inv(out, x);
  return out;
}

// Signed frequency of DFT bin k; the Nyquist bin maps to -N/2.
inline long signed_freq(std::size_t k, std::size_t n) {
  return k < n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

// Uniform line grid x_j = x0 + j h, j = 0..n-1.
struct GridFn {
  CVec samples;
  double x0 = 0.0;
  double h = 1.0;

  GridFn() = default;
  GridFn(CVec s, double x0_, double h_) : samples(std::move(s)), x0(x0_), h(h_) {
    require_pow2(samples.size(), "GridFn");
    if (!(h > 0.0)) throw DomainError("GridFn: step must be positive");
  }

  // n samples on [a, b) with h = (b - a)/n.
  template <class F>
  static GridFn sample(F&& f, double a, double b, std::size_t n) {
    const double step = (b - a) / static_cast<double>(n);
    CVec s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = f(a + step * static_cast<double>(j));
    return GridFn(std::move(s), a, step);
  }

  static GridFn zeros(double a, double b, std::size_t n) {
    return sample([](double) { return cplx{}; }, a, b, n);
  }

  std::size_t n() const { return samples.size(); }
  double x(std::size_t j) const { return x0 + h * static_cast<double>(j); }
  double extent() const { return h * static_cast<double>(n()); }
  GridFn like(CVec s) const { return GridFn(std::move(s), x0, h); }

  double norm() const {
    double acc = 0.0;
    for (const auto& v : samples) acc += std::norm(v);
    return std::sqrt(acc * h);
  }
};

// <f, g> = sum f conj(g) h, linear in the first argument.
inline cplx inner(const GridFn& f, const GridFn& g) {
  cplx acc{};
  for (std::size_t j = 0; j < f.n(); ++j) acc += f.samples[j] * std::conj(g.samples[j]);
  return acc * f.h;
}

inline double max_abs_diff(const CVec& a, const CVec& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

inline double max_abs(const CVec& a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

// Samples at angles 2 pi k / N; the measure is d phi / 2 pi.
struct CircleFn {
  CVec samples;

  CircleFn() = default;
  explicit CircleFn(CVec s) : samples(std::move(s)) { require_pow2(samples.size(), "CircleFn"); }

  template <class F>
  static CircleFn sample(F&& f, std::size_t n) {
    CVec s(n);
    for (std::size_t k = 0; k < n; ++k) s[k] = f(angle(k, n));
    return CircleFn(std::move(s));
  }

  static double angle(std::size_t k, std::size_t n) {
    return 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  }

  std::size_t n() const { return samples.size(); }

  double norm() const {
    double acc = 0.0;
    for (const auto& v : samples) acc += std::norm(v);
    return std::sqrt(acc / static_cast<double>(n()));
  }

  // c_m = (1/N) sum f(phi_k) e^{-i m phi_k}, indexed by signed frequency.
  CVec fourier() const {
    CVec c = fft_forward(samples);
    for (auto& v : c) v /= static_cast<double>(n());
    return c;
  }

  // Trigonometric interpolant evaluated at an arbitrary angle; the Nyquist
  // term is split symmetrically so real data stays real.
  cplx interpolate(double phi, const CVec& coeffs) const {
    const std::size_t N = n();
    cplx acc{};
    for (std::size_t k = 0; k < N; ++k) {
      const long m = signed_freq(k, N);
      if (k == N / 2) {
        acc += coeffs[k] * std::cos(static_cast<double>(N / 2) * phi);
      } else {
        acc += coeffs[k] * std::polar(1.0, static_cast<double>(m) * phi);
      }
    }
    return acc;
  }
};

struct TaylorSeries {
  CVec coeffs;

  std::size_t size() const { return coeffs.size(); }

  // Horner evaluation of sum c_k z^k.
  cplx operator()(cplx z) const {
    cplx acc{};
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
    return acc;
  }
};

// Coefficients in the orthonormal basis z^n / sqrt(n!) of the Segal-Bargmann
// space with measure e^{-|z|^2} dz / pi.
struct FockFn {
  CVec coeffs;

  std::size_t size() const { return coeffs.size(); }

  double norm() const {
    double acc = 0.0;
    for (const auto& v : coeffs) acc += std::norm(v);
    return std::sqrt(acc);
  }

  cplx operator()(cplx z) const {
    cplx acc{};
    cplx term{1.0, 0.0};
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
      acc += coeffs[n] * term;
      term *= z / std::sqrt(static_cast<double>(n + 1));
    }
    return acc;
  }
};

}  // namespace cohspec

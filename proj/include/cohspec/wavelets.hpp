#pragma once

// Reduced wavelet transforms for the Fourier, Segal-Bargmann and Hardy
// systems, together with the representations they intertwine.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "cohspec/errors.hpp"
#include "cohspec/grid.hpp"
#include "cohspec/groups.hpp"
#include "cohspec/quadrature.hpp"

namespace cohspec {

enum class Direction { forward, inverse };

// ---------------------------------------------------------------------------
// Fourier system on the line

// forward: (2 pi)^{-1/2} sum_j e^{i sqrt2 x y_j} f(y_j) h
// inverse: sqrt2 (2 pi)^{-1/2} sum_j e^{-i sqrt2 x_j y} F(x_j) h
// Input and output share the grid.
inline GridFn fourier_wavelet(const GridFn& f, Direction dir) {
  const std::size_t n = f.n();
  const double sign = dir == Direction::forward ? 1.0 : -1.0;
  const double pref = (dir == Direction::forward ? 1.0 : std::sqrt(2.0)) * f.h /
                      std::sqrt(2.0 * std::numbers::pi);
  const double k = sign * std::sqrt(2.0);
  CVec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = f.x(i);
    cplx acc{};
    for (std::size_t j = 0; j < n; ++j) acc += std::polar(1.0, k * x * f.x(j)) * f.samples[j];
    out[i] = pref * acc;
  }
  return f.like(std::move(out));
}

// Band-limited translation f(y) -> f(y - c) by a phase ramp in frequency;
// the Nyquist bin is dropped.
inline GridFn grid_shift(const GridFn& f, double c) {
  const std::size_t n = f.n();
  CVec spec = fft_forward(f.samples);
  const double dk = 2.0 * std::numbers::pi / f.extent();
  for (std::size_t k = 0; k < n; ++k) {
    if (k == n / 2) {
      spec[k] = 0.0;
      continue;
    }
    spec[k] *= std::polar(1.0, -dk * static_cast<double>(signed_freq(k, n)) * c);
  }
  return f.like(fft_inverse(spec));
}

// Rough bound on the error of grid_shift(f, c): the mass that wraps around
// the periodic box plus the dropped Nyquist content.
inline double shift_error_bound(const GridFn& f, double c) {
  const std::size_t n = f.n();
  const auto w = std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(std::abs(c) / f.h)) + 1);
  double edge = 0.0;
  for (std::size_t j = 0; j < w; ++j)
    edge = std::max({edge, std::abs(f.samples[j]), std::abs(f.samples[n - 1 - j])});
  const CVec spec = fft_forward(f.samples);
  return edge + std::abs(spec[n / 2]) / static_cast<double>(n);
}

// [sigma_hbar(s,u,v) f](y) = e^{i(2 s hbar - sqrt(2 hbar) v y + hbar u v)} f(y - sqrt(2 hbar) u)
inline GridFn schrodinger_act(const HeisPoint& g, const GridFn& f, double hbar) {
  if (!(hbar > 0.0)) throw DomainError("schrodinger_act: hbar must be positive");
  const double r = std::sqrt(2.0 * hbar);
  const double c = r * g.x;
  if (std::abs(c) > 0.5 * f.extent())
    throw DomainError("schrodinger_act: shift exceeds half the grid extent");
  GridFn out = c == 0.0 ? f : grid_shift(f, c);
  for (std::size_t j = 0; j < out.n(); ++j) {
    const double y = out.x(j);
    out.samples[j] *= std::polar(1.0, 2.0 * g.s * hbar - r * g.y * y + hbar * g.x * g.y);
  }
  return out;
}

// Orthonormal Hermite functions psi_0..psi_{m-1} at the points xs.
inline std::vector<std::vector<double>> hermite_functions(std::size_t m,
                                                          const std::vector<double>& xs) {
  std::vector<std::vector<double>> psi(m, std::vector<double>(xs.size()));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double x = xs[j];
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    for (std::size_t k = 0; k < m; ++k) {
      psi[k][j] = cur;
      const double next = std::sqrt(2.0 / (k + 1.0)) * x * cur - std::sqrt(k / (k + 1.0)) * prev;
      prev = cur;
      cur = next;
    }
  }
  return psi;
}

inline std::vector<double> grid_points(const GridFn& f) {
  std::vector<double> xs(f.n());
  for (std::size_t j = 0; j < f.n(); ++j) xs[j] = f.x(j);
  return xs;
}

// Coefficients of breve-f(z) = pi^{-1/4} int f(x) e^{-(z^2 + x^2)/2 + sqrt2 z x} dx
// in the basis z^n / sqrt(n!): c_n = <f, psi_n>, by trapezoid quadrature.
inline FockFn segal_bargmann(const GridFn& f, std::size_t modes) {
  const auto psi = hermite_functions(modes, grid_points(f));
  FockFn out;
  out.coeffs.assign(modes, cplx{});
  for (std::size_t k = 0; k < modes; ++k) {
    cplx acc{};
    for (std::size_t j = 0; j < f.n(); ++j) acc += f.samples[j] * psi[k][j];
    out.coeffs[k] = acc * f.h;
  }
  return out;
}

// Tensor quadrature over the disk |z| <= R: Gauss-Legendre in r, trapezoid
// in theta. Weights include the Jacobian r.
struct PolarGrid {
  QuadRule radial;
  std::size_t n_theta = 128;

  static PolarGrid make(double radius, std::size_t n_r = 128, std::size_t n_theta = 128) {
    return {gauss_legendre(n_r, 0.0, radius), n_theta};
  }

  std::size_t size() const { return radial.nodes.size() * n_theta; }

  cplx node(std::size_t i) const {
    const double r = radial.nodes[i / n_theta];
    return std::polar(r, 2.0 * std::numbers::pi * static_cast<double>(i % n_theta) /
                             static_cast<double>(n_theta));
  }

  double weight(std::size_t i) const {
    return radial.weights[i / n_theta] * radial.nodes[i / n_theta] * 2.0 * std::numbers::pi /
           static_cast<double>(n_theta);
  }
};

// Truncation radius with e^{-R^2} R^{2M} <= 1e-16 for the top mode M.
inline double fock_radius(std::size_t modes) {
  const double m = static_cast<double>(modes);
  double radius = std::max(6.0, std::sqrt(m));
  while (-radius * radius + 2.0 * m * std::log(radius) > std::log(1e-16)) radius += 0.05;
  return radius;
}

struct PolarSamples {
  PolarGrid grid;
  CVec values;

  template <class F>
  static PolarSamples sample(F&& fn, const PolarGrid& grid) {
    PolarSamples s{grid, CVec(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) s.values[i] = fn(grid.node(i));
    return s;
  }
};

// f(x) = pi^{-5/4} int F(z) e^{-(conj(z)^2 + x^2)/2 + sqrt2 conj(z) x} e^{-|z|^2} d^2z
inline GridFn segal_bargmann_inv(const FockFn& F, double a, double b, std::size_t n) {
  const PolarGrid grid = PolarGrid::make(fock_radius(std::max<std::size_t>(F.size(), 1)));
  CVec fz(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) fz[i] = F(grid.node(i)) * grid.weight(i);
  const double pref = std::pow(std::numbers::pi, -1.25);
  return GridFn::sample(
      [&](double x) {
        cplx acc{};
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const cplx zb = std::conj(grid.node(i));
          const cplx e = -0.5 * (zb * zb + x * x) + std::sqrt(2.0) * zb * x - std::norm(zb);
          acc += fz[i] * std::exp(e);
        }
        return pref * acc;
      },
      a, b, n);
}

// Orthogonal projection onto span{z^n / sqrt(n!)} in L^2(e^{-|z|^2} d^2z / pi).
inline FockFn fock_project(const PolarSamples& s, std::size_t modes) {
  FockFn out;
  out.coeffs.assign(modes, cplx{});
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const cplx z = s.grid.node(i);
    const cplx base = s.values[i] * s.grid.weight(i) * std::exp(-std::norm(z)) / std::numbers::pi;
    cplx mono{1.0, 0.0};
    for (std::size_t k = 0; k < modes; ++k) {
      out.coeffs[k] += base * std::conj(mono);
      mono *= z / std::sqrt(static_cast<double>(k + 1));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hardy system on the circle

// Nonnegative-frequency coefficients c_0..c_{M-1}; M <= N/2 keeps them clear
// of aliasing with negative frequencies.
inline TaylorSeries taylor_decompose(const CircleFn& f, std::size_t m) {
  if (m > f.n() / 2) throw DomainError("taylor_decompose: M must be <= N/2");
  const CVec c = f.fourier();
  return TaylorSeries{CVec(c.begin(), c.begin() + static_cast<long>(m))};
}

// sqrt(1 - |a|^2) sum_k F_k a^k
inline cplx wavelet_image(const TaylorSeries& F, cplx a) {
  return std::sqrt(1.0 - std::norm(a)) * F(a);
}

inline cplx hardy_transform(const CircleFn& f, const DiskPoint& a) {
  return wavelet_image(taylor_decompose(f, f.n() / 2), a.value());
}

// The same value from the Cauchy integral sqrt(1-|a|^2) (1/2 pi i) \oint f(t) / (t - a) dt
// by trapezoid quadrature.
inline cplx hardy_cauchy_integral(const CircleFn& f, const DiskPoint& a) {
  cplx acc{};
  for (std::size_t k = 0; k < f.n(); ++k) {
    const cplx t = std::polar(1.0, CircleFn::angle(k, f.n()));
    acc += f.samples[k] * t / (t - a.value());
  }
  return std::sqrt(1.0 - std::norm(a.value())) * acc / static_cast<double>(f.n());
}

inline CircleFn szego_project(const CircleFn& f) {
  CVec spec = fft_forward(f.samples);
  const std::size_t n = f.n();
  for (std::size_t k = n / 2; k < n; ++k) spec[k] = 0.0;
  return CircleFn(fft_inverse(spec));
}

// [rho_1(g) f](w) = (conj(beta) w + conj(alpha))^{-1} f((alpha w + beta)/(conj(beta) w + conj(alpha)))
// with |w| = 1; f is read off its trigonometric interpolant.
inline CircleFn rho1_act(const SL2Elt& g, const CircleFn& f) {
  const CVec coeffs = f.fourier();
  const std::size_t n = f.n();
  CVec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx w = std::polar(1.0, CircleFn::angle(k, n));
    const cplx den = std::conj(g.beta()) * w + std::conj(g.alpha());
    const cplx image = (g.alpha() * w + g.beta()) / den;
    out[k] = f.interpolate(std::arg(image), coeffs) / den;
  }
  return CircleFn(std::move(out));
}

struct LambdaValue {
  cplx value;
  bool truncation_warning = false;
};

// [lambda(g) WF](a) = (alpha + beta conj(a)) / |alpha + beta conj(a)| * WF(b),
// b = (alpha a + beta)/(conj(beta) a + conj(alpha)), with WF the wavelet image of
// the Taylor series F.
inline LambdaValue lambda_disk_act(const SL2Elt& g, const TaylorSeries& F, const DiskPoint& a) {
  const cplx z = a.value();
  const cplx b = mobius_apply(g, z);
  const cplx m = g.alpha() + g.beta() * std::conj(z);
  LambdaValue r;
  r.value = m / std::abs(m) * wavelet_image(F, b);
  // Geometric tail estimate from the last retained coefficient.
  if (F.size() > 0) {
    const double rb = std::abs(b);
    const double tail = std::abs(F.coeffs.back()) *
                        std::pow(rb, static_cast<double>(F.size() - 1)) / (1.0 - rb);
    r.truncation_warning = tail > 1e-10;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Admissibility

enum class WaveletKind { fourier, bargmann, hardy };

struct WaveletSystem {
  WaveletKind kind = WaveletKind::bargmann;
  // Trapezoid nodes per axis over the (u, v) square [-8, 8]^2.
  std::size_t quadrature_nodes = 32;
  double hbar = 0.5;
};

// |int <rho(x^{-1}) b0, l0> <rho(x) b0, l0> dmu(x) - <b0, l0>| with the Gaussian
// vacuum b0 = l0, x = (0, u, v) and dmu = (hbar/pi) du dv.
inline double admissibility_defect(const WaveletSystem& sys) {
  if (sys.kind != WaveletKind::bargmann)
    throw UnsupportedError("admissibility_defect: only the bargmann system is supported");
  const GridFn b0 = GridFn::sample(
      [](double y) { return cplx(std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * y * y)); },
      -16.0, 16.0, 256);
  const std::size_t n = sys.quadrature_nodes;
  const double half = 8.0;
  const double step = 2.0 * half / static_cast<double>(n);
  cplx acc{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double u = -half + step * static_cast<double>(i);
      const double v = -half + step * static_cast<double>(j);
      const cplx fwd = inner(schrodinger_act({0.0, u, v}, b0, sys.hbar), b0);
      const cplx bwd = inner(schrodinger_act({0.0, -u, -v}, b0, sys.hbar), b0);
      acc += bwd * fwd;
    }
  }
  acc *= step * step * sys.hbar / std::numbers::pi;
  return std::abs(acc - inner(b0, b0));
}

}  // namespace cohspec

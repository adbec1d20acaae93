#pragma once

// Dirac and Laplace operators on planar grids as residual estimators, with
// fourth-order centered differences.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "cohspec/errors.hpp"
#include "cohspec/groups.hpp"

namespace cohspec {

// Samples f(x1_0 + i h1, x2_0 + j h2) stored row-major in i.
template <class T>
struct PlaneGrid {
  std::vector<T> samples;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double x1_0 = 0.0;
  double x2_0 = 0.0;
  double h1 = 1.0;
  double h2 = 1.0;

  template <class F>
  static PlaneGrid sample(F&& f, double a1, double b1, std::size_t n1, double a2, double b2,
                          std::size_t n2) {
    if (n1 < 5 || n2 < 5) throw DomainError("PlaneGrid: need at least 5 points per axis");
    PlaneGrid g;
    g.n1 = n1;
    g.n2 = n2;
    g.x1_0 = a1;
    g.x2_0 = a2;
    g.h1 = (b1 - a1) / static_cast<double>(n1 - 1);
    g.h2 = (b2 - a2) / static_cast<double>(n2 - 1);
    g.samples.resize(n1 * n2);
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) g.samples[i * n2 + j] = f(g.x1(i), g.x2(j));
    return g;
  }

  double x1(std::size_t i) const { return x1_0 + h1 * static_cast<double>(i); }
  double x2(std::size_t j) const { return x2_0 + h2 * static_cast<double>(j); }
  const T& at(std::size_t i, std::size_t j) const { return samples[i * n2 + j]; }

  // (-f_{+2} + 8 f_{+1} - 8 f_{-1} + f_{-2}) / 12h
  T d1(std::size_t i, std::size_t j) const {
    return (1.0 / (12.0 * h1)) *
           (at(i - 2, j) - at(i + 2, j) + 8.0 * (at(i + 1, j) - at(i - 1, j)));
  }
  T d2(std::size_t i, std::size_t j) const {
    return (1.0 / (12.0 * h2)) *
           (at(i, j - 2) - at(i, j + 2) + 8.0 * (at(i, j + 1) - at(i, j - 1)));
  }
  // (-f_{+2} + 16 f_{+1} - 30 f_0 + 16 f_{-1} - f_{-2}) / 12h^2
  T d11(std::size_t i, std::size_t j) const {
    return (1.0 / (12.0 * h1 * h1)) *
           (16.0 * (at(i + 1, j) + at(i - 1, j)) - (at(i + 2, j) + at(i - 2, j)) -
            30.0 * at(i, j));
  }
  T d22(std::size_t i, std::size_t j) const {
    return (1.0 / (12.0 * h2 * h2)) *
           (16.0 * (at(i, j + 1) + at(i, j - 1)) - (at(i, j + 2) + at(i, j - 2)) -
            30.0 * at(i, j));
  }

  bool x2_range_contains_zero() const {
    const double lo = x2(0), hi = x2(n2 - 1);
    return lo <= 0.0 && hi >= 0.0;
  }
};

using PlaneGridFn = PlaneGrid<cplx>;
using Cliff11GridFn = PlaneGrid<Cliff11>;

enum class DiracKind { plane_literal, plane_holo, disk_invariant, hyperbolic };
enum class LaplaceKind { plane, disk_invariant, wave };

namespace detail {

inline double magnitude(const cplx& v) { return std::abs(v); }
inline double magnitude(const Cliff11& v) { return v.max_abs(); }

// Max of |op(i, j)| over points at distance >= 2 from the boundary.
template <class T, class Op>
double interior_max(const PlaneGrid<T>& f, Op&& op) {
  double m = 0.0;
  for (std::size_t i = 2; i + 2 < f.n1; ++i)
    for (std::size_t j = 2; j + 2 < f.n2; ++j) m = std::max(m, magnitude(op(i, j)));
  return m;
}

template <class T>
void require_off_axis(const PlaneGrid<T>& f) {
  if (f.x2_range_contains_zero())
    throw DomainError("y-weighted operator on a grid touching y = 0");
}

}  // namespace detail

// plane_literal: d1 - i d2; plane_holo: d1 + i d2; disk_invariant: y (d1 + i d2),
// which is 2 y d/d(conj z).
inline double dirac_residual(const PlaneGridFn& f, DiracKind kind) {
  const cplx I(0.0, 1.0);
  switch (kind) {
    case DiracKind::plane_literal:
      return detail::interior_max(f, [&](std::size_t i, std::size_t j) {
        return f.d1(i, j) - I * f.d2(i, j);
      });
    case DiracKind::plane_holo:
      return detail::interior_max(f, [&](std::size_t i, std::size_t j) {
        return f.d1(i, j) + I * f.d2(i, j);
      });
    case DiracKind::disk_invariant:
      detail::require_off_axis(f);
      return detail::interior_max(f, [&](std::size_t i, std::size_t j) {
        return f.x2(j) * (f.d1(i, j) + I * f.d2(i, j));
      });
    case DiracKind::hyperbolic:
      break;
  }
  throw PreconditionError("dirac_residual: hyperbolic kind needs a Cl(1,1)-valued grid");
}

// 2 y (e1 d1 + e2 d2) with left Clifford multiplication.
inline double dirac_residual(const Cliff11GridFn& f, DiracKind kind) {
  if (kind != DiracKind::hyperbolic)
    throw PreconditionError("dirac_residual: Cl(1,1)-valued grid needs the hyperbolic kind");
  detail::require_off_axis(f);
  return detail::interior_max(f, [&](std::size_t i, std::size_t j) {
    return (2.0 * f.x2(j)) * (Cliff11::e1() * f.d1(i, j) + Cliff11::e2() * f.d2(i, j));
  });
}

// plane: d11 + d22; disk_invariant: y^2 (d11 + d22); wave: y^2 (d11 - d22).
inline double laplace_residual(const PlaneGridFn& f, LaplaceKind kind) {
  switch (kind) {
    case LaplaceKind::plane:
      return detail::interior_max(f, [&](std::size_t i, std::size_t j) {
        return f.d11(i, j) + f.d22(i, j);
      });
    case LaplaceKind::disk_invariant:
      detail::require_off_axis(f);
      return detail::interior_max(f, [&](std::size_t i, std::size_t j) {
        const double y = f.x2(j);
        return y * y * (f.d11(i, j) + f.d22(i, j));
      });
    case LaplaceKind::wave:
      detail::require_off_axis(f);
      return detail::interior_max(f, [&](std::size_t i, std::size_t j) {
        const double y = f.x2(j);
        return y * y * (f.d11(i, j) - f.d22(i, j));
      });
  }
  return 0.0;
}

}  // namespace cohspec

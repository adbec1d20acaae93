#pragma once

// Heisenberg group, SL(2,R) realized as SU(1,1), the Clifford algebra Cl(1,1)
// and the fraction-linear actions on the elliptic and hyperbolic unit disks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "cohspec/errors.hpp"

namespace cohspec {

using cplx = std::complex<double>;

inline constexpr double kSingularThreshold = 1e-14;

// ---------------------------------------------------------------------------
// Heisenberg group

struct HeisPoint {
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;

  cplx z() const { return {x, y}; }
};

// (s,z)*(s',z') = (s + s' + Im(conj(z) z')/2, z + z')
inline HeisPoint heis_mul(const HeisPoint& g, const HeisPoint& h) {
  const double twist = 0.5 * (g.x * h.y - g.y * h.x);
  return {g.s + h.s + twist, g.x + h.x, g.y + h.y};
}

inline HeisPoint heis_inv(const HeisPoint& g) { return {-g.s, -g.x, -g.y}; }

// ---------------------------------------------------------------------------
// SU(1,1): matrices [[alpha, beta], [conj(beta), conj(alpha)]] with
// |alpha|^2 - |beta|^2 = 1.

class SL2Elt {
 public:
  SL2Elt() = default;

  // Renormalizes so that |alpha|^2 - |beta|^2 = 1 exactly up to rounding.
  SL2Elt(cplx alpha, cplx beta) {
    const double det = std::norm(alpha) - std::norm(beta);
    if (!(det > kSingularThreshold))
      throw DomainError("SL2Elt: |alpha|^2 - |beta|^2 must be positive");
    const double scale = 1.0 / std::sqrt(det);
    alpha_ = alpha * scale;
    beta_ = beta * scale;
  }

  static SL2Elt identity() { return {}; }

  // h_psi = diag(e^{i psi}, e^{-i psi}), the compact subgroup K.
  static SL2Elt rotation(double psi) { return {std::polar(1.0, psi), 0.0}; }

  cplx alpha() const { return alpha_; }
  cplx beta() const { return beta_; }

  SL2Elt inverse() const {
    SL2Elt r;
    r.alpha_ = std::conj(alpha_);
    r.beta_ = -beta_;
    return r;
  }

  friend SL2Elt operator*(const SL2Elt& g, const SL2Elt& h) {
    SL2Elt r;
    r.alpha_ = g.alpha_ * h.alpha_ + g.beta_ * std::conj(h.beta_);
    r.beta_ = g.alpha_ * h.beta_ + g.beta_ * std::conj(h.alpha_);
    return r;
  }

  double det_defect() const {
    return std::abs(std::norm(alpha_) - std::norm(beta_) - 1.0);
  }

 private:
  cplx alpha_{1.0, 0.0};
  cplx beta_{0.0, 0.0};
};

class DiskPoint {
 public:
  DiskPoint() = default;
  DiskPoint(cplx z) : z_(z) {  // NOLINT(google-explicit-constructor)
    if (!(std::abs(z) < 1.0)) throw DomainError("DiskPoint: |z| must be < 1");
  }
  DiskPoint(double re, double im) : DiskPoint(cplx(re, im)) {}

  cplx value() const { return z_; }
  operator cplx() const { return z_; }  // NOLINT(google-explicit-constructor)

 private:
  cplx z_{0.0, 0.0};
};

struct Decomposition {
  DiskPoint a;
  double psi = 0.0;
};

// g = s(a) * h_psi with a = beta / conj(alpha), psi = arg(alpha) in (-pi, pi].
inline Decomposition sl2_decompose(const SL2Elt& g) {
  const cplx a = g.beta() / std::conj(g.alpha());
  double psi = std::arg(g.alpha());
  if (psi <= -std::numbers::pi) psi += 2.0 * std::numbers::pi;
  return {DiskPoint(a), psi};
}

// s(a) = (1 - |a|^2)^{-1/2} [[1, a], [conj(a), 1]]
inline SL2Elt sl2_section(cplx a) {
  const double m = 1.0 - std::norm(a);
  if (!(std::abs(a) < 1.0)) throw DomainError("sl2_section: |a| must be < 1");
  const double c = 1.0 / std::sqrt(m);
  return SL2Elt(c, a * c);
}

inline SL2Elt sl2_recompose(const Decomposition& d) {
  return sl2_section(d.a.value()) * SL2Elt::rotation(d.psi);
}

// The point g.z = s^{-1}(g^{-1} s(z)): with g^{-1} = [[alpha, beta], [conj
// beta, conj alpha]] this is (alpha z + beta) / (conj(beta) z + conj(alpha)).
// It composes as g.(h.z) = (hg).z.
inline cplx mobius_apply(const SL2Elt& m, cplx z) {
  const cplx den = std::conj(m.beta()) * z + std::conj(m.alpha());
  if (std::abs(den) < kSingularThreshold)
    throw SingularityError("mobius: vanishing denominator");
  return (m.alpha() * z + m.beta()) / den;
}

inline DiskPoint mobius_disk(const SL2Elt& g, const DiskPoint& z) {
  return DiskPoint(mobius_apply(g.inverse(), z.value()));
}

// ---------------------------------------------------------------------------
// Cl(1,1): e1^2 = -1, e2^2 = +1, e1 e2 = -e2 e1, (e1 e2)^2 = +1.

struct Cliff11 {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c12 = 0.0;

  static Cliff11 scalar(double v) { return {v, 0, 0, 0}; }
  static Cliff11 e1() { return {0, 1, 0, 0}; }
  static Cliff11 e2() { return {0, 0, 1, 0}; }
  static Cliff11 e12() { return {0, 0, 0, 1}; }
  static Cliff11 vector(double u1, double u2) { return {0, u1, u2, 0}; }

  // Clifford conjugation: reversion composed with grade involution.
  Cliff11 conj() const { return {c0, -c1, -c2, -c12}; }

  // x * conj(x) is the scalar c0^2 + c1^2 - c2^2 - c12^2.
  double norm() const { return c0 * c0 + c1 * c1 - c2 * c2 - c12 * c12; }

  double max_abs() const {
    return std::max(std::max(std::abs(c0), std::abs(c1)),
                    std::max(std::abs(c2), std::abs(c12)));
  }

  Cliff11 inverse() const;

  friend Cliff11 operator+(const Cliff11& u, const Cliff11& v) {
    return {u.c0 + v.c0, u.c1 + v.c1, u.c2 + v.c2, u.c12 + v.c12};
  }
  friend Cliff11 operator-(const Cliff11& u, const Cliff11& v) {
    return {u.c0 - v.c0, u.c1 - v.c1, u.c2 - v.c2, u.c12 - v.c12};
  }
  friend Cliff11 operator-(const Cliff11& u) {
    return {-u.c0, -u.c1, -u.c2, -u.c12};
  }
  friend Cliff11 operator*(double k, const Cliff11& u) {
    return {k * u.c0, k * u.c1, k * u.c2, k * u.c12};
  }
};

inline Cliff11 cliff11_mul(const Cliff11& u, const Cliff11& v) {
  // Multiplication table on the basis {1, e1, e2, e12}:
  //   e1 e1 = -1, e2 e2 = 1, e12 e12 = 1,
  //   e1 e2 = e12, e2 e1 = -e12, e1 e12 = -e2, e12 e1 = e2,
  //   e2 e12 = -e1, e12 e2 = e1.
  Cliff11 r;
  r.c0 = u.c0 * v.c0 - u.c1 * v.c1 + u.c2 * v.c2 + u.c12 * v.c12;
  r.c1 = u.c0 * v.c1 + u.c1 * v.c0 - u.c2 * v.c12 + u.c12 * v.c2;
  r.c2 = u.c0 * v.c2 + u.c2 * v.c0 - u.c1 * v.c12 + u.c12 * v.c1;
  r.c12 = u.c0 * v.c12 + u.c12 * v.c0 + u.c1 * v.c2 - u.c2 * v.c1;
  return r;
}

inline Cliff11 operator*(const Cliff11& u, const Cliff11& v) {
  return cliff11_mul(u, v);
}

inline Cliff11 Cliff11::inverse() const {
  const double n = norm();
  if (std::abs(n) < kSingularThreshold)
    throw SingularityError("Cl(1,1) element on the light cone");
  return (1.0 / n) * conj();
}

struct HypPoint {
  double u1 = 0.0;
  double u2 = 0.0;

  Cliff11 as_cliff() const { return Cliff11::vector(u1, u2); }
  // u^2 = -u1^2 + u2^2 as a scalar of Cl(1,1).
  double square() const { return u2 * u2 - u1 * u1; }
};

// [[a, b], [-b, a]] with conj(a) a - conj(b) b = 1.
struct CliffMat {
  Cliff11 a = Cliff11::scalar(1.0);
  Cliff11 b{};

  double unimodularity_defect() const {
    const Cliff11 d = a.conj() * a - b.conj() * b;
    return (d - Cliff11::scalar(1.0)).max_abs();
  }

  // Hyperbolic rotation diag(e^{e12 tau}, e^{e12 tau}).
  static CliffMat boost(double tau) {
    return {Cliff11{std::cosh(tau), 0, 0, std::sinh(tau)}, Cliff11{}};
  }

  friend CliffMat operator*(const CliffMat& g, const CliffMat& h) {
    return {g.a * h.a - g.b * h.b, g.a * h.b + g.b * h.a};
  }
};

// u -> (a u + b)(-b u + a)^{-1}, read back as a vector of R^{1,1}.
inline HypPoint mobius_hyp(const CliffMat& g, const HypPoint& u) {
  if (g.unimodularity_defect() > 1e-12)
    throw DomainError("mobius_hyp: matrix is not unimodular");
  const Cliff11 uc = u.as_cliff();
  const Cliff11 den = -(g.b * uc) + g.a;
  if (std::abs(den.norm()) < kSingularThreshold * std::max(1.0, den.max_abs() * den.max_abs()))
    throw SingularityError("mobius_hyp: denominator on the light cone");
  const Cliff11 r = (g.a * uc + g.b) * den.inverse();
  return {r.c1, r.c2};
}

}  // namespace cohspec

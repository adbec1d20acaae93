#pragma once

// Analytic functional calculus for matrices: the matrix Mobius action, the
// representation rho_a, Dunford-Riesz contour integrals, jet spectra and the
// spectral mapping rule.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cohspec/errors.hpp"
#include "cohspec/grid.hpp"
#include "cohspec/groups.hpp"

namespace cohspec {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline double spectral_radius(const CMatrix& a) {
  if (a.rows() == 0) return 0.0;
  return Eigen::ComplexEigenSolver<CMatrix>(a, false).eigenvalues().cwiseAbs().maxCoeff();
}

inline CMatrix jordan_block(cplx lambda, std::size_t k) {
  const auto n = static_cast<Eigen::Index>(k);
  CMatrix j = lambda * CMatrix::Identity(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) j(i, i + 1) = 1.0;
  return j;
}

inline CMatrix direct_sum(const std::vector<CMatrix>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  CMatrix out = CMatrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

namespace detail {

inline CMatrix checked_inverse(const CMatrix& m, const char* what) {
  Eigen::PartialPivLU<CMatrix> lu(m);
  if (!(lu.rcond() > 1e-14)) throw SpectralDomainError(std::string(what) + ": singular matrix");
  return lu.inverse();
}

}  // namespace detail

// (conj(alpha) a - beta e)(alpha e - conj(beta) a)^{-1}; for a = lambda e this is
// mobius_disk(g, lambda) e.
inline CMatrix mobius_matrix(const SL2Elt& g, const CMatrix& a) {
  const auto n = a.rows();
  const CMatrix I = CMatrix::Identity(n, n);
  const CMatrix num = std::conj(g.alpha()) * a - g.beta() * I;
  const CMatrix den = g.alpha() * I - std::conj(g.beta()) * a;
  return num * detail::checked_inverse(den, "mobius_matrix");
}

// (conj(alpha) e - conj(beta) a)^{-1}
inline CMatrix matrix_resolvent(const SL2Elt& g, const CMatrix& a) {
  const auto n = a.rows();
  const CMatrix den = std::conj(g.alpha()) * CMatrix::Identity(n, n) - std::conj(g.beta()) * a;
  return detail::checked_inverse(den, "matrix_resolvent");
}

// Conformal factor j_g(b) = conj(beta) b + conj(alpha) e of the map
// m_g(b) = (alpha b + beta)(conj(beta) b + conj(alpha))^{-1}.
inline CMatrix mobius_factor(const SL2Elt& g, const CMatrix& b) {
  const auto n = b.rows();
  return std::conj(g.beta()) * b + std::conj(g.alpha()) * CMatrix::Identity(n, n);
}

// Vector-valued Taylor series F(b) = sum_k b^k F_k of a matrix argument.
struct VecTaylor {
  std::vector<CVector> coeffs;

  CVector operator()(const CMatrix& b) const {
    if (coeffs.empty()) return CVector::Zero(b.rows());
    CVector acc = coeffs.back();
    for (std::size_t k = coeffs.size() - 1; k-- > 0;) acc = b * acc + coeffs[k];
    return acc;
  }
};

using VecFn = std::function<CVector(const CMatrix&)>;

// [rho_a(g) F](b) = j_g(b)^{-1} F(m_g(b)): the matrix counterpart of rho1_act,
// with rho_a(g) rho_a(h) = rho_a(hg).
inline VecFn rho_a(const SL2Elt& g, VecFn F) {
  return [g, F = std::move(F)](const CMatrix& b) -> CVector {
    const CMatrix jinv = detail::checked_inverse(mobius_factor(g, b), "rho_a");
    return jinv * F(mobius_matrix(g.inverse(), b));
  };
}

// rho_a(g) F evaluated at b = z a.
inline CVector rho_a_act(const SL2Elt& g, const VecTaylor& F, const CMatrix& a, const DiskPoint& z) {
  if (!(spectral_radius(a) < 1.0))
    throw SpectralDomainError("rho_a_act: spectral radius must be < 1");
  return rho_a(g, [&F](const CMatrix& b) { return F(b); })(z.value() * a);
}

// ---------------------------------------------------------------------------
// Holomorphic maps as ratios of polynomials

struct HoloMap {
  CVec num{cplx(0.0), cplx(1.0)};
  CVec den{cplx(1.0)};

  static HoloMap polynomial(CVec coeffs) { return {std::move(coeffs), {cplx(1.0)}}; }
  static HoloMap identity() { return {}; }
  static HoloMap constant(cplx c) { return polynomial({c}); }

  cplx operator()(cplx z) const {
    const cplx q = horner(den, z);
    if (std::abs(q) < kSingularThreshold) throw DomainError("HoloMap: evaluation at a pole");
    return horner(num, z) / q;
  }

  CMatrix operator()(const CMatrix& a) const {
    const CMatrix q = horner(den, a);
    return horner(num, a) * detail::checked_inverse(q, "HoloMap");
  }

  static cplx horner(const CVec& c, cplx z) {
    cplx acc{};
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
    return acc;
  }

  static CMatrix horner(const CVec& c, const CMatrix& a) {
    const auto n = a.rows();
    CMatrix acc = CMatrix::Zero(n, n);
    for (std::size_t k = c.size(); k-- > 0;) {
      acc = acc * a;
      acc.diagonal().array() += c[k];
    }
    return acc;
  }
};

namespace detail {

// Taylor coefficients of the polynomial c at the point z.
inline CVec shift_poly(const CVec& c, cplx z) {
  CVec out(c);
  // Repeated synthetic division.
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = n - 1; k > i; --k) out[k - 1] += z * out[k];
  return out;
}

// First n+1 coefficients of the power series p / q (q_0 != 0).
inline CVec series_div(const CVec& p, const CVec& q, std::size_t n) {
  CVec t(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    cplx acc = j < p.size() ? p[j] : cplx{};
    for (std::size_t i = 1; i <= j && i < q.size(); ++i) acc -= q[i] * t[j - i];
    t[j] = acc / q[0];
  }
  return t;
}

inline CVec series_mul(const CVec& a, const CVec& b, std::size_t n) {
  CVec out(n + 1);
  for (std::size_t i = 0; i < a.size() && i <= n; ++i)
    for (std::size_t j = 0; j < b.size() && i + j <= n; ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace detail

// Taylor coefficients t_0..t_n of f at z, so f^{(j)}(z) = j! t_j.
inline CVec taylor_at(const HoloMap& f, std::size_t n, cplx z) {
  const CVec q = detail::shift_poly(f.den, z);
  if (std::abs(q[0]) < kSingularThreshold) throw DomainError("jet_prolong: evaluation at a pole");
  return detail::series_div(detail::shift_poly(f.num, z), q, n);
}

// (f(z), f'(z), ..., f^{(n)}(z))
inline CVec jet_prolong(const HoloMap& f, std::size_t n, cplx z) {
  CVec t = taylor_at(f, n, z);
  double fact = 1.0;
  for (std::size_t j = 0; j <= n; ++j) {
    if (j > 0) fact *= static_cast<double>(j);
    t[j] *= fact;
  }
  return t;
}

// w -> f(alpha w + beta) as a HoloMap.
inline HoloMap compose_affine(const HoloMap& f, cplx alpha, cplx beta) {
  auto sub = [&](const CVec& c) {
    CVec out(c.size());
    CVec power{cplx(1.0)};  // (alpha w + beta)^k
    for (std::size_t k = 0; k < c.size(); ++k) {
      for (std::size_t i = 0; i < power.size(); ++i) out[i] += c[k] * power[i];
      CVec next(power.size() + 1);
      for (std::size_t i = 0; i < power.size(); ++i) {
        next[i] += beta * power[i];
        next[i + 1] += alpha * power[i];
      }
      power = std::move(next);
    }
    return out;
  };
  return {sub(f.num), sub(f.den)};
}

// max |f| over m equispaced points on the unit circle.
inline double max_on_circle(const HoloMap& f, std::size_t m = 1024) {
  double best = 0.0;
  for (std::size_t k = 0; k < m; ++k)
    best = std::max(best, std::abs(f(std::polar(1.0, CircleFn::angle(k, m)))));
  return best;
}

// ---------------------------------------------------------------------------
// Dunford-Riesz calculus

struct Contour {
  std::size_t nodes = 256;
  double radius = 1.0;
};

// (2 pi i)^{-1} \oint f(t) (t e - a)^{-1} dt by the trapezoid rule on |t| = radius.
template <class Fn>
CMatrix contour_integral(Fn&& f, const CMatrix& a, const Contour& c) {
  if (c.nodes < 16 || !is_pow2(c.nodes))
    throw DomainError("Contour: node count must be a power of two >= 16");
  if (!(spectral_radius(a) < c.radius))
    throw SpectralDomainError("dunford_riesz: spectrum not inside the contour");
  const auto n = a.rows();
  const CMatrix I = CMatrix::Identity(n, n);
  CMatrix acc = CMatrix::Zero(n, n);
  for (std::size_t j = 0; j < c.nodes; ++j) {
    const cplx t = std::polar(c.radius, CircleFn::angle(j, c.nodes));
    acc += (f(j, t) * t) * (t * I - a).partialPivLu().inverse();
  }
  return acc / static_cast<double>(c.nodes);
}

inline CMatrix dunford_riesz(const HoloMap& f, const CMatrix& a, const Contour& c = {}) {
  return contour_integral([&](std::size_t, cplx t) { return f(t); }, a, c);
}

// The same integral with f given by samples on the unit circle.
inline CMatrix dunford_riesz(const CircleFn& f, const CMatrix& a) {
  return contour_integral([&](std::size_t j, cplx) { return f.samples[j]; }, a,
                          Contour{f.n(), 1.0});
}

// ---------------------------------------------------------------------------
// Jet spectrum

struct JetPair {
  cplx lambda;
  std::size_t k = 1;
};

struct JetSpectrum {
  std::vector<JetPair> pairs;

  std::size_t total() const {
    std::size_t s = 0;
    for (const auto& p : pairs) s += p.k;
    return s;
  }

  // Deterministic order: by real part, then imaginary part, then k, with
  // components rounded to 1e-9 so that tiny perturbations do not reorder.
  void canonicalize() {
    auto key = [](double v) { return std::round(v * 1e9); };
    std::sort(pairs.begin(), pairs.end(), [&](const JetPair& x, const JetPair& y) {
      if (key(x.lambda.real()) != key(y.lambda.real())) return x.lambda.real() < y.lambda.real();
      if (key(x.lambda.imag()) != key(y.lambda.imag())) return x.lambda.imag() < y.lambda.imag();
      return x.k < y.k;
    });
  }
};

// Multiset equality with eigenvalues matched within tol.
inline bool same_spectrum(const JetSpectrum& a, const JetSpectrum& b, double tol) {
  if (a.pairs.size() != b.pairs.size()) return false;
  std::vector<bool> used(b.pairs.size(), false);
  for (const auto& p : a.pairs) {
    bool found = false;
    for (std::size_t i = 0; i < b.pairs.size(); ++i) {
      if (!used[i] && b.pairs[i].k == p.k && std::abs(b.pairs[i].lambda - p.lambda) <= tol) {
        used[i] = found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

// Clustering radius: the requested tolerance, widened to the splitting that
// rounding induces on a defective eigenvalue of multiplicity up to n.
inline double cluster_radius(const CMatrix& a, double tol) {
  const double n = static_cast<double>(std::max<Eigen::Index>(a.rows(), 1));
  const double scale = std::max(1.0, a.norm());
  const double split = 2.0 * std::pow(1e3 * std::numeric_limits<double>::epsilon() * scale, 1.0 / n);
  return std::max(tol, split);
}

// Singular values <= tol * scale count as zero.
inline std::size_t numerical_nullity(const CMatrix& m, double tol, double scale) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  const double thr = tol * scale;
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) <= thr) ++k;
  return k;
}

// Pairs (lambda, k), one per Jordan block, from clustered eigenvalues and the
// nullity sequence of (a - lambda e)^j.
inline JetSpectrum jet_spectrum(const CMatrix& a, double tol) {
  const auto n = a.rows();
  if (a.cols() != n) throw DomainError("jet_spectrum: matrix must be square");
  if (n == 0) return {};
  const CVector ev = Eigen::ComplexEigenSolver<CMatrix>(a, false).eigenvalues();
  const double radius = cluster_radius(a, tol);

  // Single-linkage clustering.
  std::vector<std::size_t> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    return label[i] == i ? i : label[i] = find(label[i]);
  };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(ev(i) - ev(j)) <= radius)
        label[find(static_cast<std::size_t>(i))] = find(static_cast<std::size_t>(j));
  std::vector<std::vector<cplx>> clusters;
  std::vector<std::size_t> slot(static_cast<std::size_t>(n), SIZE_MAX);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t r = find(static_cast<std::size_t>(i));
    if (slot[r] == SIZE_MAX) {
      slot[r] = clusters.size();
      clusters.emplace_back();
    }
    clusters[slot[r]].push_back(ev(i));
  }

  std::vector<cplx> centers;
  for (const auto& c : clusters)
    centers.push_back(std::accumulate(c.begin(), c.end(), cplx{}) / static_cast<double>(c.size()));
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      if (std::abs(centers[i] - centers[j]) < 3.0 * radius)
        throw ResolutionError("jet_spectrum: eigenvalue clusters closer than the resolution (" +
                              std::to_string(3.0 * radius) +
                              "); use a smaller tol or exact input");

  JetSpectrum out;
  const CMatrix I = CMatrix::Identity(n, n);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const std::size_t m = clusters[c].size();
    const CMatrix shifted = a - centers[c] * I;
    std::vector<std::size_t> nullity{0};
    CMatrix power = I;
    // Fixed absolute scale: a threshold relative to the power breaks once the
    // power is numerically zero.
    const double scale = std::max(1.0, a.norm());
    while (nullity.back() < m) {
      if (nullity.size() > m)
        throw ResolutionError("jet_spectrum: nullity sequence did not reach the multiplicity");
      power = power * shifted;
      const std::size_t v = numerical_nullity(power, tol, scale);
      if (v < nullity.back() || v > m)
        throw ResolutionError("jet_spectrum: inconsistent rank sequence at this tol");
      nullity.push_back(v);
    }
    // blocks of size >= j is nullity[j] - nullity[j-1].
    const std::size_t jmax = nullity.size() - 1;
    for (std::size_t j = 1; j <= jmax; ++j) {
      const std::size_t ge_j = nullity[j] - nullity[j - 1];
      const std::size_t ge_next = j < jmax ? nullity[j + 1] - nullity[j] : 0;
      if (ge_next > ge_j) throw ResolutionError("jet_spectrum: non-monotone block counts");
      for (std::size_t b = 0; b < ge_j - ge_next; ++b) out.pairs.push_back({centers[c], j});
    }
  }
  if (out.total() != static_cast<std::size_t>(n))
    throw ResolutionError("jet_spectrum: block sizes do not add up to n");
  out.canonicalize();
  return out;
}

// ---------------------------------------------------------------------------
// Spectral mapping

inline constexpr std::size_t kInfiniteDegree = std::numeric_limits<std::size_t>::max();

// Order of the zero of phi(z) - phi(lambda) at lambda, searched up to max_order.
inline std::size_t zero_degree(const HoloMap& phi, cplx lambda, std::size_t max_order = 64) {
  const CVec t = taylor_at(phi, max_order, lambda);
  double scale = 0.0;
  for (const auto& v : t) scale = std::max(scale, std::abs(v));
  const double thr = 1e-12 * std::max(1.0, scale);
  for (std::size_t j = 1; j <= max_order; ++j)
    if (std::abs(t[j]) > thr) return j;
  return kInfiniteDegree;
}

inline cplx checked_image(const HoloMap& phi, cplx lambda) {
  const cplx w = phi(lambda);
  if (std::abs(w) > 1.0 + 1e-12) throw DomainError("spectral map: phi(lambda) outside the closed disk");
  return w;
}

// (phi(lambda), floor(k / deg)) exactly as the mapping rule states it.
inline JetPair spectral_map_paper(const HoloMap& phi, const JetPair& p) {
  const std::size_t d = zero_degree(phi, p.lambda, std::max<std::size_t>(64, p.k));
  return {checked_image(phi, p.lambda), d == kInfiniteDegree ? 0 : p.k / d};
}

// Jordan splitting: J_k(lambda) under phi with zero degree d becomes (k mod d)
// blocks of size ceil(k/d) and d - (k mod d) blocks of size floor(k/d).
inline JetSpectrum spectral_map_oracle(const HoloMap& phi, const JetSpectrum& s) {
  JetSpectrum out;
  for (const auto& p : s.pairs) {
    const cplx w = checked_image(phi, p.lambda);
    const std::size_t d = std::min(zero_degree(phi, p.lambda, std::max<std::size_t>(64, p.k)),
                                   p.k + 1);
    const std::size_t q = p.k / d, r = p.k % d;
    for (std::size_t i = 0; i < r; ++i) out.pairs.push_back({w, q + 1});
    if (q > 0)
      for (std::size_t i = 0; i < d - r; ++i) out.pairs.push_back({w, q});
  }
  out.canonicalize();
  return out;
}

// ---------------------------------------------------------------------------
// Jet equivalence

// With a = T J_k(lambda) T^{-1} and cyclic vector x = T e_k, the vector
// f(a) x encodes the (k-1)-jet of f at lambda. Compares the matrix action
// j_g(a)^{-1} f(m_g(a)) x on f_i(w) = (w - mu)^i, mu = m_g(lambda), with the
// prolonged scalar action computed by power-series arithmetic. Returns
// ||A_mat - A_jet|| / max(1, ||A_jet||) in the operator 2-norm.
inline double verify_jet_equivalence(const SL2Elt& g, cplx lambda, std::size_t k,
                                     const CMatrix& T = CMatrix()) {
  if (!(std::abs(lambda) < 1.0)) throw DomainError("verify_jet_equivalence: |lambda| must be < 1");
  const auto n = static_cast<Eigen::Index>(k);
  const CMatrix S = T.size() == 0 ? CMatrix::Identity(n, n) : T;
  const CMatrix Sinv = S.partialPivLu().inverse();
  const CMatrix a = S * jordan_block(lambda, k) * Sinv;
  const CVector x = S.col(n - 1);

  const HoloMap m_g{{g.beta(), g.alpha()}, {std::conj(g.alpha()), std::conj(g.beta())}};
  const cplx mu = m_g(lambda);
  const CMatrix ma = mobius_matrix(g.inverse(), a);
  const CMatrix jinv = detail::checked_inverse(mobius_factor(g, a), "verify_jet_equivalence");
  const CMatrix I = CMatrix::Identity(n, n);

  // Matrix side.
  CMatrix A_mat(n, n);
  CMatrix fi = I;  // (m_g(a) - mu)^i
  for (Eigen::Index i = 0; i < n; ++i) {
    const CVector v = Sinv * (jinv * (fi * x));
    double fact = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j > 0) fact *= static_cast<double>(j);
      A_mat(j, i) = fact * v(n - 1 - j);
    }
    fi = fi * (ma - mu * I);
  }

  // Jet side: Taylor series at lambda of (m_g - mu)^i / j_g.
  CVec mt = taylor_at(m_g, k, lambda);
  mt[0] -= mu;
  const CVec jt = detail::shift_poly({std::conj(g.alpha()), std::conj(g.beta())}, lambda);
  CMatrix A_jet(n, n);
  CVec power{cplx(1.0)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const CVec s = detail::series_div(power, jt, k - 1);
    double fact = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j > 0) fact *= static_cast<double>(j);
      A_jet(j, i) = fact * s[static_cast<std::size_t>(j)];
    }
    power = detail::series_mul(power, mt, k - 1);
  }

  const auto opnorm = [](const CMatrix& m) {
    return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
  };
  return opnorm(A_mat - A_jet) / std::max(1.0, opnorm(A_jet));
}

}  // namespace cohspec

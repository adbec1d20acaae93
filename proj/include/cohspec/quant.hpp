#pragma once

// Weyl quantization of polynomial (optionally Gaussian-windowed) phase-space
// symbols on a line grid, the metaplectic generators, symplectic covariance
// and the Dirac-rule defect.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cohspec/errors.hpp"
#include "cohspec/funcalc.hpp"
#include "cohspec/grid.hpp"
#include "cohspec/groups.hpp"
#include "cohspec/wavelets.hpp"

namespace cohspec {

// ---------------------------------------------------------------------------
// Symplectic group

struct SympElt {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  SympElt() = default;
  SympElt(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
    if (std::abs(a * d - b * c - 1.0) > 1e-12) throw DomainError("SympElt: ad - bc must be 1");
  }

  static SympElt rotation(double theta) {
    const double co = std::cos(theta), si = std::sin(theta);
    return {co, -si, si, co};
  }
  static SympElt scaling(double t) {
    if (!(t > 0.0)) throw DomainError("SympElt::scaling: t must be positive");
    return {t, 0.0, 0.0, 1.0 / t};
  }
  static SympElt shear(double c) { return {1.0, 0.0, c, 1.0}; }

  SympElt inverse() const { return {d, -b, -c, a}; }
};

inline std::pair<double, double> symplecto_act(const SympElt& g, std::pair<double, double> pq) {
  return {g.a * pq.first + g.b * pq.second, g.c * pq.first + g.d * pq.second};
}

inline HeisPoint heis_auto(const SympElt& g, const HeisPoint& h) {
  return {h.s, g.a * h.x + g.b * h.y, g.c * h.x + g.d * h.y};
}

enum class MetaFamily { rotation, scaling, shear };

struct MetaGenerator {
  MetaFamily family;
  double param;  // theta, t or c
};

// Recognizes the three one-parameter families; anything else needs a
// caller-side decomposition.
inline MetaGenerator classify_generator(const SympElt& g) {
  constexpr double tol = 1e-12;
  if (std::abs(g.a - g.d) <= tol && std::abs(g.b + g.c) <= tol)
    return {MetaFamily::rotation, std::atan2(g.c, g.a)};
  if (std::abs(g.b) <= tol && std::abs(g.c) <= tol && g.a > 0.0)
    return {MetaFamily::scaling, g.a};
  if (std::abs(g.a - 1.0) <= tol && std::abs(g.d - 1.0) <= tol && std::abs(g.b) <= tol)
    return {MetaFamily::shear, g.c};
  throw UnsupportedError(
      "metaplectic: element is not a rotation, scaling or lower shear; decompose it first");
}

// ---------------------------------------------------------------------------
// Phase-space symbols

// exp(-(A p^2 + 2 B pq + C q^2) / 2) with a positive definite form.
struct GaussWindow {
  double A = 1.0, B = 0.0, C = 1.0;

  static GaussWindow isotropic(double width) {
    const double w = 1.0 / (width * width);
    return {w, 0.0, w};
  }
  double operator()(double p, double q) const {
    return std::exp(-0.5 * (A * p * p + 2.0 * B * p * q + C * q * q));
  }
};

// sum c_{mn} p^m q^n, optionally times a Gaussian window.
struct PhaseSymbol {
  using Key = std::pair<unsigned, unsigned>;  // (power of p, power of q)
  std::map<Key, cplx> terms;
  std::optional<GaussWindow> window;
  unsigned degree_cap = 6;

  static PhaseSymbol monomial(unsigned m, unsigned n, cplx c = 1.0) {
    PhaseSymbol s;
    s.add(m, n, c);
    return s;
  }
  static PhaseSymbol p() { return monomial(1, 0); }
  static PhaseSymbol q() { return monomial(0, 1); }
  static PhaseSymbol constant(cplx c) { return monomial(0, 0, c); }

  void add(unsigned m, unsigned n, cplx c) {
    if (m + n > degree_cap)
      throw DomainError("PhaseSymbol: degree " + std::to_string(m + n) + " exceeds the cap " +
                        std::to_string(degree_cap));
    if (c == cplx{}) return;
    terms[{m, n}] += c;
  }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [k, c] : terms) d = std::max(d, k.first + k.second);
    return d;
  }

  PhaseSymbol windowed(const GaussWindow& w) const {
    PhaseSymbol out = *this;
    out.window = w;
    return out;
  }

  cplx operator()(double pv, double qv) const {
    cplx acc{};
    for (const auto& [k, c] : terms) acc += c * std::pow(pv, k.first) * std::pow(qv, k.second);
    return window ? acc * (*window)(pv, qv) : acc;
  }

  PhaseSymbol operator+(const PhaseSymbol& o) const {
    require_same_window(o);
    PhaseSymbol out = *this;
    out.degree_cap = std::max(degree_cap, o.degree_cap);
    for (const auto& [k, c] : o.terms) out.add(k.first, k.second, c);
    return out;
  }
  PhaseSymbol operator-(const PhaseSymbol& o) const { return *this + (-1.0) * o; }
  friend PhaseSymbol operator*(cplx s, PhaseSymbol f) {
    for (auto& [k, c] : f.terms) c *= s;
    return f;
  }

  PhaseSymbol operator*(const PhaseSymbol& o) const {
    PhaseSymbol out;
    out.degree_cap = std::max(degree_cap, o.degree_cap);
    for (const auto& [k1, c1] : terms)
      for (const auto& [k2, c2] : o.terms) out.add(k1.first + k2.first, k1.second + k2.second, c1 * c2);
    if (window && o.window)
      out.window = GaussWindow{window->A + o.window->A, window->B + o.window->B,
                               window->C + o.window->C};
    else if (window || o.window)
      out.window = window ? window : o.window;
    return out;
  }

  // f(a p + b q, c p + d q)
  PhaseSymbol compose_linear(const SympElt& g) const {
    PhaseSymbol out;
    out.degree_cap = degree_cap;
    auto binom = [](unsigned n, unsigned k) {
      double r = 1.0;
      for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
      return r;
    };
    for (const auto& [k, coef] : terms) {
      const auto [m, n] = k;
      // (a p + b q)^m (c p + d q)^n
      for (unsigned i = 0; i <= m; ++i)
        for (unsigned j = 0; j <= n; ++j) {
          const double w = binom(m, i) * binom(n, j) * std::pow(g.a, i) * std::pow(g.b, m - i) *
                           std::pow(g.c, j) * std::pow(g.d, n - j);
          out.add(i + j, (m - i) + (n - j), coef * w);
        }
    }
    if (window) {
      // M^T S M with S = [[A, B], [B, C]], M = [[a, b], [c, d]].
      const GaussWindow& w = *window;
      const double A = g.a * (w.A * g.a + w.B * g.c) + g.c * (w.B * g.a + w.C * g.c);
      const double B = g.a * (w.A * g.b + w.B * g.d) + g.c * (w.B * g.b + w.C * g.d);
      const double C = g.b * (w.A * g.b + w.B * g.d) + g.d * (w.B * g.b + w.C * g.d);
      out.window = GaussWindow{A, B, C};
    }
    return out;
  }

  PhaseSymbol derivative_p() const { return derivative(true); }
  PhaseSymbol derivative_q() const { return derivative(false); }

 private:
  void require_same_window(const PhaseSymbol& o) const {
    const bool same = (!window && !o.window) ||
                      (window && o.window && window->A == o.window->A &&
                       window->B == o.window->B && window->C == o.window->C);
    if (!same) throw PreconditionError("PhaseSymbol: sums need identical windows");
  }

  PhaseSymbol derivative(bool in_p) const {
    if (window) throw PreconditionError("PhaseSymbol: symbolic derivative of a windowed symbol");
    PhaseSymbol out;
    out.degree_cap = degree_cap;
    for (const auto& [k, c] : terms) {
      const unsigned e = in_p ? k.first : k.second;
      if (e == 0) continue;
      if (in_p)
        out.add(k.first - 1, k.second, c * static_cast<double>(e));
      else
        out.add(k.first, k.second - 1, c * static_cast<double>(e));
    }
    return out;
  }
};

// {f, g} = f_q g_p - f_p g_q, so that {p, q} = -1 matches (1/i hbar)[P, Q].
inline PhaseSymbol poisson(const PhaseSymbol& f, const PhaseSymbol& g) {
  return f.derivative_q() * g.derivative_p() - f.derivative_p() * g.derivative_q();
}

// ---------------------------------------------------------------------------
// Line grids and operators

struct LineGrid {
  std::size_t n = 256;
  double x0 = 0.0;
  double h = 1.0;

  // Equal position and momentum reach: x in [-L, L), |p| < pi hbar / h = L.
  static LineGrid balanced(std::size_t n, double hbar) {
    const double h = std::sqrt(2.0 * std::numbers::pi * hbar / static_cast<double>(n));
    return {n, -0.5 * h * static_cast<double>(n), h};
  }
  static LineGrid of(const GridFn& f) { return {f.n(), f.x0, f.h}; }

  double x(std::size_t j) const { return x0 + h * static_cast<double>(j); }
  std::vector<double> points() const {
    std::vector<double> xs(n);
    for (std::size_t j = 0; j < n; ++j) xs[j] = x(j);
    return xs;
  }
};

struct LineOperator {
  CMatrix mat;
  LineGrid grid;
  double hbar = 1.0;

  GridFn apply(const GridFn& f) const {
    if (f.n() != grid.n) throw DomainError("LineOperator: grid size mismatch");
    const CVector v = Eigen::Map<const CVector>(f.samples.data(), static_cast<Eigen::Index>(f.n()));
    const CVector w = mat * v;
    return GridFn(CVec(w.data(), w.data() + w.size()), f.x0, f.h);
  }
};

namespace detail {

inline void require_hbar(double hbar) {
  if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
}

// Spectral momentum -i hbar d/dx with the Nyquist mode removed.
inline CMatrix momentum_matrix(const LineGrid& g, double hbar) {
  const auto n = static_cast<Eigen::Index>(g.n);
  CMatrix P(n, n);
  const double dk = 2.0 * std::numbers::pi / (g.h * static_cast<double>(g.n));
  for (Eigen::Index col = 0; col < n; ++col) {
    CVec e(g.n);
    e[static_cast<std::size_t>(col)] = 1.0;
    CVec s = fft_forward(e);
    for (std::size_t k = 0; k < g.n; ++k) {
      const long f = signed_freq(k, g.n);
      s[k] *= (2 * static_cast<std::size_t>(std::abs(f)) == g.n) ? 0.0 : hbar * dk * static_cast<double>(f);
    }
    const CVec c = fft_inverse(s);
    for (Eigen::Index row = 0; row < n; ++row) P(row, col) = c[static_cast<std::size_t>(row)];
  }
  return P;
}

inline CMatrix position_matrix(const LineGrid& g) {
  CMatrix Q = CMatrix::Zero(static_cast<Eigen::Index>(g.n), static_cast<Eigen::Index>(g.n));
  for (std::size_t j = 0; j < g.n; ++j) Q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = g.x(j);
  return Q;
}

// Sum over all words in m copies of P and n copies of Q, built by the
// recursion S(m, n) = P S(m-1, n) + Q S(m, n-1).
class WordSums {
 public:
  WordSums(const CMatrix& P, const CMatrix& Q) : P_(P), Q_(Q) {}

  const CMatrix& get(unsigned m, unsigned n) {
    const auto key = std::make_pair(m, n);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const auto dim = P_.rows();
    CMatrix r;
    if (m == 0 && n == 0) {
      r = CMatrix::Identity(dim, dim);
    } else {
      r = CMatrix::Zero(dim, dim);
      if (m > 0) r.noalias() += P_ * get(m - 1, n);
      if (n > 0) {
        if (m == 0)
          r = Q_.diagonal().asDiagonal() * get(0, n - 1);
        else
          r.noalias() += Q_.diagonal().asDiagonal() * get(m, n - 1);
      }
    }
    return cache_.emplace(key, std::move(r)).first->second;
  }

 private:
  CMatrix P_, Q_;
  std::map<std::pair<unsigned, unsigned>, CMatrix> cache_;
};

inline double binomial(unsigned n, unsigned k) {
  double r = 1.0;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Kernel route for windowed symbols:
// A_jk = h/(2 pi hbar) \int a(p, (x_j + x_k)/2) e^{i p (x_j - x_k)/hbar} dp,
// with the p-integral on 2n points spanning the grid's momentum range.
inline CMatrix weyl_kernel(const PhaseSymbol& sym, double hbar, const LineGrid& g) {
  const std::size_t n = g.n, m2 = 2 * n;
  const double dp = std::numbers::pi * hbar / (static_cast<double>(n) * g.h);
  CMatrix A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  CVec col(m2);
  for (std::size_t m = 0; m + 1 < m2; ++m) {
    const double qm = g.x0 + 0.5 * g.h * static_cast<double>(m);
    for (std::size_t l = 0; l < m2; ++l)
      col[l] = sym((static_cast<double>(l) - static_cast<double>(n)) * dp, qm);
    const CVec kern = fft_inverse(col);
    // Pairs (j, k) with j + k = m.
    const std::size_t jlo = m >= n ? m - (n - 1) : 0;
    const std::size_t jhi = std::min(m, n - 1);
    for (std::size_t j = jlo; j <= jhi; ++j) {
      const std::size_t k = m - j;
      const long d = static_cast<long>(j) - static_cast<long>(k);
      const std::size_t idx = static_cast<std::size_t>((d + static_cast<long>(m2)) % static_cast<long>(m2));
      A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = (d % 2 == 0 ? 1.0 : -1.0) * kern[idx];
    }
  }
  return A;
}

}  // namespace detail

// Q = multiplication by x, P = -i hbar (spectral derivative); p^m q^n maps to
// the average over all orderings of m P's and n Q's. Windowed symbols use the
// Weyl kernel directly.
inline LineOperator weyl_quantize(const PhaseSymbol& sym, double hbar, const LineGrid& grid) {
  detail::require_hbar(hbar);
  if (sym.window) return {detail::weyl_kernel(sym, hbar, grid), grid, hbar};
  const CMatrix P = detail::momentum_matrix(grid, hbar);
  const CMatrix Q = detail::position_matrix(grid);
  detail::WordSums words(P, Q);
  const auto n = static_cast<Eigen::Index>(grid.n);
  CMatrix out = CMatrix::Zero(n, n);
  for (const auto& [k, c] : sym.terms) {
    const CMatrix& S = words.get(k.first, k.second);
    // The word sum equals its own adjoint (reversal permutes the words).
    const CMatrix H = (0.5 / detail::binomial(k.first + k.second, k.first)) * (S + S.adjoint());
    out += c * H;
  }
  return {out, grid, hbar};
}

// Orthonormal oscillator eigenstates psi_0..psi_{K-1} at scale sqrt(hbar),
// sampled and scaled by sqrt(h) so the columns are orthonormal in C^n.
inline CMatrix oscillator_states(std::size_t K, double hbar, const LineGrid& g) {
  std::vector<double> xs = g.points();
  for (auto& x : xs) x /= std::sqrt(hbar);
  const auto psi = hermite_functions(K, xs);
  CMatrix V(static_cast<Eigen::Index>(g.n), static_cast<Eigen::Index>(K));
  const double scale = std::sqrt(g.h) * std::pow(hbar, -0.25);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j < g.n; ++j)
      V(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = scale * psi[k][j];
  return V;
}

inline double operator_norm(const CMatrix& A) {
  if (A.size() == 0) return 0.0;
  const CMatrix G = A.adjoint() * A;
  const double top = Eigen::SelfAdjointEigenSolver<CMatrix>(G, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  return std::sqrt(std::max(top, 0.0));
}

// Operator norm of A, or of V^* A V on the first `states` oscillator states
// when states > 0.
inline double compressed_norm(const LineOperator& A, std::size_t states) {
  if (states == 0) return operator_norm(A.mat);
  const CMatrix V = oscillator_states(states, A.hbar, A.grid);
  return operator_norm(V.adjoint() * A.mat * V);
}

// ---------------------------------------------------------------------------
// Metaplectic operators

namespace detail {

// exp(-i (alpha P^2 + beta Q^2 + gamma (PQ + QP)/2) / hbar).
inline CMatrix quadratic_unitary(double alpha, double beta, double gamma, double hbar,
                                 const LineGrid& g) {
  const CMatrix P = momentum_matrix(g, hbar);
  const CMatrix Q = position_matrix(g);
  const auto n = static_cast<Eigen::Index>(g.n);
  if (gamma == 0.0 && alpha == 0.0) {
    CMatrix U = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) U(j, j) = std::polar(1.0, -beta * std::norm(Q(j, j)) / hbar);
    return U;
  }
  CMatrix H = alpha * (P * P) + beta * (Q * Q) + (0.5 * gamma) * (P * Q + Q * P);
  H = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  CVector phase(n);
  for (Eigen::Index j = 0; j < n; ++j) phase(j) = std::polar(1.0, -es.eigenvalues()(j) / hbar);
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// U(g) with U sigma_hbar(s, x, y) U^{-1} = sigma_hbar(s, a x + b y, c x + d y):
// rotation exp(-i theta (P^2/hbar + hbar Q^2)/(2 hbar)), scaling
// exp(-i log(t) (PQ + QP)/(2 hbar)), shear exp(-i c Q^2 / 2).
inline LineOperator metaplectic_op(const SympElt& g, double hbar, const LineGrid& grid) {
  detail::require_hbar(hbar);
  const MetaGenerator gen = classify_generator(g);
  double alpha = 0, beta = 0, gamma = 0;
  switch (gen.family) {
    case MetaFamily::rotation:
      alpha = gen.param / (2.0 * hbar);
      beta = 0.5 * gen.param * hbar;
      break;
    case MetaFamily::scaling:
      gamma = std::log(gen.param);
      break;
    case MetaFamily::shear:
      beta = 0.5 * gen.param * hbar;
      break;
  }
  return {detail::quadratic_unitary(alpha, beta, gamma, hbar, grid), grid, hbar};
}

// The unitary with U W(f) U^{-1} = W(f o tau(g)^{-1}) for g acting on (p, q).
inline LineOperator symbol_metaplectic_op(const SympElt& g, double hbar, const LineGrid& grid) {
  detail::require_hbar(hbar);
  const MetaGenerator gen = classify_generator(g);
  double alpha = 0, beta = 0, gamma = 0;
  switch (gen.family) {
    case MetaFamily::rotation:
      alpha = beta = 0.5 * gen.param;
      break;
    case MetaFamily::scaling:
      gamma = -std::log(gen.param);
      break;
    case MetaFamily::shear:
      alpha = 0.5 * gen.param;
      break;
  }
  return {detail::quadratic_unitary(alpha, beta, gamma, hbar, grid), grid, hbar};
}

// Schrodinger operator sigma_hbar(s, x, y) as a matrix on the grid.
inline CMatrix schrodinger_matrix(const HeisPoint& h, double hbar, const LineGrid& g) {
  const auto n = static_cast<Eigen::Index>(g.n);
  CMatrix M(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    CVec e(g.n);
    e[static_cast<std::size_t>(col)] = 1.0;
    const GridFn out = schrodinger_act(h, GridFn(e, g.x0, g.h), hbar);
    for (Eigen::Index row = 0; row < n; ++row) M(row, col) = out.samples[static_cast<std::size_t>(row)];
  }
  return M;
}

// ||W(sym o tau(g)^{-1}) - U W(sym) U^{-1}|| / ||W(sym)||, norms compressed to
// `states` oscillator states (0: whole grid).
inline double covariance_defect(const SympElt& g, const PhaseSymbol& sym, double hbar,
                                const LineGrid& grid, std::size_t states = 0) {
  const LineOperator U = symbol_metaplectic_op(g, hbar, grid);
  const LineOperator W = weyl_quantize(sym, hbar, grid);
  const LineOperator Wg = weyl_quantize(sym.compose_linear(g.inverse()), hbar, grid);
  const LineOperator diff{Wg.mat - U.mat * W.mat * U.mat.adjoint(), grid, hbar};
  const double base = compressed_norm(W, states);
  return compressed_norm(diff, states) / (base > 0.0 ? base : 1.0);
}

struct DiracDefect {
  double product = 0.0;
  double bracket = 0.0;
};

// Relative defects of the two Dirac rules, W(f1 f2) = (W1 W2 + W2 W1)/2 and
// W({f1, f2}) = (1/i hbar)[W1, W2]. Norms are taken on the first `states`
// oscillator states: on the whole grid they are dominated by the grid cutoff.
inline DiracDefect dirac_rule_defect(const PhaseSymbol& f1, const PhaseSymbol& f2, double hbar,
                                     const LineGrid& grid, std::size_t states = 4) {
  if (f1.window || f2.window)
    throw PreconditionError("dirac_rule_defect: Poisson brackets are symbolic; polynomials only");
  const CMatrix W1 = weyl_quantize(f1, hbar, grid).mat;
  const CMatrix W2 = weyl_quantize(f2, hbar, grid).mat;
  const LineOperator Wprod = weyl_quantize(f1 * f2, hbar, grid);
  const LineOperator Wbr = weyl_quantize(poisson(f1, f2), hbar, grid);
  const cplx inv_ih = 1.0 / cplx(0.0, hbar);
  const LineOperator dprod{Wprod.mat - 0.5 * (W1 * W2 + W2 * W1), grid, hbar};
  const LineOperator dbr{Wbr.mat - inv_ih * (W1 * W2 - W2 * W1), grid, hbar};
  auto rel = [&](const LineOperator& d, const LineOperator& ref) {
    const double r = compressed_norm(ref, states);
    return compressed_norm(d, states) / (r > 0.0 ? r : 1.0);
  };
  return {rel(dprod, Wprod), rel(dbr, Wbr)};
}

}  // namespace cohspec

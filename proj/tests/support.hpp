#pragma once

// Shared random generators for the test and acceptance binaries.

#include <cmath>
#include <complex>
#include <map>
#include <tuple>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cohspec/funcalc.hpp"
#include "cohspec/groups.hpp"

namespace testsupport {

using cohspec::CMatrix;
using cohspec::cplx;

class Rng {
 public:
  explicit Rng(unsigned long long seed) : eng_(seed) {}

  double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng_); }
  double normal() { return std::normal_distribution<double>()(eng_); }
  cplx cnormal() { return {normal(), normal()}; }
  cplx disk(double r) { return std::polar(r * std::sqrt(uni(0, 1)), uni(-std::numbers::pi, std::numbers::pi)); }

  cohspec::SL2Elt sl2(double max_abs_a = 0.6) {
    return cohspec::sl2_section(disk(max_abs_a)) * cohspec::SL2Elt::rotation(uni(-std::numbers::pi, std::numbers::pi));
  }

  CMatrix unitary(Eigen::Index n) {
    CMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = cnormal();
    Eigen::HouseholderQR<CMatrix> qr(g);
    return qr.householderQ() * CMatrix::Identity(n, n);
  }

  // U diag(s) V^* with singular values log-spaced in [1, cond].
  CMatrix conditioned(Eigen::Index n, double cond) {
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i)
      s(i) = n == 1 ? 1.0 : std::pow(cond, static_cast<double>(i) / static_cast<double>(n - 1));
    return unitary(n) * s.cast<cplx>().asDiagonal() * unitary(n).adjoint();
  }

  // Eigenvalues in |z| <= rmax, pairwise at least sep apart.
  std::vector<cplx> separated_points(std::size_t m, double rmax, double sep) {
    std::vector<cplx> pts;
    while (pts.size() < m) {
      const cplx z = disk(rmax);
      bool ok = true;
      for (const auto& p : pts) ok = ok && std::abs(p - z) >= sep;
      if (ok) pts.push_back(z);
    }
    return pts;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Block sizes summing to n, each in [1, kmax].
inline std::vector<std::size_t> random_partition(Rng& r, std::size_t n, int kmax) {
  std::vector<std::size_t> parts;
  std::size_t left = n;
  while (left > 0) {
    const auto k = static_cast<std::size_t>(r.integer(1, std::min<int>(kmax, static_cast<int>(left))));
    parts.push_back(k);
    left -= k;
  }
  return parts;
}

// Weyl algebra with [Q, P] = i hbar, elements as sums c hbar^k Q^a P^b in
// normal order. Symbolic in hbar.
class WeylAlgebra {
 public:
  using Key = std::tuple<unsigned, unsigned, unsigned>;  // (a, b, k)
  std::map<Key, cplx> terms;

  static WeylAlgebra Q() { return mono(1, 0); }
  static WeylAlgebra P() { return mono(0, 1); }
  static WeylAlgebra one() { return mono(0, 0); }
  static WeylAlgebra mono(unsigned a, unsigned b, cplx c = 1.0, unsigned k = 0) {
    WeylAlgebra w;
    w.terms[{a, b, k}] = c;
    return w;
  }

  WeylAlgebra operator+(const WeylAlgebra& o) const {
    WeylAlgebra r = *this;
    for (const auto& [key, c] : o.terms) r.terms[key] += c;
    r.prune();
    return r;
  }
  WeylAlgebra operator*(cplx s) const {
    WeylAlgebra r = *this;
    for (auto& [key, c] : r.terms) c *= s;
    return r;
  }
  WeylAlgebra operator-(const WeylAlgebra& o) const { return *this + o * cplx(-1.0); }

  // P^b Q^c = sum_j j! C(b,j) C(c,j) (-i hbar)^j Q^{c-j} P^{b-j}.
  WeylAlgebra operator*(const WeylAlgebra& o) const {
    WeylAlgebra r;
    for (const auto& [k1, c1] : terms)
      for (const auto& [k2, c2] : o.terms) {
        const auto [a, b, h1] = k1;
        const auto [c, d, h2] = k2;
        for (unsigned j = 0; j <= std::min(b, c); ++j) {
          const double w = fact(j) * choose(b, j) * choose(c, j);
          const cplx coef = c1 * c2 * w * std::pow(cplx(0.0, -1.0), static_cast<int>(j));
          r.terms[{a + c - j, b - j + d, h1 + h2 + j}] += coef;
        }
      }
    r.prune();
    return r;
  }

  // Average over the orderings of m P's and n Q's.
  static WeylAlgebra weyl(unsigned m, unsigned n) {
    std::map<std::pair<unsigned, unsigned>, WeylAlgebra> s;
    s[{0, 0}] = one();
    for (unsigned i = 0; i <= m; ++i)
      for (unsigned j = 0; j <= n; ++j) {
        if (i == 0 && j == 0) continue;
        WeylAlgebra acc;
        if (i > 0) acc = acc + P() * s[{i - 1, j}];
        if (j > 0) acc = acc + Q() * s[{i, j - 1}];
        s[{i, j}] = acc;
      }
    return s[{m, n}] * cplx(1.0 / choose(m + n, m));
  }

  // Value at a numeric hbar, as coefficients of Q^a P^b.
  std::map<std::pair<unsigned, unsigned>, cplx> at(double hbar) const {
    std::map<std::pair<unsigned, unsigned>, cplx> out;
    for (const auto& [key, c] : terms) {
      const auto [a, b, k] = key;
      out[{a, b}] += c * std::pow(hbar, static_cast<int>(k));
    }
    for (auto it = out.begin(); it != out.end();)
      it = std::abs(it->second) < 1e-13 ? out.erase(it) : std::next(it);
    return out;
  }

  void prune() {
    for (auto it = terms.begin(); it != terms.end();)
      it = std::abs(it->second) < 1e-13 ? terms.erase(it) : std::next(it);
  }

  static double fact(unsigned n) { return n <= 1 ? 1.0 : n * fact(n - 1); }
  static double choose(unsigned n, unsigned k) { return fact(n) / (fact(k) * fact(n - k)); }
};

// Truncated ladder-operator matrices on the Fock basis, Q = sqrt(hbar/2)(a + a^+),
// P = i sqrt(hbar/2)(a^+ - a). Word sums built here are exact on the top-left
// block of size dim - degree.
struct FockWeyl {
  CMatrix Q, P;

  FockWeyl(Eigen::Index dim, double hbar) : Q(CMatrix::Zero(dim, dim)), P(CMatrix::Zero(dim, dim)) {
    const double s = std::sqrt(hbar / 2.0);
    for (Eigen::Index n = 0; n + 1 < dim; ++n) {
      const double r = std::sqrt(static_cast<double>(n + 1));
      Q(n, n + 1) = Q(n + 1, n) = s * r;
      P(n + 1, n) = cplx(0.0, s * r);
      P(n, n + 1) = cplx(0.0, -s * r);
    }
  }

  CMatrix weyl(unsigned m, unsigned n) const {
    if (m == 0 && n == 0) return CMatrix::Identity(Q.rows(), Q.cols());
    CMatrix acc = CMatrix::Zero(Q.rows(), Q.cols());
    if (m > 0) acc += P * weyl(m - 1, n) * (static_cast<double>(m) / (m + n));
    if (n > 0) acc += Q * weyl(m, n - 1) * (static_cast<double>(n) / (m + n));
    return acc;
  }
};

}  // namespace testsupport

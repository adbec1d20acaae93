#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cohspec/quant.hpp"
#include "support.hpp"

using namespace cohspec;
using testsupport::FockWeyl;
using testsupport::Rng;
using testsupport::WeylAlgebra;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

double quant_oracle_norm(const CMatrix& m) { return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0); }

// Spectral momentum built from the explicit DFT sum rather than the FFT.
CMatrix dft_momentum(const LineGrid& g, double hbar) {
  const auto n = static_cast<Eigen::Index>(g.n);
  CMatrix P = CMatrix::Zero(n, n);
  const double L = g.h * static_cast<double>(g.n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      for (long f = -static_cast<long>(g.n) / 2 + 1; f < static_cast<long>(g.n) / 2; ++f) {
        const double kf = 2.0 * kPi * static_cast<double>(f) / L;
        P(j, k) += hbar * kf * std::polar(1.0, kf * g.h * static_cast<double>(j - k)) /
                   static_cast<double>(g.n);
      }
  return P;
}

PhaseSymbol random_real_symbol(Rng& rng, unsigned deg) {
  PhaseSymbol s;
  for (unsigned m = 0; m <= deg; ++m)
    for (unsigned n = 0; m + n <= deg; ++n) s.add(m, n, rng.normal());
  return s;
}

}  // namespace

TEST(Symplecto, Examples) {
  Rng rng(1);
  const auto id = symplecto_act(SympElt(), {0.3, -0.7});
  EXPECT_EQ(id.first, 0.3);
  EXPECT_EQ(id.second, -0.7);
  for (int t = 0; t < 20; ++t) {
    const SympElt r = SympElt::rotation(rng.uni(-kPi, kPi));
    const double p = rng.normal(), q = rng.normal();
    const auto [p2, q2] = symplecto_act(r, {p, q});
    EXPECT_NEAR(p2 * p2 + q2 * q2, p * p + q * q, 1e-12);
  }
  for (int t = 0; t < 20; ++t) {
    const double a = rng.uni(0.5, 2), b = rng.normal(), c = rng.normal();
    const SympElt g(a, b, c, (1.0 + b * c) / a);
    const double p1 = rng.normal(), q1 = rng.normal(), p2 = rng.normal(), q2 = rng.normal();
    const auto [P1, Q1] = symplecto_act(g, {p1, q1});
    const auto [P2, Q2] = symplecto_act(g, {p2, q2});
    EXPECT_NEAR(P1 * Q2 - P2 * Q1, p1 * q2 - p2 * q1, 1e-12);
  }
  EXPECT_THROW(SympElt(1, 1, 1, 1), DomainError);
}

TEST(HeisAuto, AutomorphismProperty) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const double a = rng.uni(0.5, 2), b = rng.normal(), c = rng.normal();
    const SympElt g(a, b, c, (1.0 + b * c) / a);
    const HeisPoint h1{rng.normal(), rng.normal(), rng.normal()};
    const HeisPoint h2{rng.normal(), rng.normal(), rng.normal()};
    EXPECT_EQ(heis_auto(g, h1).s, h1.s);
    const HeisPoint lhs = heis_auto(g, heis_mul(h1, h2));
    const HeisPoint rhs = heis_mul(heis_auto(g, h1), heis_auto(g, h2));
    EXPECT_NEAR(lhs.s, rhs.s, 1e-12);
    EXPECT_NEAR(lhs.x, rhs.x, 1e-12);
    EXPECT_NEAR(lhs.y, rhs.y, 1e-12);
  }
  const HeisPoint h{0.1, 0.2, 0.3};
  EXPECT_EQ(heis_auto(SympElt(), h).x, h.x);
}

TEST(PhaseSymbol, AlgebraAndPoisson) {
  const PhaseSymbol p = PhaseSymbol::p(), q = PhaseSymbol::q();
  const PhaseSymbol pq = poisson(p, q);
  EXPECT_EQ(pq.terms.size(), 1u);
  EXPECT_EQ(pq.terms.at({0, 0}), cplx(-1.0));
  const PhaseSymbol b = poisson(PhaseSymbol::monomial(3, 0), PhaseSymbol::monomial(0, 3));
  EXPECT_EQ(b.terms.at({2, 2}), cplx(-9.0));
  EXPECT_THROW(PhaseSymbol::monomial(4, 3), DomainError);
  // f o g then evaluate equals evaluate at g(p, q).
  const SympElt g(2.0, 0.5, 1.0, 0.75);
  const PhaseSymbol f = (p * p * q + 3.0 * q).windowed(GaussWindow{1.0, 0.2, 0.5});
  const auto [gp, gq] = symplecto_act(g, {0.3, -0.4});
  EXPECT_NEAR(std::abs(f.compose_linear(g)(0.3, -0.4) - f(gp, gq)), 0.0, 1e-14);
}

TEST(Weyl, LinearAndMixedSymbols) {
  const double hbar = 0.7;
  const LineGrid g = LineGrid::balanced(64, hbar);
  const CMatrix Q = weyl_quantize(PhaseSymbol::q(), hbar, g).mat;
  for (std::size_t j = 0; j < g.n; ++j) {
    const auto J = static_cast<Eigen::Index>(j);
    EXPECT_NEAR(std::abs(Q(J, J) - g.x(j)), 0.0, 1e-15);
  }
  EXPECT_NEAR(max_abs(Q) , std::abs(g.x(0)), 1e-15);
  const CMatrix P = dft_momentum(g, hbar);
  EXPECT_LE(max_abs(weyl_quantize(PhaseSymbol::p(), hbar, g).mat - P), 1e-12);
  const CMatrix pq = weyl_quantize(PhaseSymbol::monomial(1, 1), hbar, g).mat;
  EXPECT_LE(max_abs(pq - 0.5 * (P * Q + Q * P)), 1e-11);
}

TEST(Weyl, SelfAdjointForRealSymbols) {
  Rng rng(3);
  const double hbar = 1.0;
  const LineGrid g = LineGrid::balanced(128, hbar);
  for (int t = 0; t < 5; ++t) {
    const CMatrix A = weyl_quantize(random_real_symbol(rng, 6), hbar, g).mat;
    EXPECT_LE(max_abs(A - A.adjoint()), 1e-10);
  }
  const PhaseSymbol w = random_real_symbol(rng, 3).windowed(GaussWindow::isotropic(1.5));
  const CMatrix B = weyl_quantize(w, hbar, g).mat;
  EXPECT_LE(max_abs(B - B.adjoint()), 1e-10);
}

TEST(Weyl, OscillatorSpectrum) {
  for (double hbar : {1.0, 0.25}) {
    const LineGrid g = LineGrid::balanced(256, hbar);
    const PhaseSymbol H = PhaseSymbol::monomial(2, 0) + PhaseSymbol::monomial(0, 2);
    const CMatrix A = weyl_quantize(H, hbar, g).mat;
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<CMatrix>(A, Eigen::EigenvaluesOnly).eigenvalues();
    for (int n = 0; n <= 5; ++n) EXPECT_NEAR(ev(n), hbar * (2 * n + 1), 1e-6) << "hbar=" << hbar;
  }
}

// Mehler: the symbol exp(-lambda (p^2 + q^2)/hbar) quantizes to cosh(b/2) e^{-b H/hbar}
// with H = (P^2 + Q^2)/2 and tanh(b/2) = lambda.
TEST(Weyl, GaussianSymbolMehler) {
  const double hbar = 0.5, lambda = 0.4;
  const LineGrid g = LineGrid::balanced(256, hbar);
  const PhaseSymbol s = PhaseSymbol::constant(1.0).windowed({2 * lambda / hbar, 0.0, 2 * lambda / hbar});
  const CMatrix A = weyl_quantize(s, hbar, g).mat;
  Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<CMatrix>(A, Eigen::EigenvaluesOnly).eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
  const double b = 2.0 * std::atanh(lambda);
  for (int n = 0; n < 8; ++n) EXPECT_NEAR(ev(n), std::cosh(b / 2) * std::exp(-b * (n + 0.5)), 1e-10);
}

TEST(Metaplectic, IdentityAndUnitarity) {
  const double hbar = 1.0;
  const LineGrid g = LineGrid::balanced(128, hbar);
  const auto n = static_cast<Eigen::Index>(g.n);
  EXPECT_LE(max_abs(metaplectic_op(SympElt(), hbar, g).mat - CMatrix::Identity(n, n)), 1e-12);
  const CMatrix U = metaplectic_op(SympElt::scaling(2.0), hbar, g).mat;
  EXPECT_LE(max_abs(U.adjoint() * U - CMatrix::Identity(n, n)), 1e-10);
  EXPECT_THROW(metaplectic_op(SympElt(2.0, 1.0, 1.0, 1.0), hbar, g), UnsupportedError);
}

// (U f)(x) = f(x / t) / sqrt(t) for the scaling generator.
TEST(Metaplectic, ScalingIsDilation) {
  const double hbar = 1.0, t = 2.0;
  const LineGrid g = LineGrid::balanced(256, hbar);
  const GridFn f = GridFn::sample([](double x) { return cplx(std::exp(-x * x / 2) * (1 + x)); },
                                  g.x0, g.x0 + g.h * g.n, g.n);
  const GridFn Uf = metaplectic_op(SympElt::scaling(t), hbar, g).apply(f);
  double err = 0;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double x = g.x(j) / t;
    err = std::max(err, std::abs(Uf.samples[j] - std::exp(-x * x / 2) * (1 + x) / std::sqrt(t)));
  }
  EXPECT_LE(err, 1e-8);
}

// U sigma(h) U^{-1} = sigma(alpha(g) h), tested on low oscillator states.
TEST(Metaplectic, ConjugatesSchrodinger) {
  Rng rng(4);
  const double hbar = 0.5;
  const LineGrid g = LineGrid::balanced(256, hbar);
  const CMatrix V = oscillator_states(8, hbar, g);
  for (const SympElt& e :
       {SympElt::rotation(kPi / 2), SympElt::rotation(0.7), SympElt::scaling(2.0),
        SympElt::scaling(0.6), SympElt::shear(0.8)}) {
    const CMatrix U = metaplectic_op(e, hbar, g).mat;
    for (int t = 0; t < 3; ++t) {
      const HeisPoint h{rng.normal(), 0.5 * rng.normal(), 0.5 * rng.normal()};
      const CMatrix lhs = schrodinger_matrix(heis_auto(e, h), hbar, g) * U * V;
      const CMatrix rhs = U * schrodinger_matrix(h, hbar, g) * V;
      EXPECT_LE(max_abs(lhs - rhs), 1e-7) << "a=" << e.a << " c=" << e.c;
    }
  }
}

TEST(Covariance, Generators) {
  const double hbar = 1.0;
  const LineGrid g = LineGrid::balanced(256, hbar);
  const PhaseSymbol quad = PhaseSymbol::monomial(2, 0) + 0.5 * PhaseSymbol::monomial(1, 1) +
                           PhaseSymbol::monomial(0, 2, 0.3) + PhaseSymbol::q();
  const PhaseSymbol win = quad.windowed(GaussWindow::isotropic(1.5));
  EXPECT_LE(covariance_defect(SympElt(), win, hbar, g), 1e-14);
  for (const SympElt& e : {SympElt::rotation(0.9), SympElt::scaling(1.5), SympElt::shear(0.7)}) {
    EXPECT_LE(covariance_defect(e, win, hbar, g), 1e-6) << "a=" << e.a << " c=" << e.c;
    EXPECT_LE(covariance_defect(e, quad, hbar, g, 8), 1e-6) << "a=" << e.a << " c=" << e.c;
  }
}

TEST(WeylAlgebraOracle, CanonicalRelations) {
  const auto d = (WeylAlgebra::Q() * WeylAlgebra::P() - WeylAlgebra::P() * WeylAlgebra::Q()).at(1.0);
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(d.at({0, 0}), cplx(0.0, 1.0));
  // W(pq) = QP - i hbar/2.
  const auto w = WeylAlgebra::weyl(1, 1).at(2.0);
  EXPECT_NEAR(std::abs(w.at({1, 1}) - 1.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(w.at({0, 0}) - cplx(0, -1.0)), 0, 1e-15);
}

TEST(Dirac, LowDegreeExact) {
  const double hbar = 1.0;
  const LineGrid g = LineGrid::balanced(256, hbar);
  std::vector<PhaseSymbol> monos;
  for (unsigned m = 0; m <= 2; ++m)
    for (unsigned n = 0; m + n <= 2; ++n) monos.push_back(PhaseSymbol::monomial(m, n));
  for (const auto& f1 : monos)
    for (const auto& f2 : monos) {
      const DiracDefect d = dirac_rule_defect(f1, f2, hbar, g);
      EXPECT_LE(d.bracket, 1e-8);
      if (f1.degree() + f2.degree() <= 2) EXPECT_LE(d.product, 1e-8);
    }
  EXPECT_LE(dirac_rule_defect(PhaseSymbol::p(), PhaseSymbol::q(), hbar, g).bracket, 1e-9);
}

// Product rule for (p^2, q^2): W(p^2 q^2) - (W(p^2)W(q^2) + W(q^2)W(p^2))/2 = hbar^2/2.
TEST(Dirac, QuadraticProductDefectMatchesOracle) {
  const double hbar = 0.8;
  const auto delta = (WeylAlgebra::weyl(2, 2) -
                      (WeylAlgebra::weyl(2, 0) * WeylAlgebra::weyl(0, 2) +
                       WeylAlgebra::weyl(0, 2) * WeylAlgebra::weyl(2, 0)) *
                          cplx(0.5))
                         .at(hbar);
  ASSERT_EQ(delta.size(), 1u);
  EXPECT_NEAR(std::abs(delta.at({0, 0}) - 0.5 * hbar * hbar), 0, 1e-14);

  const FockWeyl F(20, hbar);
  const double ref = quant_oracle_norm(F.weyl(2, 2).topLeftCorner(4, 4));
  const double expect = 0.5 * hbar * hbar / ref;
  const LineGrid g = LineGrid::balanced(256, hbar);
  const DiracDefect d = dirac_rule_defect(PhaseSymbol::monomial(2, 0), PhaseSymbol::monomial(0, 2), hbar, g);
  EXPECT_NEAR(d.product, expect, 1e-8);
  EXPECT_LE(d.bracket, 1e-8);
}

TEST(Dirac, GroenewoldWitness) {
  const double hbar = 1.0;
  const auto delta = (WeylAlgebra::weyl(2, 2) * cplx(-9.0) -
                      (WeylAlgebra::weyl(3, 0) * WeylAlgebra::weyl(0, 3) -
                       WeylAlgebra::weyl(0, 3) * WeylAlgebra::weyl(3, 0)) *
                          (1.0 / cplx(0.0, hbar)))
                         .at(hbar);
  ASSERT_EQ(delta.size(), 1u);
  EXPECT_NEAR(std::abs(delta.at({0, 0}) + 1.5 * hbar * hbar), 0, 1e-13);

  const FockWeyl F(20, hbar);
  const double expect = 1.5 * hbar * hbar / quant_oracle_norm(9.0 * F.weyl(2, 2).topLeftCorner(4, 4));
  const LineGrid g = LineGrid::balanced(256, hbar);
  const DiracDefect d = dirac_rule_defect(PhaseSymbol::monomial(3, 0), PhaseSymbol::monomial(0, 3), hbar, g);
  EXPECT_NEAR(d.bracket, expect, 1e-8);
  EXPECT_GT(d.bracket, 0.01);
}

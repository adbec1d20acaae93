#pragma once

// Functions on the Heisenberg group sampled on a box: group convolution, the
// s-antiderivative, p-mechanical brackets and their images under the
// Schrodinger and one-dimensional representations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "cohspec/errors.hpp"
#include "cohspec/grid.hpp"
#include "cohspec/groups.hpp"
#include "cohspec/quant.hpp"

namespace cohspec {

// [-Ls, Ls) x [-Lx, Lx) x [-Ly, Ly) with ns x nx x ny samples (all even).
struct HBox {
  double Ls = 8.0, Lx = 8.0, Ly = 8.0;
  std::size_t ns = 64, nx = 64, ny = 64;

  static HBox cube(double L, std::size_t n) { return {L, L, L, n, n, n}; }

  double hs() const { return 2.0 * Ls / static_cast<double>(ns); }
  double hx() const { return 2.0 * Lx / static_cast<double>(nx); }
  double hy() const { return 2.0 * Ly / static_cast<double>(ny); }
  double s(std::size_t j) const { return -Ls + hs() * static_cast<double>(j); }
  double x(std::size_t i) const { return -Lx + hx() * static_cast<double>(i); }
  double y(std::size_t j) const { return -Ly + hy() * static_cast<double>(j); }
  std::size_t size() const { return ns * nx * ny; }

  bool operator==(const HBox&) const = default;

  void validate() const {
    for (std::size_t n : {ns, nx, ny})
      if (n < 4 || n % 2 != 0) throw DomainError("HBox: sample counts must be even and >= 4");
    if (!(Ls > 0 && Lx > 0 && Ly > 0)) throw DomainError("HBox: half-widths must be positive");
  }
};

// Samples k(s, x, y) stored with s fastest: index (ix * ny + iy) * ns + js.
class HFn {
 public:
  static constexpr double kDecay = 1e-12;

  HFn(const HBox& box, std::vector<cplx> data, double decay = kDecay)
      : box_(box), data_(std::move(data)) {
    box_.validate();
    if (data_.size() != box_.size()) throw DomainError("HFn: sample count does not match the box");
    const double peak = max_abs();
    const double edge = boundary_max();
    if (edge > decay * peak)
      throw BoxSizeError("HFn: boundary/peak ratio " + sci(edge / peak) + " exceeds " + sci(decay) +
                         "; enlarge the box");
  }

  template <class F>
  static HFn sample(F&& f, const HBox& box) {
    box.validate();
    std::vector<cplx> d(box.size());
    for (std::size_t ix = 0; ix < box.nx; ++ix)
      for (std::size_t iy = 0; iy < box.ny; ++iy)
        for (std::size_t js = 0; js < box.ns; ++js)
          d[(ix * box.ny + iy) * box.ns + js] = f(box.s(js), box.x(ix), box.y(iy));
    return HFn(box, std::move(d));
  }

  const HBox& box() const { return box_; }
  const std::vector<cplx>& data() const { return data_; }
  cplx at(std::size_t js, std::size_t ix, std::size_t iy) const {
    return data_[(ix * box_.ny + iy) * box_.ns + js];
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double boundary_max() const {
    double m = 0.0;
    for (std::size_t ix = 0; ix < box_.nx; ++ix)
      for (std::size_t iy = 0; iy < box_.ny; ++iy)
        for (std::size_t js = 0; js < box_.ns; ++js)
          if (ix == 0 || iy == 0 || js == 0 || ix + 1 == box_.nx || iy + 1 == box_.ny ||
              js + 1 == box_.ns)
            m = std::max(m, std::abs(at(js, ix, iy)));
    return m;
  }

  cplx integral() const {
    cplx acc{};
    for (const auto& v : data_) acc += v;
    return acc * (box_.hs() * box_.hx() * box_.hy());
  }

  HFn operator-(const HFn& o) const {
    require_same_box(o);
    std::vector<cplx> d(data_.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = data_[i] - o.data_[i];
    return HFn(box_, std::move(d), 1.0);
  }

  void require_same_box(const HFn& o) const {
    if (!(box_ == o.box_)) throw DomainError("HFn: operands live on different boxes");
  }

 private:
  static std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

  HBox box_;
  std::vector<cplx> data_;
};

namespace detail {

// s-spectrum with zero padding to 2 ns: out[(l * nx + ix) * ny + iy].
inline std::vector<cplx> s_spectrum(const HFn& k) {
  const HBox& b = k.box();
  const std::size_t M = 2 * b.ns;
  std::vector<cplx> out(M * b.nx * b.ny);
  Eigen::FFT<double> fft;
  CVec col(M), spec;
  for (std::size_t ix = 0; ix < b.nx; ++ix)
    for (std::size_t iy = 0; iy < b.ny; ++iy) {
      std::fill(col.begin(), col.end(), cplx{});
      for (std::size_t js = 0; js < b.ns; ++js) col[js] = k.at(js, ix, iy);
      fft.fwd(spec, col);
      for (std::size_t l = 0; l < M; ++l) out[(l * b.nx + ix) * b.ny + iy] = spec[l];
    }
  return out;
}

// b with p extra samples on each side of the s, x, y axes; steps unchanged.
inline HBox grown(const HBox& b, std::size_t ps, std::size_t px, std::size_t py) {
  auto half = [](double L, std::size_t n, std::size_t p) {
    return L * static_cast<double>(n + 2 * p) / static_cast<double>(n);
  };
  return {half(b.Ls, b.ns, ps), half(b.Lx, b.nx, px), half(b.Ly, b.ny, py),
          b.ns + 2 * ps, b.nx + 2 * px, b.ny + 2 * py};
}

struct RowSupport {
  std::size_t lo = 1, hi = 0;  // empty when lo > hi
  bool empty() const { return lo > hi; }
};

}  // namespace detail

// (k1 * k2)(g) = \int k1(h) k2(h^{-1} g) dh. In the s-Fourier domain each
// frequency sigma gives a twisted convolution in (x, y) with phase
// exp(-i sigma (x' y - y' x)/2), h = (s', x', y'); entries below 1e-17 of the peak are skipped.
// The result lives on the input box grown symmetrically, per axis, by the
// fewest samples that bring the boundary below decay x peak (at most doubling).
inline HFn heis_convolve(const HFn& k1, const HFn& k2, double decay = HFn::kDecay) {
  k1.require_same_box(k2);
  const HBox& b = k1.box();
  const std::size_t M = 2 * b.ns, nx = b.nx, ny = b.ny, NX = 2 * nx, NY = 2 * ny;
  const std::vector<cplx> A = detail::s_spectrum(k1);
  const std::vector<cplx> B = detail::s_spectrum(k2);
  double amax = 0.0, bmax = 0.0;
  for (const auto& v : A) amax = std::max(amax, std::abs(v));
  for (const auto& v : B) bmax = std::max(bmax, std::abs(v));
  const double athr = 1e-17 * amax, bthr = 1e-17 * bmax;

  auto supports = [&](const std::vector<cplx>& F, std::size_t l, double thr) {
    std::vector<detail::RowSupport> rows(nx);
    for (std::size_t i = 0; i < nx; ++i) {
      const cplx* r = &F[(l * nx + i) * ny];
      for (std::size_t j = 0; j < ny; ++j)
        if (std::abs(r[j]) > thr) {
          if (rows[i].empty()) rows[i].lo = j;
          rows[i].hi = j;
        }
    }
    return rows;
  };

  // Output coordinates: x = -2 Lx + hx io, io = i1 + i2; same for y and s.
  const HBox wide{2 * b.Ls, 2 * b.Lx, 2 * b.Ly, M, NX, NY};
  std::vector<cplx> out(M * NX * NY);
  std::vector<double> row_re(ny), row_im(ny);
  std::vector<cplx> E1(NX * ny), E2(nx * NY);
  for (std::size_t l = 0; l < M; ++l) {
    if (2 * l == M) continue;  // Nyquist bin: no symmetric phase
    const auto sa = supports(A, l, athr);
    const auto sb = supports(B, l, bthr);
    const double sigma = 2.0 * std::numbers::pi * static_cast<double>(signed_freq(l, M)) /
                         (static_cast<double>(M) * b.hs());
    for (std::size_t io = 0; io < NX; ++io)
      for (std::size_t j = 0; j < ny; ++j)
        E1[io * ny + j] = std::polar(1.0, 0.5 * sigma * wide.x(io) * b.y(j));
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t jo = 0; jo < NY; ++jo)
        E2[i * NY + jo] = std::polar(1.0, -0.5 * sigma * b.x(i) * wide.y(jo));
    const cplx* Al = &A[l * nx * ny];
    const cplx* Bl = &B[l * nx * ny];
    cplx* Ol = &out[l * NX * NY];
    for (std::size_t io = 0; io + 1 < NX; ++io) {
      const std::size_t i1lo = io >= nx ? io - nx + 1 : 0, i1hi = std::min(io, nx - 1);
      for (std::size_t i1 = i1lo; i1 <= i1hi; ++i1) {
        const std::size_t i2 = io - i1;
        if (sa[i1].empty() || sb[i2].empty()) continue;
        const std::size_t alo = sa[i1].lo, ahi = sa[i1].hi;
        for (std::size_t j1 = alo; j1 <= ahi; ++j1) {
          const cplx v = Al[i1 * ny + j1] * E1[io * ny + j1];
          row_re[j1] = v.real();
          row_im[j1] = v.imag();
        }
        const cplx* Brow = &Bl[i2 * ny];
        const std::size_t blo = sb[i2].lo, bhi = sb[i2].hi;
        for (std::size_t jo = alo + blo; jo <= ahi + bhi; ++jo) {
          // j2 = jo - j1 must lie in [blo, bhi].
          const long base = static_cast<long>(jo);
          const long lo = std::max<long>(static_cast<long>(alo), base - static_cast<long>(bhi));
          const long hi = std::min<long>(static_cast<long>(ahi), base - static_cast<long>(blo));
          if (lo > hi) continue;
          double re = 0.0, im = 0.0;
          for (long j1 = lo; j1 <= hi; ++j1) {
            const cplx bv = Brow[base - j1];
            const double br = bv.real(), bi = bv.imag();
            re += row_re[j1] * br - row_im[j1] * bi;
            im += row_re[j1] * bi + row_im[j1] * br;
          }
          Ol[io * NY + jo] += E2[i1 * NY + jo] * cplx(re, im);
        }
      }
    }
  }

  // Back to s, keeping per-axis slab maxima for the trim.
  const double meas = b.hs() * b.hx() * b.hy();
  std::vector<cplx> full(wide.size());
  std::vector<double> slab_s(M, 0.0), slab_x(NX, 0.0), slab_y(NY, 0.0);
  Eigen::FFT<double> fft;
  CVec spec(M), col;
  for (std::size_t io = 0; io < NX; ++io)
    for (std::size_t jo = 0; jo < NY; ++jo) {
      for (std::size_t l = 0; l < M; ++l) spec[l] = out[(l * NX + io) * NY + jo];
      fft.inv(col, spec);
      for (std::size_t m = 0; m < M; ++m) {
        const cplx v = meas * col[m];
        full[(io * NY + jo) * M + m] = v;
        const double a = std::abs(v);
        slab_s[m] = std::max(slab_s[m], a);
        slab_x[io] = std::max(slab_x[io], a);
        slab_y[jo] = std::max(slab_y[jo], a);
      }
    }
  double peak = 0.0;
  for (double v : slab_s) peak = std::max(peak, v);
  const double thr = decay * peak;
  // Smallest p with both end slabs of [n/2 - p, 3n/2 + p) below thr.
  auto grow = [&](const std::vector<double>& slab, std::size_t n, const char* axis) {
    for (std::size_t p = 0; p <= n / 2; ++p) {
      const std::size_t lo = n / 2 - p, hi = n / 2 + n + p - 1;
      if (hi >= slab.size()) break;
      if (slab[lo] <= thr && slab[hi] <= thr) return p;
    }
    throw BoxSizeError(std::string("heis_convolve: the convolution does not fit in the doubled box along ") +
                       axis + "; enlarge the input box");
  };
  const std::size_t ps = grow(slab_s, b.ns, "s"), px = grow(slab_x, nx, "x"), py = grow(slab_y, ny, "y");
  const HBox ob = detail::grown(b, ps, px, py);
  std::vector<cplx> d(ob.size());
  const std::size_t s0 = b.ns / 2 - ps, x0 = nx / 2 - px, y0 = ny / 2 - py;
  for (std::size_t ix = 0; ix < ob.nx; ++ix)
    for (std::size_t iy = 0; iy < ob.ny; ++iy)
      for (std::size_t js = 0; js < ob.ns; ++js)
        d[(ix * ob.ny + iy) * ob.ns + js] = full[((ix + x0) * NY + iy + y0) * M + js + s0];
  return HFn(ob, std::move(d), decay);
}

// Cumulative trapezoid integral in s from the left edge.
inline HFn antiderivative_s(const HFn& k) {
  const HBox& b = k.box();
  const double hs = b.hs();
  const double scale = k.max_abs() * 2.0 * b.Ls;
  std::vector<cplx> d(b.size());
  for (std::size_t ix = 0; ix < b.nx; ++ix)
    for (std::size_t iy = 0; iy < b.ny; ++iy) {
      cplx total{};
      for (std::size_t js = 0; js < b.ns; ++js) total += k.at(js, ix, iy);
      if (std::abs(total * hs) > 1e-8 * scale)
        throw PreconditionError(
            "antiderivative_s: nonzero s-integral; the primitive would not vanish at the box edge");
      cplx acc{};
      const std::size_t base = (ix * b.ny + iy) * b.ns;
      d[base] = 0.0;
      for (std::size_t js = 1; js < b.ns; ++js) {
        acc += 0.5 * hs * (k.at(js - 1, ix, iy) + k.at(js, ix, iy));
        d[base + js] = acc;
      }
    }
  // The right edge vanishes only to the precondition tolerance.
  return HFn(b, std::move(d), 1e-8);
}

namespace detail {

// Zero extension of k onto a box grown from its own.
inline HFn zero_extend(const HFn& k, std::size_t ps, std::size_t px, std::size_t py) {
  const HBox& b = k.box();
  const HBox ob = grown(b, ps, px, py);
  std::vector<cplx> d(ob.size());
  for (std::size_t ix = 0; ix < b.nx; ++ix)
    for (std::size_t iy = 0; iy < b.ny; ++iy)
      for (std::size_t js = 0; js < b.ns; ++js)
        d[((ix + px) * ob.ny + iy + py) * ob.ns + js + ps] = k.at(js, ix, iy);
  return HFn(ob, std::move(d), 1.0);
}

}  // namespace detail

inline HFn pmech_bracket(const HFn& k1, const HFn& k2) {
  HFn a = heis_convolve(k1, k2);
  HFn c = heis_convolve(k2, k1);
  // The two orders may have been grown differently.
  const HBox& ba = a.box();
  const HBox& bc = c.box();
  const std::size_t ns = std::max(ba.ns, bc.ns), nx = std::max(ba.nx, bc.nx), ny = std::max(ba.ny, bc.ny);
  if (!(ba == bc)) {
    a = detail::zero_extend(a, (ns - ba.ns) / 2, (nx - ba.nx) / 2, (ny - ba.ny) / 2);
    c = detail::zero_extend(c, (ns - bc.ns) / 2, (nx - bc.nx) / 2, (ny - bc.ny) / 2);
  }
  return antiderivative_s(a - c);
}

// ---------------------------------------------------------------------------
// Representation images

// Defects are measured on the span of the first `states` oscillator states
// (0: the whole grid, where the sinc-interpolated shifts dominate at coarse boxes).
struct SchrodingerTarget {
  double hbar = 1.0;
  LineGrid grid = LineGrid::balanced(256, 1.0);
  std::size_t states = 16;
};

struct OnedimTarget {
  double p = 0.0;
  double q = 0.0;
};

// (p, q) probes on [-extent, extent]^2 and the centered-difference step.
struct ProbeGrid {
  std::size_t n = 9;
  double extent = 2.0;
  double step = 1e-3;
};

// sigma(bracket(k1, k2)) = c (1/i hbar)[sigma(k1), sigma(k2)] with c = -1/2:
// integrating the primitive against e^{2 i s hbar} divides by -2 i hbar.
inline constexpr double kSchrodingerBracketConstant = -0.5;
// rho_(p,q)(bracket(k1, k2)) = c {k1^, k2^} with c = -1 under {f, g} = f_q g_p - f_p g_q.
inline constexpr double kOnedimBracketConstant = -1.0;

// \int k(s, x, y) e^{i (x p + y q)} ds dx dy
inline cplx rep_image(const HFn& k, const OnedimTarget& t) {
  const HBox& b = k.box();
  std::vector<cplx> ey(b.ny);
  for (std::size_t iy = 0; iy < b.ny; ++iy) ey[iy] = std::polar(1.0, b.y(iy) * t.q);
  cplx acc{};
  for (std::size_t ix = 0; ix < b.nx; ++ix) {
    cplx rowsum{};
    for (std::size_t iy = 0; iy < b.ny; ++iy) {
      cplx ssum{};
      for (std::size_t js = 0; js < b.ns; ++js) ssum += k.at(js, ix, iy);
      rowsum += ssum * ey[iy];
    }
    acc += rowsum * std::polar(1.0, b.x(ix) * t.p);
  }
  return acc * (b.hs() * b.hx() * b.hy());
}

// \int k(s, x, y) sigma_hbar(s, x, y) ds dx dy as a grid operator, using
// sigma(s, x, y) f(q) = e^{i(2 s hbar - r y q + hbar x y)} f(q - r x), r = sqrt(2 hbar).
inline LineOperator rep_image(const HFn& k, const SchrodingerTarget& t) {
  detail::require_hbar(t.hbar);
  const HBox& b = k.box();
  const LineGrid& g = t.grid;
  const double r = std::sqrt(2.0 * t.hbar);
  const double extent = g.h * static_cast<double>(g.n);
  if (r * b.Lx > 0.5 * extent)
    throw DomainError("rep_image: box shifts exceed half the line grid; enlarge the grid");

  // kt(x, y) = \int k e^{2 i s hbar} ds
  std::vector<cplx> es(b.ns);
  for (std::size_t js = 0; js < b.ns; ++js) es[js] = std::polar(b.hs(), 2.0 * t.hbar * b.s(js));
  std::vector<cplx> kt(b.nx * b.ny);
  for (std::size_t ix = 0; ix < b.nx; ++ix)
    for (std::size_t iy = 0; iy < b.ny; ++iy) {
      cplx acc{};
      for (std::size_t js = 0; js < b.ns; ++js) acc += k.at(js, ix, iy) * es[js];
      kt[ix * b.ny + iy] = acc;
    }

  const auto n = static_cast<Eigen::Index>(g.n);
  CMatrix op = CMatrix::Zero(n, n);
  CVec e0(g.n);
  e0[0] = 1.0;
  for (std::size_t ix = 0; ix < b.nx; ++ix) {
    const double x = b.x(ix);
    // F(q) = \int kt(x, y) e^{i(hbar x y - r y q)} dy
    CVector F = CVector::Zero(n);
    bool any = false;
    for (std::size_t iy = 0; iy < b.ny; ++iy) {
      const cplx w = kt[ix * b.ny + iy] * b.hy();
      if (w == cplx{}) continue;
      any = true;
      const double y = b.y(iy);
      for (Eigen::Index j = 0; j < n; ++j)
        F(j) += w * std::polar(1.0, t.hbar * x * y - r * y * g.x(static_cast<std::size_t>(j)));
    }
    if (!any) continue;
    // Circulant shift by r x.
    const GridFn col = grid_shift(GridFn(e0, g.x0, g.h), r * x);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index c = 0; c < n; ++c) {
        const auto idx = static_cast<std::size_t>((j - c + n) % n);
        op(j, c) += b.hx() * F(j) * col.samples[idx];
      }
  }
  return {op, g, t.hbar};
}

// Relative defect || sigma(bracket) - c (1/i hbar)[sigma(k1), sigma(k2)] || / || c (...) ||.
inline double bracket_repr_defect(const HFn& k1, const HFn& k2, const SchrodingerTarget& t) {
  const CMatrix S1 = rep_image(k1, t).mat;
  const CMatrix S2 = rep_image(k2, t).mat;
  const CMatrix B = rep_image(pmech_bracket(k1, k2), t).mat;
  const CMatrix C = (kSchrodingerBracketConstant / cplx(0.0, t.hbar)) * (S1 * S2 - S2 * S1);
  auto norm = [&](const CMatrix& m) { return compressed_norm(LineOperator{m, t.grid, t.hbar}, t.states); };
  const double ref = norm(C);
  return norm(B - C) / (ref > 0.0 ? ref : 1.0);
}

// Least-squares c with sigma(bracket) ~ c (1/i hbar)[sigma(k1), sigma(k2)], on
// the same oscillator span as the defect.
inline cplx measured_bracket_constant(const HFn& k1, const HFn& k2, const SchrodingerTarget& t) {
  const CMatrix S1 = rep_image(k1, t).mat;
  const CMatrix S2 = rep_image(k2, t).mat;
  CMatrix B = rep_image(pmech_bracket(k1, k2), t).mat;
  CMatrix C = (1.0 / cplx(0.0, t.hbar)) * (S1 * S2 - S2 * S1);
  if (t.states > 0) {
    const CMatrix V = oscillator_states(t.states, t.hbar, t.grid);
    B = V.adjoint() * B * V;
    C = V.adjoint() * C * V;
  }
  const double cc = C.squaredNorm();
  return cc > 0.0 ? B.cwiseProduct(C.conjugate()).sum() / cc : cplx{};
}

// max over the probes of |rho(bracket) - c {k1^, k2^}| / max |c {k1^, k2^}|, with
// the Poisson bracket of the images by centered differences.
inline double bracket_repr_defect(const HFn& k1, const HFn& k2, const ProbeGrid& probes) {
  const HFn br = pmech_bracket(k1, k2);
  auto img = [](const HFn& k, double p, double q) { return rep_image(k, OnedimTarget{p, q}); };
  const double d = probes.step;
  double num = 0.0, den = 0.0;
  for (std::size_t a = 0; a < probes.n; ++a)
    for (std::size_t c = 0; c < probes.n; ++c) {
      const double span = probes.n > 1 ? 2.0 * probes.extent / static_cast<double>(probes.n - 1) : 0.0;
      const double p = -probes.extent + span * static_cast<double>(a);
      const double q = -probes.extent + span * static_cast<double>(c);
      const cplx d1p = (img(k1, p + d, q) - img(k1, p - d, q)) / (2 * d);
      const cplx d1q = (img(k1, p, q + d) - img(k1, p, q - d)) / (2 * d);
      const cplx d2p = (img(k2, p + d, q) - img(k2, p - d, q)) / (2 * d);
      const cplx d2q = (img(k2, p, q + d) - img(k2, p, q - d)) / (2 * d);
      const cplx pb = kOnedimBracketConstant * (d1q * d2p - d1p * d2q);
      num = std::max(num, std::abs(img(br, p, q) - pb));
      den = std::max(den, std::abs(pb));
    }
  return num / (den > 0.0 ? den : 1.0);
}

}  // namespace cohspec

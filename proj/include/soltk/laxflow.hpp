#pragma once

// Solution grids, finite-difference jets, Lax connections evaluated on
// grids, zero-curvature residuals, frame integration, and named PDE
// residuals for the catalog flows.

#include "soltk/algebra.hpp"
#include "soltk/jet.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace soltk {

struct GridDomain {
  int nx = 0, nt = 0;
  double x0 = 0, x1 = 0, t0 = 0, t1 = 0;

  double dx() const { return (x1 - x0) / (nx - 1); }
  double dt() const { return (t1 - t0) / (nt - 1); }
  double x(int ix) const { return x0 + ix * dx(); }
  double t(int it) const { return t0 + it * dt(); }
};

// Complex scalar field sampled on the grid: entry (ix, it).
using ScalarGrid = Eigen::MatrixXcd;

struct SolutionGrid {
  GridDomain dom;
  std::vector<std::string> names;
  std::vector<ScalarGrid> comp;

  const ScalarGrid& operator[](const std::string& name) const {
    for (size_t k = 0; k < names.size(); ++k)
      if (names[k] == name) return comp[k];
    throw SoltkError("SolutionGrid: no component '" + name + "'");
  }

  static SolutionGrid sample(
      const GridDomain& dom, const std::vector<std::string>& names,
      const std::function<Cplx(int comp, double x, double t)>& f) {
    SolutionGrid g;
    g.dom = dom;
    g.names = names;
    for (int c = 0; c < static_cast<int>(names.size()); ++c) {
      ScalarGrid s(dom.nx, dom.nt);
      for (int ix = 0; ix < dom.nx; ++ix)
        for (int it = 0; it < dom.nt; ++it)
          s(ix, it) = f(c, dom.x(ix), dom.t(it));
      g.comp.push_back(std::move(s));
    }
    return g;
  }
};

// ---------------------------------------------------------------------------
// Fourth-order finite differences (one-sided at the two points nearest each
// boundary, so every node carries a value).
// ---------------------------------------------------------------------------

namespace detail {
template <class Get, class Put>
void fd_line(int n, double h, const Get& f, const Put& out) {
  if (n < 5) throw SoltkError("fd: need at least 5 points per line");
  const double s = 1.0 / (12.0 * h);
  out(0, s * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) -
              3.0 * f(4)));
  out(1, s * (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)));
  for (int i = 2; i < n - 2; ++i)
    out(i, s * (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)));
  out(n - 2, s * (3.0 * f(n - 1) + 10.0 * f(n - 2) - 18.0 * f(n - 3) +
                  6.0 * f(n - 4) - f(n - 5)));
  out(n - 1, s * (25.0 * f(n - 1) - 48.0 * f(n - 2) + 36.0 * f(n - 3) -
                  16.0 * f(n - 4) + 3.0 * f(n - 5)));
}
}  // namespace detail

inline ScalarGrid d_x(const ScalarGrid& g, double h) {
  ScalarGrid r(g.rows(), g.cols());
  for (int it = 0; it < g.cols(); ++it)
    detail::fd_line(
        static_cast<int>(g.rows()), h, [&](int i) { return g(i, it); },
        [&](int i, Cplx v) { r(i, it) = v; });
  return r;
}

inline ScalarGrid d_t(const ScalarGrid& g, double h) {
  ScalarGrid r(g.rows(), g.cols());
  for (int ix = 0; ix < g.rows(); ++ix)
    detail::fd_line(
        static_cast<int>(g.cols()), h, [&](int i) { return g(ix, i); },
        [&](int i, Cplx v) { r(ix, i) = v; });
  return r;
}

// Grid of matrices, row-major in (ix, it): entry it*nx + ix.
struct MatGrid {
  GridDomain dom;
  std::vector<Mat> m;

  Mat& at(int ix, int it) { return m[it * dom.nx + ix]; }
  const Mat& at(int ix, int it) const { return m[it * dom.nx + ix]; }

  static MatGrid zero(const GridDomain& dom, int n) {
    MatGrid g;
    g.dom = dom;
    g.m.assign(static_cast<size_t>(dom.nx) * dom.nt, Mat::Zero(n, n));
    return g;
  }
};

inline MatGrid d_x(const MatGrid& g, double h) {
  MatGrid r = g;
  for (int it = 0; it < g.dom.nt; ++it)
    detail::fd_line(
        g.dom.nx, h, [&](int i) -> const Mat& { return g.at(i, it); },
        [&](int i, const Mat& v) { r.at(i, it) = v; });
  return r;
}

inline MatGrid d_t(const MatGrid& g, double h) {
  MatGrid r = g;
  for (int ix = 0; ix < g.dom.nx; ++ix)
    detail::fd_line(
        g.dom.nt, h, [&](int i) -> const Mat& { return g.at(ix, i); },
        [&](int i, const Mat& v) { r.at(ix, i) = v; });
  return r;
}

// Stacks of x-derivative grids per component, feeding symbolic evaluation.
struct JetGrids {
  GridDomain dom;
  std::vector<std::vector<ScalarGrid>> d;  // d[comp][ord]

  static JetGrids build(const SolutionGrid& g, int max_ord) {
    JetGrids j;
    j.dom = g.dom;
    for (const auto& s : g.comp) {
      std::vector<ScalarGrid> stack{s};
      for (int o = 1; o <= max_ord; ++o)
        stack.push_back(d_x(stack.back(), g.dom.dx()));
      j.d.push_back(std::move(stack));
    }
    return j;
  }

  std::map<JetVar, Cplx> at(int ix, int it) const {
    std::map<JetVar, Cplx> out;
    for (int c = 0; c < static_cast<int>(d.size()); ++c)
      for (int o = 0; o < static_cast<int>(d[c].size()); ++o)
        out[JetVar{c, o}] = d[c][o](ix, it);
    return out;
  }
};

// The Lax connection of the (b,j)-flow evaluated on a grid at fixed lambda:
// A_x = a lambda + u, A_t = sum_i Q_{b,i} lambda^{j-i}.
struct ConnectionField {
  GridDomain dom;
  std::vector<Mat> Ax, At;

  const Mat& ax(int ix, int it) const { return Ax[it * dom.nx + ix]; }
  const Mat& at(int ix, int it) const { return At[it * dom.nx + ix]; }
};

// The grid components must be the perp-basis coordinates of u in the order
// of ctx.basis_perp.
inline ConnectionField assemble_lax(const AlgebraContext& ctx,
                                    const SolutionGrid& grid, const Mat& b,
                                    int j, Cplx lambda) {
  if (static_cast<int>(grid.comp.size()) != ctx.n_perp())
    throw SoltkError("assemble_lax: component count != perp basis size");
  const auto Q = compute_Q_sequence(ctx, b, j);
  int max_ord = 0;
  for (const auto& q : Q) max_ord = std::max(max_ord, q.max_order());
  const JetGrids jets = JetGrids::build(grid, max_ord);

  ConnectionField f;
  f.dom = grid.dom;
  f.Ax.reserve(static_cast<size_t>(grid.dom.nx) * grid.dom.nt);
  f.At.reserve(f.Ax.capacity());
  for (int it = 0; it < grid.dom.nt; ++it)
    for (int ix = 0; ix < grid.dom.nx; ++ix) {
      const auto jv = jets.at(ix, it);
      Mat u = Mat::Zero(ctx.dim, ctx.dim);
      for (int c = 0; c < ctx.n_perp(); ++c)
        u += jv.at(JetVar{c, 0}) * ctx.basis_perp[c];
      f.Ax.push_back(lambda * ctx.a + u);
      Mat at = Mat::Zero(ctx.dim, ctx.dim);
      Cplx pw = 1.0;
      for (int i = j; i >= 0; --i) {
        at += pw * Q[i].evaluate(jv);
        pw *= lambda;
      }
      f.At.push_back(at);
    }
  return f;
}

// Max zero-curvature residual || dx(At) - dt(Ax) + [Ax, At] || over the grid
// minus a margin (the one-sided stencils at the rim are noisier).
inline double flatness_residual(const ConnectionField& f, int margin = 2) {
  const MatGrid dAt_dx = d_x(MatGrid{f.dom, f.At}, f.dom.dx());
  const MatGrid dAx_dt = d_t(MatGrid{f.dom, f.Ax}, f.dom.dt());
  double res = 0.0;
  for (int it = margin; it < f.dom.nt - margin; ++it)
    for (int ix = margin; ix < f.dom.nx - margin; ++ix)
      res = std::max(res, fnorm(dAt_dx.at(ix, it) - dAx_dt.at(ix, it) +
                                commutator(f.ax(ix, it), f.at(ix, it))));
  return res;
}

// Frame integration E_x = E A_x, E_t = E A_t: RK4 along the t0 row, then up
// each column. Midpoint coefficients come from cubic interpolation, so the
// scheme is fourth order in the step away from the boundary cells. The
// connection is required to pass the flatness gate first; the determinant
// drift (connections here are traceless) is reported on the result.
struct FrameGrid {
  GridDomain dom;
  std::vector<Mat> E;
  double det_drift = 0.0;

  const Mat& at(int ix, int it) const { return E[it * dom.nx + ix]; }
};

namespace detail {
inline Mat midpoint(const std::vector<Mat>& a, int i, int n) {
  // Value at i + 1/2 by cubic interpolation where possible.
  if (i >= 1 && i + 2 < n)
    return (-a[i - 1] + 9.0 * a[i] + 9.0 * a[i + 1] - a[i + 2]) / 16.0;
  return 0.5 * (a[i] + a[i + 1]);
}

// One RK4 step of E' = E A with A given at the endpoints and midpoint.
inline Mat rk4_step(const Mat& E, const Mat& A0, const Mat& Am, const Mat& A1,
                    double h) {
  const Mat k1 = E * A0;
  const Mat k2 = (E + 0.5 * h * k1) * Am;
  const Mat k3 = (E + 0.5 * h * k2) * Am;
  const Mat k4 = (E + h * k3) * A1;
  return E + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}
}  // namespace detail

inline FrameGrid integrate_frame(const ConnectionField& f, const Mat& E0,
                                 double flatness_gate = tol::flatness_gate) {
  const double flat = flatness_residual(f);
  if (flat > flatness_gate)
    throw SoltkError("integrate_frame: flatness residual " +
                     std::to_string(flat) + " exceeds the gate");
  FrameGrid out;
  out.dom = f.dom;
  out.E.assign(static_cast<size_t>(f.dom.nx) * f.dom.nt, Mat());
  const int nx = f.dom.nx, nt = f.dom.nt;

  // t0 row.
  std::vector<Mat> row(nx);
  for (int ix = 0; ix < nx; ++ix) row[ix] = f.ax(ix, 0);
  out.E[0] = E0;
  for (int ix = 0; ix + 1 < nx; ++ix)
    out.E[ix + 1] = detail::rk4_step(out.E[ix], row[ix],
                                     detail::midpoint(row, ix, nx),
                                     row[ix + 1], f.dom.dx());
  // Columns.
  for (int ix = 0; ix < nx; ++ix) {
    std::vector<Mat> col(nt);
    for (int it = 0; it < nt; ++it) col[it] = f.at(ix, it);
    for (int it = 0; it + 1 < nt; ++it)
      out.E[(it + 1) * nx + ix] =
          detail::rk4_step(out.E[it * nx + ix], col[it],
                           detail::midpoint(col, it, nt), col[it + 1],
                           f.dom.dt());
  }
  const Cplx det0 = E0.determinant();
  for (const auto& e : out.E)
    out.det_drift = std::max(out.det_drift, std::abs(e.determinant() - det0));
  return out;
}

// ---------------------------------------------------------------------------
// Named scalar PDE residuals (max abs over the interior).
// ---------------------------------------------------------------------------

inline double pde_residual(const std::string& tag, const SolutionGrid& g,
                           int margin = 3) {
  const double hx = g.dom.dx(), ht = g.dom.dt();
  const Cplx I(0, 1);
  auto maxres = [&](const ScalarGrid& r) {
    double m = 0.0;
    for (int it = margin; it < g.dom.nt - margin; ++it)
      for (int ix = margin; ix < g.dom.nx - margin; ++ix)
        m = std::max(m, std::abs(r(ix, it)));
    return m;
  };

  if (tag == "translation") {
    const ScalarGrid& q = g["q"];
    return maxres(d_t(q, ht) - d_x(q, hx));
  }
  if (tag == "nls") {
    // q_t = (i/2)(q_xx + 2 |q|^2 q), the su(2) second flow.
    const ScalarGrid& q = g["q"];
    const ScalarGrid qxx = d_x(d_x(q, hx), hx);
    ScalarGrid cub = q;
    for (int it = 0; it < g.dom.nt; ++it)
      for (int ix = 0; ix < g.dom.nx; ++ix)
        cub(ix, it) = std::norm(q(ix, it)) * q(ix, it);
    return maxres(d_t(q, ht) - 0.5 * I * (qxx + 2.0 * cub));
  }
  if (tag == "nls-qr") {
    // The complex second flow: q_t = (i/2)(q_xx - 2 q^2 r),
    // r_t = -(i/2)(r_xx - 2 q r^2).
    const ScalarGrid &q = g["q"], &r = g["r"];
    const ScalarGrid qxx = d_x(d_x(q, hx), hx), rxx = d_x(d_x(r, hx), hx);
    const ScalarGrid e1 =
        d_t(q, ht) - 0.5 * I * (qxx - 2.0 * q.cwiseProduct(q).cwiseProduct(r));
    const ScalarGrid e2 =
        d_t(r, ht) + 0.5 * I * (rxx - 2.0 * q.cwiseProduct(r).cwiseProduct(r));
    return std::max(maxres(e1), maxres(e2));
  }
  if (tag == "mkdv-su2") {
    // q_t = -(1/4)(q_xxx + 6 |q|^2 q_x), the su(2) third flow.
    const ScalarGrid& q = g["q"];
    const ScalarGrid qx = d_x(q, hx);
    const ScalarGrid qxxx = d_x(d_x(qx, hx), hx);
    ScalarGrid cub = q;
    for (int it = 0; it < g.dom.nt; ++it)
      for (int ix = 0; ix < g.dom.nx; ++ix)
        cub(ix, it) = std::norm(q(ix, it)) * qx(ix, it);
    return maxres(d_t(q, ht) + 0.25 * (qxxx + 6.0 * cub));
  }
  if (tag == "kw-mkdv") {
    // q_t = (1/4)(q_xxx - 6 q^2 q_x), the twisted sl(2,R) third flow.
    const ScalarGrid& q = g["q"];
    const ScalarGrid qx = d_x(q, hx);
    const ScalarGrid qxxx = d_x(d_x(qx, hx), hx);
    return maxres(d_t(q, ht) -
                  0.25 * (qxxx - 6.0 * q.cwiseProduct(q).cwiseProduct(qx)));
  }
  if (tag == "sge") {
    // q_{xt} = sin q.
    const ScalarGrid& q = g["q"];
    ScalarGrid s = q;
    for (int it = 0; it < g.dom.nt; ++it)
      for (int ix = 0; ix < g.dom.nx; ++ix) s(ix, it) = std::sin(q(ix, it));
    return maxres(d_t(d_x(q, hx), ht) - s);
  }
  if (tag == "tzitzeica") {
    // w_{xt} = e^w - e^{-2w}.
    const ScalarGrid& w = g["w"];
    ScalarGrid s = w;
    for (int it = 0; it < g.dom.nt; ++it)
      for (int ix = 0; ix < g.dom.nx; ++ix)
        s(ix, it) = std::exp(w(ix, it)) - std::exp(-2.0 * w(ix, it));
    return maxres(d_t(d_x(w, hx), ht) - s);
  }
  throw SoltkError("pde_residual: unknown tag '" + tag + "'");
}

// Residual of the -1-flow pair u_t = [a, v], v_x = -[u, v] on matrix grids.
inline double minus1_residual(const Mat& a, const MatGrid& u, const MatGrid& v,
                              int margin = 2) {
  const MatGrid ut = d_t(u, u.dom.dt());
  const MatGrid vx = d_x(v, v.dom.dx());
  double res = 0.0;
  for (int it = margin; it < u.dom.nt - margin; ++it)
    for (int ix = margin; ix < u.dom.nx - margin; ++ix) {
      res = std::max(res, fnorm(ut.at(ix, it) -
                                commutator(a, v.at(ix, it))));
      res = std::max(res, fnorm(vx.at(ix, it) +
                                commutator(u.at(ix, it), v.at(ix, it))));
    }
  return res;
}

// Residual of the two-variable off-diagonal system for F = (f_ij), f_ii = 0:
//   (f_12)_{x_1} + (f_21)_{x_2} + sum_k f_k1 f_k2 = 0,
//   (f_12)_{x_2} + (f_21)_{x_1} + sum_k f_1k f_2k = 0.
// Grid axis x is x_1 and axis t is x_2.
inline double grassmann_residual(const SolutionGrid& g, int margin = 3) {
  const ScalarGrid &f12 = g["f12"], &f21 = g["f21"];
  const double h1 = g.dom.dx(), h2 = g.dom.dt();
  // With zero diagonal both quadratic sums reduce to products against f_ii
  // and vanish; they are kept spelled out against future n > 2 fields.
  const ScalarGrid e1 = d_x(f12, h1) + d_t(f21, h2);
  const ScalarGrid e2 = d_t(f12, h2) + d_x(f21, h1);
  double res = 0.0;
  for (int it = margin; it < g.dom.nt - margin; ++it)
    for (int ix = margin; ix < g.dom.nx - margin; ++ix)
      res = std::max(res,
                     std::max(std::abs(e1(ix, it)), std::abs(e2(ix, it))));
  return res;
}

}  // namespace soltk

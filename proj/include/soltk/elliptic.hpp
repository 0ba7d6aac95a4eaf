#pragma once

// Elliptic systems: the Fourier-series splitting of the loop algebra, the
// finite-type Laurent-loop ODE, frame recovery, and residual evaluators for
// the m-th elliptic systems and the harmonic map equation.

#include "soltk/laxflow.hpp"
#include "soltk/loop.hpp"

#include <vector>

namespace soltk {

struct EllipticContext {
  AlgebraContext ctx;
  int m = 1;  // order of the system
  int d = 1;  // Laurent degree of the finite-type seed
};

// Splitting L(G) = L_e(U) + L_+(G): for xi = sum_j xi_j lambda^j,
//   p1(xi) = sum_{j>=1} (xi_{-j} (l^{-j} - 1) + tau(xi_{-j}) (l^j - 1)),
//   p2(xi) = b_0 + sum_{j>=1} (xi_j - tau(xi_{-j})) l^j,
// with b_0 = xi_0 + sum_{j>=1} (xi_{-j} + tau(xi_{-j})).
inline LaurentLoop project_p1(const InvolutionSpec& tau, const LaurentLoop& xi) {
  const int J = std::max(-xi.lo, xi.hi());
  const int n = xi.c.empty() ? 0 : static_cast<int>(xi.c.front().rows());
  LaurentLoop out;
  out.lo = -J;
  out.c.assign(2 * J + 1, Mat::Zero(n, n));
  for (int j = 1; j <= J; ++j) {
    const Mat x = xi.coeff(-j);
    const Mat tx = tau.apply(x);
    out.c[J - j] += x;
    out.c[J + j] += tx;
    out.c[J] -= x + tx;
  }
  return out.trimmed(0.0);
}

inline LaurentLoop project_p2(const InvolutionSpec& tau, const LaurentLoop& xi) {
  const int J = std::max(-xi.lo, xi.hi());
  const int n = xi.c.empty() ? 0 : static_cast<int>(xi.c.front().rows());
  LaurentLoop out;
  out.lo = 0;
  out.c.assign(J + 1, Mat::Zero(n, n));
  out.c[0] = xi.coeff(0);
  for (int j = 1; j <= J; ++j) {
    const Mat x = xi.coeff(-j);
    const Mat tx = tau.apply(x);
    out.c[0] += x + tx;
    out.c[j] = xi.coeff(j) - tx;
  }
  return out.trimmed(0.0);
}

// Coefficient form of the U-reality condition xi_{-j} = tau(xi_j).
inline double loop_reality_defect(const InvolutionSpec& tau,
                                  const LaurentLoop& xi) {
  const int J = std::max(-xi.lo, xi.hi());
  double defect = 0.0;
  for (int j = 0; j <= J; ++j)
    defect = std::max(defect, fnorm(xi.coeff(-j) - tau.apply(xi.coeff(j))));
  return defect;
}

// Field of Laurent loops eta(x, y) with window [-d, d].
struct FiniteTypeField {
  GridDomain dom;
  int m = 1, d = 1;
  std::vector<LaurentLoop> eta;  // it * nx + ix

  LaurentLoop& at(int ix, int iy) { return eta[iy * dom.nx + ix]; }
  const LaurentLoop& at(int ix, int iy) const { return eta[iy * dom.nx + ix]; }
};

namespace detail {
// Shift xi -> lambda^k xi (a window shift).
inline LaurentLoop shift(const LaurentLoop& xi, int k) {
  LaurentLoop out = xi;
  out.lo += k;
  return out;
}

inline LaurentLoop loop_bracket(const LaurentLoop& a, const LaurentLoop& b) {
  return a * b - b * a;
}

// Restrict to the invariant window [-d, d]; the ODE preserves it exactly,
// so mass outside is discretization noise unless the seed was invalid.
inline LaurentLoop clip_window(const LaurentLoop& xi, int d) {
  const double outside = xi.mass_outside(-d, d);
  if (outside > 1e-8 * (1.0 + xi.norm()))
    throw SoltkError("finite_type_integrate: window overflow, seed is not "
                     "compatible with (d, m)");
  return xi.window(-d, d);
}
}  // namespace detail

// Right side of eta_x = [eta, p1(l^{d-m} eta)] (dir = 1) and of
// eta_y = [eta, p1(i l^{d-m} eta)] (dir = i).
inline LaurentLoop finite_type_rhs(const EllipticContext& ec,
                                   const LaurentLoop& eta, Cplx dir) {
  const LaurentLoop xi = detail::shift(eta * dir, ec.d - ec.m);
  return detail::clip_window(
      detail::loop_bracket(eta, project_p1(ec.ctx.tau, xi)), ec.d);
}

// Integrate the finite-type ODE pair over the grid from eta = V at the grid
// origin: RK4 down the first column in y, then along each row in x.
inline FiniteTypeField finite_type_integrate(const EllipticContext& ec,
                                             const LaurentLoop& V,
                                             const GridDomain& dom) {
  if (V.lo < -ec.d || V.hi() > ec.d)
    throw SoltkError("finite_type_integrate: seed outside window [-d, d]");
  FiniteTypeField f;
  f.dom = dom;
  f.m = ec.m;
  f.d = ec.d;
  f.eta.assign(static_cast<size_t>(dom.nx) * dom.nt, LaurentLoop{});

  auto rk4 = [&](const LaurentLoop& y, double h, Cplx dir) {
    const LaurentLoop k1 = finite_type_rhs(ec, y, dir);
    const LaurentLoop k2 = finite_type_rhs(ec, y + k1 * Cplx(0.5 * h), dir);
    const LaurentLoop k3 = finite_type_rhs(ec, y + k2 * Cplx(0.5 * h), dir);
    const LaurentLoop k4 = finite_type_rhs(ec, y + k3 * Cplx(h), dir);
    return (y + (k1 + (k2 + k3) * Cplx(2.0) + k4) * Cplx(h / 6.0))
        .window(-ec.d, ec.d);
  };

  f.at(0, 0) = V.window(-ec.d, ec.d);
  for (int iy = 0; iy + 1 < dom.nt; ++iy)
    f.at(0, iy + 1) = rk4(f.at(0, iy), dom.dt(), Cplx(0, 1));
  for (int iy = 0; iy < dom.nt; ++iy)
    for (int ix = 0; ix + 1 < dom.nx; ++ix)
      f.at(ix + 1, iy) = rk4(f.at(ix, iy), dom.dx(), Cplx(1, 0));
  return f;
}

// Solution slots of the normalized system: v_j = eta_{m-d-j}, j = 1..m.
inline std::vector<MatGrid> extract_slots(const FiniteTypeField& f) {
  const int n = static_cast<int>(f.at(0, 0).coeff(0).rows());
  std::vector<MatGrid> v(f.m, MatGrid::zero(f.dom, n));
  for (int j = 1; j <= f.m; ++j)
    for (int iy = 0; iy < f.dom.nt; ++iy)
      for (int ix = 0; ix < f.dom.nx; ++ix)
        v[j - 1].at(ix, iy) = f.at(ix, iy).coeff(f.m - f.d - j);
  return v;
}

// Frame of the recovered Lax pair at a fixed lambda: F^{-1}F_x = p1(xi),
// F^{-1}F_y = p1(i xi) with xi = lambda^{d-m} eta, integrated through the
// laxflow machinery (flatness gate included).
inline FrameGrid recover_frame(const EllipticContext& ec,
                               const FiniteTypeField& f, Cplx lambda,
                               double gate = tol::flatness_gate) {
  const int n = static_cast<int>(f.at(0, 0).coeff(0).rows());
  ConnectionField conn;
  conn.dom = f.dom;
  conn.Ax.assign(static_cast<size_t>(f.dom.nx) * f.dom.nt, Mat::Zero(n, n));
  conn.At = conn.Ax;
  for (int iy = 0; iy < f.dom.nt; ++iy)
    for (int ix = 0; ix < f.dom.nx; ++ix) {
      const LaurentLoop xi = detail::shift(f.at(ix, iy), ec.d - ec.m);
      conn.Ax[iy * f.dom.nx + ix] = project_p1(ec.ctx.tau, xi).eval(lambda);
      conn.At[iy * f.dom.nx + ix] =
          project_p1(ec.ctx.tau, xi * Cplx(0, 1)).eval(lambda);
    }
  return integrate_frame(conn, Mat::Identity(n, n), gate);
}

// Residuals of the m-th (G,tau)-system displays. z-derivatives are realized
// as (d_x - i d_y)/2 on the grid; max over the interior.
struct GtauResidual {
  double residual = 0.0;
  double membership = 0.0;  // max G_{-j} defect when sigma is present
};

inline GtauResidual gtau_residual(const EllipticContext& ec,
                                  const std::vector<MatGrid>& slots,
                                  bool normalized, int margin = 3) {
  const auto& tau = ec.ctx.tau;
  const int m = ec.m;
  if (normalized ? static_cast<int>(slots.size()) != m
                 : static_cast<int>(slots.size()) != m + 1)
    throw SoltkError("gtau_residual: wrong slot count");
  const GridDomain& dom = slots.front().dom;
  const double hx = dom.dx(), hy = dom.dt();

  std::vector<MatGrid> dz, dzbar;
  for (const auto& s : slots) {
    const MatGrid sx = d_x(s, hx), sy = d_t(s, hy);
    MatGrid z = s, zb = s;
    for (size_t k = 0; k < z.m.size(); ++k) {
      z.m[k] = 0.5 * (sx.m[k] - Cplx(0, 1) * sy.m[k]);
      zb.m[k] = 0.5 * (sx.m[k] + Cplx(0, 1) * sy.m[k]);
    }
    dz.push_back(z);
    dzbar.push_back(zb);
  }

  GtauResidual out;
  for (int iy = margin; iy < dom.nt - margin; ++iy)
    for (int ix = margin; ix < dom.nx - margin; ++ix) {
      auto u = [&](int j) -> const Mat& { return slots[j].at(ix, iy); };
      if (normalized) {
        // (v_j)_zbar = sum_{i=1..m-j} [v_{i+j}, tau(v_i)]
        //            - sum_{i=1..m} [v_j, tau(v_i)], slots are v_1..v_m.
        for (int j = 1; j <= m; ++j) {
          Mat r = dzbar[j - 1].at(ix, iy);
          for (int i = 1; i <= m - j; ++i)
            r -= commutator(u(i + j - 1), tau.apply(u(i - 1)));
          for (int i = 1; i <= m; ++i)
            r += commutator(u(j - 1), tau.apply(u(i - 1)));
          out.residual = std::max(out.residual, fnorm(r));
        }
      } else {
        // Slots are u_0..u_m.
        for (int j = 1; j <= m; ++j) {
          Mat r = dzbar[j].at(ix, iy);
          for (int i = 0; i <= m - j; ++i)
            r -= commutator(u(i + j), tau.apply(u(i)));
          out.residual = std::max(out.residual, fnorm(r));
        }
        Mat r0 = dzbar[0].at(ix, iy) - tau.apply(dz[0].at(ix, iy));
        for (int i = 0; i <= m; ++i)
          r0 -= commutator(u(i), tau.apply(u(i)));
        out.residual = std::max(out.residual, fnorm(r0));
      }
      if (ec.ctx.sigma) {
        const int base = normalized ? 1 : 0;
        for (int j = 0; j < static_cast<int>(slots.size()); ++j) {
          const Mat& x = slots[j].at(ix, iy);
          out.membership = std::max(
              out.membership,
              fnorm(x - eigenspace_project(*ec.ctx.sigma, -(j + base), x)));
        }
      }
    }
  return out;
}

// Residual of the harmonic map equation A_zbar = -[A, tau(A)] with
// A = -(1/2) s^{-1} s_z for a group-valued grid s. Two derivative passes
// stack here, so the scored interior must clear twice the stencil width:
// with a smaller margin the one-sided boundary derivative of A leaks into
// the second pass and caps the observable order at one.
inline double harmonic_residual(const InvolutionSpec& tau, const MatGrid& s,
                                int margin = 6) {
  const GridDomain& dom = s.dom;
  const int n = static_cast<int>(s.m.front().rows());
  const MatGrid sx = d_x(s, dom.dx()), sy = d_t(s, dom.dt());
  MatGrid A = MatGrid::zero(dom, n);
  for (int iy = 0; iy < dom.nt; ++iy)
    for (int ix = 0; ix < dom.nx; ++ix) {
      const Mat sz = 0.5 * (sx.at(ix, iy) - Cplx(0, 1) * sy.at(ix, iy));
      A.at(ix, iy) = -0.5 * s.at(ix, iy).partialPivLu().solve(sz);
    }
  const MatGrid Ax = d_x(A, dom.dx()), Ay = d_t(A, dom.dt());
  double res = 0.0;
  for (int iy = margin; iy < dom.nt - margin; ++iy)
    for (int ix = margin; ix < dom.nx - margin; ++ix) {
      const Mat azb = 0.5 * (Ax.at(ix, iy) + Cplx(0, 1) * Ay.at(ix, iy));
      res = std::max(
          res, fnorm(azb + commutator(A.at(ix, iy), tau.apply(A.at(ix, iy)))));
    }
  return res;
}

}  // namespace soltk

#pragma once

// Geometric extractors: curved-flat tangents from the lambda-derivative of a
// frame, the Cartan-embedded flat, and harmonic maps from -1-flow frames.

#include "soltk/dressing.hpp"
#include "soltk/laxflow.hpp"

namespace soltk {

inline MatGrid sample_frame(const FrameFn& E, const GridDomain& dom, Cplx l) {
  MatGrid g;
  g.dom = dom;
  g.m.resize(static_cast<size_t>(dom.nx) * dom.nt);
  for (int it = 0; it < dom.nt; ++it)
    for (int ix = 0; ix < dom.nx; ++ix) g.at(ix, it) = E(dom.x(ix), dom.t(it), l);
  return g;
}

// Y = (dE/dlambda) E^{-1} at lambda = 0, by central difference in lambda.
inline MatGrid curved_flat_tangent(const FrameFn& E, const GridDomain& dom,
                                   double h = 1e-4) {
  MatGrid Y;
  Y.dom = dom;
  Y.m.resize(static_cast<size_t>(dom.nx) * dom.nt);
  for (int it = 0; it < dom.nt; ++it)
    for (int ix = 0; ix < dom.nx; ++ix) {
      const double x = dom.x(ix), t = dom.t(it);
      const Mat dE = (E(x, t, Cplx(h, 0)) - E(x, t, Cplx(-h, 0))) / (2.0 * h);
      const Mat E0 = E(x, t, Cplx(0, 0));
      if (!is_finite(E0)) throw SoltkError("curved_flat_tangent: pole at 0");
      Y.at(ix, it) = dE * E0.partialPivLu().inverse();
    }
  return Y;
}

// Maximum drift of the Gram matrix <Y_{x_i}, Y_{x_j}> (trace form) from
// <a_i, a_j> over the interior; the flat immersion keeps it constant.
inline double gram_drift(const std::vector<Mat>& basis_A, const MatGrid& Y,
                         int margin = 3) {
  if (basis_A.size() != 2)
    throw SoltkError("gram_drift: expects two coordinate directions");
  const GridDomain& dom = Y.dom;
  const MatGrid Y1 = d_x(Y, dom.dx()), Y2 = d_t(Y, dom.dt());
  double drift = 0.0;
  for (int it = margin; it < dom.nt - margin; ++it)
    for (int ix = margin; ix < dom.nx - margin; ++ix) {
      const Mat* t[2] = {&Y1.at(ix, it), &Y2.at(ix, it)};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          drift = std::max(drift,
                           std::abs(trace_form(*t[i], *t[j]) -
                                    trace_form(basis_A[i], basis_A[j])));
    }
  return drift;
}

// Cartan-embedded flat psi = E(x, 1) E(x, -1)^{-1}, with the defect of the
// Cartan-image identity psi = E(x, 1) sigma(E(x, 1))^{-1}.
struct CartanMap {
  MatGrid psi;
  double sigma_defect = 0.0;
};

inline CartanMap cartan_map(const FrameFn& E, const InvolutionSpec& sigma,
                            const GridDomain& dom) {
  CartanMap out;
  out.psi.dom = dom;
  out.psi.m.resize(static_cast<size_t>(dom.nx) * dom.nt);
  for (int it = 0; it < dom.nt; ++it)
    for (int ix = 0; ix < dom.nx; ++ix) {
      const double x = dom.x(ix), t = dom.t(it);
      const Mat E1 = E(x, t, Cplx(1, 0));
      const Mat Em = E(x, t, Cplx(-1, 0));
      const Mat psi = E1 * Em.partialPivLu().inverse();
      out.psi.at(ix, it) = psi;
      out.sigma_defect = std::max(
          out.sigma_defect,
          fnorm(psi - E1 * sigma.apply_group(E1).partialPivLu().inverse()));
    }
  return out;
}

// Structure of the flat: psi^{-1} dpsi = 2 sum_i E_{-1} a_i E_{-1}^{-1} dx_i.
inline double cartan_log_derivative_defect(const FrameFn& E,
                                           const std::vector<Mat>& basis_A,
                                           const MatGrid& psi, int margin = 3) {
  if (basis_A.size() != 2)
    throw SoltkError("cartan_log_derivative_defect: expects two directions");
  const GridDomain& dom = psi.dom;
  const MatGrid p1 = d_x(psi, dom.dx()), p2 = d_t(psi, dom.dt());
  double defect = 0.0;
  for (int it = margin; it < dom.nt - margin; ++it)
    for (int ix = margin; ix < dom.nx - margin; ++ix) {
      const Mat Em = E(dom.x(ix), dom.t(it), Cplx(-1, 0));
      const auto lu = psi.at(ix, it).partialPivLu();
      const Mat d1 = lu.solve(p1.at(ix, it));
      const Mat d2 = lu.solve(p2.at(ix, it));
      const Mat Em_inv = Em.partialPivLu().inverse();
      defect = std::max(defect, fnorm(d1 - 2.0 * Em * basis_A[0] * Em_inv));
      defect = std::max(defect, fnorm(d2 - 2.0 * Em * basis_A[1] * Em_inv));
    }
  return defect;
}

// Harmonic map from a -1-flow frame: s = E_{-1} E_1^{-1}, with the
// Lorentz-harmonic residual A_t = -B_x = [A, B], A = (1/2) s^{-1} s_x,
// B = (1/2) s^{-1} s_t.
struct HarmonicExtract {
  MatGrid s;
  double residual = 0.0;
};

// Two stacked derivative passes: the margin must clear twice the stencil
// width so one-sided boundary derivatives of A, B stay out of the score.
inline HarmonicExtract harmonic_from_minus1(const FrameFn& E,
                                            const GridDomain& dom,
                                            int margin = 6) {
  HarmonicExtract out;
  out.s.dom = dom;
  out.s.m.resize(static_cast<size_t>(dom.nx) * dom.nt);
  for (int it = 0; it < dom.nt; ++it)
    for (int ix = 0; ix < dom.nx; ++ix) {
      const double x = dom.x(ix), t = dom.t(it);
      out.s.at(ix, it) = E(x, t, Cplx(-1, 0)) *
                         E(x, t, Cplx(1, 0)).partialPivLu().inverse();
    }
  const int n = static_cast<int>(out.s.m.front().rows());
  const MatGrid sx = d_x(out.s, dom.dx()), st = d_t(out.s, dom.dt());
  MatGrid A = MatGrid::zero(dom, n), B = MatGrid::zero(dom, n);
  for (int it = 0; it < dom.nt; ++it)
    for (int ix = 0; ix < dom.nx; ++ix) {
      const auto lu = out.s.at(ix, it).partialPivLu();
      A.at(ix, it) = 0.5 * lu.solve(sx.at(ix, it));
      B.at(ix, it) = 0.5 * lu.solve(st.at(ix, it));
    }
  const MatGrid At = d_t(A, dom.dt()), Bx = d_x(B, dom.dx());
  for (int it = margin; it < dom.nt - margin; ++it)
    for (int ix = margin; ix < dom.nx - margin; ++ix) {
      const Mat br = commutator(A.at(ix, it), B.at(ix, it));
      out.residual = std::max({out.residual, fnorm(At.at(ix, it) - br),
                               fnorm(Bx.at(ix, it) + br)});
    }
  return out;
}

}  // namespace soltk

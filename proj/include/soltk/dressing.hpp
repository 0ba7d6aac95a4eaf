#pragma once

// Simple-pole dressing of frames: the three rational pole families, the
// transported projections, and the induced updates of the solutions.

#include "soltk/algebra.hpp"

#include <functional>
#include <vector>

namespace soltk {

// Frame as a closure (x, t, lambda) -> G.
using FrameFn = std::function<Mat(double, double, Cplx)>;

// Frame of the trivial solution of the (b,j)-flow: exp(a x lambda +
// b lambda^j t). Requires [a,b] = 0.
inline FrameFn vacuum_frame(const Mat& a, const Mat& b, int j) {
  if (fnorm(commutator(a, b)) > tol::symbolic_zero)
    throw SoltkError("vacuum_frame: [a,b] != 0");
  return [a, b, j](double x, double t, Cplx l) {
    return expm(a * (x * l) + b * (t * std::pow(l, Cplx(double(j)))));
  };
}

// Frame of the trivial -1-flow solution: exp(a x lambda + b t / lambda).
inline FrameFn vacuum_frame_minus1(const Mat& a, const Mat& b) {
  if (fnorm(commutator(a, b)) > tol::symbolic_zero)
    throw SoltkError("vacuum_frame: [a,b] != 0");
  return [a, b](double x, double t, Cplx l) {
    return expm(a * (x * l) + b * (t / l));
  };
}

// Hermitian projection onto the column span of V.
inline Mat hermitian_projection(const Mat& V) {
  Eigen::JacobiSVD<Mat> svd(V, Eigen::ComputeThinU);
  if (svd.singularValues().minCoeff() < tol::span_floor)
    throw SoltkError("hermitian_projection: degenerate span");
  const Mat Q = svd.matrixU();
  return Q * Q.adjoint();
}

// ---------------------------------------------------------------------------
// Pole-family loop values.
// ---------------------------------------------------------------------------

inline Cplx zeta_alpha(Cplx alpha, Cplx lambda) {
  return (lambda - alpha) * (std::conj(alpha) - 1.0) /
         ((std::conj(alpha) * lambda - 1.0) * (1.0 - alpha));
}

// f_{alpha,pi} = pi + zeta_alpha(lambda) pi_perp; unitary on |lambda| = 1.
inline Mat f_loop(Cplx alpha, const Mat& pi, Cplx lambda) {
  const Mat pp = Mat::Identity(pi.rows(), pi.cols()) - pi;
  return pi + zeta_alpha(alpha, lambda) * pp;
}
inline Mat f_loop_inv(Cplx alpha, const Mat& pi, Cplx lambda) {
  const Mat pp = Mat::Identity(pi.rows(), pi.cols()) - pi;
  return pi + pp / zeta_alpha(alpha, lambda);
}

// g_{is,pi} = pi + (lambda-is)/(lambda+is) (I - pi).
inline Mat g_loop(double s, const Mat& pi, Cplx lambda) {
  const Cplx is(0, s);
  const Mat pp = Mat::Identity(pi.rows(), pi.cols()) - pi;
  return pi + ((lambda - is) / (lambda + is)) * pp;
}
inline Mat g_loop_inv(double s, const Mat& pi, Cplx lambda) {
  const Cplx is(0, s);
  const Mat pp = Mat::Identity(pi.rows(), pi.cols()) - pi;
  return pi + ((lambda + is) / (lambda - is)) * pp;
}

// h_{is,pi} = g_{is,pi}(lambda) (conj(pi) + (lambda+is)/(lambda-is)
// (I - conj(pi))), the two-pole element of the twisted loop group.
inline Mat h_loop(double s, const Mat& pi, Cplx lambda) {
  return g_loop(s, pi, lambda) * g_loop(-s, pi.conjugate(), lambda);
}
inline Mat h_loop_inv(double s, const Mat& pi, Cplx lambda) {
  return g_loop_inv(-s, pi.conjugate(), lambda) * g_loop_inv(s, pi, lambda);
}

// ---------------------------------------------------------------------------
// Dressing transforms. Convention: factor g E = E~ g~(x,t) and read the new
// frame E~ = g E g~^{-1}; expanding g~ = I + g1/lambda + ... gives the field
// update u~ = u + [g1, a].
// ---------------------------------------------------------------------------

struct GDressed {
  FrameFn frame;
  std::function<Mat(double, double)> proj;     // transported projection
  std::function<Mat(double, double)> u_delta;  // [g1, a], g1 = -2is proj_perp
  // -1-flow companion update v -> (2 proj - I) v (2 proj - I).
  std::function<Mat(const Mat&, double, double)> v_conj;
};

inline GDressed dress_g(const Mat& a, const FrameFn& E, double s,
                        const Mat& V0) {
  if (s == 0.0) throw SoltkError("dress_g: pole must be off the real axis");
  const Mat pi0 = hermitian_projection(V0);
  const int n = static_cast<int>(a.rows());
  auto proj = [E, s, V0](double x, double t) {
    const Mat Ev = E(x, t, Cplx(0, -s));
    return hermitian_projection(Ev.partialPivLu().solve(V0));
  };
  GDressed out;
  out.proj = proj;
  out.frame = [E, s, pi0, proj](double x, double t, Cplx l) -> Mat {
    return g_loop(s, pi0, l) * E(x, t, l) * g_loop_inv(s, proj(x, t), l);
  };
  out.u_delta = [a, s, proj, n](double x, double t) {
    const Mat g1 = Cplx(0, -2.0 * s) * (Mat::Identity(n, n) - proj(x, t));
    return commutator(g1, a);
  };
  out.v_conj = [proj, n](const Mat& v, double x, double t) {
    const Mat r = 2.0 * proj(x, t) - Mat::Identity(n, n);
    return Mat(r * v * r);
  };
  return out;
}

// Sequential dressing by simple poles is_1, ..., is_m (distinct), each with
// its own initial span. Returns the final frame and the summed u update.
inline GDressed multi_dress_g(const Mat& a, const FrameFn& E0,
                              const std::vector<std::pair<double, Mat>>& poles) {
  for (size_t i = 0; i < poles.size(); ++i)
    for (size_t j = i + 1; j < poles.size(); ++j)
      if (std::abs(poles[i].first - poles[j].first) < tol::lambda_pairing)
        throw SoltkError("multi_dress_g: poles must be distinct");
  FrameFn frame = E0;
  std::vector<std::function<Mat(double, double)>> deltas;
  std::function<Mat(const Mat&, double, double)> vconj =
      [](const Mat& v, double, double) { return v; };
  std::function<Mat(double, double)> proj;
  for (const auto& [s, V] : poles) {
    GDressed step = dress_g(a, frame, s, V);
    frame = step.frame;
    deltas.push_back(step.u_delta);
    proj = step.proj;
    auto prev = vconj;
    auto vc = step.v_conj;
    vconj = [prev, vc](const Mat& v, double x, double t) {
      return vc(prev(v, x, t), x, t);
    };
  }
  GDressed out;
  out.frame = frame;
  out.proj = proj;
  out.u_delta = [deltas, n = static_cast<int>(a.rows())](double x, double t) {
    Mat acc = Mat::Zero(n, n);
    for (const auto& d : deltas) acc += d(x, t);
    return acc;
  };
  out.v_conj = vconj;
  return out;
}

struct FDressed {
  FrameFn frame;
  std::function<Mat(double, double)> proj;  // transported projection
};

// Dressing with f_{alpha,pi} for frames satisfying the 1/conj(lambda)
// reality condition; the transported span is conj(E(alpha))^t V.
inline FDressed dress_f(const FrameFn& E, Cplx alpha, const Mat& V0) {
  if (std::abs(std::abs(alpha) - 1.0) < tol::lambda_pairing)
    throw SoltkError("dress_f: pole must be off the unit circle");
  const Mat pi0 = hermitian_projection(V0);
  auto proj = [E, alpha, V0](double x, double t) {
    return hermitian_projection(E(x, t, alpha).adjoint() * V0);
  };
  FDressed out;
  out.proj = proj;
  out.frame = [E, alpha, pi0, proj](double x, double t, Cplx l) -> Mat {
    return f_loop(alpha, pi0, l) * E(x, t, l) *
           f_loop_inv(alpha, proj(x, t), l);
  };
  return out;
}

struct HDressed {
  FrameFn frame;
  std::function<Mat(double, double)> proj;        // pitilde
  std::function<Mat(double, double)> F_delta;     // F~ - F (n x n)
  std::function<Vec(double, double)> span_vector; // (W~; iZ~)
};

// Dressing with the two-pole element h_{is,pi}; pi projects onto the span
// of (W; iZ) with W, Z real unit vectors. The off-diagonal field update is
//   F~ = F - 4s phi(W~ Z~^t) / (|W~|^2 + |Z~|^2),
// phi zeroing the diagonal.
inline HDressed dress_h(const FrameFn& E, double s, const Vec& W,
                        const Vec& Z) {
  if (s == 0.0) throw SoltkError("dress_h: pole must be off the real axis");
  const int n = static_cast<int>(W.size());
  Vec v0(2 * n);
  v0.head(n) = W;
  v0.tail(n) = Cplx(0, 1) * Z;
  const Mat pi0 = hermitian_projection(v0);
  auto span_vector = [E, s, v0](double x, double t) {
    return Vec(E(x, t, Cplx(0, -s)).partialPivLu().solve(v0));
  };
  auto proj = [span_vector](double x, double t) {
    return hermitian_projection(span_vector(x, t));
  };
  HDressed out;
  out.proj = proj;
  out.span_vector = span_vector;
  out.frame = [E, s, pi0, proj](double x, double t, Cplx l) -> Mat {
    return h_loop(s, pi0, l) * E(x, t, l) * h_loop_inv(s, proj(x, t), l);
  };
  out.F_delta = [span_vector, s, n](double x, double t) {
    const Vec v = span_vector(x, t);
    const Vec Wt = v.head(n);
    const Vec Zt = -Cplx(0, 1) * v.tail(n);
    const double norm2 = v.squaredNorm();
    Mat d = -4.0 * s * (Wt * Zt.transpose()) / norm2;
    for (int i = 0; i < n; ++i) d(i, i) = 0.0;
    return d;
  };
  return out;
}

}  // namespace soltk

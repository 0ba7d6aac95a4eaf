#pragma once

// Birkhoff factorization of loops sampled on the unit circle, and the
// Goursat-data solver for the -1-flow built on top of it.

#include "soltk/laxflow.hpp"
#include "soltk/loop.hpp"

#include <functional>
#include <vector>

namespace soltk {

struct BirkhoffFactors {
  LaurentLoop plus;       // nonnegative powers
  LaurentLoop minus;      // I + strictly negative powers
  LaurentLoop minus_inv;  // I + strictly negative powers
  double condition = 0.0;
};

namespace detail {
// Invert I + sum_{k>=1} c_k z^k as a truncated power series in z (here
// z = 1/lambda): d_m = -c_m - sum_{k<m} c_k d_{m-k}.
inline std::vector<Mat> series_inverse(const std::vector<Mat>& c) {
  const int K = static_cast<int>(c.size());
  const int n = K ? static_cast<int>(c[0].rows()) : 0;
  std::vector<Mat> d(K, Mat::Zero(n, n));
  for (int m = 1; m <= K; ++m) {
    Mat acc = -c[m - 1];
    for (int k = 1; k < m; ++k) acc -= c[k - 1] * d[m - k - 1];
    d[m - 1] = acc;
  }
  return d;
}
}  // namespace detail

// Factor g = g_+ g_- from samples at the N-th roots of unity, with
// g_-(infinity) = I and g_- carrying K negative powers. Loops off the big
// cell (or windows too small for the loop) surface as an ill-conditioned
// block-Toeplitz system and raise SoltkError.
inline BirkhoffFactors birkhoff_factor_samples(const std::vector<Mat>& samples,
                                               int K) {
  const int N = static_cast<int>(samples.size());
  const int n = static_cast<int>(samples.front().rows());
  if (2 * K >= N) throw SoltkError("birkhoff_factor: K too large for N");
  LaurentLoop g;
  {
    // Direct DFT of the provided samples.
    const int klo = -N / 2, khi = klo + N - 1;
    g.lo = klo;
    g.c.assign(N, Mat::Zero(n, n));
    for (int k = klo; k <= khi; ++k) {
      Mat acc = Mat::Zero(n, n);
      for (int s = 0; s < N; ++s)
        acc += samples[s] *
               std::polar(1.0, -2.0 * std::numbers::pi * k * s / N);
      g.c[k - klo] = acc / static_cast<double>(N);
    }
  }

  // Solve sum_{k=1..K} g_{k-m} c_k = -g_{-m} for m = 1..K; the c_k are the
  // coefficients of g_-^{-1} = I + sum c_k lambda^{-k}.
  const int B = n * K;
  Eigen::MatrixXcd M(B, B);
  Eigen::MatrixXcd rhs(B, n);
  for (int m = 1; m <= K; ++m) {
    for (int k = 1; k <= K; ++k)
      M.block((m - 1) * n, (k - 1) * n, n, n) = g.coeff(k - m);
    rhs.block((m - 1) * n, 0, n, n) = -g.coeff(-m);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU |
                                                Eigen::ComputeThinV);
  const double smin = svd.singularValues()(B - 1);
  const double cond = smin > 0 ? svd.singularValues()(0) / smin
                               : std::numeric_limits<double>::infinity();
  if (cond > tol::toeplitz_condition)
    throw SoltkError(
        "birkhoff_factor: block-Toeplitz system is ill conditioned (" +
        std::to_string(cond) + "); loop is off the big cell or the window "
        "is too small");
  const Eigen::MatrixXcd sol = svd.solve(rhs);

  BirkhoffFactors out;
  out.condition = cond;
  std::vector<Mat> c(K);
  for (int k = 1; k <= K; ++k) c[k - 1] = sol.block((k - 1) * n, 0, n, n);

  out.minus_inv.lo = -K;
  out.minus_inv.c.assign(K + 1, Mat());
  out.minus_inv.c[K] = Mat::Identity(n, n);
  for (int k = 1; k <= K; ++k) out.minus_inv.c[K - k] = c[k - 1];

  const std::vector<Mat> d = detail::series_inverse(c);
  out.minus.lo = -K;
  out.minus.c.assign(K + 1, Mat());
  out.minus.c[K] = Mat::Identity(n, n);
  for (int k = 1; k <= K; ++k) out.minus.c[K - k] = d[k - 1];

  out.plus = (g * out.minus_inv).window(0, N / 2 - 1).trimmed(0.0);
  return out;
}

inline BirkhoffFactors birkhoff_factor(const std::function<Mat(Cplx)>& g,
                                       int n, int N = 64, int K = 16) {
  std::vector<Mat> samples(N);
  for (int s = 0; s < N; ++s)
    samples[s] = g(std::polar(1.0, 2.0 * std::numbers::pi * s / N));
  (void)n;
  return birkhoff_factor_samples(samples, K);
}

// ---------------------------------------------------------------------------
// Goursat-data solver for the -1-flow u_t = [a, v], v_x = -[u, v].
//
// Data: xi(x) = u(x, 0) and eta(t) = v(0, t). Build
//   (L_+)_x = L_+ (a lambda + xi(x)),  L_+(0) = I,
//   (L_-)_t = L_- (lambda^{-1} eta(t)), L_-(0) = I,
// then at each gridpoint factor M = L_-^{-1} L_+ = V_+ V_-^{-1} with
// V_- = I + m_1 lambda^{-1} + ... and read off
//   u = xi + [a, m_1],   v = g_0^{-1} eta(t) g_0  (g_0 = V_+(0)).
// ---------------------------------------------------------------------------

struct GoursatResult {
  MatGrid u, v;
  double max_condition = 0.0;
};

inline GoursatResult goursat_solve(const Mat& a,
                                   const std::function<Mat(double)>& xi,
                                   const std::function<Mat(double)>& eta,
                                   const GridDomain& dom, int N = 32,
                                   int K = 8) {
  const int n = static_cast<int>(a.rows());
  std::vector<Cplx> circle(N);
  for (int s = 0; s < N; ++s)
    circle[s] = std::polar(1.0, 2.0 * std::numbers::pi * s / N);

  // RK4 with exact midpoint coefficients, per circle sample.
  auto propagate = [&](const std::function<Mat(double, Cplx)>& A, double y0,
                       double h, int ny, Cplx lambda) {
    std::vector<Mat> L(ny);
    L[0] = Mat::Identity(n, n);
    for (int i = 0; i + 1 < ny; ++i) {
      const double y = y0 + i * h;
      const Mat A0 = A(y, lambda), Am = A(y + 0.5 * h, lambda),
                A1 = A(y + h, lambda);
      const Mat k1 = L[i] * A0;
      const Mat k2 = (L[i] + 0.5 * h * k1) * Am;
      const Mat k3 = (L[i] + 0.5 * h * k2) * Am;
      const Mat k4 = (L[i] + h * k3) * A1;
      L[i + 1] = L[i] + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return L;
  };

  // L_plus[ix][s], L_minus[it][s].
  std::vector<std::vector<Mat>> Lp(dom.nx, std::vector<Mat>(N));
  std::vector<std::vector<Mat>> Lm(dom.nt, std::vector<Mat>(N));
  for (int s = 0; s < N; ++s) {
    const auto col = propagate(
        [&](double x, Cplx l) -> Mat { return a * l + xi(x); }, dom.x0,
        dom.dx(), dom.nx, circle[s]);
    for (int ix = 0; ix < dom.nx; ++ix) Lp[ix][s] = col[ix];
    const auto row = propagate(
        [&](double t, Cplx l) -> Mat { return eta(t) / l; }, dom.t0, dom.dt(),
        dom.nt, circle[s]);
    for (int it = 0; it < dom.nt; ++it) Lm[it][s] = row[it];
  }

  GoursatResult out;
  out.u = MatGrid::zero(dom, n);
  out.v = MatGrid::zero(dom, n);
  std::vector<Mat> samples(N);
  for (int it = 0; it < dom.nt; ++it) {
    const Mat eta_t = eta(dom.t(it));
    for (int ix = 0; ix < dom.nx; ++ix) {
      for (int s = 0; s < N; ++s)
        samples[s] = Lm[it][s].partialPivLu().solve(Lp[ix][s]);
      const BirkhoffFactors f = birkhoff_factor_samples(samples, K);
      out.max_condition = std::max(out.max_condition, f.condition);
      // M = V_+ V_-^{-1} against the plus*minus layout of the factorizer:
      // V_- is the loop that multiplies M into the plus part, which is the
      // stored minus_inv.
      const Mat m1 = f.minus_inv.coeff(-1);
      out.u.at(ix, it) = xi(dom.x(ix)) + commutator(a, m1);
      // phi = L_- V_+ gives phi^{-1} phi_t = V_+^{-1} (lambda^{-1} eta) V_+
      // plus plus-powers, so v is eta conjugated by the inverse of the
      // constant term of V_+.
      const Mat g0 = f.plus.coeff(0);
      out.v.at(ix, it) = g0.partialPivLu().solve(eta_t) * g0;
    }
  }
  return out;
}

}  // namespace soltk

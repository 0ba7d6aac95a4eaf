#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soltk/birkhoff.hpp"

#include <cmath>
#include <random>

using namespace soltk;

namespace {
const Cplx I(0, 1);

// Random loop I + eps * (window [-2, 2] of random coefficients).
LaurentLoop random_near_identity(int n, double eps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  LaurentLoop g;
  g.lo = -2;
  for (int k = -2; k <= 2; ++k) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = eps * Cplx(d(rng), d(rng));
    if (k == 0) m += Mat::Identity(n, n);
    g.c.push_back(m);
  }
  return g;
}

double factor_residual(const LaurentLoop& g, const BirkhoffFactors& f,
                       int N = 256) {
  double res = 0.0;
  for (int s = 0; s < N; ++s) {
    const Cplx l = std::polar(1.0, 2.0 * std::numbers::pi * (s + 0.5) / N);
    res = std::max(res, fnorm(g.eval(l) - f.plus.eval(l) * f.minus.eval(l)));
  }
  return res;
}
}  // namespace

TEST_CASE("random near-identity loops factor with small residual") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + (trial % 2);
    const auto g = random_near_identity(n, 0.08, rng);
    const auto f =
        birkhoff_factor([&](Cplx l) { return g.eval(l); }, n, 64, 24);
    CHECK(factor_residual(g, f) < 1e-8);
    // Normalization: g_- = I + strictly negative powers.
    CHECK(fnorm(f.minus.coeff(0) - Mat::Identity(n, n)) < 1e-10);
    CHECK(f.minus.hi() == 0);
    CHECK(f.plus.lo >= 0);
  }
}

TEST_CASE("factorization is idempotent on a plus loop") {
  std::mt19937_64 rng(31);
  const auto g = random_near_identity(2, 0.05, rng);
  const auto f = birkhoff_factor([&](Cplx l) { return g.eval(l); }, 2, 64, 16);
  // Factor g_+ again: the minus factor must be the identity.
  const auto f2 =
      birkhoff_factor([&](Cplx l) { return f.plus.eval(l); }, 2, 64, 16);
  double minus_mass = 0.0;
  for (int k = 1; k <= 16; ++k) minus_mass += fnorm(f2.minus.coeff(-k));
  CHECK(minus_mass < 1e-10);
  CHECK(factor_residual(f.plus, f2) < 1e-10);
}

TEST_CASE("diag(lambda, 1/lambda) is off the big cell and is rejected") {
  auto g = [](Cplx l) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = l;
    m(1, 1) = 1.0 / l;
    return m;
  };
  CHECK_THROWS_AS(birkhoff_factor(g, 2, 64, 16), SoltkError);
}

TEST_CASE("minus_inv is the series inverse of minus") {
  std::mt19937_64 rng(37);
  const auto g = random_near_identity(3, 0.06, rng);
  const auto f = birkhoff_factor([&](Cplx l) { return g.eval(l); }, 3, 64, 16);
  double res = 0.0;
  for (int s = 0; s < 64; ++s) {
    const Cplx l = std::polar(1.0, 2.0 * std::numbers::pi * (s + 0.3) / 64);
    res = std::max(
        res, fnorm(f.minus.eval(l) * f.minus_inv.eval(l) - Mat::Identity(3, 3)));
  }
  // The product is exact up to the truncated tail of the series inverse.
  CHECK(res < 1e-8);
}

TEST_CASE("Goursat solver: vacuum data reproduces the vacuum") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = I;
  a(1, 1) = -I;
  const Mat b = -0.25 * a;
  const GridDomain dom{17, 17, 0.0, 0.4, 0.0, 0.4};
  const auto r = goursat_solve(
      a, [&](double) { return Mat(Mat::Zero(2, 2)); },
      [&](double) { return b; }, dom, 32, 8);
  double du = 0.0, dv = 0.0;
  for (int it = 0; it < dom.nt; ++it)
    for (int ix = 0; ix < dom.nx; ++ix) {
      du = std::max(du, fnorm(r.u.at(ix, it)));
      dv = std::max(dv, fnorm(r.v.at(ix, it) - b));
    }
  CHECK(du < 1e-9);
  CHECK(dv < 1e-9);
}

TEST_CASE("Goursat solver: sine-Gordon kink from its axis restrictions") {
  // Kink q = 4 arctan(exp(x + t)); u = (1/2) offdiag(q_x, -q_x),
  // v = -(i/4)[[cos q, sin q],[sin q, -cos q]].
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = I;
  a(1, 1) = -I;
  auto u_of = [](double x, double t) {
    const double qx = 2.0 / std::cosh(x + t);
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = 0.5 * qx;
    m(1, 0) = -0.5 * qx;
    return m;
  };
  auto v_of = [&](double x, double t) {
    const double q = 4.0 * std::atan(std::exp(x + t));
    Mat m(2, 2);
    m(0, 0) = -0.25 * I * std::cos(q);
    m(0, 1) = -0.25 * I * std::sin(q);
    m(1, 0) = -0.25 * I * std::sin(q);
    m(1, 1) = 0.25 * I * std::cos(q);
    return m;
  };
  const GridDomain dom{17, 17, 0.0, 0.4, 0.0, 0.4};
  const auto r = goursat_solve(
      a, [&](double x) { return u_of(x, 0.0); },
      [&](double t) { return v_of(0.0, t); }, dom, 32, 8);

  // Initial data reproduction on the axes.
  double init = 0.0;
  for (int ix = 0; ix < dom.nx; ++ix)
    init = std::max(init, fnorm(r.u.at(ix, 0) - u_of(dom.x(ix), 0.0)));
  for (int it = 0; it < dom.nt; ++it)
    init = std::max(init, fnorm(r.v.at(0, it) - v_of(0.0, dom.t(it))));
  CHECK(init < 1e-6);

  // Interior agreement with the closed-form kink.
  double du = 0.0, dv = 0.0;
  for (int it = 0; it < dom.nt; ++it)
    for (int ix = 0; ix < dom.nx; ++ix) {
      du = std::max(du, fnorm(r.u.at(ix, it) - u_of(dom.x(ix), dom.t(it))));
      dv = std::max(dv, fnorm(r.v.at(ix, it) - v_of(dom.x(ix), dom.t(it))));
    }
  CHECK(du < 1e-4);
  CHECK(dv < 1e-4);

  // The -1-flow pair residual of the reconstructed fields.
  CHECK(minus1_residual(a, r.u, r.v) < 1e-4);

  // Spectrum of v is conserved (eigenvalues +-i/4).
  double spec = 0.0;
  for (int it = 0; it < dom.nt; ++it)
    for (int ix = 0; ix < dom.nx; ++ix) {
      Eigen::ComplexEigenSolver<Mat> es(r.v.at(ix, it));
      const double m0 = std::abs(es.eigenvalues()(0));
      const double m1 = std::abs(es.eigenvalues()(1));
      spec = std::max({spec, std::abs(m0 - 0.25), std::abs(m1 - 0.25)});
    }
  CHECK(spec < 1e-6);
}

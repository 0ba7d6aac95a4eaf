#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soltk/elliptic.hpp"

#include <random>

// Randomized structural invariants of the graded algebra machinery. Each
// suite draws 1000 cases from a fixed seed; a single violation fails.

using namespace soltk;

namespace {

constexpr int kCases = 1000;

Mat rand_mat(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Cplx(d(rng), d(rng));
  return m;
}

struct GradedCase {
  AlgebraContext ctx;
  InvolutionSpec sigma;
};

// Contexts with an automorphism of order > 1, spanning orders 3, 4 and 6.
std::vector<GradedCase> graded_contexts() {
  std::vector<GradedCase> out;
  for (const char* id : {"sl3-tzitzeica", "sln-toda", "o4-grassmann"}) {
    auto ctx = make_context(id);
    REQUIRE(ctx.sigma.has_value());
    out.push_back({ctx, *ctx.sigma});
  }
  return out;
}

}  // namespace

TEST_CASE("eigenspace projections resolve the identity") {
  auto cases = graded_contexts();
  std::mt19937_64 rng(101);
  int failures = 0;
  for (int c = 0; c < kCases; ++c) {
    const auto& gc = cases[c % cases.size()];
    const Mat x = rand_mat(gc.ctx.dim, rng);
    Mat sum = Mat::Zero(gc.ctx.dim, gc.ctx.dim);
    for (int j = 0; j < gc.sigma.order; ++j)
      sum += eigenspace_project(gc.sigma, j, x);
    if (fnorm(sum - x) > 1e-12 * (1.0 + fnorm(x))) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("eigenspace projections are idempotent and mutually annihilating") {
  auto cases = graded_contexts();
  std::mt19937_64 rng(102);
  int failures = 0;
  for (int c = 0; c < kCases; ++c) {
    const auto& gc = cases[c % cases.size()];
    const Mat x = rand_mat(gc.ctx.dim, rng);
    const int k = gc.sigma.order;
    const int j = c % k;
    const Mat p = eigenspace_project(gc.sigma, j, x);
    if (fnorm(eigenspace_project(gc.sigma, j, p) - p) > 1e-12) ++failures;
    if (fnorm(eigenspace_project(gc.sigma, (j + 1) % k, p)) > 1e-12)
      ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("bracket respects the grading: [G_j, G_r] lies in G_{j+r}") {
  auto cases = graded_contexts();
  std::mt19937_64 rng(103);
  int failures = 0;
  for (int c = 0; c < kCases; ++c) {
    const auto& gc = cases[c % cases.size()];
    const int k = gc.sigma.order;
    const int j = c % k, r = (c / k) % k;
    const Mat xj = eigenspace_project(gc.sigma, j, rand_mat(gc.ctx.dim, rng));
    const Mat xr = eigenspace_project(gc.sigma, r, rand_mat(gc.ctx.dim, rng));
    const Mat br = commutator(xj, xr);
    const Mat proj = eigenspace_project(gc.sigma, (j + r) % k, br);
    if (fnorm(br - proj) > 1e-11 * (1.0 + fnorm(br))) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("tau maps G_j to G_{-j}") {
  // Real forms compatible with the grading: sigma tau = tau sigma^{-1}
  // at the algebra level.
  std::vector<GradedCase> cases;
  {
    auto ctx = make_context("sl3-tzitzeica");
    cases.push_back({ctx, *ctx.sigma});
  }
  {
    // Elliptic Toda real form: compact tau with the conjugate-power Ad(C).
    auto ctx = make_context("sln-toda");
    ctx.tau = InvolutionSpec(InvolutionKind::NegConjTranspose, 2);
    const Cplx alpha = std::polar(1.0, -2.0 * std::numbers::pi / 3.0);
    Mat C = Mat::Zero(3, 3);
    C(0, 0) = 1.0;
    C(1, 1) = alpha;
    C(2, 2) = alpha * alpha;
    ctx.sigma = InvolutionSpec(InvolutionKind::AdC, 3, C);
    cases.push_back({ctx, *ctx.sigma});
  }
  {
    auto ctx = make_context("o4-grassmann");
    cases.push_back({ctx, *ctx.sigma});
  }
  std::mt19937_64 rng(104);
  int failures = 0;
  for (int c = 0; c < kCases; ++c) {
    const auto& gc = cases[c % cases.size()];
    const int k = gc.sigma.order;
    const int j = c % k;
    const Mat xj = eigenspace_project(gc.sigma, j, rand_mat(gc.ctx.dim, rng));
    const Mat tx = gc.ctx.tau.apply(xj);
    const Mat proj = eigenspace_project(gc.sigma, ((-j) % k + k) % k, tx);
    if (fnorm(tx - proj) > 1e-11 * (1.0 + fnorm(tx))) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("loop splitting: p1 + p2 = id and both parts are idempotent") {
  auto ctx = make_context("sl2-su2");
  std::mt19937_64 rng(105);
  std::uniform_int_distribution<int> width(0, 3);
  int failures = 0;
  for (int c = 0; c < kCases; ++c) {
    const int lo = -1 - width(rng), hi = 1 + width(rng);
    std::vector<Mat> coeffs;
    for (int j = lo; j <= hi; ++j) coeffs.push_back(rand_mat(2, rng));
    const LaurentLoop xi(lo, coeffs);
    const LaurentLoop p1 = project_p1(ctx.tau, xi);
    const LaurentLoop p2 = project_p2(ctx.tau, xi);
    const double scale = 1.0 + xi.norm();
    if ((p1 + p2 - xi).norm() > 1e-12 * scale) ++failures;
    if ((project_p1(ctx.tau, p1) - p1).norm() > 1e-12 * scale) ++failures;
    if ((project_p2(ctx.tau, p2) - p2).norm() > 1e-12 * scale) ++failures;
    // p1 lands in the twisted-negative factor: it vanishes at lambda = 1.
    if (fnorm(p1.eval(Cplx(1, 0))) > 1e-11 * scale) ++failures;
  }
  CHECK(failures == 0);
}

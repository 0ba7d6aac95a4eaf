#pragma once

// Matrix Lie algebra contexts: brackets, involutions, eigenspace
// decompositions, centralizer splitting, reality-condition checks, and the
// named catalog of contexts used throughout the toolkit.

#include "soltk/common.hpp"
#include "soltk/exact.hpp"
#include "soltk/involution.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace soltk {

// Exact data backing the symbolic recursion for a catalog context. All
// catalog matrices have small Gaussian-rational entries, so this always
// exists for catalog entries.
struct ExactAlgebraData {
  int dim = 0;
  ExactMat a, b;
  std::vector<ExactMat> basis_cent, basis_perp;

  // Left inverse of the vectorized-basis matrix: coords(k) of X in the
  // ordered basis (cent then perp) are sum_e L(k,e) * vec(X)(e).
  ExactMat L;               // nb x dim^2
  ExactMat ad_a_perp;       // np x np, ad(a) in perp coordinates
  ExactMat ad_a_perp_inv;   // np x np

  int n_cent() const { return static_cast<int>(basis_cent.size()); }
  int n_perp() const { return static_cast<int>(basis_perp.size()); }
  int n_basis() const { return n_cent() + n_perp(); }

  const ExactMat& basis(int k) const {
    return k < n_cent() ? basis_cent[k] : basis_perp[k - n_cent()];
  }

  void finalize() {
    const int nb = n_basis(), d2 = dim * dim;
    // Stack vectorized basis elements as columns of B (d2 x nb).
    ExactMat B(d2, nb);
    for (int k = 0; k < nb; ++k) {
      const ExactMat& m = basis(k);
      for (int e = 0; e < d2; ++e) B(e, k) = m.e[e];
    }
    // Greedy selection of nb independent rows of B (exact rank tests).
    std::vector<int> pivot_rows;
    std::vector<std::vector<GaussRat>> rows_kept;
    for (int r = 0; r < d2 && static_cast<int>(pivot_rows.size()) < nb; ++r) {
      std::vector<std::vector<GaussRat>> trial = rows_kept;
      std::vector<GaussRat> rr(nb);
      for (int c = 0; c < nb; ++c) rr[c] = B(r, c);
      trial.push_back(rr);
      // Exact rank test by elimination.
      auto work = trial;
      int rank = 0;
      const int nr = static_cast<int>(work.size());
      for (int c = 0; c < nb && rank < nr; ++c) {
        int p = -1;
        for (int k = rank; k < nr; ++k)
          if (!work[k][c].is_zero()) {
            p = k;
            break;
          }
        if (p < 0) continue;
        std::swap(work[rank], work[p]);
        const GaussRat inv = GaussRat(1) / work[rank][c];
        for (int c2 = 0; c2 < nb; ++c2) work[rank][c2] *= inv;
        for (int k = 0; k < nr; ++k) {
          if (k == rank || work[k][c].is_zero()) continue;
          const GaussRat f = work[k][c];
          for (int c2 = 0; c2 < nb; ++c2)
            work[k][c2] -= f * work[rank][c2];
        }
        ++rank;
      }
      if (rank == nr) {
        rows_kept = trial;
        pivot_rows.push_back(r);
      }
    }
    if (static_cast<int>(pivot_rows.size()) != nb)
      throw SoltkError("ExactAlgebraData: basis does not span");
    ExactMat Bp(nb, nb);
    for (int i = 0; i < nb; ++i)
      for (int k = 0; k < nb; ++k) Bp(i, k) = B(pivot_rows[i], k);
    const ExactMat Bp_inv = exact_solve(Bp, ExactMat::identity(nb));
    L = ExactMat(nb, d2);
    for (int k = 0; k < nb; ++k)
      for (int i = 0; i < nb; ++i) L(k, pivot_rows[i]) = Bp_inv(k, i);

    // ad(a) on the perp span, in perp coordinates (exact).
    const int np = n_perp(), nc = n_cent();
    ad_a_perp = ExactMat(np, np);
    for (int j = 0; j < np; ++j) {
      const ExactMat img = exact_commutator(a, basis_perp[j]);
      for (int i = 0; i < np; ++i) {
        GaussRat c;
        for (int e = 0; e < d2; ++e) c += L(nc + i, e) * img.e[e];
        ad_a_perp(i, j) = c;
      }
      // Consistency: ad(a) must preserve the perp span exactly.
      ExactMat recon = ExactMat::zero(dim);
      for (int i = 0; i < np; ++i) recon = recon + ad_a_perp(i, j) * basis_perp[i];
      for (int i = 0; i < nc; ++i) {
        GaussRat c;
        for (int e = 0; e < d2; ++e) c += L(i, e) * img.e[e];
        recon = recon + c * basis_cent[i];
      }
      if (!(recon == img))
        throw SoltkError("ExactAlgebraData: ad(a) leaves the basis span");
    }
    ad_a_perp_inv = exact_solve(ad_a_perp, ExactMat::identity(np));
  }
};

struct AlgebraContext {
  std::string id;
  int dim = 0;
  InvolutionSpec tau;                   // antilinear, order 2
  std::optional<InvolutionSpec> sigma;  // linear, order k
  Mat a, b;
  std::vector<Mat> basis_cent, basis_perp;
  std::vector<Mat> basis_A;  // maximal-abelian basis for U/U0 n-tuples
  std::shared_ptr<const ExactAlgebraData> exact;

  double ada_condition = 0.0;

  // Numeric machinery (built once).
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> coord_solver_;
  Eigen::MatrixXcd ad_a_perp_inv_num_;

  int n_cent() const { return static_cast<int>(basis_cent.size()); }
  int n_perp() const { return static_cast<int>(basis_perp.size()); }
  int n_basis() const { return n_cent() + n_perp(); }

  void finalize() {
    const int nb = n_basis(), d2 = dim * dim;
    Eigen::MatrixXcd B(d2, nb);
    for (int k = 0; k < nb; ++k) {
      const Mat& m = k < n_cent() ? basis_cent[k] : basis_perp[k - n_cent()];
      B.col(k) = Eigen::Map<const Vec>(m.data(), d2);
    }
    coord_solver_.compute(B);
    if (coord_solver_.rank() < nb)
      throw SoltkError("AlgebraContext: basis not independent");

    // ad(a) in perp coordinates; condition number via SVD.
    const int np = n_perp();
    Eigen::MatrixXcd M(np, np);
    for (int j = 0; j < np; ++j) {
      const Vec c = coords(commutator(a, basis_perp[j]));
      for (int i = 0; i < np; ++i) M(i, j) = c(n_cent() + i);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU |
                                                  Eigen::ComputeThinV);
    const double smin = svd.singularValues()(np - 1);
    ada_condition = smin > 0 ? svd.singularValues()(0) / smin
                             : std::numeric_limits<double>::infinity();
    if (ada_condition > tol::ada_condition)
      throw SoltkError("AlgebraContext: a is not regular (ad(a) condition " +
                       std::to_string(ada_condition) + ")");
    ad_a_perp_inv_num_ = M.inverse();

    // Structural invariants.
    if (fnorm(commutator(a, b)) > tol::symbolic_zero)
      throw SoltkError("AlgebraContext: [a,b] != 0");
    for (const auto& c : basis_cent)
      for (const auto& p : basis_perp)
        if (std::abs(trace_form(c, p)) > tol::symbolic_zero)
          throw SoltkError("AlgebraContext: cent/perp not trace-orthogonal");
  }

  // Coordinates of X in the ordered basis (cent then perp).
  Vec coords(const Mat& x) const {
    return coord_solver_.solve(Eigen::Map<const Vec>(x.data(), dim * dim));
  }

  // X = X_cent + X_perp.
  std::pair<Mat, Mat> centralizer_split(const Mat& x) const {
    const Vec c = coords(x);
    Mat xc = Mat::Zero(dim, dim), xp = Mat::Zero(dim, dim);
    for (int k = 0; k < n_cent(); ++k) xc += c(k) * basis_cent[k];
    for (int k = 0; k < n_perp(); ++k) xp += c(n_cent() + k) * basis_perp[k];
    return {xc, xp};
  }

  // ad(a)^{-1} on the perp span (input must lie in it).
  Mat ad_a_inv_perp(const Mat& xp) const {
    const Vec c = coords(xp);
    Vec cp(n_perp());
    for (int k = 0; k < n_perp(); ++k) cp(k) = c(n_cent() + k);
    const Vec y = ad_a_perp_inv_num_ * cp;
    Mat r = Mat::Zero(dim, dim);
    for (int k = 0; k < n_perp(); ++k) r += y(k) * basis_perp[k];
    return r;
  }
};

inline Mat eigenspace_project(const InvolutionSpec& sigma, int j, const Mat& x) {
  if (sigma.antilinear)
    throw SoltkError("eigenspace_project: sigma must be linear");
  const int k = sigma.order;
  const Cplx alpha = std::polar(1.0, 2.0 * std::numbers::pi / k);
  Mat acc = Mat::Zero(x.rows(), x.cols());
  Mat pw = x;
  for (int l = 0; l < k; ++l) {
    acc += std::pow(alpha, Cplx(static_cast<double>(-j * l))) * pw;
    pw = sigma.apply(pw);
  }
  return acc / static_cast<double>(k);
}

enum class RealityCondition { U, UU0, Gtau, Gtausigma };
enum class RealityLevel { Algebra, Group };

namespace detail {
inline const Mat& sample_at(const std::vector<std::pair<Cplx, Mat>>& s,
                            Cplx lambda) {
  for (const auto& [l, m] : s)
    if (std::abs(l - lambda) < tol::lambda_pairing) return m;
  throw SoltkError("check_reality: sample set not closed under lambda map");
}
}  // namespace detail

// Max residual of the selected reality identity over the samples. The
// Gtausigma tag implements the Lambda^{tau,sigma} pairing (conjugate lambda
// for tau, rotated lambda for sigma), which is the condition the rational
// dressing elements actually satisfy; Gtau uses the 1/conj(lambda) pairing.
inline double check_reality(const std::vector<std::pair<Cplx, Mat>>& samples,
                            RealityCondition cond, const AlgebraContext& ctx,
                            RealityLevel level = RealityLevel::Algebra) {
  auto ap_tau = [&](const Mat& m) {
    return level == RealityLevel::Algebra ? ctx.tau.apply(m)
                                          : ctx.tau.apply_group(m);
  };
  auto ap_sigma = [&](const Mat& m) {
    if (!ctx.sigma) throw SoltkError("check_reality: context has no sigma");
    return level == RealityLevel::Algebra ? ctx.sigma->apply(m)
                                          : ctx.sigma->apply_group(m);
  };
  double res = 0.0;
  for (const auto& [lambda, value] : samples) {
    switch (cond) {
      case RealityCondition::U: {
        res = std::max(
            res, fnorm(ap_tau(detail::sample_at(samples, std::conj(lambda))) -
                       value));
        break;
      }
      case RealityCondition::UU0:
      case RealityCondition::Gtausigma: {
        res = std::max(
            res, fnorm(ap_tau(detail::sample_at(samples, std::conj(lambda))) -
                       value));
        const Cplx alpha = std::polar(1.0, 2.0 * std::numbers::pi /
                                               ctx.sigma.value().order);
        res = std::max(res, fnorm(ap_sigma(value) -
                                  detail::sample_at(samples, alpha * lambda)));
        break;
      }
      case RealityCondition::Gtau: {
        const Cplx inv = 1.0 / std::conj(lambda);
        res = std::max(
            res, fnorm(ap_tau(detail::sample_at(samples, inv)) - value));
        break;
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Context catalog. Entries hard-code the survey's example matrices.
// ---------------------------------------------------------------------------

namespace detail {
inline Mat eij(int n, int i, int j) {  // zero-based
  Mat m = Mat::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}
}  // namespace detail

inline AlgebraContext make_context(const std::string& id) {
  using detail::eij;
  AlgebraContext c;
  c.id = id;
  const Cplx I(0, 1);
  if (id == "sl2-su2" || id == "sl2-su2-so2" || id == "sl2-raw") {
    c.dim = 2;
    c.tau = InvolutionSpec(InvolutionKind::NegConjTranspose, 2);
    if (id == "sl2-su2-so2")
      c.sigma = InvolutionSpec(InvolutionKind::NegTranspose, 2);
    c.a = Mat::Zero(2, 2);
    c.a(0, 0) = I;
    c.a(1, 1) = -I;
    c.b = c.a;
    c.basis_cent = {c.a};
    c.basis_perp = {eij(2, 0, 1), eij(2, 1, 0)};
  } else if (id == "sl3-tzitzeica" || id == "sln-toda") {
    const int n = 3;
    c.dim = n;
    c.tau = InvolutionSpec(InvolutionKind::Conjugate, 2);
    const Cplx alpha = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    if (id == "sl3-tzitzeica") {
      // sigma(xi) = -C xi^t C^{-1}, order 6.
      Mat C = Mat::Zero(3, 3);
      C(0, 1) = alpha * alpha;
      C(1, 0) = alpha;
      C(2, 2) = 1.0;
      c.sigma = InvolutionSpec(InvolutionKind::NegAdCTranspose, 6, C);
    } else {
      // sigma = Ad(diag(1, alpha, alpha^2)), order 3.
      Mat D = Mat::Zero(3, 3);
      D(0, 0) = 1.0;
      D(1, 1) = alpha;
      D(2, 2) = alpha * alpha;
      c.sigma = InvolutionSpec(InvolutionKind::AdC, 3, D);
    }
    c.a = eij(3, 1, 0) + eij(3, 2, 1) + eij(3, 0, 2);   // e21+e32+e13
    c.b = eij(3, 0, 1) + eij(3, 1, 2) + eij(3, 2, 0);   // e12+e23+e31 = a^2
    c.basis_cent = {c.a, c.b};
    c.basis_perp = {eij(3, 0, 0) - eij(3, 1, 1), eij(3, 1, 1) - eij(3, 2, 2),
                    eij(3, 1, 0) - eij(3, 2, 1), eij(3, 2, 1) - eij(3, 0, 2),
                    eij(3, 0, 1) - eij(3, 1, 2), eij(3, 1, 2) - eij(3, 2, 0)};
  } else if (id == "sln-kw") {
    c.dim = 2;
    c.tau = InvolutionSpec(InvolutionKind::Conjugate, 2);
    Mat C = Mat::Zero(2, 2);
    C(0, 1) = 1.0;
    C(1, 0) = 1.0;
    c.sigma = InvolutionSpec(InvolutionKind::AdC, 2, C);
    c.a = Mat::Zero(2, 2);
    c.a(0, 0) = 1.0;
    c.a(1, 1) = -1.0;
    c.b = c.a;
    c.basis_cent = {c.a};
    c.basis_perp = {eij(2, 0, 1), eij(2, 1, 0)};
  } else if (id == "o4-grassmann") {
    const int n = 2;
    c.dim = 2 * n;
    c.tau = InvolutionSpec(InvolutionKind::Conjugate, 2);
    Mat Inn = Mat::Identity(4, 4);
    Inn(2, 2) = -1.0;
    Inn(3, 3) = -1.0;
    c.sigma = InvolutionSpec(InvolutionKind::AdC, 2, Inn);
    const Mat a1 = -eij(4, 0, 2) + eij(4, 2, 0);
    const Mat a2 = -eij(4, 1, 3) + eij(4, 3, 1);
    c.basis_A = {a1, a2};
    c.a = a1 + 2.0 * a2;  // regular combination
    c.b = c.a;
    c.basis_cent = {a1, a2};
    c.basis_perp = {eij(4, 0, 1) - eij(4, 1, 0), eij(4, 2, 3) - eij(4, 3, 2),
                    eij(4, 0, 3) - eij(4, 3, 0), eij(4, 1, 2) - eij(4, 2, 1)};
  } else {
    throw SoltkError("make_context: unknown context id '" + id + "'");
  }

  // Exact data (all catalog matrices have small rational entries).
  auto ex = std::make_shared<ExactAlgebraData>();
  ex->dim = c.dim;
  ex->a = ExactMat::from_numeric(c.a);
  ex->b = ExactMat::from_numeric(c.b);
  for (const auto& m : c.basis_cent)
    ex->basis_cent.push_back(ExactMat::from_numeric(m));
  for (const auto& m : c.basis_perp)
    ex->basis_perp.push_back(ExactMat::from_numeric(m));
  ex->finalize();
  c.exact = ex;

  c.finalize();
  return c;
}

}  // namespace soltk

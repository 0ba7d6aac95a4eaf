#pragma once

// Core scalar/matrix typedefs and the fixed tolerances used across the
// toolkit. Everything downstream includes this header first.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>
#include <stdexcept>
#include <string>

namespace soltk {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

namespace tol {
// Symbolic-zero tolerance (Frobenius norm) for validation checks.
inline constexpr double symbolic_zero = 1e-10;
// Idempotence bar for eigenspace projections.
inline constexpr double projection_idem = 1e-12;
// Regularity threshold for ad(a) restricted to the perp span.
inline constexpr double ada_condition = 1e8;
// Flatness gate before frame integration.
inline constexpr double flatness_gate = 1e-4;
// Ill-conditioning threshold for the block-Toeplitz factorization solve.
inline constexpr double toeplitz_condition = 1e10;
// Norm floor below which a transformed projection span is degenerate.
inline constexpr double span_floor = 1e-12;
// Pairing tolerance when matching lambda samples under an involution.
inline constexpr double lambda_pairing = 1e-9;
}  // namespace tol

struct SoltkError : std::runtime_error {
  explicit SoltkError(const std::string& what) : std::runtime_error(what) {}
};

inline double fnorm(const Mat& m) { return m.norm(); }

inline bool is_finite(const Mat& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Cplx z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  return true;
}

inline Mat commutator(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw SoltkError("commutator: dimension mismatch");
  return a * b - b * a;
}

inline Mat expm(const Mat& m) { return m.exp(); }

// tr(XY), the ad-invariant trace form used everywhere.
inline Cplx trace_form(const Mat& x, const Mat& y) { return (x * y).trace(); }

}  // namespace soltk

#pragma once

// Finite-order (anti)linear involutions of a matrix Lie algebra and the
// corresponding group-level maps.

#include "soltk/common.hpp"

#include <optional>
#include <utility>

namespace soltk {

enum class InvolutionKind {
  Conjugate,          // xi -> conj(xi)                (antilinear)
  NegConjTranspose,   // xi -> -conj(xi)^t             (antilinear)
  NegTranspose,       // xi -> -xi^t                   (linear)
  AdC,                // xi -> C xi C^{-1}             (linear)
  NegAdCTranspose,    // xi -> -C xi^t C^{-1}          (linear)
};

struct InvolutionSpec {
  InvolutionKind kind = InvolutionKind::Conjugate;
  std::optional<Mat> C;   // required for the two conjugation-by-C kinds
  bool antilinear = true;
  int order = 2;

  Mat C_inv;  // cached

  InvolutionSpec() = default;
  InvolutionSpec(InvolutionKind k, int ord, std::optional<Mat> c = {})
      : kind(k), C(std::move(c)), order(ord) {
    antilinear = (kind == InvolutionKind::Conjugate ||
                  kind == InvolutionKind::NegConjTranspose);
    if (kind == InvolutionKind::AdC || kind == InvolutionKind::NegAdCTranspose) {
      if (!C) throw SoltkError("InvolutionSpec: kind requires C");
      Eigen::FullPivLU<Mat> lu(*C);
      if (!lu.isInvertible()) throw SoltkError("InvolutionSpec: singular C");
      C_inv = lu.inverse();
    }
  }

  // Lie-algebra level.
  Mat apply(const Mat& x) const {
    switch (kind) {
      case InvolutionKind::Conjugate:
        return x.conjugate();
      case InvolutionKind::NegConjTranspose:
        return -x.adjoint();
      case InvolutionKind::NegTranspose:
        return -x.transpose();
      case InvolutionKind::AdC:
        return (*C) * x * C_inv;
      case InvolutionKind::NegAdCTranspose:
        return -(*C) * x.transpose() * C_inv;
    }
    throw SoltkError("InvolutionSpec: bad kind");
  }

  // Group level (the automorphism of G whose differential is `apply`).
  Mat apply_group(const Mat& g) const {
    switch (kind) {
      case InvolutionKind::Conjugate:
        return g.conjugate();
      case InvolutionKind::NegConjTranspose:
        return g.adjoint().inverse();
      case InvolutionKind::NegTranspose:
        return g.transpose().inverse();
      case InvolutionKind::AdC:
        return (*C) * g * C_inv;
      case InvolutionKind::NegAdCTranspose:
        return (*C) * g.transpose().inverse() * C_inv;
    }
    throw SoltkError("InvolutionSpec: bad kind");
  }

  // Order axiom residual: || sigma^order(X) - X ||.
  double order_defect(const Mat& x) const {
    Mat y = x;
    for (int l = 0; l < order; ++l) y = apply(y);
    return fnorm(y - x);
  }
};

}  // namespace soltk

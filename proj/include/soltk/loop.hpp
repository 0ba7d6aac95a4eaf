#pragma once

// Matrix Laurent loops with a finite coefficient window, plus Fourier
// sampling on the unit circle. The Birkhoff and dressing modules build on
// these.

#include "soltk/common.hpp"

#include <functional>
#include <numbers>
#include <vector>

namespace soltk {

// g(lambda) = sum_{k=lo}^{lo+c.size()-1} c[k-lo] lambda^k.
struct LaurentLoop {
  int lo = 0;
  std::vector<Mat> c;

  LaurentLoop() = default;
  LaurentLoop(int lo_, std::vector<Mat> c_) : lo(lo_), c(std::move(c_)) {}

  static LaurentLoop constant(const Mat& m) { return {0, {m}}; }
  static LaurentLoop identity(int n) { return constant(Mat::Identity(n, n)); }

  int hi() const { return lo + static_cast<int>(c.size()) - 1; }
  int dim() const { return c.empty() ? 0 : static_cast<int>(c.front().rows()); }

  Mat coeff(int k) const {
    if (k < lo || k > hi()) return Mat::Zero(dim(), dim());
    return c[k - lo];
  }

  Mat eval(Cplx lambda) const {
    Mat acc = Mat::Zero(dim(), dim());
    // Horner from the top power down, then multiply by lambda^lo.
    for (int k = hi(); k >= lo; --k) acc = acc * lambda + coeff(k);
    if (lo != 0) acc *= std::pow(lambda, Cplx(static_cast<double>(lo)));
    return acc;
  }

  friend LaurentLoop operator+(const LaurentLoop& a, const LaurentLoop& b) {
    const int lo = std::min(a.lo, b.lo), hi = std::max(a.hi(), b.hi());
    LaurentLoop r;
    r.lo = lo;
    r.c.reserve(hi - lo + 1);
    for (int k = lo; k <= hi; ++k) r.c.push_back(a.coeff(k) + b.coeff(k));
    return r;
  }
  friend LaurentLoop operator-(const LaurentLoop& a, const LaurentLoop& b) {
    const int lo = std::min(a.lo, b.lo), hi = std::max(a.hi(), b.hi());
    LaurentLoop r;
    r.lo = lo;
    r.c.reserve(hi - lo + 1);
    for (int k = lo; k <= hi; ++k) r.c.push_back(a.coeff(k) - b.coeff(k));
    return r;
  }
  friend LaurentLoop operator*(const LaurentLoop& a, const LaurentLoop& b) {
    LaurentLoop r;
    r.lo = a.lo + b.lo;
    const int n = a.dim();
    r.c.assign(a.c.size() + b.c.size() - 1, Mat::Zero(n, n));
    for (size_t i = 0; i < a.c.size(); ++i)
      for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
  }

  friend LaurentLoop operator*(const LaurentLoop& a, Cplx s) {
    LaurentLoop r = a;
    for (auto& m : r.c) m *= s;
    return r;
  }

  // Restriction to powers [klo, khi]; coefficients outside are dropped.
  LaurentLoop window(int klo, int khi) const {
    LaurentLoop r;
    r.lo = klo;
    r.c.reserve(khi - klo + 1);
    for (int k = klo; k <= khi; ++k) r.c.push_back(coeff(k));
    return r;
  }

  // Frobenius mass of the coefficients outside [klo, khi].
  double mass_outside(int klo, int khi) const {
    double m = 0.0;
    for (int k = lo; k <= hi(); ++k)
      if (k < klo || k > khi) m += fnorm(coeff(k));
    return m;
  }

  LaurentLoop trimmed(double eps = 0.0) const {
    int a = lo, b = hi();
    while (a < b && fnorm(coeff(a)) <= eps) ++a;
    while (b > a && fnorm(coeff(b)) <= eps) --b;
    return window(a, b);
  }

  double norm() const {
    double m = 0.0;
    for (const auto& x : c) m += fnorm(x);
    return m;
  }
};

// Fourier coefficients of a matrix loop sampled at N-th roots of unity,
// mapped to the symmetric window [-N/2, N/2). The caller is expected to know
// a window [klo, khi] that carries the loop; aliasing shows up as mass near
// the ends of the symmetric window and can be tested with mass_outside.
inline LaurentLoop fourier_coeffs(const std::function<Mat(Cplx)>& g, int n,
                                  int N) {
  std::vector<Mat> samples(N);
  for (int s = 0; s < N; ++s)
    samples[s] = g(std::polar(1.0, 2.0 * std::numbers::pi * s / N));
  const int klo = -N / 2, khi = klo + N - 1;
  LaurentLoop out;
  out.lo = klo;
  out.c.assign(N, Mat::Zero(n, n));
  for (int k = klo; k <= khi; ++k) {
    Mat acc = Mat::Zero(n, n);
    for (int s = 0; s < N; ++s)
      acc += samples[s] *
             std::polar(1.0, -2.0 * std::numbers::pi * k * s / N);
    out.c[k - klo] = acc / static_cast<double>(N);
  }
  return out;
}

}  // namespace soltk

#pragma once

// Exact Gaussian-rational scalars and small exact matrices. The symbolic
// recursion works over this field so that equality with printed formula
// tables is structural, not tolerance based.

#include "soltk/common.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <sstream>
#include <vector>

namespace soltk {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::rational<BigInt>;

struct GaussRat {
  Rat re{0};
  Rat im{0};

  GaussRat() = default;
  GaussRat(long r) : re(BigInt(r)) {}
  GaussRat(Rat r) : re(std::move(r)) {}
  GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  static GaussRat i() { return {Rat(0), Rat(1)}; }
  static GaussRat frac(long p, long q) { return {Rat(BigInt(p), BigInt(q))}; }
  static GaussRat imag_frac(long p, long q) {
    return {Rat(0), Rat(BigInt(p), BigInt(q))};
  }

  // Note: comparisons go through the numerator to avoid the heterogeneous
  // int/rational operator overloads, which recurse for multiprecision
  // integer backends.
  bool is_zero() const {
    return re.numerator().is_zero() && im.numerator().is_zero();
  }

  friend GaussRat operator+(const GaussRat& a, const GaussRat& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussRat operator-(const GaussRat& a, const GaussRat& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussRat operator-(const GaussRat& a) { return {-a.re, -a.im}; }
  friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussRat operator/(const GaussRat& a, const GaussRat& b) {
    Rat n = b.re * b.re + b.im * b.im;
    if (n.numerator().is_zero()) throw SoltkError("GaussRat: division by zero");
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
  GaussRat& operator+=(const GaussRat& o) { return *this = *this + o; }
  GaussRat& operator-=(const GaussRat& o) { return *this = *this - o; }
  GaussRat& operator*=(const GaussRat& o) { return *this = *this * o; }

  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) {
    return !(a == b);
  }

  GaussRat conj() const { return {re, -im}; }

  Cplx to_complex() const {
    auto f = [](const Rat& r) {
      return static_cast<double>(r.numerator()) /
             static_cast<double>(r.denominator());
    };
    return {f(re), f(im)};
  }

  std::string str() const {
    std::ostringstream os;
    const bool neg = im.numerator() < 0;
    os << re.numerator() << "/" << re.denominator() << (neg ? "-" : "+")
       << (neg ? BigInt(-im.numerator()) : im.numerator()) << "/"
       << im.denominator() << "i";
    return os.str();
  }
};

// Small-denominator rational reconstruction; used to lift numeric catalog
// matrices (entries like i/2, -1/4) back to the exact field.
inline Rat reconstruct_rational(double x, long max_den = 4096,
                                double tol = 1e-9) {
  for (long q = 1; q <= max_den; ++q) {
    const double pq = x * static_cast<double>(q);
    const double p = std::round(pq);
    if (std::abs(pq - p) < tol * static_cast<double>(q)) {
      return Rat(BigInt(static_cast<long long>(p)), BigInt(q));
    }
  }
  throw SoltkError("reconstruct_rational: no small-denominator match");
}

inline GaussRat reconstruct_gauss(Cplx z, long max_den = 4096,
                                  double tol = 1e-9) {
  return {reconstruct_rational(z.real(), max_den, tol),
          reconstruct_rational(z.imag(), max_den, tol)};
}

// Dense exact matrix, row-major.
struct ExactMat {
  int rows = 0, cols = 0;
  std::vector<GaussRat> e;

  ExactMat() = default;
  ExactMat(int r, int c) : rows(r), cols(c), e(r * c) {}

  static ExactMat zero(int n) { return ExactMat(n, n); }
  static ExactMat identity(int n) {
    ExactMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = GaussRat(1);
    return m;
  }
  static ExactMat from_numeric(const Mat& m, long max_den = 4096) {
    ExactMat r(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < r.rows; ++i)
      for (int j = 0; j < r.cols; ++j)
        r(i, j) = reconstruct_gauss(m(i, j), max_den);
    return r;
  }

  GaussRat& operator()(int i, int j) { return e[i * cols + j]; }
  const GaussRat& operator()(int i, int j) const { return e[i * cols + j]; }

  bool is_zero() const {
    for (const auto& x : e)
      if (!x.is_zero()) return false;
    return true;
  }

  Mat to_numeric() const {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = (*this)(i, j).to_complex();
    return m;
  }

  friend ExactMat operator+(const ExactMat& a, const ExactMat& b) {
    ExactMat r(a.rows, a.cols);
    for (size_t k = 0; k < a.e.size(); ++k) r.e[k] = a.e[k] + b.e[k];
    return r;
  }
  friend ExactMat operator-(const ExactMat& a, const ExactMat& b) {
    ExactMat r(a.rows, a.cols);
    for (size_t k = 0; k < a.e.size(); ++k) r.e[k] = a.e[k] - b.e[k];
    return r;
  }
  friend ExactMat operator*(const ExactMat& a, const ExactMat& b) {
    if (a.cols != b.rows) throw SoltkError("ExactMat: dimension mismatch");
    ExactMat r(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
      for (int k = 0; k < a.cols; ++k) {
        if (a(i, k).is_zero()) continue;
        for (int j = 0; j < b.cols; ++j) r(i, j) += a(i, k) * b(k, j);
      }
    return r;
  }
  friend ExactMat operator*(const GaussRat& s, const ExactMat& a) {
    ExactMat r(a.rows, a.cols);
    for (size_t k = 0; k < a.e.size(); ++k) r.e[k] = s * a.e[k];
    return r;
  }
  friend bool operator==(const ExactMat& a, const ExactMat& b) {
    return a.rows == b.rows && a.cols == b.cols && a.e == b.e;
  }
};

inline ExactMat exact_commutator(const ExactMat& a, const ExactMat& b) {
  return a * b - b * a;
}

inline GaussRat exact_trace_form(const ExactMat& x, const ExactMat& y) {
  GaussRat t;
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) t += x(i, k) * y(k, i);
  return t;
}

// Exact linear solve A X = B by Gaussian elimination (A square, invertible).
inline ExactMat exact_solve(ExactMat a, ExactMat b) {
  const int n = a.rows;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!a(r, col).is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) throw SoltkError("exact_solve: singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      for (int j = 0; j < b.cols; ++j) std::swap(b(piv, j), b(col, j));
    }
    const GaussRat inv = GaussRat(1) / a(col, col);
    for (int j = 0; j < n; ++j) a(col, j) = inv * a(col, j);
    for (int j = 0; j < b.cols; ++j) b(col, j) = inv * b(col, j);
    for (int r = 0; r < n; ++r) {
      if (r == col || a(r, col).is_zero()) continue;
      const GaussRat f = a(r, col);
      for (int j = 0; j < n; ++j) a(r, j) -= f * a(col, j);
      for (int j = 0; j < b.cols; ++j) b(r, j) -= f * b(col, j);
    }
  }
  return b;
}

}  // namespace soltk

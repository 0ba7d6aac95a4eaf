#pragma once

// Differential polynomials in jet variables over the exact Gaussian-rational
// field, and the hierarchy coefficient recursion computed symbolically.

#include "soltk/algebra.hpp"
#include "soltk/exact.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

namespace soltk {

struct JetVar {
  int comp = 0;  // index into the perp-basis coordinates of u
  int ord = 0;   // d/dx order

  friend bool operator<(const JetVar& a, const JetVar& b) {
    return a.ord != b.ord ? a.ord < b.ord : a.comp < b.comp;
  }
  friend bool operator==(const JetVar& a, const JetVar& b) {
    return a.comp == b.comp && a.ord == b.ord;
  }
};

// Monomial: multiset of jet variables, kept sorted so equality is structural.
using Monomial = std::vector<JetVar>;

struct NotExact : SoltkError {
  NotExact() : SoltkError("formal_integrate: not a total x-derivative") {}
};

class DiffPoly {
 public:
  std::map<Monomial, GaussRat> terms;

  DiffPoly() = default;
  static DiffPoly constant(GaussRat c) {
    DiffPoly p;
    if (!c.is_zero()) p.terms[{}] = std::move(c);
    return p;
  }
  static DiffPoly var(int comp, int ord, GaussRat c = GaussRat(1)) {
    DiffPoly p;
    if (!c.is_zero()) p.terms[{JetVar{comp, ord}}] = std::move(c);
    return p;
  }

  bool is_zero() const { return terms.empty(); }

  void add_term(Monomial m, const GaussRat& c) {
    if (c.is_zero()) return;
    std::sort(m.begin(), m.end());
    auto it = terms.find(m);
    if (it == terms.end()) {
      terms.emplace(std::move(m), c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }

  friend DiffPoly operator+(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r = a;
    for (const auto& [m, c] : b.terms) r.add_term(m, c);
    return r;
  }
  friend DiffPoly operator-(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r = a;
    for (const auto& [m, c] : b.terms) r.add_term(m, -c);
    return r;
  }
  friend DiffPoly operator-(const DiffPoly& a) {
    DiffPoly r;
    for (const auto& [m, c] : a.terms) r.terms[m] = -c;
    return r;
  }
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
    DiffPoly r;
    for (const auto& [ma, ca] : a.terms)
      for (const auto& [mb, cb] : b.terms) {
        Monomial m = ma;
        m.insert(m.end(), mb.begin(), mb.end());
        r.add_term(std::move(m), ca * cb);
      }
    return r;
  }
  friend DiffPoly operator*(const GaussRat& s, const DiffPoly& a) {
    DiffPoly r;
    if (s.is_zero()) return r;
    for (const auto& [m, c] : a.terms) r.terms[m] = s * c;
    return r;
  }
  friend bool operator==(const DiffPoly& a, const DiffPoly& b) {
    return a.terms == b.terms;
  }

  int max_order() const {
    int mo = 0;
    for (const auto& [m, c] : terms)
      for (const auto& v : m) mo = std::max(mo, v.ord);
    return mo;
  }

  Cplx evaluate(const std::map<JetVar, Cplx>& jets) const {
    Cplx acc = 0.0;
    for (const auto& [m, c] : terms) {
      Cplx t = c.to_complex();
      for (const auto& v : m) {
        auto it = jets.find(v);
        if (it == jets.end()) throw SoltkError("evaluate: missing jet value");
        t *= it->second;
      }
      acc += t;
    }
    return acc;
  }

  // Rename/rescale components: comp -> (new comp, scalar factor) applied to
  // each jet variable occurrence. Used for reality restrictions like
  // r = -conj(q), where the target component denotes the conjugated field.
  DiffPoly substitute(const std::map<int, std::pair<int, GaussRat>>& sub) const {
    DiffPoly r;
    for (const auto& [m, c] : terms) {
      GaussRat cc = c;
      Monomial mm;
      mm.reserve(m.size());
      for (const auto& v : m) {
        auto it = sub.find(v.comp);
        if (it == sub.end()) {
          mm.push_back(v);
        } else {
          mm.push_back(JetVar{it->second.first, v.ord});
          cc *= it->second.second;
        }
      }
      r.add_term(std::move(mm), cc);
    }
    return r;
  }
};

// Declared maximum derivative order per computation.
inline constexpr int kMaxJetOrder = 64;

inline DiffPoly total_x_derivative(const DiffPoly& p) {
  DiffPoly r;
  for (const auto& [m, c] : p.terms) {
    for (size_t k = 0; k < m.size(); ++k) {
      if (m[k].ord + 1 > kMaxJetOrder)
        throw SoltkError("total_x_derivative: max derivative order exceeded");
      // Skip duplicate positions: differentiate each distinct var once with
      // multiplicity.
      if (k > 0 && m[k] == m[k - 1]) continue;
      const long mult =
          std::count(m.begin(), m.end(), m[k]);
      Monomial mm = m;
      mm[k].ord += 1;
      r.add_term(std::move(mm), GaussRat(mult) * c);
    }
  }
  return r;
}

inline DiffPoly partial_derivative(const DiffPoly& p, JetVar v) {
  DiffPoly r;
  for (const auto& [m, c] : p.terms) {
    const long mult = std::count(m.begin(), m.end(), v);
    if (mult == 0) continue;
    Monomial mm;
    mm.reserve(m.size() - 1);
    bool removed = false;
    for (const auto& w : m) {
      if (!removed && w == v) {
        removed = true;
        continue;
      }
      mm.push_back(w);
    }
    r.add_term(std::move(mm), GaussRat(mult) * c);
  }
  return r;
}

// Antiderivative with zero constant term, or NotExact. Descends through the
// derivative orders: an exact polynomial is jointly linear in its top-order
// jets w_i' with lower-order coefficients A_i, and the Euler homotopy
// integral of sum_i w_i A_i is the top piece of the potential. Subtracting
// its total derivative strictly lowers the maximum order, so the loop runs
// at most max_order times.
inline DiffPoly formal_integrate(const DiffPoly& p0) {
  DiffPoly p = p0, acc;
  while (!p.is_zero()) {
    const int k = p.max_order();
    if (k == 0) throw NotExact();  // total derivatives have no order-0 part
    std::vector<int> comps;
    for (const auto& [m, c] : p.terms)
      for (const auto& v : m)
        if (v.ord == k &&
            std::find(comps.begin(), comps.end(), v.comp) == comps.end())
          comps.push_back(v.comp);
    DiffPoly P;  // sum_i u_i^{(k-1)} * dp/du_i^{(k)}
    for (int i : comps) {
      const DiffPoly A = partial_derivative(p, JetVar{i, k});
      if (A.max_order() >= k) throw NotExact();  // nonlinear in top jets
      P = P + DiffPoly::var(i, k - 1) * A;
    }
    DiffPoly T;
    for (const auto& [m, c] : P.terms) {
      long deg = 0;
      for (const auto& v : m)
        if (v.ord == k - 1) ++deg;
      T.add_term(m, c / GaussRat(deg));
    }
    acc = acc + T;
    p = p - total_x_derivative(T);
    if (!p.is_zero() && p.max_order() >= k) throw NotExact();
  }
  if (!(total_x_derivative(acc) == p0)) throw NotExact();
  return acc;
}

// ---------------------------------------------------------------------------
// Matrix-valued differential polynomials and the recursion.
// ---------------------------------------------------------------------------

struct DiffPolyMatrix {
  int dim = 0;
  std::vector<DiffPoly> e;  // row-major

  DiffPolyMatrix() = default;
  explicit DiffPolyMatrix(int d) : dim(d), e(d * d) {}

  static DiffPolyMatrix from_exact(const ExactMat& m) {
    DiffPolyMatrix r(m.rows);
    for (int i = 0; i < m.rows * m.cols; ++i)
      r.e[i] = DiffPoly::constant(m.e[i]);
    return r;
  }

  DiffPoly& operator()(int i, int j) { return e[i * dim + j]; }
  const DiffPoly& operator()(int i, int j) const { return e[i * dim + j]; }

  bool is_zero() const {
    for (const auto& p : e)
      if (!p.is_zero()) return false;
    return true;
  }

  friend DiffPolyMatrix operator+(const DiffPolyMatrix& a,
                                  const DiffPolyMatrix& b) {
    DiffPolyMatrix r(a.dim);
    for (size_t k = 0; k < a.e.size(); ++k) r.e[k] = a.e[k] + b.e[k];
    return r;
  }
  friend DiffPolyMatrix operator-(const DiffPolyMatrix& a,
                                  const DiffPolyMatrix& b) {
    DiffPolyMatrix r(a.dim);
    for (size_t k = 0; k < a.e.size(); ++k) r.e[k] = a.e[k] - b.e[k];
    return r;
  }
  friend DiffPolyMatrix operator*(const DiffPolyMatrix& a,
                                  const DiffPolyMatrix& b) {
    DiffPolyMatrix r(a.dim);
    for (int i = 0; i < a.dim; ++i)
      for (int k = 0; k < a.dim; ++k) {
        if (a(i, k).is_zero()) continue;
        for (int j = 0; j < a.dim; ++j) {
          if (b(k, j).is_zero()) continue;
          r(i, j) = r(i, j) + a(i, k) * b(k, j);
        }
      }
    return r;
  }
  friend bool operator==(const DiffPolyMatrix& a, const DiffPolyMatrix& b) {
    return a.dim == b.dim && a.e == b.e;
  }

  DiffPolyMatrix bracket(const DiffPolyMatrix& o) const {
    return (*this) * o - o * (*this);
  }

  DiffPolyMatrix dx() const {
    DiffPolyMatrix r(dim);
    for (size_t k = 0; k < e.size(); ++k) r.e[k] = total_x_derivative(e[k]);
    return r;
  }

  Mat evaluate(const std::map<JetVar, Cplx>& jets) const {
    Mat m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = (*this)(i, j).evaluate(jets);
    return m;
  }

  DiffPolyMatrix substitute(
      const std::map<int, std::pair<int, GaussRat>>& sub) const {
    DiffPolyMatrix r(dim);
    for (size_t k = 0; k < e.size(); ++k) r.e[k] = e[k].substitute(sub);
    return r;
  }

  int max_order() const {
    int mo = 0;
    for (const auto& p : e) mo = std::max(mo, p.max_order());
    return mo;
  }
  size_t term_count() const {
    size_t n = 0;
    for (const auto& p : e) n += p.terms.size();
    return n;
  }
};

// The generic field u = sum_i u_i(x) * basis_perp[i] with u_i order-0 jets.
inline DiffPolyMatrix generic_u(const ExactAlgebraData& ex) {
  DiffPolyMatrix u(ex.dim);
  for (int i = 0; i < ex.n_perp(); ++i) {
    const ExactMat& bi = ex.basis_perp[i];
    for (int r = 0; r < ex.dim; ++r)
      for (int c = 0; c < ex.dim; ++c)
        if (!bi(r, c).is_zero())
          u(r, c) = u(r, c) + DiffPoly::var(i, 0, bi(r, c));
  }
  return u;
}

namespace detail {
// Basis coordinates of a DiffPolyMatrix (which must lie in the basis span
// for every jet assignment; this holds for the recursion operands).
inline std::vector<DiffPoly> exact_coords(const ExactAlgebraData& ex,
                                          const DiffPolyMatrix& m) {
  std::vector<DiffPoly> out(ex.n_basis());
  for (int k = 0; k < ex.n_basis(); ++k) {
    DiffPoly acc;
    for (int e = 0; e < ex.dim * ex.dim; ++e) {
      const GaussRat& l = ex.L(k, e);
      if (!l.is_zero()) acc = acc + l * m.e[e];
    }
    out[k] = std::move(acc);
  }
  return out;
}
}  // namespace detail

// Q_{b,0..j}(u) by the recursion: perp part by inverting ad(a), centralizer
// part by formal integration with zero constant. The recursion identity is
// re-verified symbolically at every step.
inline std::vector<DiffPolyMatrix> compute_Q_sequence(const AlgebraContext& ctx,
                                                      const Mat& b_num, int j) {
  if (!ctx.exact) throw SoltkError("compute_Q: context lacks exact data");
  const ExactAlgebraData& ex = *ctx.exact;
  const ExactMat b = ExactMat::from_numeric(b_num);
  // Precondition: b centralizes the centralizer basis (G_b = G_a surrogate).
  for (const auto& c : ex.basis_cent)
    if (!exact_commutator(b, c).is_zero())
      throw SoltkError("compute_Q: b does not centralize basis_cent");

  const DiffPolyMatrix u = generic_u(ex);
  const DiffPolyMatrix a_mat = DiffPolyMatrix::from_exact(ex.a);

  std::vector<DiffPolyMatrix> Q;
  Q.push_back(DiffPolyMatrix::from_exact(b));
  for (int step = 0; step < j; ++step) {
    const DiffPolyMatrix R = Q[step].dx() + u.bracket(Q[step]);
    const std::vector<DiffPoly> rc = detail::exact_coords(ex, R);
    // Perp part: ad(a)(Q_next_perp) = -R_perp.
    const int nc = ex.n_cent(), np = ex.n_perp();
    std::vector<DiffPoly> qp(np);
    for (int i = 0; i < np; ++i) {
      DiffPoly acc;
      for (int k = 0; k < np; ++k) {
        const GaussRat& inv = ex.ad_a_perp_inv(i, k);
        if (!inv.is_zero()) acc = acc - inv * rc[nc + k];
      }
      qp[i] = std::move(acc);
    }
    DiffPolyMatrix q_next(ex.dim);
    for (int i = 0; i < np; ++i) {
      const ExactMat& bi = ex.basis_perp[i];
      for (int r = 0; r < ex.dim; ++r)
        for (int c = 0; c < ex.dim; ++c)
          if (!bi(r, c).is_zero())
            q_next(r, c) = q_next(r, c) + bi(r, c) * qp[i];
    }
    // Centralizer part: integrate -cent([u, Q_next_perp]).
    const DiffPolyMatrix s = u.bracket(q_next);
    const std::vector<DiffPoly> sc = detail::exact_coords(ex, s);
    for (int i = 0; i < nc; ++i) {
      const DiffPoly qi = formal_integrate(-sc[i]);
      if (qi.is_zero()) continue;
      const ExactMat& bi = ex.basis_cent[i];
      for (int r = 0; r < ex.dim; ++r)
        for (int c = 0; c < ex.dim; ++c)
          if (!bi(r, c).is_zero())
            q_next(r, c) = q_next(r, c) + bi(r, c) * qi;
    }
    // Symbolic re-verification of the recursion identity.
    const DiffPolyMatrix resid =
        Q[step].dx() + u.bracket(Q[step]) - q_next.bracket(a_mat);
    if (!resid.is_zero())
      throw SoltkError("compute_Q: recursion identity violated at step " +
                       std::to_string(step + 1));
    Q.push_back(std::move(q_next));
  }
  return Q;
}

inline DiffPolyMatrix compute_Q(const AlgebraContext& ctx, const Mat& b, int j) {
  return compute_Q_sequence(ctx, b, j).back();
}

// Frechet derivative of p in the direction of a perp-coordinate field G:
// each occurrence of u_i^{(k)} is replaced by d^k/dx^k of G[i].
inline DiffPoly directional_derivative(const DiffPoly& p,
                                       const std::vector<DiffPoly>& G) {
  DiffPoly out;
  for (const auto& [m, c] : p.terms) {
    for (size_t k = 0; k < m.size(); ++k) {
      if (k > 0 && m[k] == m[k - 1]) continue;
      const long mult = std::count(m.begin(), m.end(), m[k]);
      Monomial rest;
      bool removed = false;
      for (const auto& v : m) {
        if (!removed && v == m[k]) {
          removed = true;
          continue;
        }
        rest.push_back(v);
      }
      DiffPoly g = G.at(m[k].comp);
      for (int d = 0; d < m[k].ord; ++d) g = total_x_derivative(g);
      DiffPoly restp;
      restp.add_term(rest, GaussRat(mult) * c);
      out = out + restp * g;
    }
  }
  return out;
}

// (Q_{b,j})_x + [u, Q_{b,j}], the (b,j)-flow right-hand side.
inline DiffPolyMatrix flow_rhs(const AlgebraContext& ctx, const Mat& b, int j) {
  const auto Q = compute_Q_sequence(ctx, b, j);
  const DiffPolyMatrix u = generic_u(*ctx.exact);
  return Q[j].dx() + u.bracket(Q[j]);
}

}  // namespace soltk

#pragma once

// Membership and constructive factorization in the principal congruence
// subgroups Gamma_d(g) of GL(g,Z).
//
// factor_elementary writes any unimodular matrix as a word in E(i,j), F(i);
// factor_gamma2 writes any element of Gamma_2(g) as a product of conjugates
// of F(1); factor_gammad writes an element of Gamma_d(g), d >= 3, g >= 3,
// as a product of conjugates of powers E(1,2)^(d k).
//
// The level-d reducer works with generalized transvection atoms
// T = C * E_{i,j}(m) * C^-1 (m a multiple of d) rather than bare row
// operations: bare level-d operations cannot change diagonal residues
// modulo d^2, so they can never finish on a general input. Conjugations by
// arbitrary unimodular matrices cost nothing -- they are threaded through
// the conjugators of all subsequently emitted letters -- which reduces the
// whole problem to a 2x2 corner. The corner is attacked by a greedy shrink
// loop plus a pivot-borrow construction using one clean spare index; if the
// loop exhausts its budget the routine raises ObstructionUnresolved
// carrying the residual matrix instead of emitting an unverified word.

#include "ursp/generators.hpp"
#include "ursp/integer_matrix.hpp"
#include "ursp/words.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ursp {

struct FactorError : std::runtime_error {
  explicit FactorError(const std::string& what) : std::runtime_error(what) {}
};

struct ObstructionUnresolved : FactorError {
  ObstructionUnresolved(const std::string& what, IntegerMatrix residual)
      : FactorError(what), residual(std::move(residual)) {}
  IntegerMatrix residual;
};

inline bool is_in_gamma(const IntegerMatrix& m, const Int& d) {
  if (!is_unimodular(m)) throw std::invalid_argument("matrix is not unimodular");
  if (d < 2) throw std::invalid_argument("modulus must be at least 2");
  return m.congruent_to_identity(d);
}

// Word P over the swap alphabet with P * E(1,2) * P^-1 = E(i,j).
inline GeneratorWord conjugator_to_E12(int i, int j, std::size_t g) {
  if (g < 2) throw std::invalid_argument("genus must be at least 2");
  GeneratorSymbol probe(GenFamily::E, i, j, g);  // validates indices
  (void)probe;
  GeneratorWord w;
  auto swap = [&](int x, int y) {
    w.push_back({GeneratorSymbol(GenFamily::Atilde, x, y, g), Int(1)});
  };
  if (i == 1 && j == 2) return w;
  if (i != 2) {
    // permutation (2 j)(1 i) sends (1,2) to (i,j)
    if (j != 2) swap(2, j);
    if (i != 1) swap(1, i);
  } else {
    // i == 2: (1 j)(1 2) sends 1 -> 2 and 2 -> j
    if (j != 1) swap(1, j);
    swap(1, 2);
  }
  return w;
}

namespace detail {

// Row reduction of a unimodular matrix by integer row operations, with the
// inverse of every applied operation appended to `word`; the recorded word
// multiplies out to the input matrix.
class ElementaryReducer {
 public:
  explicit ElementaryReducer(IntegerMatrix m) : m_(std::move(m)), n_(m_.dim()) {}

  GeneratorWord run() {
    for (std::size_t k = 0; k < n_; ++k) {
      euclid_column(k);
      fix_sign(k);
    }
    for (std::size_t k = n_; k-- > 1;)
      for (std::size_t i = 0; i < k; ++i)
        if (m_.at(i, k) != 0) row_add(i, k, -m_.at(i, k));
    return word_;
  }

 private:
  void row_add(std::size_t i, std::size_t j, const Int& c) {
    if (c == 0) return;
    for (std::size_t t = 0; t < n_; ++t) m_.at(i, t) += c * m_.at(j, t);
    word_.push_back({GeneratorSymbol(GenFamily::E, static_cast<int>(i) + 1,
                                     static_cast<int>(j) + 1, n_),
                     -c});
  }

  void row_negate(std::size_t i) {
    for (std::size_t t = 0; t < n_; ++t) m_.at(i, t) = -m_.at(i, t);
    word_.push_back({GeneratorSymbol(GenFamily::F, static_cast<int>(i) + 1, n_), Int(1)});
  }

  void euclid_column(std::size_t k) {
    for (;;) {
      std::size_t best = n_;
      std::size_t nonzero = 0;
      for (std::size_t r = k; r < n_; ++r) {
        if (m_.at(r, k) == 0) continue;
        ++nonzero;
        if (best == n_ || abs(m_.at(r, k)) < abs(m_.at(best, k))) best = r;
      }
      if (nonzero == 0) throw std::invalid_argument("matrix is not unimodular");
      if (nonzero == 1) {
        if (best != k) {
          // move the pivot up without a raw swap
          row_add(k, best, Int(1));
          row_add(best, k, Int(-1));
        }
        return;
      }
      for (std::size_t r = k; r < n_; ++r) {
        if (r == best || m_.at(r, k) == 0) continue;
        row_add(r, best, -symmetric_quotient(m_.at(r, k), m_.at(best, k)));
      }
    }
  }

  void fix_sign(std::size_t k) {
    if (m_.at(k, k) < 0) row_negate(k);
    if (m_.at(k, k) != 1) throw std::invalid_argument("matrix is not unimodular");
  }

  IntegerMatrix m_;
  std::size_t n_;
  GeneratorWord word_;
};

}  // namespace detail

// Word over { E(i,j), F(i) } whose product equals m.
inline GeneratorWord factor_elementary(const IntegerMatrix& m) {
  if (!is_unimodular(m)) throw std::invalid_argument("matrix is not unimodular");
  detail::ElementaryReducer red(m);
  return red.run();
}

namespace detail {

// Level-2 reduction: even-multiple row additions keep the diagonal odd and
// the off-diagonal even, sign flips absorb the units, and the resulting
// stage word over { E^even, F } is rewritten onto the base letter F(1).
class Gamma2Reducer {
 public:
  explicit Gamma2Reducer(IntegerMatrix m) : m_(std::move(m)), n_(m_.dim()) {}

  ConjugacyWord run() {
    for (std::size_t k = 0; k < n_; ++k) {
      euclid_column(k);
      if (m_.at(k, k) < 0) row_negate(k);
      if (m_.at(k, k) != 1)
        throw ObstructionUnresolved("level-2 reduction left a nonunit pivot", m_);
    }
    for (std::size_t k = n_; k-- > 1;)
      for (std::size_t i = 0; i < k; ++i)
        if (m_.at(i, k) != 0) row_add(i, k, -m_.at(i, k));
    return rewrite();
  }

 private:
  void row_add(std::size_t i, std::size_t j, const Int& c) {
    if (c == 0) return;
    for (std::size_t t = 0; t < n_; ++t) m_.at(i, t) += c * m_.at(j, t);
    stage_.push_back({GeneratorSymbol(GenFamily::E, static_cast<int>(i) + 1,
                                      static_cast<int>(j) + 1, n_),
                      -c});
  }

  void row_negate(std::size_t i) {
    for (std::size_t t = 0; t < n_; ++t) m_.at(i, t) = -m_.at(i, t);
    stage_.push_back({GeneratorSymbol(GenFamily::F, static_cast<int>(i) + 1, n_), Int(1)});
  }

  void euclid_column(std::size_t k) {
    for (std::size_t r = k + 1; r < n_; ++r) {
      // pairwise descent on (odd pivot, even entry); strictly decreasing by
      // the parity of the symmetric remainders
      while (m_.at(r, k) != 0) {
        Int q = symmetric_quotient(m_.at(r, k), 2 * m_.at(k, k));
        if (q != 0) row_add(r, k, -2 * q);
        if (m_.at(r, k) == 0) break;
        q = symmetric_quotient(m_.at(k, k), 2 * m_.at(r, k));
        if (q == 0)
          throw ObstructionUnresolved("level-2 descent stalled", m_);
        row_add(k, r, -2 * q);
      }
    }
  }

  ConjugacyWord rewrite() const {
    ConjugacyWord out(Ambient::GL, n_);
    GeneratorSymbol f1(GenFamily::F, 1, n_);
    for (const auto& fac : stage_) {
      if (fac.symbol.family == GenFamily::F) {
        GeneratorWord conj;
        if (fac.symbol.i != 1)
          conj.push_back({GeneratorSymbol(GenFamily::Atilde, 1, fac.symbol.i, n_), Int(1)});
        out.push(conj, f1, Int(1));
        continue;
      }
      // E(i,j)^(2c) = P E12^c F1 E12^-c P^-1 * P F1 P^-1
      Int c = fac.exponent / 2;
      if (2 * c != fac.exponent)
        throw ObstructionUnresolved("level-2 stage emitted an odd shear", m_);
      GeneratorWord p = conjugator_to_E12(fac.symbol.i, fac.symbol.j, n_);
      GeneratorWord pe = p;
      pe.push_back({GeneratorSymbol(GenFamily::E, 1, 2, n_), c});
      out.push(pe, f1, Int(1));
      out.push(p, f1, Int(1));
    }
    return out;
  }

  IntegerMatrix m_;
  std::size_t n_;
  GeneratorWord stage_;
};

}  // namespace detail

// Conjugacy word with base F(1) evaluating exactly to m, for m in Gamma_2(g).
inline ConjugacyWord factor_gamma2(const IntegerMatrix& m) {
  if (!is_in_gamma(m, 2))
    throw FactorError("matrix is not in Gamma_2(g)");
  detail::Gamma2Reducer red(m);
  ConjugacyWord w = red.run();
  if (!verify_factorization(w, m))
    throw ObstructionUnresolved("level-2 factorization failed verification", m);
  return w;
}

namespace detail {

// Engine for factor_gammad. Maintains the invariant
//
//   input = eval(left letters) * R^-1 * M * R * eval(right letters)
//
// where R is the accumulated free conjugation. Absorbing a transvection
// atom on either side of M emits one letter conj(R^-1 * c, E(1,2))^m with
// m a multiple of d; conjugation moves only extend R.
class GammadReducer {
 public:
  GammadReducer(IntegerMatrix m, Int d, int variation = 0)
      : m_(std::move(m)), n_(m_.dim()), d_(std::move(d)), variation_(variation) {}

  ConjugacyWord run() {
    // retries enter through a different conjugate, which lands the peel on a
    // different terminal corner
    for (int v = 0; v < variation_; ++v) {
      conj_shear(0, n_ - 1, Int(1 + v % 3));
      conj_shear(n_ - 1, v % static_cast<int>(n_ - 1), Int(-1));
    }
    for (std::size_t k = 0; k + 2 < n_; ++k) peel(k);
    corner();
    if (!m_.is_identity())
      throw ObstructionUnresolved("level-d reduction did not reach the identity",
                                  conjugate_back());
    ConjugacyWord out(Ambient::GL, n_);
    for (const auto& l : left_.letters) out.push(l.conjugator, l.base, l.exponent);
    for (const auto& l : right_.letters) out.push(l.conjugator, l.base, l.exponent);
    return out;
  }

 private:
  // --- moves ---------------------------------------------------------------

  // M <- P M P^-1 for a single-symbol P; extends R and touches no letters.
  void conj_move(const GeneratorSymbol& sym, const Int& exp) {
    apply_symbol_left(sym, exp);
    apply_symbol_right(sym, -exp);
    rinv_.push_back({sym, sym.family == GenFamily::Atilde ? Int(1) : -exp});
  }

  void conj_shear(std::size_t r, std::size_t c, const Int& t) {
    if (t == 0) return;
    conj_move(GeneratorSymbol(GenFamily::E, static_cast<int>(r) + 1,
                              static_cast<int>(c) + 1, n_),
              t);
  }

  void conj_swap(std::size_t x, std::size_t y) {
    conj_move(GeneratorSymbol(GenFamily::Atilde, static_cast<int>(x) + 1,
                              static_cast<int>(y) + 1, n_),
              Int(1));
  }

  // Left absorb of the plain atom E_{i,j}(t), t a multiple of d:
  // row i += t * row j.
  void plain_left(std::size_t i, std::size_t j, const Int& t) {
    if (t == 0) return;
    require_level(t);
    for (std::size_t c = 0; c < n_; ++c) m_.at(i, c) += t * m_.at(j, c);
    emit(left_, /*prepend=*/false, base_conj(i, j), -t);
  }

  // Right absorb of E_{i,j}(t): column j += t * column i.
  void plain_right(std::size_t i, std::size_t j, const Int& t) {
    if (t == 0) return;
    require_level(t);
    for (std::size_t r = 0; r < n_; ++r) m_.at(r, j) += t * m_.at(r, i);
    emit(right_, /*prepend=*/true, base_conj(i, j), -t);
  }

  // Left absorb of the paired atom E_{j,i}(s) E_{i,j}(t) E_{j,i}(-s):
  // with w = row j - s * row i, row i += t w and row j += s t w.
  void paired_left(std::size_t i, std::size_t j, const Int& s, const Int& t) {
    if (t == 0) return;
    if (s == 0) return plain_left(i, j, t);
    require_level(t);
    std::vector<Int> w(n_);
    for (std::size_t c = 0; c < n_; ++c) w[c] = m_.at(j, c) - s * m_.at(i, c);
    for (std::size_t c = 0; c < n_; ++c) {
      m_.at(i, c) += t * w[c];
      m_.at(j, c) += s * t * w[c];
    }
    GeneratorWord conj;
    conj.push_back({GeneratorSymbol(GenFamily::E, static_cast<int>(j) + 1,
                                    static_cast<int>(i) + 1, n_),
                    s});
    emit(left_, /*prepend=*/false,
         concat(std::move(conj), conjugator_to_E12(static_cast<int>(i) + 1,
                                                   static_cast<int>(j) + 1, n_)),
         -t);
  }

  // Right absorb of the same atom: with v = col i + s * col j,
  // col j += t v and col i -= s t v.
  void paired_right(std::size_t i, std::size_t j, const Int& s, const Int& t) {
    if (t == 0) return;
    if (s == 0) return plain_right(i, j, t);
    require_level(t);
    std::vector<Int> v(n_);
    for (std::size_t r = 0; r < n_; ++r) v[r] = m_.at(r, i) + s * m_.at(r, j);
    for (std::size_t r = 0; r < n_; ++r) {
      m_.at(r, j) += t * v[r];
      m_.at(r, i) -= s * t * v[r];
    }
    GeneratorWord conj;
    conj.push_back({GeneratorSymbol(GenFamily::E, static_cast<int>(j) + 1,
                                    static_cast<int>(i) + 1, n_),
                    s});
    emit(right_, /*prepend=*/true,
         concat(std::move(conj), conjugator_to_E12(static_cast<int>(i) + 1,
                                                   static_cast<int>(j) + 1, n_)),
         -t);
  }

  // --- reduction -----------------------------------------------------------

  void peel(std::size_t k) {
    compress_lower(k);
    if (m_.at(k, k) != 1) {
      if (m_.at(k + 1, k) == 0 || !pivot_one(k, k + 1, k + 2))
        throw ObstructionUnresolved("pivot normalization failed", conjugate_back());
    }
    for (std::size_t r = 0; r < n_; ++r)
      if (r != k && m_.at(r, k) != 0) plain_left(r, k, -m_.at(r, k));
    clear_cross(k);
  }

  // Free Euclid among rows > k brings column k to (pivot, gcd, 0, ..., 0).
  void compress_lower(std::size_t k) {
    for (;;) {
      std::size_t best = n_;
      std::size_t nonzero = 0;
      for (std::size_t r = k + 1; r < n_; ++r) {
        if (m_.at(r, k) == 0) continue;
        ++nonzero;
        if (best == n_ || abs(m_.at(r, k)) < abs(m_.at(best, k))) best = r;
      }
      if (nonzero == 0) return;
      if (nonzero == 1) {
        if (best != k + 1) conj_swap(k + 1, best);
        return;
      }
      for (std::size_t r = k + 1; r < n_; ++r) {
        if (r == best || m_.at(r, k) == 0) continue;
        conj_shear(r, best, -symmetric_quotient(m_.at(r, k), m_.at(best, k)));
      }
    }
  }

  // Makes M[k][k] = 1 from the Bezout pair of (pivot, d * gamma) and one
  // paired atom through a zero slot: gamma sits at (grow, k), the slot row
  // zrow has a zero in column k. With p a + q d gamma = 1 and
  // mu = (1 - a) / d, loading the slot with d q gamma and firing the atom
  // conj(E_{zrow,k}(-p), E_{k,zrow}(d mu)) adds d mu (d q gamma + p a) = 1 - a
  // to the pivot. gcd(a, d gamma) = 1 always holds for genuine members.
  bool pivot_one(std::size_t k, std::size_t grow, std::size_t zrow) {
    Int a = m_.at(k, k);
    Int gamma = m_.at(grow, k);
    ExtGcd eg = extended_gcd(a, d_ * gamma);
    if (eg.g != 1) return false;
    Int pp = eg.x, qq = eg.y;
    if (gamma != 0) {
      // keep the Bezout coefficients small
      Int shift = symmetric_quotient(pp, d_ * gamma);
      pp -= shift * d_ * gamma;
      qq += shift * a;
    }
    Int mu = (1 - a) / d_;
    plain_left(zrow, grow, d_ * qq);
    paired_left(k, zrow, -pp, d_ * mu);
    return m_.at(k, k) == 1;
  }

  // With column k equal to e_k, clear row k by column operations.
  void clear_cross(std::size_t k) {
    for (std::size_t j = 0; j < n_; ++j)
      if (j != k && m_.at(k, j) != 0) plain_right(k, j, -m_.at(k, j));
  }

  // --- the 2x2 corner ------------------------------------------------------
  //
  // After the peel the whole matrix is the identity outside the trailing
  // 2x2 block (a, b; c, e), det = 1, congruent to I mod d. The block is
  // finished by a best-first search over corner states whose moves are the
  // free conjugations, the plain and paired atoms inside the block, and
  // slot-borrow composites through the clean spare index n-3. The search
  // runs on plain 4-tuples; the winning path is then replayed through the
  // letter-emitting primitives, and run() checks the final identity.

  struct Corner {
    Int a, b, c, e;
    bool operator<(const Corner& o) const {
      if (a != o.a) return a < o.a;
      if (b != o.b) return b < o.b;
      if (c != o.c) return c < o.c;
      return e < o.e;
    }
  };

  struct CornerMove {
    int op;  // see apply_corner_move
    Int t, s;
  };

  Corner read_corner(std::size_t p, std::size_t q) const {
    return {m_.at(p, p), m_.at(p, q), m_.at(q, p), m_.at(q, q)};
  }

  bool corner_finishable(const Corner& c) const {
    if (c.a == 1 || c.e == 1 || c.b == 0 || c.c == 0) return true;
    if (c.c != 0 && (c.a - 1) % (d_ * c.c) == 0) return true;
    if (c.b != 0 && (c.a - 1) % (d_ * c.b) == 0) return true;
    if (c.c != 0 && (c.e - 1) % (d_ * c.c) == 0) return true;
    if (c.b != 0 && (c.e - 1) % (d_ * c.b) == 0) return true;
    return false;
  }

  static unsigned corner_score(const Corner& c) {
    auto bits = [](const Int& v) -> unsigned {
      if (v == 0) return 0;
      return 1 + static_cast<unsigned>(boost::multiprecision::msb(abs(v)));
    };
    return bits(c.a - 1) + bits(c.b) + bits(c.c) + bits(c.e - 1);
  }

  // State transition matching apply_corner_move exactly; nullopt when the
  // move does not apply.
  std::optional<Corner> simulate_corner_move(const Corner& x, const CornerMove& m) const {
    const Int &a = x.a, &b = x.b, &c = x.c, &e = x.e;
    const Int& t = m.t;
    const Int& s = m.s;
    switch (m.op) {
      case 0: return Corner{a + t * c, b + t * (e - a) - t * t * c, c, e - t * c};
      case 1: return Corner{a - t * b, b, c + t * (a - e) - t * t * b, e + t * b};
      case 2: return Corner{e, c, b, a};
      case 3: return Corner{a, -b, -c, e};
      case 4: return Corner{a + t * c, b + t * e, c, e};
      case 5: return Corner{a, b, c + t * a, e + t * b};
      case 6: return Corner{a, b + t * a, c, e + t * c};
      case 7: return Corner{a + t * b, b, c + t * e, e};
      case 8: {
        Int wa = c - s * a, wb = e - s * b;
        return Corner{a + t * wa, b + t * wb, c + s * t * wa, e + s * t * wb};
      }
      case 9: {
        Int wa = a - s * c, wb = b - s * e;
        return Corner{a + s * t * wa, b + s * t * wb, c + t * wa, e + t * wb};
      }
      case 10: {
        Int va = a + s * b, vc = c + s * e;
        return Corner{a - s * t * va, b + t * va, c - s * t * vc, e + t * vc};
      }
      case 11: {
        Int vb = b + s * a, ve = e + s * c;
        return Corner{a + t * vb, b - s * t * vb, c + t * ve, e - s * t * ve};
      }
      case 12: return simulate_borrow(x, m.t, /*row_side=*/true);
      case 13: return simulate_borrow(x, m.t, /*row_side=*/false);
    }
    return std::nullopt;
  }

  void apply_corner_move(const CornerMove& m, std::size_t p, std::size_t q) {
    switch (m.op) {
      case 0: conj_shear(p, q, m.t); return;
      case 1: conj_shear(q, p, m.t); return;
      case 2: conj_swap(p, q); return;
      case 3:
        conj_move(GeneratorSymbol(GenFamily::F, static_cast<int>(p) + 1, n_), Int(1));
        return;
      case 4: plain_left(p, q, m.t); return;
      case 5: plain_left(q, p, m.t); return;
      case 6: plain_right(p, q, m.t); return;
      case 7: plain_right(q, p, m.t); return;
      case 8: paired_left(p, q, m.s, m.t); return;
      case 9: paired_left(q, p, m.s, m.t); return;
      case 10: paired_right(p, q, m.s, m.t); return;
      case 11: paired_right(q, p, m.s, m.t); return;
      case 12: apply_borrow(p, q, m.t, /*row_side=*/true); return;
      case 13: apply_borrow(p, q, m.t, /*row_side=*/false); return;
    }
  }

  // Bezout data for the borrow composites. Row side pairs the pivot with
  // the column entry c, column side with the row entry b.
  struct BorrowPlan {
    Int pp, qq, mu;
  };

  std::optional<BorrowPlan> borrow_plan(const Corner& x, const Int& shift,
                                        bool row_side) const {
    const Int& other = row_side ? x.c : x.b;
    ExtGcd eg = extended_gcd(x.a, d_ * other);
    if (eg.g != 1) return std::nullopt;
    Int pp = eg.x, qq = eg.y;
    if (other != 0) {
      Int k = symmetric_quotient(pp, d_ * other) + shift;
      pp -= k * d_ * other;
      qq += k * x.a;
    }
    return BorrowPlan{pp, qq, (1 - x.a) / d_};
  }

  // Borrow simulated on a scratch 3x3 block (spare, p, q), mirroring
  // apply_borrow operation for operation.
  std::optional<Corner> simulate_borrow(const Corner& x, const Int& shift,
                                        bool row_side) const {
    auto plan = borrow_plan(x, shift, row_side);
    if (!plan) return std::nullopt;
    IntegerMatrix m(3);
    m.at(0, 0) = 1;
    m.at(1, 1) = x.a;
    m.at(1, 2) = x.b;
    m.at(2, 1) = x.c;
    m.at(2, 2) = x.e;
    auto row_add = [&](int i, int j, const Int& t) {
      for (int k = 0; k < 3; ++k) m.at(i, k) += t * m.at(j, k);
    };
    auto col_add = [&](int i, int j, const Int& t) {
      // column j += t * column i
      for (int k = 0; k < 3; ++k) m.at(k, j) += t * m.at(k, i);
    };
    if (row_side) {
      row_add(0, 2, d_ * plan->qq);
      // paired_left(p=1, slot=0, s=-pp, t=d mu)
      Int s = -plan->pp, t = d_ * plan->mu;
      Int w0 = m.at(0, 0) - s * m.at(1, 0), w1 = m.at(0, 1) - s * m.at(1, 1),
          w2 = m.at(0, 2) - s * m.at(1, 2);
      m.at(1, 0) += t * w0;
      m.at(1, 1) += t * w1;
      m.at(1, 2) += t * w2;
      m.at(0, 0) += s * t * w0;
      m.at(0, 1) += s * t * w1;
      m.at(0, 2) += s * t * w2;
    } else {
      col_add(2, 0, d_ * plan->qq);
      // paired_right(slot=0, p=1, s=pp, t=d mu)
      Int s = plan->pp, t = d_ * plan->mu;
      Int v0 = m.at(0, 0) + s * m.at(0, 1), v1 = m.at(1, 0) + s * m.at(1, 1),
          v2 = m.at(2, 0) + s * m.at(2, 1);
      m.at(0, 1) += t * v0;
      m.at(1, 1) += t * v1;
      m.at(2, 1) += t * v2;
      m.at(0, 0) -= s * t * v0;
      m.at(1, 0) -= s * t * v1;
      m.at(2, 0) -= s * t * v2;
    }
    if (m.at(1, 1) != 1) return std::nullopt;
    for (int r : {0, 2})
      if (m.at(r, 1) != 0) row_add(r, 1, -m.at(r, 1));
    for (int j : {0, 2})
      if (m.at(1, j) != 0) col_add(1, j, -m.at(1, j));
    // conj swap of (spare, p): the new corner is read at the old spare index
    return Corner{m.at(0, 0), m.at(0, 2), m.at(2, 0), m.at(2, 2)};
  }

  void apply_borrow(std::size_t p, std::size_t q, const Int& shift, bool row_side) {
    const std::size_t sp = n_ - 3;
    auto plan = borrow_plan(read_corner(p, q), shift, row_side);
    if (!plan) throw std::logic_error("internal: borrow replay diverged");
    if (row_side) {
      plain_left(sp, q, d_ * plan->qq);
      paired_left(p, sp, -plan->pp, d_ * plan->mu);
    } else {
      plain_right(q, sp, d_ * plan->qq);
      paired_right(sp, p, plan->pp, d_ * plan->mu);
    }
    if (m_.at(p, p) != 1) throw std::logic_error("internal: borrow replay diverged");
    for (std::size_t r = 0; r < n_; ++r)
      if (r != p && m_.at(r, p) != 0) plain_left(r, p, -m_.at(r, p));
    for (std::size_t j = 0; j < n_; ++j)
      if (j != p && m_.at(p, j) != 0) plain_right(p, j, -m_.at(p, j));
    conj_swap(sp, p);
  }

  // Candidate parameters: one good shot per move family plus unit steps.
  std::vector<CornerMove> corner_candidates(const Corner& x) const {
    std::vector<CornerMove> out;
    auto add = [&](int op, Int t, Int s = Int(0)) {
      if ((op == 0 || op == 1 || op >= 4) && t == 0) return;
      out.push_back({op, std::move(t), std::move(s)});
    };
    const Int &a = x.a, &b = x.b, &c = x.c, &e = x.e;
    if (c != 0) {
      add(0, -symmetric_quotient(a, c));
      add(0, symmetric_quotient(e, c));
      add(0, Int(1));
      add(0, Int(-1));
    }
    if (b != 0) {
      add(1, symmetric_quotient(a, b));
      add(1, -symmetric_quotient(e, b));
      add(1, Int(1));
      add(1, Int(-1));
    }
    add(2, Int(0));
    add(3, Int(0));
    if (c != 0) add(4, -d_ * symmetric_quotient(a - 1, d_ * c));
    add(5, -d_ * symmetric_quotient(c, d_ * a));
    add(6, -d_ * symmetric_quotient(b, d_ * a));
    if (b != 0) add(7, -d_ * symmetric_quotient(a - 1, d_ * b));
    add(4, d_);
    add(4, -d_);
    add(5, d_);
    add(5, -d_);
    add(6, d_);
    add(6, -d_);
    add(7, d_);
    add(7, -d_);
    // paired atoms: unit twists, a size shot, and a digit shot lifting the
    // pivot to 1 mod d^2
    Int ainv_mod_d = 0;
    {
      ExtGcd eg = extended_gcd(a, d_);
      if (eg.g == 1) ainv_mod_d = ((eg.x % d_) + d_) % d_;
    }
    for (int tt : {1, -1}) {
      Int t = tt * d_;
      add(8, t, symmetric_quotient(a + t * c, t * a));
      add(9, t, symmetric_quotient(e + t * b, t * e));
      for (Int s : {Int(1), Int(-1)}) {
        add(8, t, s);
        add(9, t, s);
        add(10, t, s);
        add(11, t, s);
      }
      if (ainv_mod_d != 0) {
        // solve a + t (c - s a) == 1 mod d^2 for s
        Int mu = (a - 1) / d_;
        Int s_digit = (((tt * (mu + tt * c)) % d_) * ainv_mod_d) % d_;
        if (s_digit < 0) s_digit += d_;
        add(8, t, s_digit);
        add(8, t, s_digit - d_);
      }
    }
    for (Int k : {Int(0), Int(1), Int(-1)}) {
      add(12, k);
      add(13, k);
    }
    return out;
  }

  bool corner_search(const Corner& start, std::vector<CornerMove>& path) const {
    struct Node {
      Corner state;
      int parent;
      CornerMove via;
    };
    std::vector<Node> nodes;
    std::set<Corner> seen;
    // (score, node index); lowest score first, FIFO on ties
    std::multimap<unsigned, int> frontier;
    nodes.push_back({start, -1, {0, 0, 0}});
    seen.insert(start);
    frontier.emplace(corner_score(start), 0);
    int expanded = 0;
    while (!frontier.empty() && expanded < kCornerNodeBudget) {
      int id = frontier.begin()->second;
      frontier.erase(frontier.begin());
      ++expanded;
      Corner cur = nodes[id].state;
      for (const CornerMove& mv : corner_candidates(cur)) {
        auto nxt = simulate_corner_move(cur, mv);
        if (!nxt) continue;
        if (!seen.insert(*nxt).second) continue;
        nodes.push_back({*nxt, id, mv});
        int nid = static_cast<int>(nodes.size()) - 1;
        if (corner_finishable(*nxt)) {
          std::vector<CornerMove> rev;
          for (int t = nid; nodes[t].parent >= 0; t = nodes[t].parent)
            rev.push_back(nodes[t].via);
          path.assign(rev.rbegin(), rev.rend());
          return true;
        }
        frontier.emplace(corner_score(*nxt), nid);
      }
    }
    return false;
  }

  void corner() {
    const std::size_t p = n_ - 2, q = n_ - 1;
    if (!corner_finishable(read_corner(p, q))) {
      std::vector<CornerMove> path;
      if (!corner_search(read_corner(p, q), path))
        throw ObstructionUnresolved("corner search exhausted its node budget",
                                    conjugate_back());
      for (const CornerMove& mv : path) apply_corner_move(mv, p, q);
    }
    finish_corner(p, q);
  }

  // Finishing sequences from a finishable state; afterwards the block is
  // the identity (checked in run()). A triangular block has unit diagonal
  // automatically: a e = 1 with a == 1 mod d and d > 2.
  void finish_corner(std::size_t p, std::size_t q) {
    Corner c = read_corner(p, q);
    if (c.a != 1 && c.b != 0 && c.c != 0) {
      if (c.e == 1) {
        conj_swap(p, q);
      } else if ((c.a - 1) % (d_ * c.c) == 0) {
        plain_left(p, q, (1 - c.a) / c.c);
      } else if ((c.a - 1) % (d_ * c.b) == 0) {
        plain_right(q, p, (1 - c.a) / c.b);
      } else if ((c.e - 1) % (d_ * c.c) == 0) {
        plain_right(p, q, (1 - c.e) / c.c);
        conj_swap(p, q);
      } else if ((c.e - 1) % (d_ * c.b) == 0) {
        plain_left(q, p, (1 - c.e) / c.b);
        conj_swap(p, q);
      }
    }
    if (m_.at(p, p) != 1) return;  // impossible for genuine members; run() reports
    if (m_.at(q, p) != 0) plain_left(q, p, -m_.at(q, p));
    if (m_.at(p, q) != 0) plain_right(p, q, -m_.at(p, q));
  }

  // --- bookkeeping ---------------------------------------------------------

  void require_level(const Int& t) const {
    if (t % d_ != 0)
      throw std::logic_error("internal: emitted exponent not a multiple of d");
  }

  GeneratorWord base_conj(std::size_t i, std::size_t j) const {
    return conjugator_to_E12(static_cast<int>(i) + 1, static_cast<int>(j) + 1, n_);
  }

  void emit(ConjugacyWord& side, bool prepend, GeneratorWord atom_conj, Int exp) {
    GeneratorWord conj = rinv_;
    conj.insert(conj.end(), atom_conj.begin(), atom_conj.end());
    GeneratorSymbol base(GenFamily::E, 1, 2, n_);
    if (prepend) {
      side.letters.insert(side.letters.begin(), {std::move(conj), base, std::move(exp)});
    } else {
      side.push(std::move(conj), base, std::move(exp));
    }
  }

  void apply_symbol_left(const GeneratorSymbol& sym, const Int& exp) {
    std::size_t i = sym.i - 1, j = sym.j > 0 ? sym.j - 1 : 0;
    if (sym.family == GenFamily::E) {
      for (std::size_t c = 0; c < n_; ++c) m_.at(i, c) += exp * m_.at(j, c);
    } else if (sym.family == GenFamily::F) {
      if (exp % 2 != 0)
        for (std::size_t c = 0; c < n_; ++c) m_.at(i, c) = -m_.at(i, c);
    } else {  // Atilde swap
      if (exp % 2 != 0)
        for (std::size_t c = 0; c < n_; ++c) std::swap(m_.at(i, c), m_.at(j, c));
    }
  }

  void apply_symbol_right(const GeneratorSymbol& sym, const Int& exp) {
    std::size_t i = sym.i - 1, j = sym.j > 0 ? sym.j - 1 : 0;
    if (sym.family == GenFamily::E) {
      for (std::size_t r = 0; r < n_; ++r) m_.at(r, j) += exp * m_.at(r, i);
    } else if (sym.family == GenFamily::F) {
      if (exp % 2 != 0)
        for (std::size_t r = 0; r < n_; ++r) m_.at(r, i) = -m_.at(r, i);
    } else {
      if (exp % 2 != 0)
        for (std::size_t r = 0; r < n_; ++r) std::swap(m_.at(r, i), m_.at(r, j));
    }
  }

  // Residual in the original coordinates, for diagnostics.
  IntegerMatrix conjugate_back() const {
    detail::WordEvaluator ev(Ambient::GL, n_);
    IntegerMatrix rinv = ev.word(rinv_);
    IntegerMatrix r = ev.word(inverted(rinv_));
    return rinv * m_ * r;
  }

  static constexpr int kCornerNodeBudget = 8000;

  IntegerMatrix m_;
  std::size_t n_;
  Int d_;
  int variation_;
  GeneratorWord rinv_;
  ConjugacyWord left_{Ambient::GL, 0};
  ConjugacyWord right_{Ambient::GL, 0};
};

}  // namespace detail

// Conjugacy word with base E(1,2) and exponents divisible by d, evaluating
// exactly to m; requires m in Gamma_d(g), d >= 3, g >= 3. Unresolved corner
// obstructions are retried from a few different conjugates before giving up.
inline ConjugacyWord factor_gammad(const IntegerMatrix& m, const Int& d) {
  if (d < 3) throw std::invalid_argument("factor_gammad requires d >= 3");
  if (m.dim() < 3) throw std::invalid_argument("factor_gammad requires g >= 3");
  if (!is_in_gamma(m, d)) throw FactorError("matrix is not in Gamma_d(g)");
  constexpr int kAttempts = 4;
  for (int v = 0;; ++v) {
    try {
      detail::GammadReducer red(m, d, v);
      ConjugacyWord w = red.run();
      if (!verify_factorization(w, m))
        throw ObstructionUnresolved("level-d factorization failed verification", m);
      return w;
    } catch (const ObstructionUnresolved&) {
      if (v + 1 >= kAttempts) throw;
    }
  }
}

}  // namespace ursp

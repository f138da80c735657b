#pragma once

// The symplectic group Sp(2g,Z), its block-upper-triangular subgroup
// urSp(2g) = { (A, B; 0, tA^-1) : A unimodular, A^-1 B symmetric }, the
// abelian subgroup of elements with A = I, and level-d membership.
//
// Convention: coordinates on H_1 are ordered (b_1..b_g, a_1..a_g) with the
// meridian classes b_i first. The group condition uses J = (0, I; -I, 0);
// the intersection pairing below is the transposed form, which is the one
// that makes <a_i, b_i> = 1 and meridian transvections land in urSp.

#include "ursp/generators.hpp"
#include "ursp/integer_matrix.hpp"

#include <stdexcept>
#include <variant>
#include <vector>

namespace ursp {

inline void require_even_dim(const IntegerMatrix& m) {
  if (m.dim() == 0 || m.dim() % 2 != 0)
    throw std::invalid_argument("matrix dimension must be even and positive");
}

inline bool is_symplectic(const IntegerMatrix& m) {
  require_even_dim(m);
  IntegerMatrix j = j_matrix(m.dim() / 2);
  return m.transpose() * j * m == j;
}

// Block accessors for a 2g x 2g matrix; blocks are indexed
// (0,0)=A, (0,1)=B, (1,0)=C, (1,1)=D.
inline IntegerMatrix block_of(const IntegerMatrix& m, int bi, int bj) {
  require_even_dim(m);
  std::size_t g = m.dim() / 2;
  IntegerMatrix r(g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) r.at(i, j) = m.at(bi * g + i, bj * g + j);
  return r;
}

inline IntegerMatrix assemble_blocks(const IntegerMatrix& a, const IntegerMatrix& b,
                                     const IntegerMatrix& c, const IntegerMatrix& d) {
  std::size_t g = a.dim();
  if (b.dim() != g || c.dim() != g || d.dim() != g)
    throw std::invalid_argument("block dimension mismatch");
  IntegerMatrix m(2 * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) {
      m.at(i, j) = a.at(i, j);
      m.at(i, g + j) = b.at(i, j);
      m.at(g + i, j) = c.at(i, j);
      m.at(g + i, g + j) = d.at(i, j);
    }
  return m;
}

// Upper-triangular symplectic condition, direct form: lower-left block is
// zero and the matrix is symplectic.
inline bool is_ursp(const IntegerMatrix& m) {
  require_even_dim(m);
  if (!block_of(m, 1, 0).is_zero()) return false;
  return is_symplectic(m);
}

// Equivalent characterization through the blocks: A unimodular, A^-1 B
// symmetric (tested integrally as A tB == B tA) and D = tA^-1. The suite
// checks that this always agrees with is_ursp.
inline bool is_ursp_block_form(const IntegerMatrix& m) {
  require_even_dim(m);
  if (!block_of(m, 1, 0).is_zero()) return false;
  IntegerMatrix a = block_of(m, 0, 0);
  IntegerMatrix b = block_of(m, 0, 1);
  IntegerMatrix d = block_of(m, 1, 1);
  if (!is_unimodular(a)) return false;
  if (a * b.transpose() != b * a.transpose()) return false;
  return d.transpose() * a == IntegerMatrix::identity(a.dim());
}

inline bool is_in_level(const IntegerMatrix& m, const Int& d) {
  return m.congruent_to_identity(d);
}

// Intersection pairing in (b | a) coordinates: <x, y> = sum_k x_a[k] y_b[k]
// - x_b[k] y_a[k]. On basis vectors <a_i, b_i> = 1 = -<b_i, a_i>.
inline Int symplectic_pairing(const std::vector<Int>& x, const std::vector<Int>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("vector length mismatch");
  if (x.size() == 0 || x.size() % 2 != 0)
    throw std::invalid_argument("vectors must have positive even length");
  std::size_t g = x.size() / 2;
  Int s = 0;
  for (std::size_t k = 0; k < g; ++k) s += x[g + k] * y[k] - x[k] * y[g + k];
  return s;
}

class SymplecticMatrix {
 public:
  explicit SymplecticMatrix(IntegerMatrix m) : m_(std::move(m)) {
    if (!is_symplectic(m_)) throw std::invalid_argument("matrix is not symplectic");
  }
  std::size_t genus() const { return m_.dim() / 2; }
  const IntegerMatrix& matrix() const { return m_; }

 private:
  IntegerMatrix m_;
};

// Element of urSp(2g), kept in block form. D = tA^-1 is computed once at
// construction and carried through products, so multiplication and
// inversion stay division-free.
class UrSpElement {
 public:
  UrSpElement(IntegerMatrix a, IntegerMatrix b)
      : a_(std::move(a)), b_(std::move(b)) {
    if (a_.dim() != b_.dim()) throw std::invalid_argument("block dimension mismatch");
    if (!is_unimodular(a_)) throw std::invalid_argument("A block is not unimodular");
    if (a_ * b_.transpose() != b_ * a_.transpose())
      throw std::invalid_argument("A^-1 B is not symmetric");
    d_ = unimodular_inverse(a_).transpose();
  }

  static UrSpElement identity(std::size_t g) {
    return UrSpElement(IntegerMatrix::identity(g), IntegerMatrix(g),
                       IntegerMatrix::identity(g));
  }

  static UrSpElement from_matrix(const IntegerMatrix& m) {
    if (!is_ursp(m)) throw std::invalid_argument("matrix is not in urSp(2g)");
    return UrSpElement(block_of(m, 0, 0), block_of(m, 0, 1), block_of(m, 1, 1));
  }

  std::size_t genus() const { return a_.dim(); }
  const IntegerMatrix& a() const { return a_; }
  const IntegerMatrix& b() const { return b_; }
  const IntegerMatrix& d() const { return d_; }

  IntegerMatrix assemble() const {
    return assemble_blocks(a_, b_, IntegerMatrix(a_.dim()), d_);
  }

  UrSpElement operator*(const UrSpElement& o) const {
    return UrSpElement(a_ * o.a_, a_ * o.b_ + b_ * o.d_, d_ * o.d_);
  }

  UrSpElement inverse() const {
    IntegerMatrix ainv = d_.transpose();
    IntegerMatrix dinv = a_.transpose();
    return UrSpElement(ainv, -(ainv * b_ * dinv), dinv);
  }

  UrSpElement pow(long e) const {
    UrSpElement acc = identity(genus());
    if (e == 0) return acc;
    UrSpElement base = e < 0 ? inverse() : *this;
    unsigned long k = e < 0 ? ~static_cast<unsigned long>(e) + 1ul
                            : static_cast<unsigned long>(e);
    while (k) {
      if (k & 1) acc = acc * base;
      k >>= 1;
      if (k) base = base * base;
    }
    return acc;
  }

  bool operator==(const UrSpElement& o) const { return a_ == o.a_ && b_ == o.b_; }
  bool operator!=(const UrSpElement& o) const { return !(*this == o); }

  bool is_identity() const { return a_.is_identity() && b_.is_zero(); }

  bool congruent_to_identity(const Int& d) const {
    return assemble().congruent_to_identity(d);
  }

 private:
  UrSpElement(IntegerMatrix a, IntegerMatrix b, IntegerMatrix d)
      : a_(std::move(a)), b_(std::move(b)), d_(std::move(d)) {}

  IntegerMatrix a_, b_, d_;
};

// (a, 0; 0, ta^-1); a group homomorphism GL(g,Z) -> urSp(2g).
inline UrSpElement embed_gl(const IntegerMatrix& a) {
  if (!is_unimodular(a)) throw std::invalid_argument("matrix is not unimodular");
  return UrSpElement(a, IntegerMatrix(a.dim()));
}

// Element of the abelian subgroup { (I, B; 0, I) : B symmetric }.
struct SgElement {
  explicit SgElement(IntegerMatrix b) : b(std::move(b)) {
    if (this->b != this->b.transpose())
      throw std::invalid_argument("B block must be symmetric");
  }
  IntegerMatrix b;

  std::size_t genus() const { return b.dim(); }
  UrSpElement to_ursp() const {
    return UrSpElement(IntegerMatrix::identity(b.dim()), b);
  }
};

// Membership in S_g (d <= 1) or its level-d kernel S_g[d].
inline bool is_in_Sg(const UrSpElement& m, const Int& d = 1) {
  if (!m.a().is_identity()) return false;
  if (d <= 1) return true;
  for (std::size_t i = 0; i < m.genus(); ++i)
    for (std::size_t j = 0; j < m.genus(); ++j)
      if (m.b().at(i, j) % d != 0) return false;
  return true;
}

// 2g x 2g realization, defined for families X, Y, Z, Atilde.
//
// X(i,j) is assembled as (E_{i,j}, 0; 0, tE_{i,j}^-1); the lower-right
// block I - unit(j,i) is the unique choice making the element symplectic
// (see the generator tests for the failing variant).
inline UrSpElement ursp_generator(const GeneratorSymbol& s) {
  switch (s.family) {
    case GenFamily::X: return embed_gl(e_matrix(s.g, s.i, s.j));
    case GenFamily::Y:
      return UrSpElement(IntegerMatrix::identity(s.g), sym_unit(s.g, s.i, s.j));
    case GenFamily::Z: return embed_gl(f_matrix(s.g, s.i));
    case GenFamily::Atilde: return embed_gl(a_matrix(s.g, s.i, s.j));
    default:
      throw std::invalid_argument(s.to_string() + " is not an urSp(2g) symbol");
  }
}

// Spec-level constructor covering every family; E, F, S yield g x g
// matrices, X, Y, Z, Atilde yield urSp elements.
inline std::variant<IntegerMatrix, UrSpElement> make_generator(const GeneratorSymbol& s) {
  switch (s.family) {
    case GenFamily::E:
    case GenFamily::F:
    case GenFamily::S:
      return gl_matrix(s);
    default:
      return ursp_generator(s);
  }
}

}  // namespace ursp

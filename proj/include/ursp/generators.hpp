#pragma once

// Named generator matrices and the symbol alphabet shared by the word
// grammar, the factorization routines and the CLI.
//
// Families E, F, S, Atilde name g x g matrices in GL(g,Z); families
// X, Y, Z, Atilde name 2g x 2g elements of urSp(2g). Atilde is the one
// family that lives in both worlds (the block-diagonal double of the
// index swap A_{i,j}). Indices are 1-based, as in the text grammar.

#include "ursp/integer_matrix.hpp"

#include <stdexcept>
#include <string>

namespace ursp {

// E_{i,j}-style unit: single 1 at 1-based position (i, j).
inline IntegerMatrix elem_unit(std::size_t g, int i, int j) {
  return IntegerMatrix::unit(g, static_cast<std::size_t>(i - 1),
                             static_cast<std::size_t>(j - 1));
}

// Symmetric unit S_{i,j}: ones at (i,j) and (j,i); S_{i,i} has a single 1.
inline IntegerMatrix sym_unit(std::size_t g, int i, int j) {
  IntegerMatrix m(g);
  m.at(i - 1, j - 1) = 1;
  m.at(j - 1, i - 1) = 1;
  return m;
}

inline IntegerMatrix e_matrix(std::size_t g, int i, int j) {
  IntegerMatrix m = IntegerMatrix::identity(g);
  m.at(i - 1, j - 1) = 1;
  return m;
}

// Diagonal sign flip at position i.
inline IntegerMatrix f_matrix(std::size_t g, int i) {
  IntegerMatrix m = IntegerMatrix::identity(g);
  m.at(i - 1, i - 1) = -1;
  return m;
}

// Index swap: the permutation matrix exchanging i and j. Involutive and
// symmetric, so it equals its own transpose and inverse.
inline IntegerMatrix a_matrix(std::size_t g, int i, int j) {
  IntegerMatrix m = IntegerMatrix::identity(g);
  m.at(i - 1, i - 1) = 0;
  m.at(j - 1, j - 1) = 0;
  m.at(i - 1, j - 1) = 1;
  m.at(j - 1, i - 1) = 1;
  return m;
}

// The standard symplectic form (0, I_g; -I_g, 0) on 2g coordinates.
inline IntegerMatrix j_matrix(std::size_t g) {
  IntegerMatrix m(2 * g);
  for (std::size_t k = 0; k < g; ++k) {
    m.at(k, g + k) = 1;
    m.at(g + k, k) = -1;
  }
  return m;
}

enum class GenFamily { E, F, S, X, Y, Z, Atilde };

inline const char* family_name(GenFamily f) {
  switch (f) {
    case GenFamily::E: return "E";
    case GenFamily::F: return "F";
    case GenFamily::S: return "S";
    case GenFamily::X: return "X";
    case GenFamily::Y: return "Y";
    case GenFamily::Z: return "Z";
    case GenFamily::Atilde: return "Atilde";
  }
  return "?";
}

inline bool family_is_unary(GenFamily f) {
  return f == GenFamily::F || f == GenFamily::Z;
}

inline bool family_requires_distinct(GenFamily f) {
  return f == GenFamily::E || f == GenFamily::X || f == GenFamily::Atilde;
}

struct GeneratorSymbol {
  GenFamily family;
  int i = 0;
  int j = 0;  // unused for unary families
  std::size_t g = 0;

  GeneratorSymbol(GenFamily family, int i, std::size_t g)
      : family(family), i(i), g(g) {
    if (!family_is_unary(family))
      throw std::invalid_argument("symbol family needs two indices");
    validate();
  }

  GeneratorSymbol(GenFamily family, int i, int j, std::size_t g)
      : family(family), i(i), j(j), g(g) {
    if (family_is_unary(family) && j != 0)
      throw std::invalid_argument("symbol family takes one index");
    validate();
  }

  bool operator==(const GeneratorSymbol& o) const {
    return family == o.family && i == o.i && j == o.j && g == o.g;
  }
  bool operator!=(const GeneratorSymbol& o) const { return !(*this == o); }

  std::string to_string() const {
    std::string s = family_name(family);
    s += '(';
    s += std::to_string(i);
    if (!family_is_unary(family)) {
      s += ',';
      s += std::to_string(j);
    }
    s += ')';
    return s;
  }

 private:
  void validate() const {
    if (g < 1) throw std::invalid_argument("genus must be positive");
    auto in_range = [&](int k) { return 1 <= k && k <= static_cast<int>(g); };
    if (!in_range(i)) throw std::invalid_argument("index out of range in " + to_string());
    if (!family_is_unary(family)) {
      if (!in_range(j)) throw std::invalid_argument("index out of range in " + to_string());
      if (family_requires_distinct(family) && i == j)
        throw std::invalid_argument("indices must be distinct in " + to_string());
    }
  }
};

// g x g realization, defined for families E, F, S and Atilde.
inline IntegerMatrix gl_matrix(const GeneratorSymbol& s) {
  switch (s.family) {
    case GenFamily::E: return e_matrix(s.g, s.i, s.j);
    case GenFamily::F: return f_matrix(s.g, s.i);
    case GenFamily::S: return sym_unit(s.g, s.i, s.j);
    case GenFamily::Atilde: return a_matrix(s.g, s.i, s.j);
    default:
      throw std::invalid_argument(s.to_string() + " is not a GL(g,Z) symbol");
  }
}

}  // namespace ursp

#pragma once

// Constructive factorization inside urSp(2g).
//
// factor_Sg decomposes (I, B; 0, I) over conjugates of Y(1,1), using the
// swap identities A_{1,i} S_{i,i} A_{1,i} = S_{1,1},
// A_{1,i} S_{i,j} A_{1,i} = S_{1,j}, A_{2,j} S_{1,j} A_{2,j} = S_{1,2} and
// the expansion Y_{1,2} = Y_{1,1}^-1 (X_{2,1} Y_{1,1} X_{2,1}^-1) Y_{2,2}^-1.
//
// factor_ursp_level runs the full level-d pipeline: the A block is factored
// in Gamma_d(g) and embedded as (A, 0; 0, tA^-1), and the leftover
// embed(A)^-1 x lands in S_g[d], where factor_Sg finishes. For d = 2 the
// A part rides on base Z(1), for d >= 3 on base X(1,2)^d; the S_g part
// always rides on Y(1,1)^d.

#include "ursp/congruence.hpp"
#include "ursp/generators.hpp"
#include "ursp/integer_matrix.hpp"
#include "ursp/symplectic.hpp"
#include "ursp/words.hpp"

#include <stdexcept>

namespace ursp {

// Conjugacy word with base Y(1,1), exponents multiples of max(d,1),
// evaluating to the element with block B.
inline ConjugacyWord factor_Sg(const SgElement& m, const Int& d = 1) {
  std::size_t g = m.genus();
  ConjugacyWord out(Ambient::UrSp, g);
  GeneratorSymbol y11(GenFamily::Y, 1, 1, g);

  for (std::size_t i = 0; i < g; ++i) {
    Int b = m.b.at(i, i);
    if (b == 0) continue;
    if (d >= 2 && b % d != 0)
      throw FactorError("B block is not divisible by the modulus");
    GeneratorWord conj;
    if (i != 0)
      conj.push_back({GeneratorSymbol(GenFamily::Atilde, 1, static_cast<int>(i) + 1, g), Int(1)});
    out.push(std::move(conj), y11, b);
  }
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i + 1; j < g; ++j) {
      Int b = m.b.at(i, j);
      if (b == 0) continue;
      if (d >= 2 && b % d != 0)
        throw FactorError("B block is not divisible by the modulus");
      // route (i,j) to (1,2), then expand Y(1,2)^b
      GeneratorWord w;
      if (i != 0)
        w.push_back({GeneratorSymbol(GenFamily::Atilde, 1, static_cast<int>(i) + 1, g), Int(1)});
      if (j != 1)
        w.push_back({GeneratorSymbol(GenFamily::Atilde, 2, static_cast<int>(j) + 1, g), Int(1)});
      GeneratorWord wx = w, wa = w;
      wx.push_back({GeneratorSymbol(GenFamily::X, 2, 1, g), Int(1)});
      wa.push_back({GeneratorSymbol(GenFamily::Atilde, 1, 2, g), Int(1)});
      out.push(w, y11, -b);
      out.push(std::move(wx), y11, b);
      out.push(std::move(wa), y11, -b);
    }
  return out;
}

namespace detail {

inline GeneratorSymbol embed_symbol(const GeneratorSymbol& s) {
  switch (s.family) {
    case GenFamily::E: return GeneratorSymbol(GenFamily::X, s.i, s.j, s.g);
    case GenFamily::F: return GeneratorSymbol(GenFamily::Z, s.i, s.g);
    case GenFamily::Atilde: return s;
    default:
      throw std::invalid_argument("cannot embed symbol " + s.to_string());
  }
}

inline GeneratorWord embed_word(const GeneratorWord& w) {
  GeneratorWord r;
  r.reserve(w.size());
  for (const auto& f : w) r.push_back({embed_symbol(f.symbol), f.exponent});
  return r;
}

}  // namespace detail

// Image of a GL(g,Z) conjugacy word under A |-> (A, 0; 0, tA^-1).
inline ConjugacyWord embed_conjugacy_word(const ConjugacyWord& w) {
  if (w.ambient != Ambient::GL)
    throw std::invalid_argument("word is already an urSp(2g) word");
  ConjugacyWord out(Ambient::UrSp, w.g);
  for (const auto& l : w.letters)
    out.push(detail::embed_word(l.conjugator), detail::embed_symbol(l.base), l.exponent);
  return out;
}

// Level-d factorization in urSp(2g): bases { Z(1), Y(1,1) } for d = 2 and
// { X(1,2), Y(1,1) } with exponent multiples of d for d >= 3.
inline ConjugacyWord factor_ursp_level(const UrSpElement& x, const Int& d) {
  std::size_t g = x.genus();
  if (d < 2) throw std::invalid_argument("modulus must be at least 2");
  if (d >= 3 && g < 3)
    throw std::invalid_argument("level-d factorization needs g >= 3 when d >= 3");
  if (!x.congruent_to_identity(d))
    throw FactorError("element is not in urSp(2g)[d]");

  ConjugacyWord a_part =
      d == 2 ? factor_gamma2(x.a()) : factor_gammad(x.a(), d);
  ConjugacyWord out = embed_conjugacy_word(a_part);

  UrSpElement residual = embed_gl(x.a()).inverse() * x;
  if (!is_in_Sg(residual, d))
    throw ObstructionUnresolved("pipeline residual left S_g[d]", residual.assemble());
  out = concat(std::move(out), factor_Sg(SgElement(residual.b()), d));

  if (evaluate_word(out) != x.assemble())
    throw ObstructionUnresolved("level-d factorization failed verification",
                                x.assemble());
  return out;
}

}  // namespace ursp

#pragma once

// Seeded random element builders for the round-trip harness and the test
// corpora. The generator is a fixed splitmix64 so corpora are reproducible
// across platforms and standard-library versions.

#include "ursp/generators.hpp"
#include "ursp/integer_matrix.hpp"
#include "ursp/mapping_class.hpp"
#include "ursp/symplectic.hpp"
#include "ursp/words.hpp"

#include <cstdint>
#include <vector>

namespace ursp {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [lo, hi]
  long range(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  int sign() { return next() & 1 ? 1 : -1; }
  bool chance(int percent) { return range(0, 99) < percent; }

 private:
  std::uint64_t state_;
};

// Random word over E(i,j)^(+-1,+-2), F(i), Atilde(i,j).
inline GeneratorWord random_gl_word(std::size_t g, Rng& rng, int len) {
  GeneratorWord w;
  for (int t = 0; t < len; ++t) {
    int which = static_cast<int>(rng.range(0, 3));
    if (which <= 1 || g < 2) {
      int i = static_cast<int>(rng.range(1, static_cast<long>(g)));
      if (g >= 2 && which <= 1) {
        int j = i;
        while (j == i) j = static_cast<int>(rng.range(1, static_cast<long>(g)));
        w.push_back({GeneratorSymbol(GenFamily::E, i, j, g),
                     Int(rng.sign() * rng.range(1, 2))});
      } else {
        w.push_back({GeneratorSymbol(GenFamily::F, i, g), Int(1)});
      }
    } else if (which == 2) {
      int i = static_cast<int>(rng.range(1, static_cast<long>(g)));
      w.push_back({GeneratorSymbol(GenFamily::F, i, g), Int(1)});
    } else {
      int i = static_cast<int>(rng.range(1, static_cast<long>(g)));
      int j = i;
      while (j == i) j = static_cast<int>(rng.range(1, static_cast<long>(g)));
      w.push_back({GeneratorSymbol(GenFamily::Atilde, i, j, g), Int(1)});
    }
  }
  return w;
}

inline IntegerMatrix random_unimodular(std::size_t g, Rng& rng, int len = 12) {
  return evaluate_word(random_gl_word(g, rng, len), Ambient::GL, g);
}

// Product of letters from { E(i,j)^(+-2), F(i) }, as used by the Gamma_2
// round trip.
inline IntegerMatrix random_gamma2_product(std::size_t g, Rng& rng, int max_len) {
  IntegerMatrix m = IntegerMatrix::identity(g);
  detail::WordEvaluator ev(Ambient::GL, g);
  int len = static_cast<int>(rng.range(1, max_len));
  for (int t = 0; t < len; ++t) {
    if (g >= 2 && rng.chance(70)) {
      int i = static_cast<int>(rng.range(1, static_cast<long>(g)));
      int j = i;
      while (j == i) j = static_cast<int>(rng.range(1, static_cast<long>(g)));
      m = m * ev.symbol_power(GeneratorSymbol(GenFamily::E, i, j, g), Int(2 * rng.sign()));
    } else {
      int i = static_cast<int>(rng.range(1, static_cast<long>(g)));
      m = m * ev.symbol_power(GeneratorSymbol(GenFamily::F, i, g), Int(1));
    }
  }
  return m;
}

// Product of conjugated level-d elementaries c E(i,j)^(+-d) c^-1.
inline IntegerMatrix random_gammad_product(std::size_t g, const Int& d, Rng& rng,
                                           int max_letters, int max_conj_len) {
  IntegerMatrix m = IntegerMatrix::identity(g);
  int len = static_cast<int>(rng.range(1, max_letters));
  for (int t = 0; t < len; ++t) {
    GeneratorWord cw = random_gl_word(g, rng, static_cast<int>(rng.range(0, max_conj_len)));
    IntegerMatrix c = evaluate_word(cw, Ambient::GL, g);
    int i = static_cast<int>(rng.range(1, static_cast<long>(g)));
    int j = i;
    while (j == i) j = static_cast<int>(rng.range(1, static_cast<long>(g)));
    IntegerMatrix base = IntegerMatrix::identity(g);
    base.at(i - 1, j - 1) = d * rng.sign();
    m = m * (c * base * unimodular_inverse(c));
  }
  return m;
}

// Random word over the urSp generator alphabet, used for conjugators.
inline std::vector<GeneratorSymbol> random_ursp_symbols(std::size_t g, Rng& rng, int len) {
  std::vector<GeneratorSymbol> out;
  for (int t = 0; t < len; ++t) {
    int which = static_cast<int>(rng.range(0, 3));
    int i = static_cast<int>(rng.range(1, static_cast<long>(g)));
    int j = i;
    if (g >= 2)
      while (j == i) j = static_cast<int>(rng.range(1, static_cast<long>(g)));
    switch (which) {
      case 0:
        if (g >= 2) {
          out.emplace_back(GenFamily::X, i, j, g);
          break;
        }
        [[fallthrough]];
      case 1:
        out.emplace_back(GenFamily::Y, i, g >= 2 && rng.chance(50) ? j : i, g);
        break;
      case 2:
        out.emplace_back(GenFamily::Z, i, g);
        break;
      default:
        if (g >= 2)
          out.emplace_back(GenFamily::Atilde, i, j, g);
        else
          out.emplace_back(GenFamily::Z, i, g);
    }
  }
  return out;
}

inline UrSpElement random_ursp_element(std::size_t g, Rng& rng, int len = 10) {
  UrSpElement m = UrSpElement::identity(g);
  for (const auto& s : random_ursp_symbols(g, rng, len))
    m = m * ursp_generator(s).pow(rng.sign());
  return m;
}

// Product of conjugated normal generators of urSp(2g)[d]: bases Y(1,1)^d
// together with X(1,2)^d for d >= 3 or Z(1) for d = 2.
inline UrSpElement random_ursp_level_product(std::size_t g, const Int& d, Rng& rng,
                                             int max_letters, int max_conj_len) {
  UrSpElement m = UrSpElement::identity(g);
  long dd = static_cast<long>(d);
  int len = static_cast<int>(rng.range(1, max_letters));
  for (int t = 0; t < len; ++t) {
    UrSpElement c = UrSpElement::identity(g);
    for (const auto& s :
         random_ursp_symbols(g, rng, static_cast<int>(rng.range(0, max_conj_len))))
      c = c * ursp_generator(s).pow(rng.sign());
    UrSpElement base = UrSpElement::identity(g);
    int kind = static_cast<int>(rng.range(0, 1));
    if (d == 2) {
      base = kind == 0 ? ursp_generator(GeneratorSymbol(GenFamily::Z, 1, g))
                       : ursp_generator(GeneratorSymbol(GenFamily::Y, 1, 1, g)).pow(2 * rng.sign());
    } else {
      base = kind == 0 && g >= 2
                 ? ursp_generator(GeneratorSymbol(GenFamily::X, 1, 2, g)).pow(dd * rng.sign())
                 : ursp_generator(GeneratorSymbol(GenFamily::Y, 1, 1, g)).pow(dd * rng.sign());
    }
    m = m * (c * base * c.inverse());
  }
  return m;
}

// Random symmetric block with entries divisible by d.
inline SgElement random_sg_element(std::size_t g, const Int& d, Rng& rng, int spread = 5) {
  IntegerMatrix b(g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i; j < g; ++j) {
      Int v = d * rng.range(-spread, spread);
      b.at(i, j) = v;
      b.at(j, i) = v;
    }
  return SgElement(b);
}

// Random word over the mapping-class alphabet; lone tC letters are only
// emitted when eta-resolvability is not required.
inline McgWord random_mcg_word(std::size_t g, Rng& rng, int len, bool eta_resolvable) {
  McgWord w(g);
  for (int t = 0; t < len; ++t) {
    int which = static_cast<int>(rng.range(0, eta_resolvable ? 6 : 9));
    Int e(rng.sign() * rng.range(1, 2));
    switch (which) {
      case 0:
        w.push(McgKind::TD, static_cast<int>(rng.range(1, static_cast<long>(g))), e);
        break;
      case 1: w.push(McgKind::ALPHA, e); break;
      case 2: w.push(McgKind::OMEGA, e); break;
      case 3: {
        int i = static_cast<int>(rng.range(1, static_cast<long>(g)));
        int j = i;
        while (j == i) j = static_cast<int>(rng.range(1, static_cast<long>(g)));
        w.push(McgKind::SIGMA, i, j, e);
        break;
      }
      case 4: w.push(McgKind::BP12, e); break;
      case 5: w.push(McgKind::TD2P, e); break;
      case 6: w.push(McgKind::TD2PP, e); break;
      case 7: w.push(McgKind::TC1, e); break;
      case 8: w.push(McgKind::TC2, e); break;
      default: w.push(McgKind::TC2P, e); break;
    }
  }
  return w;
}

// Random element of the level-d handlebody alphabet: conjugated d-th powers
// of alpha and disk twists, BP letters, and omega for d = 2.
inline McgWord random_level_mcg_word(std::size_t g, const Int& d, Rng& rng, int len) {
  McgWord w(g);
  long dd = static_cast<long>(d);
  for (int t = 0; t < len; ++t) {
    McgWord conj = random_mcg_word(g, rng, static_cast<int>(rng.range(0, 3)),
                                   /*eta_resolvable=*/true);
    McgWord base(g);
    switch (static_cast<int>(rng.range(0, 3))) {
      case 0: base.push(McgKind::ALPHA, Int(dd * rng.sign())); break;
      case 1:
        base.push(McgKind::TD, static_cast<int>(rng.range(1, static_cast<long>(g))),
                  Int(dd * rng.sign()));
        break;
      case 2: base.push(McgKind::BP12, Int(rng.sign())); break;
      default:
        if (d == 2)
          base.push(McgKind::OMEGA, Int(1));
        else
          base.push(McgKind::ALPHA, Int(dd * rng.sign()));
        break;
    }
    w = concat(std::move(w), concat(concat(conj, base), conj.inverse()));
  }
  return w;
}

}  // namespace ursp

#pragma once

// Formal words over the generator alphabet.
//
// A GeneratorWord is a plain product of symbol powers. A ConjugacyWord is a
// product of letters c * s^e * c^-1 with c a GeneratorWord and s a named
// base generator; this is the output form of every factorization routine,
// so that emitted witnesses stay readable and replayable. The empty word
// denotes the identity and prints as "1".

#include "ursp/generators.hpp"
#include "ursp/integer_matrix.hpp"
#include "ursp/symplectic.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ursp {

enum class Ambient { GL, UrSp };

inline bool family_valid_in(GenFamily f, Ambient a) {
  switch (f) {
    case GenFamily::E:
    case GenFamily::F:
    case GenFamily::S:
      return a == Ambient::GL;
    case GenFamily::X:
    case GenFamily::Y:
    case GenFamily::Z:
      return a == Ambient::UrSp;
    case GenFamily::Atilde:
      return true;
  }
  return false;
}

struct WordFactor {
  GeneratorSymbol symbol;
  Int exponent;  // nonzero

  bool operator==(const WordFactor& o) const {
    return symbol == o.symbol && exponent == o.exponent;
  }
};

using GeneratorWord = std::vector<WordFactor>;

inline GeneratorWord inverted(const GeneratorWord& w) {
  GeneratorWord r;
  r.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    r.push_back({it->symbol, -it->exponent});
  return r;
}

inline GeneratorWord concat(GeneratorWord a, const GeneratorWord& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct ConjugacyLetter {
  GeneratorWord conjugator;
  GeneratorSymbol base;
  Int exponent;  // nonzero

  bool same_shape(const ConjugacyLetter& o) const {
    return conjugator == o.conjugator && base == o.base;
  }
};

struct ConjugacyWord {
  Ambient ambient = Ambient::GL;
  std::size_t g = 0;
  std::vector<ConjugacyLetter> letters;

  ConjugacyWord() = default;
  ConjugacyWord(Ambient ambient, std::size_t g) : ambient(ambient), g(g) {}

  bool empty() const { return letters.empty(); }

  void push(GeneratorWord conj, GeneratorSymbol base, Int exp) {
    if (exp == 0) return;
    if (!letters.empty() && letters.back().base == base &&
        letters.back().conjugator == conj) {
      letters.back().exponent += exp;
      if (letters.back().exponent == 0) letters.pop_back();
      return;
    }
    letters.push_back({std::move(conj), base, std::move(exp)});
  }

  ConjugacyWord inverse() const {
    ConjugacyWord r(ambient, g);
    for (auto it = letters.rbegin(); it != letters.rend(); ++it)
      r.letters.push_back({it->conjugator, it->base, -it->exponent});
    return r;
  }
};

inline ConjugacyWord concat(ConjugacyWord a, const ConjugacyWord& b) {
  if (a.ambient != b.ambient || a.g != b.g)
    throw std::invalid_argument("cannot concatenate words over different groups");
  for (const auto& l : b.letters) a.push(l.conjugator, l.base, l.exponent);
  return a;
}

// --- evaluation ------------------------------------------------------------

namespace detail {

struct SymbolKey {
  int family;
  int i, j;
  bool operator<(const SymbolKey& o) const {
    if (family != o.family) return family < o.family;
    if (i != o.i) return i < o.i;
    return j < o.j;
  }
};

// Evaluator with two caches: symbol matrices (with inverses) and a rolling
// prefix product for conjugator words. Factorizations emit letters whose
// conjugators extend each other, so re-verification stays near-linear in
// the total word size instead of quadratic.
class WordEvaluator {
 public:
  WordEvaluator(Ambient ambient, std::size_t g) : ambient_(ambient), g_(g) {}

  IntegerMatrix symbol_power(const GeneratorSymbol& s, const Int& e) {
    if (s.g != g_) throw std::invalid_argument("symbol genus mismatch in " + s.to_string());
    if (!family_valid_in(s.family, ambient_))
      throw std::invalid_argument("symbol " + s.to_string() +
                                  (ambient_ == Ambient::GL
                                       ? " is not valid in a GL(g,Z) word"
                                       : " is not valid in an urSp(2g) word"));
    const IntegerMatrix& base = cached(s, /*inverse=*/e < 0);
    Int k = abs(e);
    // Unipotent and involutive generators have closed-form powers.
    if (s.family == GenFamily::E || s.family == GenFamily::X ||
        s.family == GenFamily::Y) {
      IntegerMatrix m = IntegerMatrix::identity(base.dim());
      IntegerMatrix off = base - m;
      for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c)
          if (off.at(r, c) != 0) m.at(r, c) += k * off.at(r, c);
      return m;
    }
    if (s.family == GenFamily::F || s.family == GenFamily::Z ||
        s.family == GenFamily::Atilde)
      return (k % 2 == 0) ? IntegerMatrix::identity(base.dim()) : base;
    // S is not invertible; only positive formal powers make sense.
    if (e < 0)
      throw std::invalid_argument("symbol " + s.to_string() + " is not invertible");
    IntegerMatrix acc = IntegerMatrix::identity(base.dim());
    for (Int t = 0; t < k; ++t) acc = acc * base;
    return acc;
  }

  IntegerMatrix word(const GeneratorWord& w) {
    IntegerMatrix acc = IntegerMatrix::identity(matrix_dim());
    for (const auto& f : w) acc = acc * symbol_power(f.symbol, f.exponent);
    return acc;
  }

  // Product over the conjugator prefix cache: if w extends the previously
  // evaluated conjugator, only the new suffix is multiplied in. The inverse
  // is maintained alongside so conjugation never needs a matrix inversion.
  std::pair<IntegerMatrix, IntegerMatrix> conjugator(const GeneratorWord& w) {
    std::size_t shared = 0;
    if (!prefix_word_.empty() && prefix_word_.size() <= w.size()) {
      shared = prefix_word_.size();
      for (std::size_t t = 0; t < shared; ++t)
        if (!(prefix_word_[t] == w[t])) {
          shared = 0;
          break;
        }
    }
    IntegerMatrix acc, inv;
    if (shared) {
      acc = prefix_matrix_;
      inv = prefix_inverse_;
    } else {
      acc = inv = IntegerMatrix::identity(matrix_dim());
    }
    for (std::size_t t = shared; t < w.size(); ++t) {
      acc = acc * symbol_power(w[t].symbol, w[t].exponent);
      inv = symbol_power(w[t].symbol, -w[t].exponent) * inv;
    }
    prefix_word_ = w;
    prefix_matrix_ = acc;
    prefix_inverse_ = inv;
    return {acc, inv};
  }

  std::size_t matrix_dim() const { return ambient_ == Ambient::GL ? g_ : 2 * g_; }

 private:
  const IntegerMatrix& cached(const GeneratorSymbol& s, bool inverse) {
    SymbolKey key{static_cast<int>(s.family) * 2 + (inverse ? 1 : 0), s.i, s.j};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    IntegerMatrix m = ambient_ == Ambient::GL ? gl_matrix(s)
                                              : ursp_generator(s).assemble();
    if (inverse) m = unimodular_inverse(m);
    return cache_.emplace(key, std::move(m)).first->second;
  }

  Ambient ambient_;
  std::size_t g_;
  std::map<SymbolKey, IntegerMatrix> cache_;
  GeneratorWord prefix_word_;
  IntegerMatrix prefix_matrix_;
  IntegerMatrix prefix_inverse_;
};

}  // namespace detail

inline IntegerMatrix evaluate_word(const GeneratorWord& w, Ambient ambient,
                                   std::size_t g) {
  detail::WordEvaluator ev(ambient, g);
  return ev.word(w);
}

inline IntegerMatrix evaluate_word(const ConjugacyWord& w) {
  detail::WordEvaluator ev(w.ambient, w.g);
  IntegerMatrix acc = IntegerMatrix::identity(ev.matrix_dim());
  for (const auto& l : w.letters) {
    IntegerMatrix p = ev.symbol_power(l.base, l.exponent);
    if (!l.conjugator.empty()) {
      auto [c, cinv] = ev.conjugator(l.conjugator);
      p = c * p * cinv;
    }
    acc = acc * p;
  }
  return acc;
}

inline bool verify_factorization(const ConjugacyWord& w, const IntegerMatrix& target) {
  return evaluate_word(w) == target;
}

// --- printing --------------------------------------------------------------

inline std::string to_string(const GeneratorWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t t = 0; t < w.size(); ++t) {
    if (t) s += '*';
    s += w[t].symbol.to_string();
    if (w[t].exponent != 1) s += '^' + w[t].exponent.str();
  }
  return s;
}

inline std::string to_string(const ConjugacyLetter& l) {
  std::string s;
  if (l.conjugator.empty()) {
    s = l.base.to_string();
    if (l.exponent != 1) s += '^' + l.exponent.str();
  } else {
    s = "conj(" + to_string(l.conjugator) + ',' + l.base.to_string() + ')';
    if (l.exponent != 1) s += '^' + l.exponent.str();
  }
  return s;
}

inline std::string to_string(const ConjugacyWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t t = 0; t < w.letters.size(); ++t) {
    if (t) s += '*';
    s += to_string(w.letters[t]);
  }
  return s;
}

}  // namespace ursp

#pragma once

// Text grammar shared by the library and the CLI:
//
//   word := term ('*' term)*
//   term := atom ('^' int)?
//   atom := SYMBOL | '(' word ')' | 'conj(' word ',' word ')' | '1'
//
// conj(c, w) denotes c w c^-1. The matrix alphabet is E(i,j), F(i), S(i,j),
// X(i,j), Y(i,j), Z(i), Atilde(i,j); the mapping-class alphabet is tD(i),
// tD2p, tD2pp, tC1, tC2, tC2p, alpha, omega, sigma(i,j) and the fused
// letter bp12. "1" is the empty word, which is also how it prints.

#include "ursp/generators.hpp"
#include "ursp/mapping_class.hpp"
#include "ursp/words.hpp"

#include <cctype>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ursp {

struct WordParseError : std::runtime_error {
  explicit WordParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

struct WordAst;

struct AtomAst {
  enum class Kind { Symbol, Group, Conj, One };
  Kind kind = Kind::One;
  std::string name;               // Symbol
  std::vector<int> args;          // Symbol indices, possibly empty
  std::shared_ptr<WordAst> inner;  // Group / Conj body
  std::shared_ptr<WordAst> conj;   // Conj conjugator
};

struct TermAst {
  AtomAst atom;
  Int exp = 1;
};

struct WordAst {
  std::vector<TermAst> terms;
};

class WordParser {
 public:
  explicit WordParser(const std::string& text) : s_(text) {}

  WordAst parse() {
    WordAst w = word();
    skip_ws();
    if (pos_ != s_.size())
      throw WordParseError("unexpected trailing input at position " +
                           std::to_string(pos_ + 1));
    return w;
  }

 private:
  WordAst word() {
    WordAst w;
    w.terms.push_back(term());
    for (;;) {
      skip_ws();
      if (!eat('*')) break;
      w.terms.push_back(term());
    }
    return w;
  }

  TermAst term() {
    TermAst t;
    t.atom = atom();
    skip_ws();
    if (eat('^')) {
      t.exp = integer();
      if (t.exp == 0) throw WordParseError("zero exponent");
    }
    return t;
  }

  AtomAst atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw WordParseError("unexpected end of word");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      AtomAst a;
      a.kind = AtomAst::Kind::Group;
      a.inner = std::make_shared<WordAst>(word());
      expect(')');
      return a;
    }
    if (c == '1' && !std::isalnum(peek_at(pos_ + 1))) {
      ++pos_;
      AtomAst a;
      a.kind = AtomAst::Kind::One;
      return a;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string name = ident();
      if (name == "conj") {
        expect('(');
        AtomAst a;
        a.kind = AtomAst::Kind::Conj;
        a.conj = std::make_shared<WordAst>(word());
        expect(',');
        a.inner = std::make_shared<WordAst>(word());
        expect(')');
        return a;
      }
      AtomAst a;
      a.kind = AtomAst::Kind::Symbol;
      a.name = name;
      skip_ws();
      if (eat('(')) {
        a.args.push_back(index());
        skip_ws();
        while (eat(',')) a.args.push_back(index());
        expect(')');
      }
      return a;
    }
    throw WordParseError(std::string("unexpected character '") + c + "' at position " +
                         std::to_string(pos_ + 1));
  }

  std::string ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return s_.substr(start, pos_ - start);
  }

  Int integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start || (pos_ == start + 1 && !std::isdigit(static_cast<unsigned char>(s_[start]))))
      throw WordParseError("expected integer at position " + std::to_string(start + 1));
    return Int(s_.substr(start, pos_ - start));
  }

  int index() {
    Int v = integer();
    if (v < 1 || v > 64) throw WordParseError("index out of range");
    return static_cast<int>(v);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c))
      throw WordParseError(std::string("expected '") + c + "' at position " +
                           std::to_string(pos_ + 1));
  }

  char peek_at(std::size_t p) const { return p < s_.size() ? s_[p] : '\0'; }

  const std::string& s_;
  std::size_t pos_ = 0;
};

// --- matrix-alphabet flattening ---------------------------------------------

inline GeneratorSymbol resolve_matrix_symbol(const AtomAst& a, std::size_t g) {
  GenFamily fam;
  if (a.name == "E") fam = GenFamily::E;
  else if (a.name == "F") fam = GenFamily::F;
  else if (a.name == "S") fam = GenFamily::S;
  else if (a.name == "X") fam = GenFamily::X;
  else if (a.name == "Y") fam = GenFamily::Y;
  else if (a.name == "Z") fam = GenFamily::Z;
  else if (a.name == "Atilde") fam = GenFamily::Atilde;
  else throw WordParseError("unknown symbol " + a.name);
  std::size_t want = family_is_unary(fam) ? 1 : 2;
  if (a.args.size() != want)
    throw WordParseError("symbol " + a.name + " takes " + std::to_string(want) +
                         (want == 1 ? " index" : " indices"));
  try {
    return want == 1 ? GeneratorSymbol(fam, a.args[0], g)
                     : GeneratorSymbol(fam, a.args[0], a.args[1], g);
  } catch (const std::invalid_argument& e) {
    throw WordParseError(e.what());
  }
}

inline void flatten_generator_word(const WordAst& w, std::size_t g, GeneratorWord& out);

inline void flatten_generator_term(const TermAst& t, std::size_t g, GeneratorWord& out) {
  switch (t.atom.kind) {
    case AtomAst::Kind::One:
      return;
    case AtomAst::Kind::Symbol:
      out.push_back({resolve_matrix_symbol(t.atom, g), t.exp});
      return;
    case AtomAst::Kind::Group:
    case AtomAst::Kind::Conj: {
      GeneratorWord body;
      if (t.atom.kind == AtomAst::Kind::Conj) {
        GeneratorWord c, inner;
        flatten_generator_word(*t.atom.conj, g, c);
        flatten_generator_word(*t.atom.inner, g, inner);
        body = concat(concat(c, inner), inverted(c));
      } else {
        flatten_generator_word(*t.atom.inner, g, body);
      }
      Int reps = abs(t.exp);
      GeneratorWord unit = t.exp < 0 ? inverted(body) : body;
      for (Int r = 0; r < reps; ++r) out.insert(out.end(), unit.begin(), unit.end());
      return;
    }
  }
}

inline void flatten_generator_word(const WordAst& w, std::size_t g, GeneratorWord& out) {
  for (const auto& t : w.terms) flatten_generator_term(t, g, out);
}

inline ConjugacyWord power_word(const ConjugacyWord& w, const Int& e) {
  ConjugacyWord out(w.ambient, w.g);
  ConjugacyWord unit = e < 0 ? w.inverse() : w;
  for (Int r = 0, n = abs(e); r < n; ++r)
    for (const auto& l : unit.letters) out.push(l.conjugator, l.base, l.exponent);
  return out;
}

inline void flatten_conjugacy_word(const WordAst& w, std::size_t g, Ambient ambient,
                                   ConjugacyWord& out);

inline void flatten_conjugacy_term(const TermAst& t, std::size_t g, Ambient ambient,
                                   ConjugacyWord& out) {
  switch (t.atom.kind) {
    case AtomAst::Kind::One:
      return;
    case AtomAst::Kind::Symbol: {
      GeneratorSymbol s = resolve_matrix_symbol(t.atom, g);
      if (!family_valid_in(s.family, ambient))
        throw WordParseError("symbol " + s.to_string() +
                             (ambient == Ambient::GL ? " is not a GL(g,Z) symbol"
                                                     : " is not an urSp(2g) symbol"));
      out.push({}, s, t.exp);
      return;
    }
    case AtomAst::Kind::Group: {
      ConjugacyWord body(ambient, g);
      flatten_conjugacy_word(*t.atom.inner, g, ambient, body);
      ConjugacyWord p = power_word(body, t.exp);
      for (const auto& l : p.letters) out.push(l.conjugator, l.base, l.exponent);
      return;
    }
    case AtomAst::Kind::Conj: {
      GeneratorWord c;
      flatten_generator_word(*t.atom.conj, g, c);
      for (const auto& f : c)
        if (!family_valid_in(f.symbol.family, ambient))
          throw WordParseError("symbol " + f.symbol.to_string() + " is not valid here");
      ConjugacyWord body(ambient, g);
      flatten_conjugacy_word(*t.atom.inner, g, ambient, body);
      ConjugacyWord conjd(ambient, g);
      for (const auto& l : body.letters)
        conjd.push(concat(c, l.conjugator), l.base, l.exponent);
      ConjugacyWord p = power_word(conjd, t.exp);
      for (const auto& l : p.letters) out.push(l.conjugator, l.base, l.exponent);
      return;
    }
  }
}

inline void flatten_conjugacy_word(const WordAst& w, std::size_t g, Ambient ambient,
                                   ConjugacyWord& out) {
  for (const auto& t : w.terms) flatten_conjugacy_term(t, g, ambient, out);
}

// --- mapping-class-alphabet flattening ---------------------------------------

inline McgLetter resolve_mcg_symbol(const AtomAst& a, std::size_t g) {
  auto need_args = [&](std::size_t n) {
    if (a.args.size() != n)
      throw WordParseError("letter " + a.name + " takes " + std::to_string(n) +
                           (n == 1 ? " index" : " indices"));
  };
  auto check_index = [&](int i) {
    if (i < 1 || i > static_cast<int>(g)) throw WordParseError("index out of range");
  };
  if (a.name == "tD" && !a.args.empty()) {
    need_args(1);
    check_index(a.args[0]);
    return {McgKind::TD, a.args[0], 0, Int(1)};
  }
  if (a.name.rfind("tD", 0) == 0 && a.args.empty() && a.name.size() > 2 &&
      std::isdigit(static_cast<unsigned char>(a.name[2]))) {
    // compact form tD3
    int i = std::stoi(a.name.substr(2));
    check_index(i);
    return {McgKind::TD, i, 0, Int(1)};
  }
  if (a.name == "tD2p") return {McgKind::TD2P, 0, 0, Int(1)};
  if (a.name == "tD2pp") return {McgKind::TD2PP, 0, 0, Int(1)};
  if (a.name == "tC1") return {McgKind::TC1, 0, 0, Int(1)};
  if (a.name == "tC2") return {McgKind::TC2, 0, 0, Int(1)};
  if (a.name == "tC2p") return {McgKind::TC2P, 0, 0, Int(1)};
  if (a.name == "alpha") return {McgKind::ALPHA, 0, 0, Int(1)};
  if (a.name == "omega") return {McgKind::OMEGA, 0, 0, Int(1)};
  if (a.name == "bp12") return {McgKind::BP12, 0, 0, Int(1)};
  if (a.name == "sigma") {
    need_args(2);
    check_index(a.args[0]);
    check_index(a.args[1]);
    if (a.args[0] == a.args[1]) throw WordParseError("sigma needs distinct indices");
    return {McgKind::SIGMA, a.args[0], a.args[1], Int(1)};
  }
  throw WordParseError("unknown symbol " + a.name);
}

inline void flatten_mcg_word(const WordAst& w, std::size_t g, McgWord& out);

inline void flatten_mcg_term(const TermAst& t, std::size_t g, McgWord& out) {
  switch (t.atom.kind) {
    case AtomAst::Kind::One:
      return;
    case AtomAst::Kind::Symbol: {
      McgLetter l = resolve_mcg_symbol(t.atom, g);
      l.exp = t.exp;
      out.push(l);
      return;
    }
    case AtomAst::Kind::Group:
    case AtomAst::Kind::Conj: {
      McgWord body(g);
      if (t.atom.kind == AtomAst::Kind::Conj) {
        McgWord c(g), inner(g);
        flatten_mcg_word(*t.atom.conj, g, c);
        flatten_mcg_word(*t.atom.inner, g, inner);
        body = concat(concat(c, inner), c.inverse());
      } else {
        flatten_mcg_word(*t.atom.inner, g, body);
      }
      McgWord unit = t.exp < 0 ? body.inverse() : body;
      for (Int r = 0, n = abs(t.exp); r < n; ++r)
        for (const auto& l : unit.letters) out.push(l);
      return;
    }
  }
}

inline void flatten_mcg_word(const WordAst& w, std::size_t g, McgWord& out) {
  for (const auto& t : w.terms) flatten_mcg_term(t, g, out);
}

}  // namespace detail

inline ConjugacyWord parse_conjugacy_word(const std::string& text, std::size_t g,
                                          Ambient ambient) {
  detail::WordParser p(text);
  detail::WordAst ast = p.parse();
  ConjugacyWord out(ambient, g);
  detail::flatten_conjugacy_word(ast, g, ambient, out);
  return out;
}

inline GeneratorWord parse_generator_word(const std::string& text, std::size_t g) {
  detail::WordParser p(text);
  detail::WordAst ast = p.parse();
  GeneratorWord out;
  detail::flatten_generator_word(ast, g, out);
  return out;
}

inline McgWord parse_mcg_word(const std::string& text, std::size_t g) {
  detail::WordParser p(text);
  detail::WordAst ast = p.parse();
  McgWord out(g);
  detail::flatten_mcg_word(ast, g, out);
  return out;
}

}  // namespace ursp

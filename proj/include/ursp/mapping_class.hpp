#pragma once

// The mapping-class layer: named curves on the genus-g handlebody boundary
// and their homology classes, the symplectic representation psi through
// twist transvections, the free-group representation eta, level membership,
// the relation corpus, and lifting urSp matrices back to words in the
// handlebody alphabet.
//
// Homology coordinates are (b_1..b_g, a_1..a_g): meridians first, so
// handlebody images are block upper triangular. A right-handed twist along
// a class c acts as x -> x + <x,c> c, which in these coordinates is the
// matrix I + c tc J; with this convention the twist along [D_1] is exactly
// the generator Y(1,1).

#include "ursp/congruence.hpp"
#include "ursp/free_group.hpp"
#include "ursp/generators.hpp"
#include "ursp/integer_matrix.hpp"
#include "ursp/symplectic.hpp"
#include "ursp/symplectic_factor.hpp"
#include "ursp/words.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ursp {

// --- words over the mapping-class alphabet ----------------------------------

enum class McgKind { TD, TD2P, TD2PP, TC1, TC2, TC2P, ALPHA, OMEGA, SIGMA, BP12 };

struct McgLetter {
  McgKind kind;
  int i = 0, j = 0;
  Int exp = 1;

  bool same_symbol(const McgLetter& o) const {
    return kind == o.kind && i == o.i && j == o.j;
  }

  std::string name() const {
    switch (kind) {
      case McgKind::TD: return "tD(" + std::to_string(i) + ")";
      case McgKind::TD2P: return "tD2p";
      case McgKind::TD2PP: return "tD2pp";
      case McgKind::TC1: return "tC1";
      case McgKind::TC2: return "tC2";
      case McgKind::TC2P: return "tC2p";
      case McgKind::ALPHA: return "alpha";
      case McgKind::OMEGA: return "omega";
      case McgKind::SIGMA:
        return "sigma(" + std::to_string(i) + "," + std::to_string(j) + ")";
      case McgKind::BP12: return "bp12";
    }
    return "?";
  }
};

struct McgWord {
  std::size_t g = 0;
  std::vector<McgLetter> letters;

  McgWord() = default;
  explicit McgWord(std::size_t g) : g(g) {}

  bool empty() const { return letters.empty(); }

  void push(McgLetter l) {
    if (l.exp == 0) return;
    if (!letters.empty() && letters.back().same_symbol(l)) {
      letters.back().exp += l.exp;
      if (letters.back().exp == 0) letters.pop_back();
      return;
    }
    letters.push_back(std::move(l));
  }

  void push(McgKind kind, Int exp = Int(1)) { push({kind, 0, 0, std::move(exp)}); }
  void push(McgKind kind, int i, Int exp = Int(1)) { push({kind, i, 0, std::move(exp)}); }
  void push(McgKind kind, int i, int j, Int exp) { push({kind, i, j, std::move(exp)}); }

  McgWord inverse() const {
    McgWord r(g);
    for (auto it = letters.rbegin(); it != letters.rend(); ++it)
      r.push({it->kind, it->i, it->j, -it->exp});
    return r;
  }
};

inline McgWord concat(McgWord a, const McgWord& b) {
  if (a.g != b.g) throw std::invalid_argument("genus mismatch");
  for (const auto& l : b.letters) a.push(l);
  return a;
}

inline std::string to_string(const McgWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t t = 0; t < w.letters.size(); ++t) {
    if (t) s += '*';
    s += w.letters[t].name();
    if (w.letters[t].exp != 1) s += '^' + w.letters[t].exp.str();
  }
  return s;
}

// --- curve table -------------------------------------------------------------

using HomologyClass = std::vector<Int>;

inline HomologyClass meridian_class(std::size_t g, int i) {
  HomologyClass v(2 * g, Int(0));
  v[static_cast<std::size_t>(i - 1)] = 1;
  return v;
}

inline HomologyClass longitude_class(std::size_t g, int i) {
  HomologyClass v(2 * g, Int(0));
  v[g + static_cast<std::size_t>(i - 1)] = 1;
  return v;
}

// Right-handed twist transvection along c: I + c tc J.
inline SymplecticMatrix twist_matrix(const HomologyClass& c) {
  if (c.size() == 0 || c.size() % 2 != 0)
    throw std::invalid_argument("homology class must have positive even length");
  std::size_t n = c.size();
  IntegerMatrix j = j_matrix(n / 2);
  IntegerMatrix t = IntegerMatrix::identity(n);
  // c tc J: row r picks c[r] * (tc J)
  std::vector<Int> cj(n, Int(0));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) cj[l] += c[k] * j.at(k, l);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t l = 0; l < n; ++l) t.at(r, l) += c[r] * cj[l];
  return SymplecticMatrix(t);
}

// Classes of the named curves. D_i bound meridian disks; C_1 and C_2
// cobound an annulus through the second handle; C_2' is C_2 pushed once
// across the first meridian; D_2'' is D_2 slid over the first handle;
// C_1^m, C_2^m wind m times (the stored instance has m = 2).
struct CurveTable {
  std::size_t g = 0;
  HomologyClass c1, c2, c2p, d2p, d2pp, c1m, c2m;

  static CurveTable standard(std::size_t g) {
    if (g < 2) throw std::invalid_argument("the named curves need genus >= 2");
    CurveTable t;
    t.g = g;
    t.c1 = longitude_class(g, 2);
    t.c2 = t.c1;
    t.c2p = t.c1;
    t.c2p[0] = 1;  // + b_1
    t.d2p = meridian_class(g, 2);
    t.d2pp = meridian_class(g, 2);
    t.d2pp[0] = -1;  // b_2 - b_1
    t.c1m = t.c1;
    t.c1m[0] = 2;  // + 2 b_1
    t.c2m = t.c1m;
    return t;
  }

  HomologyClass d_class(int i) const { return meridian_class(g, i); }
};

// --- psi ---------------------------------------------------------------------

namespace detail {

inline IntegerMatrix transvection_power(const IntegerMatrix& t, const Int& e) {
  // transvections are unipotent of degree 2: t^e = I + e (t - I)
  IntegerMatrix r = IntegerMatrix::identity(t.dim());
  for (std::size_t i = 0; i < t.dim(); ++i)
    for (std::size_t j = 0; j < t.dim(); ++j) {
      Int off = t.at(i, j) - (i == j ? 1 : 0);
      if (off != 0) r.at(i, j) += e * off;
    }
  return r;
}

inline IntegerMatrix matrix_power(const IntegerMatrix& m, const Int& e) {
  if (e == 0) return IntegerMatrix::identity(m.dim());
  IntegerMatrix base = e < 0 ? unimodular_inverse(m) : m;
  Int k = abs(e);
  IntegerMatrix acc = IntegerMatrix::identity(m.dim());
  while (k > 0) {
    if (k % 2 == 1) acc = acc * base;
    k /= 2;
    if (k > 0) base = base * base;
  }
  return acc;
}

inline IntegerMatrix psi_letter(const McgLetter& l, const CurveTable& t, std::size_t g) {
  auto twist_pow = [&](const HomologyClass& c) {
    return transvection_power(twist_matrix(c).matrix(), l.exp);
  };
  switch (l.kind) {
    case McgKind::TD: {
      if (l.i < 1 || l.i > static_cast<int>(g))
        throw std::invalid_argument("disk index out of range");
      HomologyClass c = meridian_class(g, l.i);
      return twist_pow(c);
    }
    case McgKind::TD2P: return twist_pow(t.d2p);
    case McgKind::TD2PP: return twist_pow(t.d2pp);
    case McgKind::TC1: return twist_pow(t.c1);
    case McgKind::TC2: return twist_pow(t.c2);
    case McgKind::TC2P: return twist_pow(t.c2p);
    case McgKind::ALPHA: {
      IntegerMatrix a = twist_matrix(t.c1).matrix() *
                        transvection_power(twist_matrix(t.c2p).matrix(), Int(-1));
      return matrix_power(a, l.exp);
    }
    case McgKind::OMEGA: {
      IntegerMatrix z = ursp_generator(GeneratorSymbol(GenFamily::Z, 1, g)).assemble();
      return (l.exp % 2 == 0) ? IntegerMatrix::identity(2 * g) : z;
    }
    case McgKind::SIGMA: {
      IntegerMatrix s =
          ursp_generator(GeneratorSymbol(GenFamily::Atilde, l.i, l.j, g)).assemble();
      return (l.exp % 2 == 0) ? IntegerMatrix::identity(2 * g) : s;
    }
    case McgKind::BP12: {
      IntegerMatrix b = twist_matrix(t.c1).matrix() *
                        transvection_power(twist_matrix(t.c2).matrix(), Int(-1));
      return matrix_power(b, l.exp);
    }
  }
  throw std::logic_error("unhandled letter");
}

}  // namespace detail

inline SymplecticMatrix psi(const McgWord& w, const CurveTable& table) {
  if (table.g != w.g) throw std::invalid_argument("curve table genus mismatch");
  IntegerMatrix acc = IntegerMatrix::identity(2 * w.g);
  for (const auto& l : w.letters) acc = acc * detail::psi_letter(l, table, w.g);
  return SymplecticMatrix(std::move(acc));
}

inline SymplecticMatrix psi(const McgWord& w) {
  if (w.g < 2) {
    // genus 1 has no table curves; only tD(1) and omega resolve
    CurveTable t;
    t.g = w.g;
    IntegerMatrix acc = IntegerMatrix::identity(2 * w.g);
    for (const auto& l : w.letters) {
      if (l.kind != McgKind::TD && l.kind != McgKind::OMEGA)
        throw std::invalid_argument("letter " + l.name() + " needs genus >= 2");
      acc = acc * detail::psi_letter(l, t, w.g);
    }
    return SymplecticMatrix(std::move(acc));
  }
  return psi(w, CurveTable::standard(w.g));
}

// --- eta ---------------------------------------------------------------------

struct EtaUnresolvable : std::runtime_error {
  explicit EtaUnresolvable(const std::string& letter)
      : std::runtime_error("letter " + letter +
                           " has no free-group action (it need not extend over "
                           "the handlebody)"),
        letter(letter) {}
  std::string letter;
};

// The two candidate actions of alpha on v_1. The shipped entry is
// v_1 -> v_2^-1 v_1, the one whose abelianization matches the homology
// action tE(1,2)^-1 of psi(alpha); the relation suite checks both.
enum class AlphaVariant { V2Left, V2InverseLeft };

inline FreeGroupAutomorphism eta_alpha(std::size_t g, AlphaVariant v) {
  auto id = FreeGroupAutomorphism::identity(g);
  std::vector<FreeWord> imgs = id.images(), invs = id.images();
  if (v == AlphaVariant::V2Left) {
    imgs[0] = {2, 1};
    invs[0] = {-2, 1};
  } else {
    imgs[0] = {-2, 1};
    invs[0] = {2, 1};
  }
  return FreeGroupAutomorphism(std::move(imgs), std::move(invs));
}

namespace detail {

inline FreeGroupAutomorphism eta_letter(const McgLetter& l, std::size_t g,
                                        AlphaVariant variant) {
  auto involution_pow = [&](FreeGroupAutomorphism a) {
    return (l.exp % 2 == 0) ? FreeGroupAutomorphism::identity(g) : a;
  };
  switch (l.kind) {
    case McgKind::TD:
    case McgKind::TD2P:
    case McgKind::TD2PP:
      return FreeGroupAutomorphism::identity(g);  // disk twists act trivially
    case McgKind::BP12: {
      long e = static_cast<long>(l.exp);
      return conjugation_move(g).pow(e);
    }
    case McgKind::OMEGA: {
      auto id = FreeGroupAutomorphism::identity(g);
      std::vector<FreeWord> imgs = id.images();
      imgs[0] = {-1};
      return involution_pow(FreeGroupAutomorphism(imgs, imgs));
    }
    case McgKind::SIGMA: {
      auto id = FreeGroupAutomorphism::identity(g);
      std::vector<FreeWord> imgs = id.images();
      std::swap(imgs[l.i - 1], imgs[l.j - 1]);
      return involution_pow(FreeGroupAutomorphism(imgs, imgs));
    }
    case McgKind::ALPHA: {
      long e = static_cast<long>(l.exp);
      return eta_alpha(g, variant).pow(e);
    }
    default:
      throw EtaUnresolvable(l.name());
  }
}

}  // namespace detail

inline FreeGroupAutomorphism eta(const McgWord& w,
                                 AlphaVariant variant = AlphaVariant::V2InverseLeft) {
  FreeGroupAutomorphism acc = FreeGroupAutomorphism::identity(w.g);
  for (const auto& l : w.letters)
    acc = acc.compose(detail::eta_letter(l, w.g, variant));
  return acc;
}

// --- membership and relations -------------------------------------------------

struct MembershipVerdict {
  bool in_kernel = false;    // Torelli (d = 1) or level-d membership
  bool in_Sg_image = false;  // A block congruent to the identity
};

inline MembershipVerdict membership(const McgWord& w, const Int& d) {
  IntegerMatrix u = psi(w).matrix();
  IntegerMatrix a = block_of(u, 0, 0);
  MembershipVerdict v;
  if (d <= 1) {
    v.in_kernel = u.is_identity();
    v.in_Sg_image = a.is_identity();
  } else {
    v.in_kernel = u.congruent_to_identity(d);
    v.in_Sg_image = a.congruent_to_identity(d);
  }
  return v;
}

enum class RelationLevel { Psi, Eta };

inline bool verify_relation(const McgWord& lhs, const McgWord& rhs, RelationLevel level,
                            AlphaVariant variant = AlphaVariant::V2InverseLeft) {
  if (level == RelationLevel::Psi)
    return psi(lhs).matrix() == psi(rhs).matrix();
  return eta(lhs, variant) == eta(rhs, variant);
}

// t_{D_2} t_{D_2'}^-1  =  t_{D_2} bp^-1 t_{D_2}^-1 * bp.
inline std::pair<McgWord, McgWord> relation_r1(std::size_t g) {
  McgWord lhs(g), rhs(g);
  lhs.push(McgKind::TD, 2);
  lhs.push(McgKind::TD2P, 0, 0, Int(-1));
  rhs.push(McgKind::TD, 2);
  rhs.push(McgKind::BP12, Int(-1));
  rhs.push(McgKind::TD, 2, Int(-1));
  rhs.push(McgKind::BP12);
  return {lhs, rhs};
}

// bp  =  alpha^2 * alpha^-1 f alpha * f^-1  with  f = t_{D_2} t_{D_2''}^-1 omega^-1.
inline std::pair<McgWord, McgWord> relation_r2(std::size_t g) {
  McgWord lhs(g), rhs(g);
  lhs.push(McgKind::BP12);
  McgWord f(g);
  f.push(McgKind::TD, 2);
  f.push(McgKind::TD2PP, 0, 0, Int(-1));
  f.push(McgKind::OMEGA, Int(-1));
  rhs.push(McgKind::ALPHA, Int(2));
  rhs.push(McgKind::ALPHA, Int(-1));
  rhs = concat(std::move(rhs), f);
  rhs.push(McgKind::ALPHA);
  rhs = concat(std::move(rhs), f.inverse());
  return {lhs, rhs};
}

// --- calibration ---------------------------------------------------------------

// Bounded search for the classes of C_1 (= C_2), C_2' and D_2'': candidates
// are supported on the first two handles with coefficients in [-2, 2],
// ordered by L1 norm; constraints are A(psi(alpha)) = E(1,2) with
// psi(alpha) in urSp(2g), D_2'' a meridian class, and the second relation
// at the psi level. Returns the first solution.
struct Calibration {
  HomologyClass c1, c2p, d2pp;
};

inline std::optional<Calibration> calibrate_curve_table(std::size_t g) {
  if (g < 2) return std::nullopt;
  std::vector<HomologyClass> cands;
  std::array<std::size_t, 4> support = {0, 1, g, g + 1};
  for (int x0 = -2; x0 <= 2; ++x0)
    for (int x1 = -2; x1 <= 2; ++x1)
      for (int x2 = -2; x2 <= 2; ++x2)
        for (int x3 = -2; x3 <= 2; ++x3) {
          HomologyClass v(2 * g, Int(0));
          v[support[0]] = x0;
          v[support[1]] = x1;
          v[support[2]] = x2;
          v[support[3]] = x3;
          cands.push_back(std::move(v));
        }
  auto l1 = [](const HomologyClass& v) {
    Int s = 0;
    for (const Int& x : v) s += abs(x);
    return s;
  };
  std::sort(cands.begin(), cands.end(),
            [&](const HomologyClass& a, const HomologyClass& b) {
              Int la = l1(a), lb = l1(b);
              if (la != lb) return la < lb;
              return a < b;
            });

  IntegerMatrix e12 = e_matrix(g, 1, 2);
  for (const auto& c1 : cands) {
    IntegerMatrix t1 = twist_matrix(c1).matrix();
    for (const auto& c2p : cands) {
      IntegerMatrix a =
          t1 * detail::transvection_power(twist_matrix(c2p).matrix(), Int(-1));
      if (!block_of(a, 1, 0).is_zero()) continue;
      if (block_of(a, 0, 0) != e12) continue;
      if (!is_ursp(a)) continue;
      // now the meridian class of D_2''
      for (const auto& dpp : cands) {
        bool meridian = true;
        for (std::size_t k = g; k < 2 * g; ++k)
          if (dpp[k] != 0) meridian = false;
        if (!meridian || l1(dpp) == 0) continue;
        CurveTable t;
        t.g = g;
        t.c1 = c1;
        t.c2 = c1;
        t.c2p = c2p;
        t.d2p = meridian_class(g, 2);
        t.d2pp = dpp;
        t.c1m = t.c2m = c1;
        auto [lhs, rhs] = relation_r2(g);
        if (psi(lhs, t).matrix() == psi(rhs, t).matrix())
          return Calibration{c1, c2p, dpp};
      }
    }
  }
  return std::nullopt;
}

// --- lifting -------------------------------------------------------------------

namespace detail {

// sigma letters realizing the same index permutation as a swap word.
inline void push_sigma_word(McgWord& out, const GeneratorWord& swaps) {
  for (const auto& f : swaps) {
    if (f.symbol.family != GenFamily::Atilde)
      throw std::logic_error("swap word contains a non-swap symbol");
    out.push(McgKind::SIGMA, f.symbol.i, f.symbol.j, f.exponent);
  }
}

// alpha conjugated into position (i,j): psi has A block E(i,j), with an
// S_g-valued defect that downstream corrections absorb.
inline void push_alpha_at(McgWord& out, int i, int j, const Int& e, std::size_t g) {
  GeneratorWord route = conjugator_to_E12(i, j, g);
  push_sigma_word(out, route);
  out.push(McgKind::ALPHA, e);
  GeneratorWord back(route.rbegin(), route.rend());
  push_sigma_word(out, back);
}

inline void push_omega_at(McgWord& out, int i, const Int& e, std::size_t g) {
  if (i != 1) out.push(McgKind::SIGMA, 1, i, Int(1));
  out.push(McgKind::OMEGA, e);
  if (i != 1) out.push(McgKind::SIGMA, 1, i, Int(1));
}

// Twist word with psi exactly Y(i,j)^e; bases stay in the S_g alphabet so
// conjugator defects cancel.
inline void push_y_at(McgWord& out, int i, int j, const Int& e, std::size_t g);

// Lift of a GL-embedded conjugator word: X -> routed alpha, Z -> routed
// omega, Atilde -> sigma, Y -> routed disk twists.
inline void push_lifted_conjugator(McgWord& out, const GeneratorWord& w, std::size_t g) {
  for (const auto& f : w) {
    switch (f.symbol.family) {
      case GenFamily::X:
        push_alpha_at(out, f.symbol.i, f.symbol.j, f.exponent, g);
        break;
      case GenFamily::Z:
        push_omega_at(out, f.symbol.i, f.exponent, g);
        break;
      case GenFamily::Atilde:
        out.push(McgKind::SIGMA, f.symbol.i, f.symbol.j, f.exponent);
        break;
      case GenFamily::Y:
        push_y_at(out, f.symbol.i, f.symbol.j, f.exponent, g);
        break;
      default:
        throw std::logic_error("cannot lift symbol " + f.symbol.to_string());
    }
  }
}

inline void push_y_at(McgWord& out, int i, int j, const Int& e, std::size_t g) {
  if (i == j) {
    out.push(McgKind::TD, i, e);
    return;
  }
  // route (i,j) to (1,2), then Y(1,2)^e = Y11^-e (X21 Y11^e X21^-1) Y22^-e
  McgWord route(g);
  if (i != 1) route.push(McgKind::SIGMA, 1, i, Int(1));
  if (j != 2) route.push(McgKind::SIGMA, 2, j, Int(1));
  out = concat(std::move(out), route);
  out.push(McgKind::TD, 1, -e);
  push_alpha_at(out, 2, 1, Int(1), g);
  out.push(McgKind::TD, 1, e);
  push_alpha_at(out, 2, 1, Int(-1), g);
  out.push(McgKind::SIGMA, 1, 2, Int(1));
  out.push(McgKind::TD, 1, -e);
  out.push(McgKind::SIGMA, 1, 2, Int(1));
  out = concat(std::move(out), route.inverse());
}

// The S_g letters of a factorization lift exactly: the base is a disk
// twist, and conjugator defects lie in the abelian group S_g, where they
// cancel against themselves.
inline void push_lifted_sg_word(McgWord& out, const ConjugacyWord& w, std::size_t g) {
  for (const auto& l : w.letters) {
    if (!(l.base == GeneratorSymbol(GenFamily::Y, 1, 1, g)))
      throw std::logic_error("S_g word with unexpected base");
    McgWord conj(g);
    push_lifted_conjugator(conj, l.conjugator, g);
    out = concat(std::move(out), conj);
    out.push(McgKind::TD, 1, l.exponent);
    out = concat(std::move(out), conj.inverse());
  }
}

}  // namespace detail

// Word w in the handlebody alphabet with psi(w) = u, built by factoring the
// A block over E/F letters (lifted to routed alpha and omega) and repairing
// the S_g discrepancy with disk twists.
inline McgWord lift_ursp_to_mcg(const UrSpElement& u) {
  std::size_t g = u.genus();
  if (g < 2) throw std::invalid_argument("lifting needs genus >= 2");
  McgWord out(g);
  for (const auto& f : factor_elementary(u.a())) {
    if (f.symbol.family == GenFamily::E)
      detail::push_alpha_at(out, f.symbol.i, f.symbol.j, f.exponent, g);
    else
      detail::push_omega_at(out, f.symbol.i, f.exponent, g);
  }
  IntegerMatrix got = psi(out).matrix();
  UrSpElement rest = UrSpElement::from_matrix(unimodular_inverse(got) * u.assemble());
  if (!is_in_Sg(rest))
    throw FactorError("lift residual left S_g");
  detail::push_lifted_sg_word(out, factor_Sg(SgElement(rest.b()), 1), g);
  if (psi(out).matrix() != u.assemble())
    throw FactorError("lift failed verification");
  return out;
}

// Splits a level-d word as normal_word * residual: the normal word lifts
// factor_ursp_level(psi(w), d) onto conjugates of { alpha^d, t_{D_1}^d }
// (omega and t_{D_1}^2 for d = 2), and the residual has trivial psi.
inline std::pair<McgWord, McgWord> decompose_level_d(const McgWord& w, const Int& d) {
  if (d < 2) throw std::invalid_argument("modulus must be at least 2");
  std::size_t g = w.g;
  IntegerMatrix u = psi(w).matrix();
  if (!is_ursp(u))
    throw FactorError("word does not represent a handlebody class");
  if (!u.congruent_to_identity(d))
    throw FactorError("word is not in the level-" + d.str() + " subgroup");

  ConjugacyWord fac = factor_ursp_level(UrSpElement::from_matrix(u), d);
  McgWord normal(g);
  GeneratorSymbol x12(GenFamily::X, 1, 2, g), z1(GenFamily::Z, 1, g),
      y11(GenFamily::Y, 1, 1, g);
  for (const auto& l : fac.letters) {
    McgWord conj(g);
    detail::push_lifted_conjugator(conj, l.conjugator, g);
    normal = concat(std::move(normal), conj);
    if (l.base == x12)
      normal.push(McgKind::ALPHA, l.exponent);
    else if (l.base == z1)
      normal.push(McgKind::OMEGA, l.exponent);
    else if (l.base == y11)
      normal.push(McgKind::TD, 1, l.exponent);
    else
      throw std::logic_error("unexpected base letter " + l.base.to_string());
    normal = concat(std::move(normal), conj.inverse());
  }

  // alpha letters carry an S_g defect; absorb the total into disk twists
  UrSpElement delta = UrSpElement::from_matrix(
      unimodular_inverse(psi(normal).matrix()) * u);
  if (!is_in_Sg(delta, d))
    throw FactorError("normal word defect left S_g[d]");
  detail::push_lifted_sg_word(normal, factor_Sg(SgElement(delta.b()), d), g);

  McgWord residual = concat(normal.inverse(), w);
  if (psi(normal).matrix() != u || !psi(residual).matrix().is_identity())
    throw FactorError("level decomposition failed verification");
  return {normal, residual};
}

}  // namespace ursp

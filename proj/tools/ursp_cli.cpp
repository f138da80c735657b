// Command-line front end: membership checks, factorizations, word
// evaluation, lifting, the built-in relation corpus, and the random
// round-trip harness.
//
// Exit codes: 0 for affirmative or successful results, 1 for negative
// verdicts, 2 for errors and unresolved obstructions. Reports are
// line-oriented key:value text on stdout.

#include "ursp/ursp.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace ursp;

std::string read_payload(const std::string& file) {
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open file: " + file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::ostringstream ss;
  ss << std::cin.rdbuf();
  return ss.str();
}

std::string digest(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int exit_verdict(bool affirmative) { return affirmative ? 0 : 1; }

struct Options {
  std::string group = "ursp";
  std::string alphabet = "ursp";
  std::string rep = "psi";
  std::string file;
  long g = 0;
  long d = 0;
  long level = 0;
  std::uint64_t seed = 20240601;
  long cases = 100;
  long max_conj_len = 8;
  long max_letters = 0;
};

int run_check(const Options& opt) {
  IntegerMatrix m = parse_matrix(read_payload(opt.file));
  std::cout << "command: check\ngroup: " << opt.group << "\n";
  bool verdict = false;
  if (opt.group == "gamma") {
    Int d(opt.d > 0 ? opt.d : opt.level);
    if (d < 2) throw std::runtime_error("check --group gamma needs --d >= 2");
    verdict = is_in_gamma(m, d);
    std::cout << "modulus: " << d << "\n";
  } else if (opt.group == "sg") {
    UrSpElement e = UrSpElement::from_matrix(m);
    Int d(opt.d > 0 ? opt.d : 1);
    verdict = is_in_Sg(e, d);
    std::cout << "modulus: " << d << "\n";
  } else if (opt.group == "ursp") {
    verdict = is_ursp(m);
    if (verdict && opt.level > 0) {
      verdict = is_in_level(m, Int(opt.level));
      std::cout << "level: " << opt.level << "\n";
    }
  } else {
    throw std::runtime_error("unknown group: " + opt.group);
  }
  std::cout << "verdict: " << (verdict ? "true" : "false") << "\n";
  return exit_verdict(verdict);
}

int run_factor(const Options& opt) {
  IntegerMatrix m = parse_matrix(read_payload(opt.file));
  std::cout << "command: factor\ngroup: " << opt.group << "\n";
  ConjugacyWord word;
  IntegerMatrix target = m;
  if (opt.group == "gamma") {
    Int d(opt.d);
    if (d < 2) throw std::runtime_error("factor --group gamma needs --d >= 2");
    word = d == 2 ? factor_gamma2(m) : factor_gammad(m, d);
  } else if (opt.group == "sg") {
    UrSpElement e = UrSpElement::from_matrix(m);
    Int d(opt.d > 0 ? opt.d : 1);
    if (!is_in_Sg(e, d)) throw FactorError("element is not in S_g[d]");
    word = factor_Sg(SgElement(e.b()), d);
    target = e.assemble();
  } else if (opt.group == "ursp") {
    if (opt.d < 2) throw std::runtime_error("factor --group ursp needs --d >= 2");
    UrSpElement e = UrSpElement::from_matrix(m);
    word = factor_ursp_level(e, Int(opt.d));
    target = e.assemble();
  } else {
    throw std::runtime_error("unknown group: " + opt.group);
  }
  // no unverified word ever leaves the process
  if (!verify_factorization(word, target))
    throw ObstructionUnresolved("emitted word failed re-verification", target);
  std::cout << "letters: " << word.letters.size() << "\n";
  std::cout << "word: " << to_string(word) << "\n";
  std::cout << "digest: " << digest(evaluate_word(word).to_text()) << "\n";
  std::cout << "verified: true\n";
  return 0;
}

int run_eval(const Options& opt) {
  if (opt.g < 1) throw std::runtime_error("eval needs --g");
  std::size_t g = static_cast<std::size_t>(opt.g);
  std::string payload = read_payload(opt.file);
  // trim trailing whitespace/newlines
  while (!payload.empty() && std::isspace(static_cast<unsigned char>(payload.back())))
    payload.pop_back();
  std::cout << "command: eval\nalphabet: " << opt.alphabet << "\n";
  IntegerMatrix value;
  if (opt.alphabet == "gl") {
    value = evaluate_word(parse_conjugacy_word(payload, g, Ambient::GL));
  } else if (opt.alphabet == "ursp") {
    value = evaluate_word(parse_conjugacy_word(payload, g, Ambient::UrSp));
  } else if (opt.alphabet == "mcg") {
    McgWord w = parse_mcg_word(payload, g);
    if (opt.rep == "eta") {
      FreeGroupAutomorphism a = eta(w);
      for (std::size_t k = 0; k < a.rank(); ++k)
        std::cout << "image v" << k + 1 << ": " << free_word_str(a.images()[k]) << "\n";
      std::cout << "ia: " << (is_IA(a) ? "true" : "false") << "\n";
      return 0;
    }
    value = psi(w).matrix();
  } else {
    throw std::runtime_error("unknown alphabet: " + opt.alphabet);
  }
  std::cout << "matrix:\n" << value.to_text();
  std::cout << "digest: " << digest(value.to_text()) << "\n";
  return 0;
}

int run_lift(const Options& opt) {
  IntegerMatrix m = parse_matrix(read_payload(opt.file));
  UrSpElement u = UrSpElement::from_matrix(m);
  McgWord w = lift_ursp_to_mcg(u);
  if (psi(w).matrix() != u.assemble())
    throw FactorError("lift failed re-verification");
  std::cout << "command: lift\n";
  std::cout << "letters: " << w.letters.size() << "\n";
  std::cout << "word: " << to_string(w) << "\n";
  std::cout << "digest: " << digest(psi(w).matrix().to_text()) << "\n";
  std::cout << "verified: true\n";
  return 0;
}

int run_relations(const Options& opt) {
  std::size_t g = static_cast<std::size_t>(opt.g >= 2 ? opt.g : 3);
  Int d(opt.d >= 2 ? opt.d : 3);
  int failures = 0;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  {
    detail::WordEvaluator ev(Ambient::GL, 2);
    auto M = [&](GenFamily f, int i, int j, long e) {
      return ev.symbol_power(j ? GeneratorSymbol(f, i, j, 2) : GeneratorSymbol(f, i, 2),
                             Int(e));
    };
    report("gl-swap-conjugation",
           M(GenFamily::Atilde, 1, 2, 1) * M(GenFamily::F, 2, 0, 1) *
                   M(GenFamily::Atilde, 1, 2, 1) ==
               M(GenFamily::F, 1, 0, 1));
    report("gl-shear-square",
           M(GenFamily::E, 1, 2, 1) * M(GenFamily::F, 1, 0, 1) *
                   M(GenFamily::E, 1, 2, -1) * M(GenFamily::F, 1, 0, 1) ==
               M(GenFamily::E, 1, 2, 2));
  }
  {
    detail::WordEvaluator ev(Ambient::UrSp, g);
    auto P = [&](GenFamily f, int i, int j, long e) {
      return ev.symbol_power(j ? GeneratorSymbol(f, i, j, g) : GeneratorSymbol(f, i, g),
                             Int(e));
    };
    report("sg-y12-expansion",
           P(GenFamily::Y, 1, 1, -1) * P(GenFamily::X, 2, 1, 1) *
                   P(GenFamily::Y, 1, 1, 1) * P(GenFamily::X, 2, 1, -1) *
                   P(GenFamily::Y, 2, 2, -1) ==
               P(GenFamily::Y, 1, 2, 1));
    bool diag = true, off1 = true, off2 = true;
    for (int i = 2; i <= static_cast<int>(g); ++i)
      diag = diag && P(GenFamily::Atilde, 1, i, 1) * P(GenFamily::Y, i, i, 1) *
                             P(GenFamily::Atilde, 1, i, 1) ==
                         P(GenFamily::Y, 1, 1, 1);
    for (int i = 2; i <= static_cast<int>(g); ++i)
      for (int j = 2; j <= static_cast<int>(g); ++j) {
        if (j == i) continue;
        off1 = off1 && P(GenFamily::Atilde, 1, i, 1) * P(GenFamily::Y, i, j, 1) *
                               P(GenFamily::Atilde, 1, i, 1) ==
                           P(GenFamily::Y, 1, j, 1);
      }
    for (int j = 3; j <= static_cast<int>(g); ++j)
      off2 = off2 && P(GenFamily::Atilde, 2, j, 1) * P(GenFamily::Y, 1, j, 1) *
                             P(GenFamily::Atilde, 2, j, 1) ==
                         P(GenFamily::Y, 1, 2, 1);
    report("swap-route-diagonal", diag);
    report("swap-route-offdiagonal-first", off1);
    report("swap-route-offdiagonal-second", off2);
  }

  auto [r1l, r1r] = relation_r1(g);
  report("r1-psi", verify_relation(r1l, r1r, RelationLevel::Psi));
  report("r1-eta", verify_relation(r1l, r1r, RelationLevel::Eta));
  auto [r2l, r2r] = relation_r2(g);
  report("r2-psi", verify_relation(r2l, r2r, RelationLevel::Psi));
  bool va = verify_relation(r2l, r2r, RelationLevel::Eta, AlphaVariant::V2Left);
  bool vb = verify_relation(r2l, r2r, RelationLevel::Eta, AlphaVariant::V2InverseLeft);
  report("r2-eta-exactly-one-variant", va != vb);

  {
    McgWord w(g);
    w.push(McgKind::ALPHA, Int(static_cast<long>(d)));
    bool ok = membership(w, d).in_kernel;
    McgWord t(g);
    t.push(McgKind::TD, 1, Int(static_cast<long>(d)));
    ok = ok && membership(t, d).in_kernel;
    McgWord bp(g);
    bp.push(McgKind::BP12);
    ok = ok && membership(bp, d).in_kernel && membership(bp, Int(1)).in_kernel;
    McgWord a(g);
    a.push(McgKind::ALPHA);
    ok = ok && !membership(a, Int(1)).in_kernel;
    McgWord om(g);
    om.push(McgKind::OMEGA);
    ok = ok && membership(om, Int(2)).in_kernel;
    report("level-membership-list", ok);
  }

  std::cout << "failures: " << failures << "\n";
  return exit_verdict(failures == 0);
}

int run_roundtrip(const Options& opt) {
  if (opt.g < 1) throw std::runtime_error("roundtrip needs --g");
  std::size_t g = static_cast<std::size_t>(opt.g);
  Rng rng(opt.seed);
  long failures = 0;
  std::cout << "command: roundtrip\ngroup: " << opt.group << "\nseed: " << opt.seed
            << "\ncases: " << opt.cases << "\n";
  for (long k = 0; k < opt.cases; ++k) {
    bool ok = false;
    std::string note;
    try {
      if (opt.group == "gamma") {
        Int d(opt.d);
        if (d < 2) throw std::runtime_error("roundtrip --group gamma needs --d >= 2");
        long cap = opt.max_letters > 0 ? opt.max_letters : (d == 2 ? 30 : 10);
        IntegerMatrix m =
            d == 2 ? random_gamma2_product(g, rng, static_cast<int>(cap))
                   : random_gammad_product(g, d, rng, static_cast<int>(cap),
                                           static_cast<int>(opt.max_conj_len));
        ConjugacyWord w = d == 2 ? factor_gamma2(m) : factor_gammad(m, d);
        ok = verify_factorization(w, m);
        note = "letters=" + std::to_string(w.letters.size());
      } else if (opt.group == "sg") {
        Int d(opt.d > 0 ? opt.d : 1);
        SgElement e = random_sg_element(g, d < 2 ? Int(1) : d, rng);
        ConjugacyWord w = factor_Sg(e, d);
        ok = verify_factorization(w, e.to_ursp().assemble());
        note = "letters=" + std::to_string(w.letters.size());
      } else if (opt.group == "ursp") {
        Int d(opt.d);
        if (d < 2) throw std::runtime_error("roundtrip --group ursp needs --d >= 2");
        long cap = opt.max_letters > 0 ? opt.max_letters : 20;
        UrSpElement x = random_ursp_level_product(g, d, rng, static_cast<int>(cap),
                                                  static_cast<int>(opt.max_conj_len));
        ConjugacyWord w = factor_ursp_level(x, d);
        ok = verify_factorization(w, x.assemble());
        note = "letters=" + std::to_string(w.letters.size());
      } else {
        throw std::runtime_error("unknown group: " + opt.group);
      }
    } catch (const ObstructionUnresolved& e) {
      note = std::string("obstruction: ") + e.what();
    } catch (const FactorError& e) {
      note = std::string("error: ") + e.what();
    }
    std::cout << "case " << k << ": " << (ok ? "ok" : "FAIL") << " " << note << "\n";
    if (!ok) ++failures;
  }
  std::cout << "passed: " << (opt.cases - failures) << "/" << opt.cases << "\n";
  return exit_verdict(failures == 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact computations in the upper-triangular symplectic group"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd, bool payload) {
    cmd->add_option("--g", opt.g, "genus");
    cmd->add_option("--d", opt.d, "modulus");
    if (payload) cmd->add_option("--file", opt.file, "payload file (default stdin)");
  };

  CLI::App* check = app.add_subcommand("check", "membership checks");
  add_common(check, true);
  check->add_option("--group", opt.group, "gamma | sg | ursp");
  check->add_option("--level", opt.level, "congruence level");

  CLI::App* factor = app.add_subcommand("factor", "constructive factorization");
  add_common(factor, true);
  factor->add_option("--group", opt.group, "gamma | sg | ursp");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a word");
  add_common(eval, true);
  eval->add_option("--alphabet", opt.alphabet, "gl | ursp | mcg");
  eval->add_option("--rep", opt.rep, "psi | eta (mcg only)");

  CLI::App* lift = app.add_subcommand("lift", "lift an urSp matrix to a mapping-class word");
  add_common(lift, true);

  CLI::App* rel = app.add_subcommand("verify-relations", "run the built-in identity corpus");
  add_common(rel, false);

  CLI::App* rt = app.add_subcommand("roundtrip", "random factorization round trips");
  add_common(rt, false);
  rt->add_option("--group", opt.group, "gamma | sg | ursp");
  rt->add_option("--seed", opt.seed, "random seed");
  rt->add_option("--cases", opt.cases, "number of cases");
  rt->add_option("--max-conj-len", opt.max_conj_len, "conjugator length bound");
  rt->add_option("--max-letters", opt.max_letters, "letter count bound");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(check)) return run_check(opt);
    if (app.got_subcommand(factor)) return run_factor(opt);
    if (app.got_subcommand(eval)) return run_eval(opt);
    if (app.got_subcommand(lift)) return run_lift(opt);
    if (app.got_subcommand(rel)) return run_relations(opt);
    if (app.got_subcommand(rt)) return run_roundtrip(opt);
  } catch (const ObstructionUnresolved& e) {
    std::cout << "error: " << e.what() << "\n";
    std::cout << "residual:\n" << e.residual.to_text();
    return 2;
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

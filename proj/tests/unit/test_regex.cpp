#include <catch_amalgamated.hpp>

#include "gen.hpp"
#include "oracle.hpp"
#include "pol/error.hpp"
#include "pol/regex.hpp"

using namespace pol;

namespace {

Word w(std::string_view s) {
  Word out;
  for (char c : s) out.emplace_back(1, c);
  return out;
}

const std::vector<std::string> kAb{"a", "b"};

}  // namespace

TEST_CASE("nullable", "[regex]") {
  CHECK_FALSE(Regex::empty().nullable());
  CHECK(parse_regex("a*").nullable());
  CHECK(parse_regex("0*").nullable());
  auto r = parse_regex("a;b*");
  CHECK_FALSE(r.nullable());
  for (const auto& u : oracle::words_upto(kAb, 1)) CHECK(member(r, u) == oracle::matches(r, u));
}

TEST_CASE("printing and parsing", "[regex]") {
  CHECK(parse_regex("0").str() == "0");
  CHECK(parse_regex("0*").kind() == Regex::Kind::Epsilon);
  CHECK(parse_regex("0**").str() == "0*");
  CHECK(parse_regex("a b").str() == "a;b");
  CHECK(parse_regex("(a+b)*").str() == "(a+b)*");
  CHECK(parse_regex("a+b;c*").str() == "a+b;c*");
  CHECK(parse_regex("(a;b);c").str() == "(a;b);c");
  CHECK(parse_regex("a;(b;c)").str() == "a;b;c");
  CHECK(parse_regex("ab").kind() == Regex::Kind::Atom);  // identifiers are greedy
  CHECK_THROWS_AS(parse_regex("a+"), SyntaxError);
  CHECK_THROWS_AS(parse_regex("(a"), SyntaxError);
  CHECK_THROWS_AS(parse_regex("a", Alphabet({"b"})), Error);
}

TEST_CASE("parse of print is identity on raw trees", "[regex]") {
  gen::Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    auto r = gen::regex(rng, {"a", "b", "c"}, 4);
    CHECK(parse_regex(r.str()) == r);
  }
}

TEST_CASE("derivatives", "[regex]") {
  CHECK(derive(parse_regex("a*"), "a").str() == "a*");
  CHECK(is_empty_language(derive(parse_regex("a;b"), "b")));
  auto r = parse_regex("b*;a;a;(a+b)*");
  auto d = derive(r, "b");
  for (const auto& u : oracle::words_upto(kAb, 4)) CHECK(oracle::matches(d, u) == oracle::matches(r, u));
  CHECK_THROWS_AS(derive(r, "c", Alphabet(kAb)), Error);
}

TEST_CASE("residuation examples", "[regex]") {
  auto r = residuate(parse_regex("b*;a;a;(a+b)*"), w("ba"));
  CHECK(language_equivalent(r, parse_regex("a;(a+b)*"), Alphabet(kAb)));
  CHECK(residuate(parse_regex("b*;a;b"), w("a")).str() == "b");
  auto p = parse_regex("(a+b);a*");
  CHECK(residuate(p, {}) == normalize(p));
}

TEST_CASE("emptiness", "[regex]") {
  CHECK(is_empty_language(Regex::empty()));
  CHECK_FALSE(is_empty_language(parse_regex("(a+b)*")));
  CHECK(is_empty_language(parse_regex("a;0;b")));
  CHECK_FALSE(is_empty_language(parse_regex("0+a")));
}

TEST_CASE("derivative automata", "[regex]") {
  Alphabet ab(kAb);
  auto e = to_dfa(Regex::empty(), ab);
  CHECK(e.size() == 1);
  CHECK_FALSE(e.accepting[0]);

  auto da = to_dfa(parse_regex("a"), ab);
  CHECK(da.size() >= 2);
  CHECK(da.size() <= 3);
  for (const auto& u : oracle::words_upto(kAb, 2)) CHECK(da.accepts(u) == (u == Word{"a"}));

  std::vector<std::string> drone{"s", "p", "c", "f", "l"};
  auto r = parse_regex("(s*;p*;c;f*)*");
  auto dd = to_dfa(r, Alphabet(drone));
  CHECK(dd.accepts(w("spcf")));
  CHECK(dd.accepts(w("cc")));
  CHECK(dd.accepts({}));
  CHECK_FALSE(dd.accepts(w("spl")));
  for (const auto& u : oracle::words_upto(drone, 4)) CHECK(dd.accepts(u) == oracle::matches(r, u));
}

TEST_CASE("language equivalence", "[regex]") {
  auto r = parse_regex("(a+b)*;a");
  CHECK(language_equivalent(r, r));
  CHECK_FALSE(language_equivalent(parse_regex("a*"), parse_regex("a")));
  CHECK(language_equivalent(parse_regex("(a*;b*)*"), parse_regex("(a+b)*")));
  CHECK(language_equivalent(parse_regex("a;a*"), parse_regex("a*;a")));
}

TEST_CASE("membership", "[regex]") {
  CHECK(member(parse_regex("(a+b)*"), w("abba")));
  CHECK_FALSE(member(parse_regex("a;b"), w("ba")));
  CHECK(member(parse_regex("(s*;p*;c;f*)*"), w("spcf")));
}

TEST_CASE("residuation soundness and composition on a random corpus", "[regex]") {
  gen::Rng rng(11);
  Alphabet ab(kAb);
  auto words = oracle::words_upto(kAb, 3);
  for (int i = 0; i < 120; ++i) {
    auto r = gen::regex(rng, kAb, 4);
    for (const auto& u : words) {
      auto ru = residuate(r, u);
      for (const auto& v : words) {
        CHECK(member(ru, v) == oracle::matches(r, oracle::concat(u, v)));
      }
    }
    auto u = words[gen::pick(rng, words.size())];
    auto v = words[gen::pick(rng, words.size())];
    CHECK(language_equivalent(residuate(r, oracle::concat(u, v)), residuate(residuate(r, u), v), ab));
  }
}

TEST_CASE("normalization is idempotent and language preserving", "[regex]") {
  gen::Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    auto r = gen::regex(rng, {"a", "b", "c"}, 5);
    auto n = normalize(r);
    CHECK(normalize(n).str() == n.str());
    CHECK(language_equivalent(r, n, Alphabet({"a", "b", "c"})));
  }
}

TEST_CASE("derivative automata stay finite on the size-60 corpus", "[regex]") {
  gen::Rng rng(17);
  Alphabet abc({"a", "b", "c"});
  int big = 0;
  for (int i = 0; i < 200; ++i) {
    auto r = gen::regex(rng, {"a", "b", "c"}, 7);
    if (r.size() > 60) continue;
    if (r.size() > 20) ++big;
    auto d = to_dfa(r, abc);
    CHECK(d.size() < 10000);
  }
  CHECK(big > 0);
}

TEST_CASE("state elimination", "[regex]") {
  // 0 -a-> 1 -a-> 1, final {1}
  AutomatonSpec a{2, 0, {false, true}, {{0, "a", 1}, {1, "a", 1}}};
  CHECK(language_equivalent(state_elimination(a), parse_regex("a;a*")));
  AutomatonSpec e{1, 0, {true}, {}};
  CHECK(state_elimination(e).kind() == Regex::Kind::Epsilon);
  AutomatonSpec none{1, 0, {false}, {{0, "a", 0}}};
  CHECK(is_empty_language(state_elimination(none)));

  gen::Rng rng(19);
  for (int i = 0; i < 100; ++i) {
    auto r = gen::regex(rng, kAb, 4);
    auto d = to_dfa(r, Alphabet(kAb));
    AutomatonSpec s{d.size(), d.initial, d.accepting, {}};
    for (std::size_t q = 0; q < d.size(); ++q)
      for (std::size_t k = 0; k < 2; ++k) s.edges.push_back({q, kAb[k], d.transitions[q][k]});
    CHECK(language_equivalent(state_elimination(s), r, Alphabet(kAb)));
  }
}

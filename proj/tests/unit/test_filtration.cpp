#include <catch_amalgamated.hpp>

#include "gen.hpp"
#include "pol/filtration.hpp"
#include "pol/io.hpp"

using namespace pol;

namespace {

PolModel drone() { return model_from_json(read_file(POL_DATA_DIR "/drone.json")); }

RandomModelShape shape() {
  RandomModelShape sh;
  sh.max_states = 5;
  sh.agents = {"i", "j"};
  sh.props = {"p", "q"};
  sh.alphabet = Alphabet({"a", "b"});
  sh.pool = default_regex_pool(sh.alphabet, 8);
  return sh;
}

}  // namespace

TEST_CASE("duplicate states merge", "[filtration]") {
  PolModel m;
  m.alphabet = Alphabet({"a"});
  m.agents = {"i"};
  m.states = {{"x", {"p"}, parse_regex("a*")}, {"y", {"p"}, parse_regex("a*")}, {"z", {}, parse_regex("a")}};
  m.reset_relations();
  m.set_partition(0, {{0, 1, 2}});
  auto f = filtrate(m, parse_formula("K_i <a>p"));
  CHECK(f.model.size() == 2);
  CHECK(f.class_of[0] == f.class_of[1]);
  CHECK(f.class_of[0] != f.class_of[2]);
}

TEST_CASE("drone filtration keeps u and v apart", "[filtration]") {
  auto phi = parse_formula("K_d T1");
  auto f = filtrate(drone(), phi);
  CHECK(f.model.size() == 2);
  CHECK(f.class_of[0] != f.class_of[1]);
  CHECK(f.raw_symmetric);
  // valuation restricted to the formula's propositions
  CHECK(f.model.states[f.class_of[1]].props.empty());
  auto v = verify_filtration(drone(), parse_formula("<s*;p*;c> K_d T1"), 3);
  CHECK(v.pass);
  CHECK(v.comparisons > 0);
  CHECK(verify_filtration(drone(), Formula::top(), 2).pass);
}

TEST_CASE("filtration sweep with structural checks", "[filtration]") {
  gen::Rng rng(53);
  gen::FormulaShape fs;
  fs.regex_depth = 1;
  auto sh = shape();
  std::size_t failures = 0, nontransitive = 0;
  for (int t = 0; t < 60; ++t) {
    auto m = random_model(rng, sh);
    auto phi = gen::formula(rng, fs, 3);
    FlClosure fl(phi);
    auto f = filtrate(m, fl);
    CHECK(f.raw_symmetric);
    if (!f.raw_transitive) ++nontransitive;
    if (fl.size() < 63) CHECK(f.model.size() <= (std::size_t(1) << fl.size()));
    CHECK(f.model.size() <= m.size());
    // representative independence on the closure at the empty word
    auto g = filtrate(m, fl, Representative::Greatest);
    ModelChecker a(f.model), b(g.model);
    for (std::size_t c = 0; c < f.model.size(); ++c)
      for (const auto& psi : fl.members()) CHECK(a.check(c, psi) == b.check(c, psi));
    // closure truths agree between M and its quotient before any update
    if (!verify_filtration(m, phi, 0).pass) ++failures;
  }
  INFO("non-transitive raw relations: " << nontransitive);
  CHECK(failures == 0);
}

TEST_CASE("quotient expectations can diverge after an update", "[filtration]") {
  // s2 and s3 agree on the closure at the root and share a class whose
  // expectation comes from s2; after observing a they no longer agree.
  PolModel m;
  m.alphabet = Alphabet({"a", "b"});
  m.agents = {"i"};
  m.states = {{"s2", {}, parse_regex("a;a*")}, {"s3", {}, parse_regex("a;b*")}};
  m.reset_relations();
  auto phi = parse_formula("~p & [a*]q");
  auto f = filtrate(m, phi);
  CHECK(f.model.size() == 1);
  CHECK(verify_filtration(m, phi, 0).pass);
  auto v = verify_filtration(m, phi, 1);
  CHECK_FALSE(v.pass);
  CHECK(v.word == Word{"a"});
  CHECK(v.state == "s3");
  REQUIRE(v.formula);
  CHECK(v.formula->str() == "[a][a*]q");
  CHECK(v.truth_in_original);
}

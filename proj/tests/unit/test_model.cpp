#include <catch_amalgamated.hpp>

#include "gen.hpp"
#include "pol/error.hpp"
#include "pol/io.hpp"
#include "pol/model.hpp"
#include "pol_oracle.hpp"

using namespace pol;

namespace {

PolModel drone() { return model_from_json(read_file(POL_DATA_DIR "/drone.json")); }

Word w(std::string_view s) {
  Word out;
  for (char c : s) out.emplace_back(1, c);
  return out;
}

PolModel single(const char* exp, std::vector<std::string> sigma = {"a", "b"}) {
  PolModel m;
  m.alphabet = Alphabet(sigma);
  m.agents = {"i"};
  m.states.push_back({"s", {"p"}, parse_regex(exp)});
  m.reset_relations();
  return m;
}

RandomModelShape shape(std::size_t max_states = 4) {
  RandomModelShape sh;
  sh.max_states = max_states;
  sh.agents = {"i", "j"};
  sh.props = {"p", "q"};
  sh.alphabet = Alphabet({"a", "b"});
  sh.pool = default_regex_pool(sh.alphabet, 8);
  return sh;
}

}  // namespace

TEST_CASE("model json round trip", "[model]") {
  auto m = drone();
  CHECK(m.size() == 2);
  CHECK(m.related(0, 0, 1));
  auto again = model_from_json(model_to_json(m));
  CHECK(model_to_json(again) == model_to_json(m));
  CHECK_THROWS_AS(model_from_json("{\"alphabet\": [\"a\"]}"), Error);
  CHECK_THROWS_AS(model_from_json("not json"), Error);
  CHECK_THROWS_AS(
      model_from_json(R"({"alphabet":["a"],"agents":[],"states":[{"id":"x","exp":"b"}]})"), Error);
  try {
    model_from_json(R"({"alphabet":["a"],"agents":["i"],"states":[{"id":"x"}],"relations":{"i":[["x"],["x"]]}})");
    FAIL("accepted overlapping classes");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
  }
}

TEST_CASE("update by observation", "[model]") {
  auto m = drone();
  auto c = update(m, "c");
  REQUIRE(c);
  REQUIRE(c->size() == 1);
  CHECK(c->states[0].id == "u");
  CHECK(language_equivalent(c->states[0].exp, parse_regex("f*;(s*;p*;c;f*)*"), m.alphabet));

  CHECK_FALSE(update(m, "f"));
  CHECK_THROWS_AS(update(m, "z"), Error);

  auto spc = update_word(m, w("spc"));
  REQUIRE(spc);
  CHECK(spc->size() == 1);
  CHECK(spc->states[0].id == "u");
  auto spl = update_word(m, w("spl"));
  REQUIRE(spl);
  CHECK(spl->states[0].id == "v");

  auto id = update_word(m, {});
  REQUIRE(id);
  CHECK(model_to_json(*id) == model_to_json(m));

  auto two = update(*update(single("b*;a;a;(a+b)*"), "b"), "a");
  auto word = update_word(single("b*;a;a;(a+b)*"), w("ba"));
  REQUIRE(two);
  REQUIRE(word);
  CHECK(language_equivalent(two->states[0].exp, word->states[0].exp));
}

TEST_CASE("residuation graph shapes", "[model]") {
  ResiduationGraph g(single("a*"));
  g.expand_all();
  CHECK(g.size() == 2);
  CHECK(g.step(ResiduationGraph::kRoot, "a") == ResiduationGraph::kRoot);
  CHECK(g.step(ResiduationGraph::kRoot, "b") == ResiduationGraph::kDead);

  ResiduationGraph h(single("a;b"));
  auto n1 = h.step(ResiduationGraph::kRoot, "a");
  CHECK(h.deriv(n1, 0).str() == "b");
  auto n2 = h.step(n1, "b");
  CHECK(h.deriv(n2, 0).kind() == Regex::Kind::Epsilon);
  CHECK(h.alive(n2, 0));
  CHECK(h.step(n2, "a") == ResiduationGraph::kDead);
  CHECK(h.step(n2, "b") == ResiduationGraph::kDead);
  CHECK(h.witness(n2) == w("ab"));

  ResiduationGraph d(drone());
  auto cedar = d.run(w("spc"));
  auto larch = d.run(w("spl"));
  CHECK(d.survivors(cedar) == std::vector<std::size_t>{0});
  CHECK(d.survivors(larch) == std::vector<std::size_t>{1});
  d.expand_all();
  CHECK(d.size() < 20);
}

TEST_CASE("residuation graph budget", "[model]") {
  ResiduationGraph g(drone(), 3);
  CHECK_THROWS_AS(g.expand_all(), ResourceExceeded);
}

TEST_CASE("drone truths", "[model]") {
  auto m = drone();
  ModelChecker mc(m);
  CHECK(mc.check("u", parse_formula("[ (s* ; p*) ] ~(K_d T1 | K_d ~T1)")));
  CHECK(mc.check("u", parse_formula("<s*;p*;c> K_d T1")));
  CHECK_FALSE(mc.check("u", parse_formula("K_d T1")));
  CHECK_FALSE(mc.check("v", parse_formula("<s*;p*;c> true")));
  auto wit = mc.witness(0, parse_formula("<s*;p*;c> K_d T1"));
  REQUIRE(wit);
  CHECK(wit == Word{"c"});
  CHECK_THROWS_AS(mc.check("zz", parse_formula("true")), Error);
  CHECK_THROWS_AS(mc.check("u", parse_formula("K_x p")), Error);
}

TEST_CASE("epsilon expectation blocks observations", "[model]") {
  auto m = single("0*");
  CHECK_FALSE(check(m, "s", parse_formula("<a>true")));
  CHECK(check(m, "s", parse_formula("<0*>p")));
  CHECK(check(m, "s", parse_formula("[a]false")));
  // a state with an empty expectation does not survive the empty word
  auto e = single("0");
  CHECK(check(e, "s", parse_formula("p")));
  CHECK_FALSE(check(e, "s", parse_formula("<0*>true")));
}

TEST_CASE("checker agrees with the truth clauses on star-free programs", "[model]") {
  gen::Rng rng(31);
  gen::FormulaShape fs;
  fs.regex_depth = 2;
  std::size_t compared = 0;
  for (int t = 0; t < 250; ++t) {
    auto m = random_model(rng, shape(3));
    auto f = gen::formula(rng, fs, 3);
    if (!oracle::star_free(f)) continue;
    oracle::PolView view{m, 4};
    ModelChecker mc(m);
    for (std::size_t s = 0; s < m.size(); ++s) {
      INFO(f.str() << "\n" << model_to_json(m));
      CHECK(mc.check(s, f) == view.check(s, f));
      ++compared;
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("bounded diamond witnesses are found on arbitrary programs", "[model]") {
  gen::Rng rng(37);
  for (int t = 0; t < 200; ++t) {
    auto m = random_model(rng, shape(3));
    auto f = Formula::dia(gen::regex(rng, {"a", "b"}, 3),
                          gen::formula(rng, gen::FormulaShape{{"p", "q"}, {"i", "j"}, {"a", "b"}, 1, false}, 1));
    oracle::PolView view{m, 3};
    ModelChecker mc(m);
    for (std::size_t s = 0; s < m.size(); ++s) {
      if (view.check(s, f)) CHECK(mc.check(s, f));
      if (mc.check(s, f)) {
        auto wt = mc.witness(s, f);
        REQUIRE(wt);
        CHECK(member(f.program(), *wt));
      }
    }
  }
}

TEST_CASE("update laws on random models", "[model]") {
  gen::Rng rng(41);
  auto words = oracle::words_upto({"a", "b"}, 3);
  for (int t = 0; t < 60; ++t) {
    auto m = random_model(rng, shape(4));
    for (int k = 0; k < 10; ++k) {
      auto u = words[gen::pick(rng, words.size())];
      auto v = words[gen::pick(rng, words.size())];
      auto mu = update_word(m, u);
      auto muv = update_word(m, oracle::concat(u, v));
      auto step = mu ? update_word(*mu, v) : std::nullopt;
      REQUIRE(bool(step) == bool(muv));
      if (!muv) continue;
      REQUIRE(step->size() == muv->size());
      for (std::size_t i = 0; i < muv->size(); ++i) {
        CHECK(step->states[i].id == muv->states[i].id);
        CHECK(language_equivalent(step->states[i].exp, muv->states[i].exp, m.alphabet));
        // valuation persistence
        CHECK(muv->states[i].props == m.states[m.state_index(muv->states[i].id)].props);
        // relations are restrictions
        for (std::size_t j = 0; j < muv->size(); ++j)
          for (std::size_t a = 0; a < m.agents.size(); ++a)
            CHECK(muv->related(a, i, j) ==
                  m.related(a, m.state_index(muv->states[i].id), m.state_index(muv->states[j].id)));
      }
      // monotone death
      for (const auto& st : muv->states) CHECK(mu->find_state(st.id));
    }
  }
}

TEST_CASE("knowledge is relation local", "[model]") {
  gen::Rng rng(43);
  gen::FormulaShape fs;
  for (int t = 0; t < 100; ++t) {
    auto m = random_model(rng, shape(4));
    auto psi = gen::formula(rng, fs, 2);
    ModelChecker mc(m);
    for (std::size_t s = 0; s < m.size(); ++s) {
      bool all = true;
      for (std::size_t u = 0; u < m.size(); ++u)
        if (m.related(0, s, u)) all = all && mc.check(u, psi);
      CHECK(mc.check(s, Formula::know("i", psi)) == all);
    }
  }
}

TEST_CASE("validity sampling", "[model]") {
  RandomModelShape sh;
  sh.max_states = 4;
  auto recall = implies(parse_formula("<a>hK_i p"), parse_formula("hK_i <a>p"));
  auto r = validity_sample(recall, 500, sh, 1);
  CHECK(r.valid);
  CHECK(r.trials == 500);

  auto p = validity_sample(parse_formula("p"), 50, sh, 1);
  CHECK_FALSE(p.valid);
  CHECK(p.trials == 1);
  REQUIRE(p.model);
  CHECK_FALSE(check(*p.model, p.state, parse_formula("p")));

  auto unsat = validity_sample(parse_formula("~(~p & <a>p)"), 300, sh, 2);
  CHECK(unsat.valid);
}

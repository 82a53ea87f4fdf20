#include <catch_amalgamated.hpp>

#include <functional>
#include <set>

#include "pol/error.hpp"
#include "pol/io.hpp"
#include "pol/lowerbound.hpp"
#include "atm_oracle.hpp"

using namespace pol;

namespace {

AtmSpec toy() { return atm_from_json(read_file(POL_DATA_DIR "/toy_atm.json")); }

// q0 reading 0 writes 1 and moves right into qp; q0 reading 1 writes 0 and
// moves left into qp; qp reading 1 writes the blank and accepts.
AtmSpec walker() {
  return atm_from_json(R"({
    "states": [{"name":"q0","mode":"exists"}, {"name":"qp","mode":"forall"},
               {"name":"qacc","mode":"exists"}, {"name":"qrej","mode":"exists"}],
    "accept": "qacc", "reject": "qrej",
    "trans": {
      "q0,0": {"a": {"write":"1","move":"R","next":"qp"}},
      "q0,1": {"a": {"write":"0","move":"L","next":"qp"},
               "b": {"write":"1","move":"R","next":"qp"}},
      "qp,1": {"a": {"write":"_","move":"R","next":"qacc"},
               "b": {"write":"_","move":"L","next":"qrej"}}
    },
    "space": "poly:4,1"
  })");
}

bool eval(const Formula& f, const std::set<std::string>& val) {
  switch (f.kind()) {
    case Formula::Kind::Top:
      return true;
    case Formula::Kind::Prop:
      return val.count(f.name()) > 0;
    case Formula::Kind::Not:
      return !eval(f.sub(), val);
    case Formula::Kind::And:
      return eval(f.left(), val) && eval(f.right(), val);
    case Formula::Kind::Or:
      return eval(f.left(), val) || eval(f.right(), val);
    default:
      throw std::logic_error("not propositional");
  }
}

bool contains(const Formula& f, const Formula& g) {
  if (f == g) return true;
  switch (f.kind()) {
    case Formula::Kind::Top:
    case Formula::Kind::Prop:
      return false;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return contains(f.left(), g) || contains(f.right(), g);
    default:
      return contains(f.sub(), g);
  }
}

}  // namespace

TEST_CASE("successor examples on a three-cell window", "[lowerbound]") {
  auto m = walker();
  const auto zero = Symbol::plain("0"), one = Symbol::plain("1"), q0 = Symbol::head("q0", "0");
  // the head writes and leaves
  CHECK(succ(m, Branch::A, one, q0, zero) == one);
  // head far away
  CHECK(succ(m, Branch::A, zero, zero, one) == zero);
  // the head arrives from the left
  CHECK(succ(m, Branch::A, q0, zero, one) == Symbol::head("qp", "0"));
  // b falls back to a when only one move is given
  CHECK(succ(m, Branch::B, q0, zero, one) == Symbol::head("qp", "0"));
  // arrival from the right on branch a only
  const auto q1 = Symbol::head("q0", "1");
  CHECK(succ(m, Branch::A, zero, one, q1) == Symbol::head("qp", "1"));
  CHECK(succ(m, Branch::B, zero, one, q1) == one);
  // a move into '#' keeps the head in place
  CHECK(succ(m, Branch::A, zero, q0, Symbol::hash()) == Symbol::head("qp", "1"));
  // terminal and stuck states leave the window unchanged
  const auto acc = Symbol::head("qacc", "_");
  CHECK(succ(m, Branch::A, zero, acc, one) == acc);
  CHECK(succ(m, Branch::A, acc, zero, one) == zero);
}

TEST_CASE("inconsistent windows are rejected", "[lowerbound]") {
  auto m = walker();
  const auto q0 = Symbol::head("q0", "0");
  CHECK_THROWS_AS(succ(m, Branch::A, q0, q0, Symbol::plain("1")), Error);
  try {
    succ(m, Branch::A, q0, Symbol::plain("0"), Symbol::head("qp", "1"));
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InconsistentTriple);
  }
  CHECK_THROWS_AS(succ(m, Branch::A, Symbol{"q0", ""}, Symbol::plain("0"), Symbol::plain("0")), Error);
}

TEST_CASE("successor agrees with a full tape simulator", "[lowerbound]") {
  for (const auto& m : {toy(), walker()}) {
    auto t = symbol_table(m, 1);
    std::size_t checked = 0;
    for (const auto& a : t.sym)
      for (const auto& b : t.sym)
        for (const auto& c : t.sym) {
          if (a.has_head() + b.has_head() + c.has_head() > 1) continue;
          for (Branch br : {Branch::A, Branch::B}) {
            INFO(a.text() << " " << b.text() << " " << c.text());
            auto want = oracle::embed(m, a, b, c).step(m, br).at(4);
            CHECK(succ(m, br, a, b, c) == want);
            ++checked;
          }
        }
    CHECK(checked > 0);
  }
}

TEST_CASE("symbol table", "[lowerbound]") {
  auto m = toy();
  auto t = symbol_table(m, 3);
  CHECK(t.space == 8);
  CHECK(t.n == 3);
  CHECK(t.sym.size() == 1 + 3 + 3 * 3);
  auto names = t.alphabet();
  CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
  for (const auto& s : names) CHECK(is_identifier(s));

  auto w = walker();  // 4|x| cells
  CHECK(symbol_table(w, 1).n == 2);
  CHECK(symbol_table(w, 5).n == 5);

  CHECK_THROWS_AS(symbol_table(m, 25), Error);
  try {
    symbol_table(m, 70);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SpaceBoundTooLarge);
  }
  CHECK_THROWS_AS(generate(m, "0101", GenerateOptions{0, 3}), Error);
}

TEST_CASE("space bound descriptors", "[lowerbound]") {
  CHECK(SpaceBound::parse("2^3").eval(2) == 64);
  CHECK(SpaceBound::parse("poly:3,2").eval(4) == 48);
  CHECK(SpaceBound::parse("2^1").eval(70) == UINT64_MAX);
  CHECK(SpaceBound::parse("poly:5,0").eval(9) == 5);
  for (const char* s : {"2^2", "poly:3,2"}) CHECK(SpaceBound::parse(s).str() == s);
  for (const char* s : {"3^2", "2^", "2^0", "poly:3", "poly:0,1", "poly:a,2", ""})
    CHECK_THROWS_AS(SpaceBound::parse(s), Error);
}

TEST_CASE("machine validation and json", "[lowerbound]") {
  auto m = toy();
  auto back = atm_from_json(atm_to_json(m));
  CHECK(atm_to_json(back) == atm_to_json(m));
  CHECK(back.trans.size() == 3);
  CHECK(back.move("q0", "_", Branch::B)->next == "qrej");

  auto bad = [&](auto mutate) {
    auto c = m;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), Error);
  };
  bad([](AtmSpec& c) { c.states[0].existential = false; });
  bad([](AtmSpec& c) { c.accept = "nowhere"; });
  bad([](AtmSpec& c) { c.reject = c.accept; });
  bad([](AtmSpec& c) { c.trans[{"q0", "0"}][0]->write = "1"; });  // enters qacc without the blank
  bad([](AtmSpec& c) { c.trans[{"q0", "0"}][0]->next = "q0"; });  // no alternation
  bad([](AtmSpec& c) { c.trans[{"qacc", "0"}] = c.trans[{"q0", "0"}]; });
  bad([](AtmSpec& c) { c.trans[{"q0", "2"}] = c.trans[{"q0", "0"}]; });
  bad([](AtmSpec& c) { c.states.push_back({"q0", false}); });
  CHECK_THROWS_AS(atm_from_json(R"({"states":[],"accept":"a","reject":"b","trans":{},"space":"2^1"})"), Error);
}

TEST_CASE("position equality encoding", "[lowerbound]") {
  for (std::size_t n = 1; n <= 3; ++n)
    for (auto [i, j] : {std::pair{1, 2}, {1, 3}, {2, 3}}) {
      auto f = pos_equal_encoding(i, j, n);
      for (unsigned v = 0; v < (1u << (3 * n)); ++v) {
        std::set<std::string> val;
        for (std::size_t k = 0; k < 3 * n; ++k)
          if ((v >> k) & 1) val.insert("p" + std::to_string(k + 1));
        auto block = [&](int b) {
          unsigned x = 0;
          for (std::size_t k = 0; k < n; ++k) x = 2 * x + val.count("p" + std::to_string((b - 1) * n + k + 1));
          return x;
        };
        CHECK(eval(f, val) == (block(i) == block(j)));
      }
    }
  CHECK(pos_equal_encoding(1, 2, 1) == iff(Formula::prop("p1"), Formula::prop("p2")));
  CHECK_THROWS_AS(pos_equal_encoding(2, 1, 1), Error);
}

TEST_CASE("exactly-one expansion is one-hot", "[lowerbound]") {
  for (std::size_t k = 1; k <= 6; ++k) {
    std::vector<Formula> atoms;
    for (std::size_t s = 0; s < k; ++s) atoms.push_back(Formula::prop("x" + std::to_string(s)));
    auto f = exactly_one(atoms);
    std::size_t models = 0;
    for (unsigned v = 0; v < (1u << k); ++v) {
      std::set<std::string> val;
      for (std::size_t s = 0; s < k; ++s)
        if ((v >> s) & 1) val.insert("x" + std::to_string(s));
      const bool one_hot = v != 0 && (v & (v - 1)) == 0;
      CHECK(eval(f, val) == one_hot);
      models += eval(f, val);
    }
    CHECK(models == k);
  }
}

TEST_CASE("generated formula for a one-letter input", "[lowerbound]") {
  auto m = toy();
  auto f = generate(m, "0");
  const auto p1 = Formula::prop("p1");
  CHECK(contains(f, Formula::conj(Formula::hat("i", p1), Formula::hat("i", Formula::neg(p1)))));
  // the uniqueness clause over the 13 symbols of configuration 1
  auto t = symbol_table(m, 1);
  std::vector<Formula> cells;
  for (const auto& s : t.sym) cells.push_back(Formula::dia(Regex::atom(t.obs_cell(1, s)), Formula::top()));
  CHECK(contains(f, exactly_one(cells)));
  // the initial state on the first input letter
  CHECK(contains(f, Formula::dia(Regex::atom("c1_q0_s0"), Formula::top())));

  REQUIRE(f.is(Formula::Kind::And));
  auto obs = [](const char* o) { return Formula::dia(Regex::atom(o), Formula::top()); };
  CHECK(f.right() == Formula::conj(obs("win"), obs("ex")));
  CHECK(f.str().find("<win>true & <ex>true") != std::string::npos);

  CHECK(agents_of(f) == std::set<std::string>{"i", "j"});
  CHECK(props_of(f) == std::set<std::string>{"p1", "p2", "p3"});
  auto deep = generate(m, "0", GenerateOptions{6, kMaxPositionBits});
  CHECK(props_of(deep).count("p6"));
  CHECK(deep.size() > f.size());
}

TEST_CASE("generated formulas parse back and grow polynomially", "[lowerbound]") {
  for (const auto& m : {toy(), walker()}) {
    std::vector<double> xs, ys;
    std::string x;
    for (std::size_t len = 1; len <= 6; ++len) {
      x += len % 2 ? "0" : "1";
      auto f = generate(m, x);
      INFO("|x| = " << len);
      CHECK(parse_formula(f.str()) == f);
      xs.push_back(double(len));
      ys.push_back(double(f.size()));
    }
    const int deg = generate_degree_bound(m);
    CHECK(deg <= 2);
    CHECK(oracle::fit_residual(xs, ys, deg) < 0.05);
  }
  CHECK_THROWS_AS(generate(toy(), ""), Error);
  CHECK_THROWS_AS(generate(toy(), "012"), Error);
}

#pragma once

// Hintikka sets over a closure, bubbles, observation successors, bubble
// transition structures and model extraction from them.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pol/formula.hpp"
#include "pol/model.hpp"
#include "pol/regex.hpp"

namespace pol {

// Membership vector indexed by closure position.
using Label = std::vector<bool>;

struct Verdict {
  bool ok = true;
  std::string violation;  // first violated condition, empty when ok

  explicit operator bool() const { return ok; }
  static Verdict pass() { return {}; }
  static Verdict fail(std::string why) { return {false, std::move(why)}; }
};

Label label_of(const FlClosure& fl, const std::vector<Formula>& formulas);
std::vector<Formula> formulas_of(const FlClosure& fl, const Label& h);

Verdict is_hintikka(const Label& h, const FlClosure& fl);

inline constexpr std::size_t kDefaultHintikkaCap = 22;

// All Hintikka sets over the closure, in a fixed order. Throws
// ClosureTooLarge when the closure has more than `cap` members.
std::vector<Label> enumerate_hintikka(const FlClosure& fl, std::size_t cap = kDefaultHintikkaCap);

struct Bubble {
  std::string id;
  std::vector<std::string> states;
  std::vector<Label> labels;
  // cls[agent][state]: least index of the state's class
  std::vector<std::vector<std::size_t>> cls;

  std::optional<std::size_t> find(std::string_view state) const;
};

struct Bts {
  Formula formula;
  std::shared_ptr<const FlClosure> closure;
  Alphabet alphabet;
  std::vector<std::string> agents;
  std::vector<Bubble> bubbles;
  // delta[bubble][symbol]; nullopt is the no-successor value
  std::vector<std::vector<std::optional<std::size_t>>> delta;
  std::size_t initial = 0;

  const FlClosure& fl() const { return *closure; }
};

Verdict is_bubble(const Bubble& b, const Bts& t);
Verdict is_a_successor(const Bubble& from, const Bubble& to, std::string_view symbol, const Bts& t);
Verdict is_bts(const Bts& t);

struct Extraction {
  PolModel model;
  std::string pointed;  // a state whose initial label contains the formula
  // per state of the model: whether its automaton has absorbing non-final states
  std::vector<bool> absorbing;
};

// Throws NotABts when is_bts fails.
Extraction extract_model(const Bts& t);

// Bubble automaton of one state: the bubbles reachable from the initial
// one, finals = bubbles containing the state.
AutomatonSpec bubble_automaton(const Bts& t, std::string_view state);

// Bubbles of the residuals M|w of a finite model, labelled with the closure
// truths. Bubble 0 is M itself.
Bts bts_from_model(const PolModel& m, const Formula& phi);

}  // namespace pol

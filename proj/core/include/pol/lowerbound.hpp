#pragma once

// Reduction from alternating exponential-space Turing machines to POL
// satisfiability: symbol encoding, the three-cell successor function and the
// generator of the hardness formula tr(x).

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pol/formula.hpp"

namespace pol {

// Tape letters are "0", "1" and "_" (blank).
inline const std::array<std::string, 3> kTapeLetters{"0", "1", "_"};

enum class Branch { A, B };

struct AtmMove {
  std::string write;
  char move = 'R';  // 'L' or 'R'
  std::string next;
};

struct AtmState {
  std::string name;
  bool existential = true;
};

// e(m) = 2^(k m) or c m^d.
struct SpaceBound {
  enum class Kind { Exp, Poly };
  Kind kind = Kind::Exp;
  std::uint64_t k = 1, c = 1, d = 1;

  static SpaceBound parse(std::string_view text);  // "2^k" or "poly:c,d"
  std::string str() const;
  // Saturates at UINT64_MAX.
  std::uint64_t eval(std::size_t m) const;
};

struct AtmSpec {
  std::vector<AtmState> states;  // states[0] is initial
  std::string accept, reject;
  // (state, letter) -> moves for branch a and branch b
  std::map<std::pair<std::string, std::string>, std::array<std::optional<AtmMove>, 2>> trans;
  SpaceBound space;

  const AtmState& state(std::string_view name) const;
  bool terminal(std::string_view name) const { return name == accept || name == reject; }
  // Move taken on a branch: b falls back to a; nullopt means the machine is
  // stuck and the configuration does not change.
  std::optional<AtmMove> move(const std::string& state, const std::string& letter, Branch br) const;
  // Throws Format on any invariant violation.
  void validate() const;
};

AtmSpec atm_from_json(std::string_view text);
std::string atm_to_json(const AtmSpec& m, int indent = 2);

// A configuration cell: '#', a letter, or a state paired with a letter.
struct Symbol {
  std::string state;  // empty unless the head is here
  std::string letter;  // empty for '#'

  static Symbol hash() { return {}; }
  static Symbol plain(std::string l) { return {"", std::move(l)}; }
  static Symbol head(std::string q, std::string l) { return {std::move(q), std::move(l)}; }

  bool is_hash() const { return letter.empty(); }
  bool has_head() const { return !state.empty(); }
  std::string text() const;   // "#", "0", "q0.1"
  std::string ident() const;  // identifier form: "hash", "s0", "q0_s1"

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

struct SymbolTable {
  std::vector<Symbol> sym;
  std::size_t n = 0;  // bits per position
  std::uint64_t space = 0;

  std::string prop(std::size_t m) const { return "p" + std::to_string(m); }  // 1-based
  std::string obs_pos(std::size_t m) const { return "p" + std::to_string(m); }
  std::string obs_neg(std::size_t m) const { return "pbar" + std::to_string(m); }
  std::string obs_cell(int config, const Symbol& s) const {
    return "c" + std::to_string(config) + "_" + s.ident();
  }
  // Every observation name in use.
  std::vector<std::string> alphabet() const;
};

inline constexpr std::size_t kMaxPositionBits = 24;

// Throws SpaceBoundTooLarge when n exceeds max_bits.
SymbolTable symbol_table(const AtmSpec& m, std::size_t input_length,
                         std::size_t max_bits = kMaxPositionBits);

// Middle symbol of the window after one step on the given branch. The head
// never enters a '#' cell: a move towards one leaves the head in place.
// Throws InconsistentTriple when more than one cell carries the head or a
// state is paired with '#'.
Symbol succ(const AtmSpec& m, Branch br, const Symbol& a, const Symbol& b, const Symbol& c);

// Exactly one of the formulas holds: a disjunction of one-hot conjunctions.
Formula exactly_one(const std::vector<Formula>& fs);

// Bitwise equality of position blocks i and j (1-based, i < j).
Formula pos_equal_encoding(int i, int j, std::size_t n);

struct GenerateOptions {
  // Depth of the branching tree and of the uniform-observation clause;
  // 0 means 3n. Set it to 6n for the deeper tree.
  std::size_t tree_depth = 0;
  std::size_t max_bits = kMaxPositionBits;
};

// tr(x) for input x over {0,1}. The last conjunct is <win>true & <ex>true.
Formula generate(const AtmSpec& m, std::string_view input, const GenerateOptions& opts = {});

// Polynomial degree in |x| that bounds |generate(m, x)|.
int generate_degree_bound(const AtmSpec& m);

}  // namespace pol

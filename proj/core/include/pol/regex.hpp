#pragma once

// Observation expressions: regular expressions over a finite alphabet with
// Brzozowski derivatives, residuation and derivative automata.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pol {

using Word = std::vector<std::string>;

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> symbols);

  const std::vector<std::string>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  bool contains(std::string_view s) const;
  // Index of a symbol, or nullopt.
  std::optional<std::size_t> index(std::string_view s) const;
  // Throws UnknownSymbol when `s` is not a member.
  void require(std::string_view s) const;
  void require(const Word& w) const;

  // Union preserving this alphabet's order, new symbols appended sorted.
  Alphabet merged(const std::set<std::string>& extra) const;

  bool operator==(const Alphabet& o) const { return symbols_ == o.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

bool is_identifier(std::string_view s);

class Regex {
 public:
  enum class Kind : std::uint8_t { Empty, Epsilon, Atom, Sum, Concat, Star };

  // The empty-language expression.
  Regex();

  static Regex empty();
  static Regex epsilon();
  static Regex atom(std::string symbol);
  // Raw constructors keep the tree as written (binary sum and concat).
  // star(0) and star(0*) collapse to the epsilon constant.
  static Regex sum(Regex a, Regex b);
  static Regex concat(Regex a, Regex b);
  static Regex star(Regex a);

  Kind kind() const;
  const std::string& symbol() const;
  std::span<const Regex> operands() const;
  const Regex& left() const { return operands()[0]; }
  const Regex& right() const { return operands()[1]; }
  const Regex& body() const { return operands()[0]; }

  // Canonical text; also the identity used for hashing and ordering.
  const std::string& str() const;
  std::size_t hash() const;
  std::size_t size() const;
  bool nullable() const;
  // True when built by the normalizing constructors below.
  bool normalized() const;

  friend bool operator==(const Regex& a, const Regex& b);
  friend bool operator!=(const Regex& a, const Regex& b) { return !(a == b); }
  friend bool operator<(const Regex& a, const Regex& b);

  struct Hash {
    std::size_t operator()(const Regex& r) const { return r.hash(); }
  };

  struct Node;

 private:
  explicit Regex(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  friend struct RegexFactory;
  std::shared_ptr<const Node> node_;
};

// ACI-normalizing constructors. Sum operands are flattened, sorted by their
// canonical text and deduplicated; concatenation is right-associated with
// unit/zero laws; stars collapse.
Regex make_sum(std::vector<Regex> operands);
Regex make_concat(const Regex& a, const Regex& b);
Regex make_star(const Regex& a);

Regex normalize(const Regex& r);

// Left quotient by one symbol. The result is normalized.
Regex derive(const Regex& r, std::string_view symbol);
Regex derive(const Regex& r, std::string_view symbol, const Alphabet& sigma);
Regex residuate(const Regex& r, const Word& w);
Regex residuate(const Regex& r, const Word& w, const Alphabet& sigma);

bool is_empty_language(const Regex& r);
bool member(const Regex& r, const Word& w);
bool member(const Regex& r, const Word& w, const Alphabet& sigma);

std::set<std::string> symbols_of(const Regex& r);

Regex parse_regex(std::string_view text);
Regex parse_regex(std::string_view text, const Alphabet& sigma);

// Complete deterministic automaton over a fixed alphabet.
struct Dfa {
  static constexpr std::size_t kDefaultStateBudget = 1'000'000;

  Alphabet alphabet;
  std::size_t initial = 0;
  std::vector<bool> accepting;
  // transitions[state][symbol index]
  std::vector<std::vector<std::size_t>> transitions;
  // Derivative that each state stands for (empty for product automata).
  std::vector<Regex> labels;

  std::size_t size() const { return accepting.size(); }
  bool accepts(const Word& w) const;
};

Dfa to_dfa(const Regex& r, const Alphabet& sigma,
           std::size_t budget = Dfa::kDefaultStateBudget);

bool language_equivalent(const Regex& a, const Regex& b, const Alphabet& sigma,
                         std::size_t budget = Dfa::kDefaultStateBudget);
bool language_equivalent(const Regex& a, const Regex& b);

// Regular expression for the language of a partial deterministic automaton,
// by state elimination in ascending state order.
struct AutomatonSpec {
  std::size_t states = 0;
  std::size_t initial = 0;
  std::vector<bool> accepting;
  // (from, symbol, to)
  struct Edge {
    std::size_t from;
    std::string symbol;
    std::size_t to;
  };
  std::vector<Edge> edges;
};

Regex state_elimination(const AutomatonSpec& a);

}  // namespace pol

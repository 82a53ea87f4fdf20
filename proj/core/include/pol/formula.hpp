#pragma once

// Formula AST shared by the epistemic language and the dynamic-logic target
// of the translation (which simply never uses Hat/Know).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pol/regex.hpp"

namespace pol {

class Formula {
 public:
  enum class Kind : std::uint8_t { Top, Prop, Not, And, Or, Hat, Know, Dia, Box };

  // true
  Formula();

  static Formula top();
  static Formula falsum();  // ~true
  static Formula prop(std::string name);
  static Formula neg(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula hat(std::string agent, Formula f);
  static Formula know(std::string agent, Formula f);
  static Formula dia(Regex program, Formula f);
  static Formula box(Regex program, Formula f);

  Kind kind() const;
  // Proposition name for Prop, agent for Hat/Know, empty otherwise.
  const std::string& name() const;
  const std::string& agent() const { return name(); }
  const Regex& program() const;
  const Formula& sub() const;  // operand of unary constructors
  const Formula& left() const;
  const Formula& right() const;

  bool is(Kind k) const { return kind() == k; }
  bool is_modal() const;

  std::size_t hash() const;
  // AST nodes, counting the nodes of embedded programs.
  std::size_t size() const;

  std::string str() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
  // Structural total order (deterministic, not alphabetical on text).
  friend bool operator<(const Formula& a, const Formula& b);

  struct Hash {
    std::size_t operator()(const Formula& f) const { return f.hash(); }
  };

  struct Node;

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  friend struct FormulaFactory;
  std::shared_ptr<const Node> node_;
};

// ~f unless f is already a negation, in which case its operand.
Formula complement(const Formula& f);

// Balanced folds; the empty conjunction is true, the empty disjunction false.
Formula conj_all(const std::vector<Formula>& fs);
Formula disj_all(const std::vector<Formula>& fs);
Formula implies(const Formula& a, const Formula& b);  // ~a | b
Formula iff(const Formula& a, const Formula& b);      // (~a | b) & (a | ~b)

Formula parse_formula(std::string_view text);
std::string print_formula(const Formula& f);

std::set<std::string> props_of(const Formula& f);
std::set<std::string> agents_of(const Formula& f);
std::set<std::string> symbols_of(const Formula& f);
std::size_t modal_depth(const Formula& f);

// Throws UnknownAgent / UnknownSymbol when f mentions names outside the
// given vocabularies.
void require_vocabulary(const Formula& f, const std::set<std::string>& agents,
                        const Alphabet& sigma);

class FlClosure {
 public:
  explicit FlClosure(const Formula& base);

  const Formula& base() const { return base_; }
  // In discovery order; members()[0] is the base.
  const std::vector<Formula>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(const Formula& f) const { return index_.count(f) != 0; }
  // Position in members(), or npos.
  std::size_t index_of(const Formula& f) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  Formula base_;
  std::vector<Formula> members_;
  std::unordered_map<Formula, std::size_t, Formula::Hash> index_;
};

// Everything a single rule application produces from `f`.
std::vector<Formula> fl_successors(const Formula& f);

FlClosure fl_closure(const Formula& f);

}  // namespace pol

#pragma once

// Epistemic models with per-state observation expectations, public update,
// the finite residuation graph and a memoizing model checker.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "pol/formula.hpp"
#include "pol/regex.hpp"

namespace pol {

struct PolState {
  std::string id;
  std::set<std::string> props;
  Regex exp;
};

class PolModel {
 public:
  Alphabet alphabet;
  std::vector<std::string> agents;
  std::vector<PolState> states;
  // cls[agent][state]: least state index of the state's class.
  std::vector<std::vector<std::size_t>> cls;

  std::size_t size() const { return states.size(); }
  std::optional<std::size_t> find_state(std::string_view id) const;
  // Throws UnknownState.
  std::size_t state_index(std::string_view id) const;
  std::optional<std::size_t> find_agent(std::string_view name) const;
  // Throws UnknownAgent.
  std::size_t agent_index(std::string_view name) const;

  bool related(std::size_t agent, std::size_t s, std::size_t t) const {
    return cls[agent][s] == cls[agent][t];
  }
  std::vector<std::vector<std::size_t>> partition(std::size_t agent) const;
  // Groups must cover every state exactly once.
  void set_partition(std::size_t agent, const std::vector<std::vector<std::size_t>>& groups);
  // Each state in its own class for every agent.
  void reset_relations();

  // Throws Format on duplicate ids, malformed partitions or expectations
  // mentioning symbols outside the alphabet.
  void validate() const;
};

// Model restricted to `keep` (ascending indices); expectations replaced by
// `exps` when given.
PolModel restrict_model(const PolModel& m, const std::vector<std::size_t>& keep,
                        const std::vector<Regex>* exps = nullptr);

// nullopt stands for the dead model (no survivors).
std::optional<PolModel> update(const PolModel& m, std::string_view symbol);
std::optional<PolModel> update_word(const PolModel& m, const Word& w);

// Deterministic graph of the models M|w, built lazily. Node 0 is M itself
// (every state present); node 1 is the dead model. Every other node is keyed
// by the canonical derivative vector, so the node set is finite.
class ResiduationGraph {
 public:
  static constexpr std::size_t kRoot = 0;
  static constexpr std::size_t kDead = 1;
  static constexpr std::size_t kDefaultBudget = 100'000;

  explicit ResiduationGraph(const PolModel& m, std::size_t budget = kDefaultBudget);

  const PolModel& model() const { return *model_; }
  std::size_t size() const { return nodes_.size(); }

  std::size_t step(std::size_t node, std::size_t symbol_index);
  std::size_t step(std::size_t node, std::string_view symbol);
  // M|w; the empty word gives the root.
  std::size_t run(const Word& w);
  // M|epsilon: drops states whose expectation is already empty.
  std::size_t restrict(std::size_t node);

  bool alive(std::size_t node, std::size_t state) const { return nodes_[node].alive[state]; }
  bool dead(std::size_t node) const { return node == kDead; }
  const Regex& deriv(std::size_t node, std::size_t state) const { return nodes_[node].derivs[state]; }
  // One word leading from the root to the node.
  const Word& witness(std::size_t node) const { return nodes_[node].witness; }
  std::vector<std::size_t> survivors(std::size_t node) const;
  std::optional<PolModel> model_at(std::size_t node) const;

  // Expands every node reachable from the root.
  void expand_all();
  // Transitions of an expanded node (npos where not expanded).
  const std::vector<std::size_t>& edges(std::size_t node) const { return nodes_[node].next; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  struct Node {
    std::vector<Regex> derivs;
    std::vector<bool> alive;
    Word witness;
    std::vector<std::size_t> next;
    std::size_t restricted = npos;
  };
  std::size_t intern(std::vector<Regex> derivs, std::vector<bool> alive, Word witness);

  std::shared_ptr<const PolModel> model_;
  std::size_t budget_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
};

class ModelChecker {
 public:
  explicit ModelChecker(const PolModel& m, std::size_t budget = ResiduationGraph::kDefaultBudget);

  const PolModel& model() const { return graph_.model(); }
  ResiduationGraph& graph() { return graph_; }

  // Truth at a state of M.
  bool check(std::size_t state, const Formula& f);
  bool check(std::string_view state, const Formula& f);
  // Truth at a state of the model of a graph node; the state must be alive
  // there (unless node is the root).
  bool check_at(std::size_t node, std::size_t state, const Formula& f);

  // For a diamond true at the root: a word from its program after which the
  // state survives and the operand holds.
  std::optional<Word> witness(std::size_t state, const Formula& diamond);

 private:
  struct Key {
    std::size_t node;
    std::size_t state;
    Formula f;
    bool operator==(const Key& o) const { return node == o.node && state == o.state && f == o.f; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return k.f.hash() ^ (k.node * 0x9e3779b97f4a7c15ULL) ^ (k.state * 0xc2b2ae3d27d4eb4fULL);
    }
  };

  bool eval(std::size_t node, std::size_t state, const Formula& f);
  bool search(std::size_t node, std::size_t state, const Formula& f, Word* trace);
  const Dfa& dfa(const Regex& r);

  ResiduationGraph graph_;
  std::unordered_map<Key, bool, KeyHash> memo_;
  std::unordered_map<std::string, Dfa> dfas_;
};

bool check(const PolModel& m, std::string_view state, const Formula& f);

// Pool of expectations used by random model generators: epsilon, letters,
// stars and a few compound shapes over the given alphabet, deduplicated.
std::vector<Regex> default_regex_pool(const Alphabet& sigma, std::size_t count);

struct RandomModelShape {
  std::size_t min_states = 1;
  std::size_t max_states = 4;
  std::vector<std::string> agents;
  std::vector<std::string> props;
  Alphabet alphabet;
  std::vector<Regex> pool;
};

PolModel random_model(std::mt19937_64& rng, const RandomModelShape& shape);

struct ValiditySample {
  bool valid = true;  // no counterexample found
  std::size_t trials = 0;
  std::optional<PolModel> model;
  std::string state;
};

// Samples random models (shape fields left empty are filled from f) and
// checks f at every state.
ValiditySample validity_sample(const Formula& f, std::size_t trials, RandomModelShape shape,
                               std::uint64_t seed);

}  // namespace pol

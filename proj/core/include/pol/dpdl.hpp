#pragma once

// Deterministic PDL: models, checking, the translation of epistemic
// observation formulas into it, a symbolic satisfiability procedure and
// brute-force oracles.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pol/formula.hpp"
#include "pol/model.hpp"
#include "pol/regex.hpp"

namespace pol {

// DPDL formulas are Formula trees without Hat/Know nodes. Generated atoms are
// opaque proposition names.
using DpdlFormula = Formula;

struct DpdlModel {
  Alphabet alphabet;
  std::vector<std::string> states;
  std::vector<std::set<std::string>> valuation;
  // trans[state][symbol index]
  std::vector<std::vector<std::optional<std::size_t>>> trans;

  std::size_t size() const { return states.size(); }
  std::optional<std::size_t> find_state(std::string_view id) const;
  void validate() const;
};

// Throws UnknownState, or Format when f contains epistemic operators.
bool dpdl_check(const DpdlModel& m, std::string_view state, const DpdlFormula& f);
// Truth of f at every state.
std::vector<bool> dpdl_truth(const DpdlModel& m, const DpdlFormula& f);

DpdlModel dpdl_model_from_json(std::string_view text);
std::string dpdl_model_to_json(const DpdlModel& m, int indent = 2);

// ------------------------------------------------------------ translation

struct LabelBudget {
  std::uint64_t labels = 1;
  bool full = false;

  // L = 2^|FL(phi)|. Throws BudgetInvalid when that does not fit.
  static LabelBudget full_for(const Formula& phi);
  static LabelBudget of(std::uint64_t labels) { return {labels, false}; }
};

std::string at_atom(std::uint64_t label, const Formula& psi);  // "@l.psi"
std::string surv_atom(std::uint64_t label);                    // "surv(l)"
std::string rel_atom(const std::string& agent, std::uint64_t l1, std::uint64_t l2);

// Throws BudgetInvalid for L outside 1..2^|FL(phi)|, and ResourceExceeded
// when the output would exceed `max_nodes` formula nodes.
inline constexpr std::uint64_t kDefaultTranslationCap = 20'000'000;
DpdlFormula translate(const Formula& phi, LabelBudget budget,
                      std::uint64_t max_nodes = kDefaultTranslationCap);

// Node count of translate(phi, budget), computed without building it.
// Saturates at UINT64_MAX.
std::uint64_t translation_size(const Formula& phi, LabelBudget budget);

// ---------------------------------------------------------- satisfiability

enum class SatStatus { Sat, Unsat, Unknown };
const char* to_string(SatStatus s);

struct DpdlSatOptions {
  std::size_t bdd_node_cap = std::size_t(1) << 23;
  std::size_t witness_state_cap = 20000;
};

struct DpdlSatStats {
  std::size_t bdd_vars = 0;
  std::size_t bdd_nodes = 0;
  std::size_t targets = 0;
  std::size_t rounds = 0;
};

struct DpdlSatResult {
  SatStatus status = SatStatus::Unknown;
  std::optional<DpdlModel> witness;
  std::string state;   // satisfying state of the witness
  std::string reason;  // why the answer is Unknown
  bool exhausted = false;  // Unknown because a resource cap was hit
  DpdlSatStats stats;
};

DpdlSatResult dpdl_sat(const DpdlFormula& f, const DpdlSatOptions& opts = {});

struct BruteResult {
  bool sat = false;
  std::optional<DpdlModel> witness;
  std::size_t models_checked = 0;
};

// Every deterministic model with at most max_states states over the atoms
// and symbols of f (state 0 is the evaluation point).
BruteResult brute_dpdl_sat(const DpdlFormula& f, std::size_t max_states);

// Verdict counters shared by every solver entry point.
struct SolverAudit {
  std::uint64_t sat_verdicts = 0;
  std::uint64_t witness_failures = 0;  // witnesses that failed their checker
};
SolverAudit solver_audit();

// ----------------------------------------------------- POL satisfiability

struct PolSatResult {
  SatStatus status = SatStatus::Unknown;
  std::optional<PolModel> witness;
  std::string state;
  std::string reason;
  bool exhausted = false;  // Unknown because a resource cap was hit
  LabelBudget budget;
  DpdlSatStats stats;
};

PolSatResult pol_sat(const Formula& phi, LabelBudget budget, const DpdlSatOptions& opts = {});

// Exhaustive search over small models: up to max_states states, expectations
// from pool, every partition per agent and every valuation over phi's
// propositions. Sat or Unknown only.
PolSatResult pol_bounded_sat(const Formula& phi, std::size_t max_states,
                             const std::vector<Regex>& pool);

inline constexpr std::size_t kDefaultPoolSize = 6;

}  // namespace pol

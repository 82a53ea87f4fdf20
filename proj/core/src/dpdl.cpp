#include "pol/dpdl.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <limits>
#include <unordered_map>

#include "dpdl_internal.hpp"
#include "io_internal.hpp"
#include "pol/error.hpp"
#include "pol/io.hpp"

namespace pol {

using FK = Formula::Kind;

// ------------------------------------------------------------------ models

std::optional<std::size_t> DpdlModel::find_state(std::string_view id) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == id) return i;
  return std::nullopt;
}

void DpdlModel::validate() const {
  if (valuation.size() != states.size() || trans.size() != states.size())
    throw Error(ErrorKind::Format, "DPDL model tables do not match the state list");
  std::set<std::string> seen;
  for (const auto& s : states)
    if (!seen.insert(s).second) throw Error(ErrorKind::Format, "duplicate state id '" + s + "'");
  for (const auto& row : trans) {
    if (row.size() != alphabet.size())
      throw Error(ErrorKind::Format, "transition row does not match the alphabet");
    for (const auto& t : row)
      if (t && *t >= states.size()) throw Error(ErrorKind::Format, "transition target out of range");
  }
}

namespace {

void require_dpdl(const Formula& f) {
  if (f.is(FK::Hat) || f.is(FK::Know))
    throw Error(ErrorKind::Format, "epistemic operator in a DPDL formula: " + f.str());
}

class DpdlEvaluator {
 public:
  explicit DpdlEvaluator(const DpdlModel& m) : m_(m) {}

  const std::vector<bool>& truth(const Formula& f) {
    if (auto it = memo_.find(f); it != memo_.end()) return it->second;
    require_dpdl(f);
    const std::size_t n = m_.size();
    std::vector<bool> out(n, false);
    switch (f.kind()) {
      case FK::Top:
        out.assign(n, true);
        break;
      case FK::Prop:
        for (std::size_t s = 0; s < n; ++s) out[s] = m_.valuation[s].count(f.name()) > 0;
        break;
      case FK::Not: {
        const auto& a = truth(f.sub());
        for (std::size_t s = 0; s < n; ++s) out[s] = !a[s];
        break;
      }
      case FK::And:
      case FK::Or: {
        auto a = truth(f.left());
        const auto& b = truth(f.right());
        for (std::size_t s = 0; s < n; ++s) out[s] = f.is(FK::And) ? (a[s] && b[s]) : (a[s] || b[s]);
        break;
      }
      case FK::Dia:
        out = diamond(f.program(), truth(f.sub()));
        break;
      case FK::Box: {
        auto neg = truth(f.sub());
        neg.flip();
        out = diamond(f.program(), neg);
        out.flip();
        break;
      }
      default:
        break;
    }
    return memo_.emplace(f, std::move(out)).first->second;
  }

 private:
  // States from which some word of pi leads to a state in `goal`.
  std::vector<bool> diamond(const Regex& pi, const std::vector<bool>& goal) {
    Alphabet sigma = m_.alphabet.merged(symbols_of(pi));
    Dfa d = to_dfa(pi, sigma);
    const std::size_t n = m_.size(), q = d.size();
    std::vector<std::vector<bool>> good(q, std::vector<bool>(n, false));
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t k = 0; k < q; ++k)
        for (std::size_t s = 0; s < n; ++s) {
          if (good[k][s]) continue;
          bool g = d.accepting[k] && goal[s];
          for (std::size_t a = 0; !g && a < m_.alphabet.size(); ++a) {
            auto t = m_.trans[s][a];
            if (t) g = good[d.transitions[k][a]][*t];
          }
          if (g) {
            good[k][s] = true;
            changed = true;
          }
        }
    }
    return good[d.initial];
  }

  const DpdlModel& m_;
  std::unordered_map<Formula, std::vector<bool>, Formula::Hash> memo_;
};

std::atomic<std::uint64_t> g_sat_verdicts{0};
std::atomic<std::uint64_t> g_witness_failures{0};

}  // namespace

namespace detail {
void audit_sat_verdict() { ++g_sat_verdicts; }
void audit_witness_failure() { ++g_witness_failures; }
}  // namespace detail

SolverAudit solver_audit() { return {g_sat_verdicts.load(), g_witness_failures.load()}; }

std::vector<bool> dpdl_truth(const DpdlModel& m, const DpdlFormula& f) {
  DpdlEvaluator ev(m);
  return ev.truth(f);
}

bool dpdl_check(const DpdlModel& m, std::string_view state, const DpdlFormula& f) {
  auto s = m.find_state(state);
  if (!s) throw Error(ErrorKind::UnknownState, "unknown state '" + std::string(state) + "'");
  return dpdl_truth(m, f)[*s];
}

const char* to_string(SatStatus s) {
  switch (s) {
    case SatStatus::Sat:
      return "SAT";
    case SatStatus::Unsat:
      return "UNSAT";
    default:
      return "UNKNOWN";
  }
}

// -------------------------------------------------------------------- JSON

namespace detail {

Json dpdl_model_json(const DpdlModel& m) {
  Json j;
  j["schema"] = kSchema;
  j["alphabet"] = m.alphabet.symbols();
  Json states = Json::array();
  for (std::size_t s = 0; s < m.size(); ++s) {
    Json js;
    js["id"] = m.states[s];
    js["props"] = std::vector<std::string>(m.valuation[s].begin(), m.valuation[s].end());
    states.push_back(js);
  }
  j["states"] = states;
  Json trans = Json::object();
  for (std::size_t a = 0; a < m.alphabet.size(); ++a) {
    Json row = Json::object();
    for (std::size_t s = 0; s < m.size(); ++s)
      if (auto t = m.trans[s][a]) row[m.states[s]] = m.states[*t];
    trans[m.alphabet.symbols()[a]] = row;
  }
  j["trans"] = trans;
  return j;
}

}  // namespace detail

std::string dpdl_model_to_json(const DpdlModel& m, int indent) {
  return detail::dpdl_model_json(m).dump(indent);
}

DpdlModel dpdl_model_from_json(std::string_view text) {
  using detail::field;
  using detail::Json;
  Json j = detail::parse_json(text);
  DpdlModel m;
  m.alphabet = Alphabet(detail::strings(field(j, "alphabet"), "alphabet"));
  const Json& states = field(j, "states");
  if (!states.is_array() || states.empty())
    throw Error(ErrorKind::Format, "states must be a nonempty array");
  for (const auto& s : states) {
    m.states.push_back(detail::str(field(s, "id"), "state id"));
    std::set<std::string> props;
    if (s.contains("props"))
      for (auto& p : detail::strings(s["props"], "props")) props.insert(p);
    m.valuation.push_back(std::move(props));
  }
  m.trans.assign(m.size(), std::vector<std::optional<std::size_t>>(m.alphabet.size()));
  auto index = [&](const std::string& id) {
    auto i = m.find_state(id);
    if (!i) throw Error(ErrorKind::UnknownState, "transition mentions unknown state '" + id + "'");
    return *i;
  };
  if (j.contains("trans")) {
    const Json& t = j["trans"];
    if (!t.is_object()) throw Error(ErrorKind::Format, "trans must be an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      auto a = m.alphabet.index(it.key());
      if (!a) throw Error(ErrorKind::UnknownSymbol, "unknown symbol '" + it.key() + "'");
      if (!it.value().is_object()) throw Error(ErrorKind::Format, "trans rows must be objects");
      for (auto e = it.value().begin(); e != it.value().end(); ++e)
        m.trans[index(e.key())][*a] = index(detail::str(e.value(), "transition target"));
    }
  }
  m.validate();
  return m;
}

// ------------------------------------------------------------- translation

std::string at_atom(std::uint64_t label, const Formula& psi) {
  return "@" + std::to_string(label) + "." + psi.str();
}
std::string surv_atom(std::uint64_t label) { return "surv(" + std::to_string(label) + ")"; }
std::string rel_atom(const std::string& agent, std::uint64_t l1, std::uint64_t l2) {
  return "R_" + agent + "(" + std::to_string(l1) + "," + std::to_string(l2) + ")";
}

LabelBudget LabelBudget::full_for(const Formula& phi) {
  FlClosure fl(phi);
  if (fl.size() >= 63)
    throw Error(ErrorKind::BudgetInvalid,
                "2^" + std::to_string(fl.size()) + " labels do not fit in 64 bits");
  return {std::uint64_t(1) << fl.size(), true};
}

namespace {

void check_budget(const FlClosure& fl, const LabelBudget& b) {
  if (b.labels < 1) throw Error(ErrorKind::BudgetInvalid, "label budget must be at least 1");
  if (fl.size() < 63) {
    const std::uint64_t full = std::uint64_t(1) << fl.size();
    if (b.labels > full)
      throw Error(ErrorKind::BudgetInvalid, "label budget " + std::to_string(b.labels) +
                                                " exceeds 2^|FL| = " + std::to_string(full));
    if (b.full && b.labels != full)
      throw Error(ErrorKind::BudgetInvalid, "full budget must be 2^|FL|");
  } else if (b.full) {
    throw Error(ErrorKind::BudgetInvalid, "full budget does not fit in 64 bits");
  }
}

Regex sigma_star(const std::set<std::string>& letters) {
  std::vector<Regex> ops;
  for (const auto& a : letters) ops.push_back(Regex::atom(a));
  return make_star(make_sum(ops));
}

using u128 = unsigned __int128;

std::uint64_t saturate(u128 v) {
  return v > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                        : static_cast<std::uint64_t>(v);
}

// Size of a conjunction of m formulas of total size `sum` (m >= 1).
u128 fold(u128 m, u128 sum) { return sum + m - 1; }

}  // namespace

std::uint64_t translation_size(const Formula& phi, LabelBudget budget) {
  FlClosure fl(phi);
  check_budget(fl, budget);
  const u128 L = budget.labels;
  const auto props = props_of(phi);
  const auto agents = agents_of(phi);
  const auto letters = symbols_of(phi);
  const u128 s0 = sigma_star(letters).size();
  const u128 k = letters.size(), np = props.size(), na = agents.size();

  u128 p1 = 0;
  for (const auto& psi : fl.members()) {
    u128 c = 0;
    switch (psi.kind()) {
      case FK::Prop:
      case FK::Not:
        c = 11;
        break;
      case FK::And:
      case FK::Or:
        c = 13;
        break;
      case FK::Top:
        c = 1;
        break;
      case FK::Hat:
        c = 12 * L + 5;
        break;
      case FK::Know:
        c = 14 * L + 5;
        break;
      case FK::Dia:
        c = 2 * u128(psi.program().size()) + 15;
        break;
      case FK::Box:
        c = 2 * u128(psi.program().size()) + 17;
        break;
    }
    p1 += 1 + s0 + fold(L, L * c);
  }
  std::vector<u128> parts{1, 1, fold(fl.size(), p1)};
  if (u128 m = L * np) parts.push_back(fold(m, m * (2 * s0 + 11)));
  if (u128 m = na * L * L) parts.push_back(fold(m, m * (2 * s0 + 13)));
  if (u128 m = na * L) parts.push_back(fold(m, m));
  if (u128 m = na * L * L) parts.push_back(fold(m, 4 * m));
  if (u128 m = na * L * L * L) parts.push_back(fold(m, 6 * m));
  parts.push_back(1 + s0 + (k ? fold(k, 3 * k) : 1));
  parts.push_back(1 + s0 + (k ? fold(L * k, 8 * L * k) : 1));
  u128 sum = 0;
  for (auto p : parts) sum += p;
  return saturate(fold(parts.size(), sum));
}

DpdlFormula translate(const Formula& phi, LabelBudget budget, std::uint64_t max_nodes) {
  FlClosure fl(phi);
  check_budget(fl, budget);
  const std::uint64_t size = translation_size(phi, budget);
  if (size > max_nodes)
    throw Error(ErrorKind::ResourceExceeded, "translation would have " + std::to_string(size) +
                                                 " nodes, above the limit of " +
                                                 std::to_string(max_nodes));
  const std::uint64_t L = budget.labels;
  const auto props = props_of(phi);
  const auto agents = agents_of(phi);
  const auto letters = symbols_of(phi);
  const Regex all = sigma_star(letters);

  auto at = [](std::uint64_t l, const Formula& psi) { return Formula::prop(at_atom(l, psi)); };
  auto surv = [](std::uint64_t l) { return Formula::prop(surv_atom(l)); };
  auto rel = [](const std::string& i, std::uint64_t l, std::uint64_t m) {
    return Formula::prop(rel_atom(i, l, m));
  };
  auto always = [&](Formula f) { return Formula::box(all, std::move(f)); };
  using F = Formula;

  auto clause = [&](const Formula& psi, std::uint64_t l) -> Formula {
    switch (psi.kind()) {
      case FK::Prop:
        return iff(at(l, psi), F::neg(at(l, F::neg(psi))));
      case FK::Not:
        return iff(at(l, psi), F::neg(at(l, psi.sub())));
      case FK::Or:
        return iff(at(l, psi), F::disj(at(l, psi.left()), at(l, psi.right())));
      case FK::And:
        return iff(at(l, psi), F::conj(at(l, psi.left()), at(l, psi.right())));
      case FK::Top:
        return at(l, psi);
      case FK::Hat: {
        std::vector<Formula> ds;
        for (std::uint64_t m = 1; m <= L; ++m)
          ds.push_back(F::conj(F::conj(rel(psi.agent(), l, m), surv(m)), at(m, psi.sub())));
        return iff(at(l, psi), disj_all(ds));
      }
      case FK::Know: {
        std::vector<Formula> cs;
        for (std::uint64_t m = 1; m <= L; ++m)
          cs.push_back(implies(F::conj(rel(psi.agent(), l, m), surv(m)), at(m, psi.sub())));
        return iff(at(l, psi), conj_all(cs));
      }
      case FK::Dia:
        return iff(at(l, psi), F::dia(psi.program(), F::conj(at(l, psi.sub()), surv(l))));
      case FK::Box:
        return iff(at(l, psi), F::box(psi.program(), implies(surv(l), at(l, psi.sub()))));
    }
    return F::top();
  };

  std::vector<Formula> parts{surv(1), at(1, phi)};
  {
    std::vector<Formula> p1;
    for (const auto& psi : fl.members()) {
      std::vector<Formula> sem;
      for (std::uint64_t l = 1; l <= L; ++l) sem.push_back(clause(psi, l));
      p1.push_back(always(conj_all(sem)));
    }
    parts.push_back(conj_all(p1));
  }
  std::vector<Formula> p2, p3, p4, p5, p6;
  for (std::uint64_t l = 1; l <= L; ++l)
    for (const auto& p : props) {
      Formula pos = at(l, F::prop(p)), neg = at(l, F::neg(F::prop(p)));
      p2.push_back(F::conj(implies(pos, always(pos)), implies(neg, always(neg))));
    }
  for (const auto& i : agents)
    for (std::uint64_t l = 1; l <= L; ++l)
      for (std::uint64_t m = 1; m <= L; ++m) {
        Formula r = rel(i, l, m);
        p3.push_back(F::conj(implies(r, always(r)), implies(F::neg(r), always(F::neg(r)))));
      }
  for (const auto& i : agents)
    for (std::uint64_t l = 1; l <= L; ++l) p4.push_back(rel(i, l, l));
  for (const auto& i : agents)
    for (std::uint64_t l = 1; l <= L; ++l)
      for (std::uint64_t m = 1; m <= L; ++m) p5.push_back(implies(rel(i, l, m), rel(i, m, l)));
  for (const auto& i : agents)
    for (std::uint64_t l = 1; l <= L; ++l)
      for (std::uint64_t m = 1; m <= L; ++m)
        for (std::uint64_t o = 1; o <= L; ++o)
          p6.push_back(implies(F::conj(rel(i, l, m), rel(i, m, o)), rel(i, l, o)));
  for (auto* g : {&p2, &p3, &p4, &p5, &p6})
    if (!g->empty()) parts.push_back(conj_all(*g));
  std::vector<Formula> p7, p8;
  for (const auto& a : letters) p7.push_back(F::dia(Regex::atom(a), F::top()));
  for (std::uint64_t l = 1; l <= L; ++l)
    for (const auto& a : letters)
      p8.push_back(implies(F::neg(surv(l)), F::dia(Regex::atom(a), F::neg(surv(l)))));
  parts.push_back(always(conj_all(p7)));
  parts.push_back(always(conj_all(p8)));
  return conj_all(parts);
}

// ------------------------------------------------------------ brute force

namespace {

// Bitmask evaluator over models with at most 32 states.
class BruteEvaluator {
 public:
  BruteEvaluator(const Formula& f, const Alphabet& sigma, const std::vector<std::string>& atoms)
      : sigma_(sigma) {
    for (std::size_t i = 0; i < atoms.size(); ++i) atom_[atoms[i]] = i;
    compile(f);
  }

  // val[s] is a bitmask over atoms; trans[s*k + a] is the target or -1.
  bool holds_at_zero(std::size_t n, const std::vector<std::uint32_t>& val,
                     const std::vector<int>& trans) {
    std::vector<std::uint32_t> mask(ops_.size());
    const std::uint32_t all = n == 32 ? 0xffffffffu : ((1u << n) - 1);
    const std::size_t k = sigma_.size();
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      const Op& o = ops_[i];
      std::uint32_t m = 0;
      switch (o.kind) {
        case FK::Top:
          m = all;
          break;
        case FK::Prop:
          for (std::size_t s = 0; s < n; ++s)
            if (o.atom >= 0 && ((val[s] >> o.atom) & 1)) m |= 1u << s;
          break;
        case FK::Not:
          m = all & ~mask[o.a];
          break;
        case FK::And:
          m = mask[o.a] & mask[o.b];
          break;
        case FK::Or:
          m = mask[o.a] | mask[o.b];
          break;
        case FK::Dia:
        case FK::Box: {
          const Dfa& d = dfas_[o.dfa];
          std::uint32_t goal = o.kind == FK::Dia ? mask[o.a] : (all & ~mask[o.a]);
          std::vector<std::uint32_t> good(d.size(), 0);
          for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t q = 0; q < d.size(); ++q) {
              std::uint32_t g = d.accepting[q] ? goal : 0;
              for (std::size_t s = 0; s < n; ++s) {
                if ((g >> s) & 1) continue;
                for (std::size_t a = 0; a < k; ++a) {
                  int t = trans[s * k + a];
                  if (t >= 0 && ((good[d.transitions[q][a]] >> t) & 1)) {
                    g |= 1u << s;
                    break;
                  }
                }
              }
              g |= good[q];
              if (g != good[q]) {
                good[q] = g;
                changed = true;
              }
            }
          }
          m = good[d.initial];
          if (o.kind == FK::Box) m = all & ~m;
          break;
        }
        default:
          break;
      }
      mask[i] = m;
    }
    return mask.back() & 1u;
  }

 private:
  struct Op {
    FK kind;
    std::size_t a = 0, b = 0;
    int atom = -1;
    std::size_t dfa = 0;
  };

  std::size_t compile(const Formula& f) {
    if (auto it = index_.find(f); it != index_.end()) return it->second;
    require_dpdl(f);
    Op o{f.kind()};
    switch (f.kind()) {
      case FK::Prop: {
        auto it = atom_.find(f.name());
        o.atom = it == atom_.end() ? -1 : static_cast<int>(it->second);
        break;
      }
      case FK::Not:
        o.a = compile(f.sub());
        break;
      case FK::And:
      case FK::Or:
        o.a = compile(f.left());
        o.b = compile(f.right());
        break;
      case FK::Dia:
      case FK::Box:
        o.a = compile(f.sub());
        dfas_.push_back(to_dfa(f.program(), sigma_));
        o.dfa = dfas_.size() - 1;
        break;
      default:
        break;
    }
    ops_.push_back(o);
    index_.emplace(f, ops_.size() - 1);
    return ops_.size() - 1;
  }

  Alphabet sigma_;
  std::map<std::string, std::size_t> atom_;
  std::vector<Op> ops_;
  std::vector<Dfa> dfas_;
  std::unordered_map<Formula, std::size_t, Formula::Hash> index_;
};

}  // namespace

BruteResult brute_dpdl_sat(const DpdlFormula& f, std::size_t max_states) {
  const auto props = props_of(f);
  std::vector<std::string> atoms(props.begin(), props.end());
  const auto syms = symbols_of(f);
  Alphabet sigma(std::vector<std::string>(syms.begin(), syms.end()));
  BruteEvaluator ev(f, sigma, atoms);
  BruteResult out;
  const std::size_t k = sigma.size();
  max_states = std::min<std::size_t>(max_states, 32);
  for (std::size_t n = 1; n <= max_states; ++n) {
    const std::size_t slots = n * k, bits = n * atoms.size();
    if (bits >= 40) break;
    std::vector<int> trans(slots, -1);
    std::vector<std::uint32_t> val(n);
    for (;;) {
      for (std::uint64_t v = 0; v < (std::uint64_t(1) << bits); ++v) {
        for (std::size_t s = 0; s < n; ++s)
          val[s] = static_cast<std::uint32_t>((v >> (s * atoms.size())) & ((1u << atoms.size()) - 1));
        ++out.models_checked;
        if (ev.holds_at_zero(n, val, trans)) {
          DpdlModel m;
          m.alphabet = sigma;
          for (std::size_t s = 0; s < n; ++s) {
            m.states.push_back("w" + std::to_string(s));
            std::set<std::string> ps;
            for (std::size_t a = 0; a < atoms.size(); ++a)
              if ((val[s] >> a) & 1) ps.insert(atoms[a]);
            m.valuation.push_back(std::move(ps));
            std::vector<std::optional<std::size_t>> row;
            for (std::size_t a = 0; a < k; ++a)
              row.push_back(trans[s * k + a] < 0 ? std::nullopt
                                                 : std::optional<std::size_t>(trans[s * k + a]));
            m.trans.push_back(std::move(row));
          }
          out.sat = true;
          out.witness = std::move(m);
          return out;
        }
      }
      // next transition table (odometer over -1..n-1)
      std::size_t i = 0;
      while (i < slots && trans[i] == static_cast<int>(n) - 1) trans[i++] = -1;
      if (i == slots) break;
      ++trans[i];
    }
  }
  return out;
}

}  // namespace pol

#include <algorithm>
#include <deque>
#include <map>

#include "dpdl_internal.hpp"
#include "pol/bts.hpp"
#include "pol/dpdl.hpp"
#include "pol/error.hpp"

namespace pol {

namespace {

// Bubble B(w) for every DPDL state reachable from the root: the surviving
// labels, their truth atoms and their relation atoms.
Bts bubbles_of(const Formula& phi, std::uint64_t L, const DpdlModel& d, std::size_t root) {
  Bts t;
  t.formula = phi;
  t.closure = std::make_shared<FlClosure>(phi);
  auto syms = symbols_of(phi);
  t.alphabet = Alphabet(std::vector<std::string>(syms.begin(), syms.end()));
  auto ags = agents_of(phi);
  t.agents.assign(ags.begin(), ags.end());
  const auto& fl = t.fl();

  auto survivors = [&](std::size_t s) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t l = 1; l <= L; ++l)
      if (d.valuation[s].count(surv_atom(l))) out.push_back(l);
    return out;
  };
  std::map<std::size_t, std::size_t> bubble_of;
  std::vector<std::size_t> order;
  std::deque<std::size_t> work{root};
  bubble_of[root] = 0;
  while (!work.empty()) {
    auto s = work.front();
    work.pop_front();
    order.push_back(s);
    for (const auto& a : t.alphabet.symbols()) {
      auto k = d.alphabet.index(a);
      if (!k) continue;
      auto nxt = d.trans[s][*k];
      if (!nxt || bubble_of.count(*nxt) || survivors(*nxt).empty()) continue;
      const std::size_t id = bubble_of.size();
      bubble_of[*nxt] = id;
      work.push_back(*nxt);
    }
  }
  for (auto s : order) {
    Bubble b;
    b.id = "B" + std::to_string(bubble_of[s]);
    auto alive = survivors(s);
    for (auto l : alive) {
      b.states.push_back("l" + std::to_string(l));
      Label h(fl.size(), false);
      for (std::size_t i = 0; i < fl.size(); ++i) h[i] = d.valuation[s].count(at_atom(l, fl.members()[i])) > 0;
      b.labels.push_back(std::move(h));
    }
    b.cls.assign(t.agents.size(), std::vector<std::size_t>(alive.size()));
    for (std::size_t i = 0; i < t.agents.size(); ++i)
      for (std::size_t x = 0; x < alive.size(); ++x) {
        std::size_t c = x;
        for (std::size_t y = 0; y < x; ++y)
          if (d.valuation[s].count(rel_atom(t.agents[i], alive[y], alive[x]))) {
            c = b.cls[i][y];
            break;
          }
        b.cls[i][x] = c;
      }
    t.bubbles.push_back(std::move(b));
    std::vector<std::optional<std::size_t>> row;
    for (const auto& a : t.alphabet.symbols()) {
      auto k = d.alphabet.index(a);
      std::optional<std::size_t> nxt = k ? d.trans[s][*k] : std::nullopt;
      if (nxt && bubble_of.count(*nxt))
        row.push_back(bubble_of[*nxt]);
      else
        row.push_back(std::nullopt);
    }
    t.delta.push_back(std::move(row));
  }
  t.initial = 0;
  return t;
}

}  // namespace

PolSatResult pol_sat(const Formula& phi, LabelBudget budget, const DpdlSatOptions& opts) {
  PolSatResult out;
  out.budget = budget;
  DpdlFormula tr;
  try {
    tr = translate(phi, budget);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ResourceExceeded) throw;
    out.reason = e.what();
    out.exhausted = true;
    return out;
  }
  DpdlSatResult r = dpdl_sat(tr, opts);
  out.stats = r.stats;
  if (r.status == SatStatus::Unsat) {
    if (budget.full) {
      out.status = SatStatus::Unsat;
    } else {
      out.reason = "no model within " + std::to_string(budget.labels) + " labels";
    }
    return out;
  }
  if (r.status == SatStatus::Unknown) {
    out.reason = r.reason;
    out.exhausted = r.exhausted;
    return out;
  }
  const DpdlModel& d = *r.witness;
  Bts t = bubbles_of(phi, budget.labels, d, *d.find_state(r.state));
  if (auto v = is_bts(t); !v) {
    detail::audit_witness_failure();
    out.reason = "bubbles of the DPDL witness do not form a BTS: " + v.violation;
    return out;
  }
  Extraction ex = extract_model(t);
  if (ex.pointed.empty() || !check(ex.model, ex.pointed, phi)) {
    detail::audit_witness_failure();
    out.reason = "extracted model does not satisfy the formula";
    return out;
  }
  detail::audit_sat_verdict();
  out.status = SatStatus::Sat;
  out.witness = std::move(ex.model);
  out.state = ex.pointed;
  return out;
}

namespace {

// All set partitions of {0..n-1} as least-index class maps.
std::vector<std::vector<std::size_t>> partitions(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> rgs(n, 0);  // restricted growth string
  for (;;) {
    std::vector<std::size_t> cls(n);
    std::vector<std::size_t> first;
    for (std::size_t i = 0; i < n; ++i) {
      if (rgs[i] == first.size()) first.push_back(i);
      cls[i] = first[rgs[i]];
    }
    out.push_back(cls);
    std::size_t i = n;
    while (i-- > 1) {
      std::size_t mx = 0;
      for (std::size_t j = 0; j < i; ++j) mx = std::max(mx, rgs[j]);
      if (rgs[i] <= mx) {
        ++rgs[i];
        for (std::size_t j = i + 1; j < n; ++j) rgs[j] = 0;
        break;
      }
    }
    if (i == 0 || i == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

}  // namespace

PolSatResult pol_bounded_sat(const Formula& phi, std::size_t max_states,
                             const std::vector<Regex>& pool) {
  PolSatResult out;
  out.budget = LabelBudget::of(std::max<std::size_t>(max_states, 1));
  auto syms = symbols_of(phi);
  for (const auto& r : pool)
    for (const auto& s : symbols_of(r)) syms.insert(s);
  const auto props_set = props_of(phi);
  const std::vector<std::string> props(props_set.begin(), props_set.end());
  const auto ags = agents_of(phi);
  PolModel m;
  m.alphabet = Alphabet(std::vector<std::string>(syms.begin(), syms.end()));
  m.agents.assign(ags.begin(), ags.end());
  if (pool.empty()) {
    out.reason = "empty expectation pool";
    return out;
  }
  for (std::size_t n = 1; n <= max_states; ++n) {
    const auto parts = partitions(n);
    const std::size_t bits = n * props.size();
    if (bits >= 30) break;
    std::vector<std::size_t> exp(n, 0), part(m.agents.size(), 0);
    m.states.assign(n, PolState{});
    for (std::size_t s = 0; s < n; ++s) m.states[s].id = "s" + std::to_string(s);
    m.reset_relations();
    for (;;) {
      for (std::size_t s = 0; s < n; ++s) m.states[s].exp = pool[exp[s]];
      for (;;) {
        for (std::size_t i = 0; i < m.agents.size(); ++i) m.cls[i] = parts[part[i]];
        for (std::uint64_t v = 0; v < (std::uint64_t(1) << bits); ++v) {
          for (std::size_t s = 0; s < n; ++s) {
            m.states[s].props.clear();
            for (std::size_t p = 0; p < props.size(); ++p)
              if ((v >> (s * props.size() + p)) & 1) m.states[s].props.insert(props[p]);
          }
          ModelChecker mc(m);
          for (std::size_t s = 0; s < n; ++s)
            if (mc.check(s, phi)) {
              detail::audit_sat_verdict();
              out.status = SatStatus::Sat;
              out.witness = m;
              out.state = m.states[s].id;
              return out;
            }
        }
        std::size_t i = 0;
        while (i < part.size() && part[i] + 1 == parts.size()) part[i++] = 0;
        if (i == part.size()) break;
        ++part[i];
      }
      std::size_t i = 0;
      while (i < n && exp[i] + 1 == pool.size()) exp[i++] = 0;
      if (i == n) break;
      ++exp[i];
    }
  }
  out.reason = "no model with at most " + std::to_string(max_states) + " states over the pool";
  return out;
}

}  // namespace pol

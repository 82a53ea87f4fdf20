#include "pol/bts.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

#include "pol/error.hpp"

namespace pol {

Label label_of(const FlClosure& fl, const std::vector<Formula>& formulas) {
  Label h(fl.size(), false);
  for (const auto& f : formulas) {
    auto i = fl.index_of(f);
    if (i == FlClosure::npos)
      throw Error(ErrorKind::Format, "label formula " + f.str() + " is not in the closure");
    h[i] = true;
  }
  return h;
}

std::vector<Formula> formulas_of(const FlClosure& fl, const Label& h) {
  std::vector<Formula> out;
  for (std::size_t i = 0; i < fl.size(); ++i)
    if (h[i]) out.push_back(fl.members()[i]);
  return out;
}

// -------------------------------------------------------------- Hintikka

namespace {

using FK = Formula::Kind;
using RK = Regex::Kind;

Formula modal(bool dia, const Regex& r, Formula f) {
  return dia ? Formula::dia(r, std::move(f)) : Formula::box(r, std::move(f));
}

// Split of a sum program into first operand and the rest, matching the
// closure rules.
std::pair<Regex, Regex> split_sum(const Regex& pi) {
  auto ops = pi.operands();
  if (ops.size() == 2) return {ops[0], ops[1]};
  return {ops[0], make_sum(std::vector<Regex>(ops.begin() + 1, ops.end()))};
}

Regex star_body(const Regex& pi) { return pi.kind() == RK::Epsilon ? Regex::empty() : pi.body(); }

}  // namespace

Verdict is_hintikka(const Label& h, const FlClosure& fl) {
  const auto& ms = fl.members();
  auto in = [&](const Formula& f) {
    auto i = fl.index_of(f);
    return i != FlClosure::npos && h[i];
  };
  auto known = [&](const Formula& f) { return fl.index_of(f) != FlClosure::npos; };
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const Formula& f = ms[i];
    const bool has = h[i];
    switch (f.kind()) {
      case FK::Top:
        if (!has) return Verdict::fail("true is missing");
        break;
      case FK::Not:
        if (f.sub().is(FK::Not) && known(f.sub().sub()) && has != in(f.sub().sub()))
          return Verdict::fail("double negation " + f.str() + " disagrees with its body");
        break;
      case FK::And:
        if (has != (in(f.left()) && in(f.right())))
          return Verdict::fail("condition 2 (conjunction) on " + f.str());
        break;
      case FK::Or:
        if (has != (in(f.left()) || in(f.right())))
          return Verdict::fail("condition 3 (disjunction) on " + f.str());
        break;
      case FK::Know:
        if (has && !in(f.sub())) return Verdict::fail("condition 4 (reflexivity) on " + f.str());
        break;
      case FK::Dia:
      case FK::Box: {
        if (!has) break;
        const bool dia = f.is(FK::Dia);
        const Regex& pi = f.program();
        if (pi.kind() == RK::Sum) {
          auto [l, r] = split_sum(pi);
          Formula fl1 = modal(dia, l, f.sub()), fl2 = modal(dia, r, f.sub());
          if (dia && known(fl1) && known(fl2) && !in(fl1) && !in(fl2))
            return Verdict::fail("condition 5 (choice) on " + f.str());
          if (!dia && ((known(fl1) && !in(fl1)) || (known(fl2) && !in(fl2))))
            return Verdict::fail("condition 8 (choice) on " + f.str());
        } else if (pi.kind() == RK::Concat) {
          Formula g = modal(dia, pi.left(), modal(dia, pi.right(), f.sub()));
          if (known(g) && !in(g))
            return Verdict::fail(std::string(dia ? "condition 6" : "condition 9") +
                                 " (sequence) on " + f.str());
        } else if (pi.kind() == RK::Star || pi.kind() == RK::Epsilon) {
          Formula g = modal(dia, star_body(pi), f);
          if (dia && known(g) && known(f.sub()) && !in(f.sub()) && !in(g))
            return Verdict::fail("condition 7 (iteration) on " + f.str());
          if (!dia && ((known(f.sub()) && !in(f.sub())) || (known(g) && !in(g))))
            return Verdict::fail("condition 10 (iteration) on " + f.str());
        }
        break;
      }
      default:
        break;
    }
    if (!f.is(FK::Not)) {
      auto j = fl.index_of(Formula::neg(f));
      if (j != FlClosure::npos && h[j] == has)
        return Verdict::fail("condition 1 (negation) on " + f.str());
    }
  }
  return Verdict::pass();
}

std::vector<Label> enumerate_hintikka(const FlClosure& fl, std::size_t cap) {
  if (fl.size() > cap)
    throw Error(ErrorKind::ClosureTooLarge, "closure has " + std::to_string(fl.size()) +
                                                " members, above the limit of " + std::to_string(cap));
  const auto& ms = fl.members();
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (!ms[i].is(FK::Not)) free.push_back(i);
  std::vector<Label> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << free.size()); ++bits) {
    Label h(ms.size(), false);
    for (std::size_t k = 0; k < free.size(); ++k) h[free[k]] = (bits >> k) & 1;
    // Negated members follow their operand; ~~psi follows psi.
    std::function<bool(std::size_t)> value = [&](std::size_t i) -> bool {
      const Formula& f = ms[i];
      if (!f.is(FK::Not)) return h[i];
      const std::size_t j = fl.index_of(f.sub());
      if (!f.sub().is(FK::Not)) return !h[j];
      const std::size_t k = fl.index_of(f.sub().sub());
      return k == FlClosure::npos ? !value(j) : value(k);
    };
    for (std::size_t i = 0; i < ms.size(); ++i)
      if (ms[i].is(FK::Not)) h[i] = value(i);
    if (is_hintikka(h, fl)) out.push_back(std::move(h));
  }
  return out;
}

// ---------------------------------------------------------------- Bubbles

std::optional<std::size_t> Bubble::find(std::string_view state) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == state) return i;
  return std::nullopt;
}

Verdict is_bubble(const Bubble& b, const Bts& t) {
  const auto& fl = t.fl();
  const std::string where = "bubble " + b.id + ": ";
  if (fl.size() < 63 && b.states.size() > (std::size_t(1) << fl.size()))
    return Verdict::fail(where + "condition 1 (too many states)");
  for (std::size_t s = 0; s < b.states.size(); ++s)
    if (auto v = is_hintikka(b.labels[s], fl); !v)
      return Verdict::fail(where + "condition 2, label of " + b.states[s] + " is not Hintikka: " +
                           v.violation);
  for (std::size_t i = 0; i < fl.size(); ++i) {
    const Formula& f = fl.members()[i];
    if (!f.is(FK::Hat) && !f.is(FK::Know)) continue;
    auto ag = std::find(t.agents.begin(), t.agents.end(), f.agent());
    const std::size_t j = fl.index_of(f.sub());
    for (std::size_t s = 0; s < b.states.size(); ++s) {
      if (ag == t.agents.end()) {
        if (f.is(FK::Hat) && b.labels[s][i])
          return Verdict::fail(where + "condition 3a, unknown agent " + f.agent());
        continue;
      }
      const std::size_t a = ag - t.agents.begin();
      if (f.is(FK::Hat) && b.labels[s][i]) {
        bool found = false;
        for (std::size_t u = 0; u < b.states.size() && !found; ++u)
          found = b.cls[a][u] == b.cls[a][s] && b.labels[u][j];
        if (!found)
          return Verdict::fail(where + "condition 3a, no witness for " + f.str() + " at " +
                               b.states[s]);
      }
      if (f.is(FK::Know)) {
        for (std::size_t u = 0; u < b.states.size(); ++u)
          if (b.cls[a][u] == b.cls[a][s] && b.labels[u][i] != b.labels[s][i])
            return Verdict::fail(where + "condition 3b, " + f.str() + " differs between " +
                                 b.states[s] + " and " + b.states[u]);
      }
    }
  }
  return Verdict::pass();
}

Verdict is_a_successor(const Bubble& from, const Bubble& to, std::string_view symbol, const Bts& t) {
  const auto& fl = t.fl();
  const std::string where = "successor " + from.id + " -" + std::string(symbol) + "-> " + to.id + ": ";
  std::vector<std::optional<std::size_t>> pos(from.states.size());
  for (std::size_t u = 0; u < to.states.size(); ++u) {
    auto s = from.find(to.states[u]);
    if (!s) return Verdict::fail(where + "condition 1, state " + to.states[u] + " is new");
    pos[*s] = u;
  }
  for (std::size_t i = 0; i < fl.size(); ++i) {
    const Formula& f = fl.members()[i];
    const bool atom_step = (f.is(FK::Dia) || f.is(FK::Box)) && f.program().kind() == RK::Atom &&
                           f.program().symbol() == symbol;
    const std::size_t j = atom_step ? fl.index_of(f.sub()) : FlClosure::npos;
    for (std::size_t s = 0; s < from.states.size(); ++s) {
      if (f.is(FK::Prop) && pos[s] && from.labels[s][i] != to.labels[*pos[s]][i])
        return Verdict::fail(where + "condition 1, valuation of " + f.name() + " changes at " +
                             from.states[s]);
      if (!atom_step) continue;
      if (f.is(FK::Dia)) {
        const bool rhs = pos[s] && to.labels[*pos[s]][j];
        if (from.labels[s][i] != rhs)
          return Verdict::fail(where + "condition 2 on " + f.str() + " at " + from.states[s]);
      } else if (pos[s] && from.labels[s][i] != to.labels[*pos[s]][j]) {
        return Verdict::fail(where + "condition 3 on " + f.str() + " at " + from.states[s]);
      }
    }
  }
  for (std::size_t a = 0; a < t.agents.size(); ++a)
    for (std::size_t s = 0; s < from.states.size(); ++s)
      for (std::size_t r = 0; r < from.states.size(); ++r) {
        if (!pos[s] || !pos[r]) continue;
        const bool before = from.cls[a][s] == from.cls[a][r];
        const bool after = to.cls[a][*pos[s]] == to.cls[a][*pos[r]];
        if (before != after)
          return Verdict::fail(where + "condition 4 (perfect recall) for " + t.agents[a] +
                               " between " + from.states[s] + " and " + from.states[r]);
      }
  return Verdict::pass();
}

Verdict is_bts(const Bts& t) {
  if (t.bubbles.empty()) return Verdict::fail("condition 1, there are no bubbles");
  if (t.initial >= t.bubbles.size()) return Verdict::fail("condition 1, no initial bubble");
  const auto& fl = t.fl();
  const Bubble& init = t.bubbles[t.initial];
  bool rooted = false;
  for (const auto& l : init.labels) rooted = rooted || l[0];
  if (!rooted) return Verdict::fail("condition 1, no state of the initial bubble carries the formula");
  for (const auto& b : t.bubbles)
    if (auto v = is_bubble(b, t); !v) return v;
  for (std::size_t b = 0; b < t.bubbles.size(); ++b)
    for (std::size_t a = 0; a < t.alphabet.size(); ++a)
      if (auto d = t.delta[b][a])
        if (auto v = is_a_successor(t.bubbles[b], t.bubbles[*d], t.alphabet.symbols()[a], t); !v)
          return Verdict::fail("condition 2, " + v.violation);

  std::map<std::string, Dfa> dfas;
  for (std::size_t b = 0; b < t.bubbles.size(); ++b) {
    const Bubble& bub = t.bubbles[b];
    for (std::size_t i = 0; i < fl.size(); ++i) {
      const Formula& f = fl.members()[i];
      if (!f.is(FK::Dia)) continue;
      const std::size_t j = fl.index_of(f.sub());
      auto it = dfas.find(f.program().str());
      if (it == dfas.end()) it = dfas.emplace(f.program().str(), to_dfa(f.program(), t.alphabet)).first;
      const Dfa& d = it->second;
      for (std::size_t s = 0; s < bub.states.size(); ++s) {
        if (!bub.labels[s][i]) continue;
        const std::string& sid = bub.states[s];
        std::set<std::pair<std::size_t, std::size_t>> seen{{d.initial, b}};
        std::deque<std::pair<std::size_t, std::size_t>> work{{d.initial, b}};
        bool ok = false;
        while (!work.empty() && !ok) {
          auto [q, c] = work.front();
          work.pop_front();
          auto u = t.bubbles[c].find(sid);
          if (!u) continue;
          if (d.accepting[q] && t.bubbles[c].labels[*u][j]) {
            ok = true;
            break;
          }
          for (std::size_t a = 0; a < t.alphabet.size(); ++a) {
            auto nxt = t.delta[c][a];
            if (!nxt) continue;
            std::pair<std::size_t, std::size_t> p{d.transitions[q][a], *nxt};
            if (seen.insert(p).second) work.push_back(p);
          }
        }
        if (!ok)
          return Verdict::fail("condition 3, " + f.str() + " at " + sid + " in bubble " + bub.id +
                               " is never fulfilled");
      }
    }
  }
  return Verdict::pass();
}

// ------------------------------------------------------------- Extraction

AutomatonSpec bubble_automaton(const Bts& t, std::string_view state) {
  AutomatonSpec a;
  a.states = t.bubbles.size();
  a.initial = t.initial;
  for (const auto& b : t.bubbles) a.accepting.push_back(b.find(state).has_value());
  for (std::size_t b = 0; b < t.bubbles.size(); ++b)
    for (std::size_t k = 0; k < t.alphabet.size(); ++k)
      if (auto d = t.delta[b][k]) a.edges.push_back({b, t.alphabet.symbols()[k], *d});
  return a;
}

namespace {

bool absorbing(const AutomatonSpec& a) {
  std::vector<std::vector<std::size_t>> succ(a.states);
  for (const auto& e : a.edges) succ[e.from].push_back(e.to);
  auto reach = [&](std::size_t from) {
    std::vector<bool> seen(a.states, false);
    std::vector<std::size_t> todo{from};
    seen[from] = true;
    while (!todo.empty()) {
      auto q = todo.back();
      todo.pop_back();
      for (auto r : succ[q])
        if (!seen[r]) {
          seen[r] = true;
          todo.push_back(r);
        }
    }
    return seen;
  };
  auto live = reach(a.initial);
  for (std::size_t q = 0; q < a.states; ++q) {
    if (!live[q] || a.accepting[q]) continue;
    auto r = reach(q);
    for (std::size_t p = 0; p < a.states; ++p)
      if (r[p] && a.accepting[p]) return false;
  }
  return true;
}

}  // namespace

Extraction extract_model(const Bts& t) {
  if (auto v = is_bts(t); !v) throw Error(ErrorKind::NotABts, "not a BTS: " + v.violation);
  const auto& fl = t.fl();
  const Bubble& init = t.bubbles[t.initial];
  Extraction out;
  PolModel& m = out.model;
  m.alphabet = t.alphabet;
  m.agents = t.agents;
  for (std::size_t s = 0; s < init.states.size(); ++s) {
    PolState st;
    st.id = init.states[s];
    for (std::size_t i = 0; i < fl.size(); ++i)
      if (init.labels[s][i] && fl.members()[i].is(FK::Prop)) st.props.insert(fl.members()[i].name());
    AutomatonSpec a = bubble_automaton(t, st.id);
    out.absorbing.push_back(absorbing(a));
    st.exp = state_elimination(a);
    m.states.push_back(std::move(st));
    if (out.pointed.empty() && init.labels[s][0]) out.pointed = init.states[s];
  }
  m.cls = init.cls;
  return out;
}

Bts bts_from_model(const PolModel& m, const Formula& phi) {
  Bts t;
  t.formula = phi;
  t.closure = std::make_shared<FlClosure>(phi);
  t.alphabet = m.alphabet;
  t.agents = m.agents;
  ModelChecker mc(m);
  auto& g = mc.graph();
  g.expand_all();
  std::map<std::size_t, std::size_t> bubble_of;
  std::vector<std::size_t> order;
  std::deque<std::size_t> work{ResiduationGraph::kRoot};
  bubble_of[ResiduationGraph::kRoot] = 0;
  while (!work.empty()) {
    auto n = work.front();
    work.pop_front();
    order.push_back(n);
    for (std::size_t a = 0; a < m.alphabet.size(); ++a) {
      auto nxt = g.step(n, a);
      if (nxt == ResiduationGraph::kDead || bubble_of.count(nxt)) continue;
      bubble_of[nxt] = bubble_of.size();
      work.push_back(nxt);
    }
  }
  const auto& fl = t.fl();
  for (auto n : order) {
    Bubble b;
    b.id = "B" + std::to_string(bubble_of[n]);
    auto surv = g.survivors(n);
    for (auto s : surv) {
      b.states.push_back(m.states[s].id);
      Label h(fl.size());
      for (std::size_t i = 0; i < fl.size(); ++i) h[i] = mc.check_at(n, s, fl.members()[i]);
      b.labels.push_back(std::move(h));
    }
    PolModel sub = restrict_model(m, surv);
    b.cls = sub.cls;
    t.bubbles.push_back(std::move(b));
    std::vector<std::optional<std::size_t>> row;
    for (std::size_t a = 0; a < m.alphabet.size(); ++a) {
      auto nxt = g.step(n, a);
      row.push_back(nxt == ResiduationGraph::kDead ? std::nullopt
                                                   : std::optional<std::size_t>(bubble_of[nxt]));
    }
    t.delta.push_back(std::move(row));
  }
  t.initial = 0;
  return t;
}

}  // namespace pol

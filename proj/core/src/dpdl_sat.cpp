// Symbolic type elimination for deterministic PDL.
//
// A type is an assignment to the elementary variables: atoms and, for every
// letter a and formula t demanded after a, a variable N(a,t) standing for
// <a>t. Every other formula is a propositional function of these. Since
// transitions are functional, a type's a-successor must make exactly the
// targets t with N(a,t) true. Types are BDDs over interleaved current/next
// copies of the variables.

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include "bdd.hpp"
#include "dpdl_internal.hpp"
#include "pol/dpdl.hpp"
#include "pol/error.hpp"

namespace pol {

namespace {

using FK = Formula::Kind;
using RK = Regex::Kind;
using detail::Bdd;
using Ref = Bdd::Ref;

struct Gate {
  enum Op : std::uint8_t { False, True, Var, Not, And, Or };
  Op op;
  std::uint32_t a = 0, b = 0;
};

class Solver {
 public:
  Solver(const Formula& f, const DpdlSatOptions& opts)
      : root_(f), opts_(opts), bdd_(opts.bdd_node_cap) {}

  DpdlSatResult run();

 private:
  struct Var {
    bool next = false;
    std::string atom;
    std::size_t letter = 0;
    std::size_t target = 0;
  };
  struct Target {
    Formula f;
    std::size_t letter;
    std::uint32_t var;
    std::uint32_t gate = 0;
  };

  // discovery
  std::uint32_t gate(Gate::Op op, std::uint32_t a = 0, std::uint32_t b = 0);
  std::uint32_t compile(const Formula& f);
  std::uint32_t atom_var(const std::string& name);
  std::uint32_t next_var(std::size_t letter, const Formula& t);
  static std::optional<Formula> residual(const Formula& t, const std::string& a);
  static std::optional<std::pair<Formula, Formula>> definition(const Formula& c);
  bool depends(std::uint32_t g, std::uint32_t x);

  // symbolic part
  void order_variables();
  Ref to_bdd(std::uint32_t g);
  Ref cur(std::uint32_t v) { return bdd_.var(2 * pos_[v]); }
  Ref pre(std::size_t a, Ref s);
  Ref post(std::size_t a, Ref s);
  void build_relation(std::size_t a, std::vector<std::pair<std::uint32_t, Ref>> items);
  Ref z_at(const Formula& t, std::size_t r);
  void eventualities(Ref w, bool keep_stages);
  std::size_t rank(std::size_t e, const std::vector<std::int8_t>& x) const;

  DpdlModel extract(Ref start, std::size_t& root);

  Formula root_;
  DpdlSatOptions opts_;
  std::vector<std::string> letters_;
  std::vector<Gate> gates_{{Gate::False}, {Gate::True}};
  std::unordered_map<Formula, std::uint32_t, Formula::Hash> memo_;
  std::vector<Var> vars_;
  std::unordered_map<std::string, std::uint32_t> atoms_;
  std::vector<std::unordered_map<Formula, std::uint32_t, Formula::Hash>> next_of_;
  std::vector<Target> targets_;
  std::vector<std::uint32_t> top_var_;  // N(a, true) per letter
  std::vector<std::uint32_t> root_parts_;  // conjuncts of the root
  std::vector<std::uint32_t> inv_parts_;  // conjuncts holding everywhere
  // atoms defined by an invariant x <-> g and replaced by g
  std::unordered_map<std::uint32_t, std::uint32_t> subst_;

  std::vector<std::uint32_t> pos_;
  Bdd bdd_;
  std::vector<Ref> gate_bdd_;
  // Transition relation of each letter as clustered conjuncts with an
  // early-quantification schedule in both directions.
  struct Relation {
    std::vector<Ref> parts;
    std::uint32_t pre_first = 0, post_first = 0;
    std::vector<std::uint32_t> pre_q, post_q;
  };
  std::vector<Relation> rel_;
  Ref w_ = Bdd::kFalse;

  // Dia targets by formula; stages_[e][r] is the set fulfilling e within r steps
  std::unordered_map<Formula, std::size_t, Formula::Hash> ev_index_;
  std::vector<Formula> ev_;
  std::vector<bool> ev_active_;
  std::vector<std::vector<Ref>> stages_;
  std::size_t rounds_ = 0;
};

std::uint32_t Solver::gate(Gate::Op op, std::uint32_t a, std::uint32_t b) {
  switch (op) {
    case Gate::Not:
      if (a <= 1) return a ^ 1u;
      if (gates_[a].op == Gate::Not) return gates_[a].a;
      break;
    case Gate::And:
      if (a == 0 || b == 0) return 0;
      if (a == 1) return b;
      if (b == 1 || a == b) return a;
      break;
    case Gate::Or:
      if (a == 1 || b == 1) return 1;
      if (a == 0) return b;
      if (b == 0 || a == b) return a;
      break;
    default:
      break;
  }
  gates_.push_back({op, a, b});
  return static_cast<std::uint32_t>(gates_.size() - 1);
}

std::uint32_t Solver::atom_var(const std::string& name) {
  auto [it, fresh] = atoms_.emplace(name, static_cast<std::uint32_t>(vars_.size()));
  if (fresh) vars_.push_back({false, name, 0, 0});
  return it->second;
}

std::uint32_t Solver::next_var(std::size_t letter, const Formula& t) {
  auto& m = next_of_[letter];
  if (auto it = m.find(t); it != m.end()) return it->second;
  const auto v = static_cast<std::uint32_t>(vars_.size());
  vars_.push_back({true, "", letter, targets_.size()});
  targets_.push_back({t, letter, v});
  m.emplace(t, v);
  return v;
}

std::optional<Formula> Solver::residual(const Formula& t, const std::string& a) {
  Regex d = derive(t.program(), a);
  if (d.kind() == RK::Empty) return std::nullopt;
  if (d.kind() == RK::Epsilon) return t.sub();
  return Formula::dia(d, t.sub());
}

// Matches x <-> g as emitted by iff: (~x | g) & (x | ~g), with x an atom.
std::optional<std::pair<Formula, Formula>> Solver::definition(const Formula& c) {
  if (!c.is(FK::And) || !c.left().is(FK::Or) || !c.right().is(FK::Or)) return std::nullopt;
  const Formula& l = c.left();
  const Formula& r = c.right();
  if (!l.left().is(FK::Not) || !l.left().sub().is(FK::Prop)) return std::nullopt;
  const Formula& x = l.left().sub();
  if (r.left() != x || r.right() != Formula::neg(l.right())) return std::nullopt;
  return std::pair{x, l.right()};
}

bool Solver::depends(std::uint32_t g0, std::uint32_t x) {
  std::vector<bool> seen(gates_.size(), false);
  std::vector<std::uint32_t> stack{g0};
  while (!stack.empty()) {
    auto g = stack.back();
    stack.pop_back();
    if (g <= 1 || seen[g]) continue;
    seen[g] = true;
    const Gate& y = gates_[g];
    if (y.op == Gate::Var) {
      if (y.a == x) return true;
      if (auto it = subst_.find(y.a); it != subst_.end()) stack.push_back(it->second);
    } else {
      stack.push_back(y.a);
      if (y.op != Gate::Not) stack.push_back(y.b);
    }
  }
  return false;
}

std::uint32_t Solver::compile(const Formula& f) {
  if (auto it = memo_.find(f); it != memo_.end()) return it->second;
  std::uint32_t g = 0;
  switch (f.kind()) {
    case FK::Top:
      g = 1;
      break;
    case FK::Prop:
      g = gate(Gate::Var, atom_var(f.name()));
      break;
    case FK::Not:
      g = gate(Gate::Not, compile(f.sub()));
      break;
    case FK::And:
      g = gate(Gate::And, compile(f.left()), compile(f.right()));
      break;
    case FK::Or:
      g = gate(Gate::Or, compile(f.left()), compile(f.right()));
      break;
    case FK::Dia: {
      const Formula& psi = f.sub();
      if (psi.is(FK::Or)) {
        g = gate(Gate::Or, compile(Formula::dia(f.program(), psi.left())),
                 compile(Formula::dia(f.program(), psi.right())));
        break;
      }
      Regex q = normalize(f.program());
      if (q.kind() == RK::Empty) break;
      if (q.kind() == RK::Epsilon) {
        g = compile(psi);
        break;
      }
      if (q.nullable()) g = compile(psi);
      const Formula t = Formula::dia(q, psi);
      for (std::size_t a = 0; a < letters_.size(); ++a)
        if (auto r = residual(t, letters_[a]))
          g = gate(Gate::Or, g, gate(Gate::Var, next_var(a, *r)));
      break;
    }
    case FK::Box: {
      const Formula& psi = f.sub();
      if (psi.is(FK::Top)) {
        g = 1;
      } else if (psi.is(FK::And)) {
        g = gate(Gate::And, compile(Formula::box(f.program(), psi.left())),
                 compile(Formula::box(f.program(), psi.right())));
      } else {
        g = gate(Gate::Not, compile(Formula::dia(f.program(), complement(psi))));
      }
      break;
    }
    default:
      throw Error(ErrorKind::Format, "epistemic operator in a DPDL formula: " + f.str());
  }
  memo_.emplace(f, g);
  return g;
}

// Bandwidth-reducing order: breadth-first over the graph linking variables
// that occur in the same target definition or top-level conjunct.
void Solver::order_variables() {
  const std::size_t n = vars_.size();
  std::vector<std::vector<std::uint32_t>> adj(n);
  std::vector<std::uint32_t> mark(gates_.size(), 0);
  std::uint32_t stamp = 0;
  auto link_support = [&](std::uint32_t g0, std::optional<std::uint32_t> extra) {
    ++stamp;
    std::vector<std::uint32_t> sup, stack{g0};
    while (!stack.empty()) {
      auto g = stack.back();
      stack.pop_back();
      if (g <= 1 || mark[g] == stamp) continue;
      mark[g] = stamp;
      const Gate& x = gates_[g];
      if (x.op == Gate::Var) {
        if (auto it = subst_.find(x.a); it != subst_.end())
          stack.push_back(it->second);
        else
          sup.push_back(x.a);
      } else {
        stack.push_back(x.a);
        if (x.op != Gate::Not) stack.push_back(x.b);
      }
    }
    if (extra) sup.push_back(*extra);
    std::sort(sup.begin(), sup.end());
    for (std::size_t i = 1; i < sup.size(); ++i) {
      adj[sup[i - 1]].push_back(sup[i]);
      adj[sup[i]].push_back(sup[i - 1]);
    }
  };
  for (auto g : root_parts_) link_support(g, std::nullopt);
  for (auto g : inv_parts_) link_support(g, std::nullopt);
  for (const auto& t : targets_) link_support(t.gate, t.var);
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  pos_.assign(n, 0);
  std::vector<bool> seen(n, false);
  std::uint32_t next = 0;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::deque<std::uint32_t> q{s};
    seen[s] = true;
    while (!q.empty()) {
      auto v = q.front();
      q.pop_front();
      pos_[v] = next++;
      for (auto u : adj[v])
        if (!seen[u]) {
          seen[u] = true;
          q.push_back(u);
        }
    }
  }
}

Ref Solver::to_bdd(std::uint32_t g) {
  if (gate_bdd_[g] != Bdd::kNoVar) return gate_bdd_[g];
  const Gate x = gates_[g];
  Ref r = Bdd::kFalse;
  switch (x.op) {
    case Gate::False:
      r = Bdd::kFalse;
      break;
    case Gate::True:
      r = Bdd::kTrue;
      break;
    case Gate::Var:
      if (auto it = subst_.find(x.a); it != subst_.end())
        r = to_bdd(it->second);
      else
        r = cur(x.a);
      break;
    case Gate::Not:
      r = bdd_.lnot(to_bdd(x.a));
      break;
    case Gate::And: {
      Ref a = to_bdd(x.a);
      r = a == Bdd::kFalse ? a : bdd_.land(a, to_bdd(x.b));
      break;
    }
    case Gate::Or: {
      Ref a = to_bdd(x.a);
      r = a == Bdd::kTrue ? a : bdd_.lor(a, to_bdd(x.b));
      break;
    }
  }
  gate_bdd_[g] = r;
  return r;
}

void Solver::build_relation(std::size_t a, std::vector<std::pair<std::uint32_t, Ref>> items) {
  constexpr std::size_t kClusterNodes = 4000;
  std::sort(items.begin(), items.end());
  Relation& rel = rel_[a];
  Ref acc = Bdd::kTrue;
  for (auto& [p, r] : items) {
    Ref cand = bdd_.land(acc, r);
    if (acc != Bdd::kTrue && bdd_.dag_size(cand) > kClusterNodes) {
      rel.parts.push_back(acc);
      acc = r;
    } else {
      acc = cand;
    }
  }
  if (acc != Bdd::kTrue) rel.parts.push_back(acc);
  const std::size_t nv = vars_.size();
  std::vector<long> last(2 * nv, -1);
  for (std::size_t j = 0; j < rel.parts.size(); ++j)
    for (auto v : bdd_.support(rel.parts[j])) last[v] = static_cast<long>(j);
  std::vector<std::vector<std::uint32_t>> pq(rel.parts.size()), cq(rel.parts.size());
  std::vector<std::uint32_t> pfirst, cfirst;
  for (std::uint32_t v = 0; v < 2 * nv; ++v) {
    auto& bucket = v % 2 ? (last[v] < 0 ? pfirst : pq[last[v]]) : (last[v] < 0 ? cfirst : cq[last[v]]);
    bucket.push_back(v);
  }
  rel.pre_first = bdd_.varset(pfirst);
  rel.post_first = bdd_.varset(cfirst);
  for (std::size_t j = 0; j < rel.parts.size(); ++j) {
    rel.pre_q.push_back(bdd_.varset(pq[j]));
    rel.post_q.push_back(bdd_.varset(cq[j]));
  }
}

Ref Solver::pre(std::size_t a, Ref s) {
  const Relation& rel = rel_[a];
  Ref acc = bdd_.exists(bdd_.shift(s, 1), rel.pre_first);
  for (std::size_t j = 0; j < rel.parts.size() && acc != Bdd::kFalse; ++j)
    acc = bdd_.and_exists(acc, rel.parts[j], rel.pre_q[j]);
  return acc;
}

Ref Solver::post(std::size_t a, Ref s) {
  const Relation& rel = rel_[a];
  Ref acc = bdd_.exists(s, rel.post_first);
  for (std::size_t j = 0; j < rel.parts.size() && acc != Bdd::kFalse; ++j)
    acc = bdd_.and_exists(acc, rel.parts[j], rel.post_q[j]);
  return bdd_.shift(acc, -1);
}

Ref Solver::z_at(const Formula& t, std::size_t r) {
  if (auto it = ev_index_.find(t); it != ev_index_.end()) {
    const std::size_t e = it->second;
    if (!ev_active_[e] || stages_[e].empty()) return Bdd::kFalse;
    return stages_[e][std::min(r, stages_[e].size() - 1)];
  }
  return bdd_.land(w_, to_bdd(memo_.at(t)));
}

// Least fixpoint of fulfilment for every active Dia target, relative to w_.
void Solver::eventualities(Ref w, bool keep_stages) {
  w_ = w;
  const std::size_t ne = ev_.size();
  for (std::size_t e = 0; e < ne; ++e) {
    stages_[e].clear();
    if (!ev_active_[e]) continue;
    const Formula& t = ev_[e];
    Ref base = Bdd::kFalse;
    if (normalize(t.program()).nullable()) base = bdd_.land(w, to_bdd(memo_.at(t.sub())));
    stages_[e].push_back(base);
  }
  for (std::size_t r = 0;; ++r) {
    bool changed = false;
    std::vector<Ref> fresh(ne, Bdd::kFalse);
    for (std::size_t e = 0; e < ne; ++e) {
      if (!ev_active_[e]) continue;
      Ref z = stages_[e].back();
      for (std::size_t a = 0; a < letters_.size(); ++a)
        if (auto ta = residual(ev_[e], letters_[a])) z = bdd_.lor(z, bdd_.land(w, pre(a, z_at(*ta, r))));
      fresh[e] = z;
    }
    for (std::size_t e = 0; e < ne; ++e) {
      if (!ev_active_[e]) continue;
      if (fresh[e] != stages_[e].back()) changed = true;
      if (keep_stages)
        stages_[e].push_back(fresh[e]);
      else
        stages_[e].back() = fresh[e];
    }
    if (!changed) break;
  }
}

std::size_t Solver::rank(std::size_t e, const std::vector<std::int8_t>& x) const {
  for (std::size_t r = 0; r < stages_[e].size(); ++r)
    if (bdd_.eval(stages_[e][r], x)) return r;
  return stages_[e].size();
}

DpdlModel Solver::extract(Ref start, std::size_t& root) {
  const std::size_t nv = vars_.size();
  auto complete = [&](std::vector<std::int8_t>& x) {
    x.resize(2 * nv, -1);
    for (std::size_t v = 0; v < nv; ++v)
      if (x[2 * v] < 0) x[2 * v] = 0;
    for (std::size_t v = 0; v < nv; ++v) x[2 * v + 1] = -1;
  };
  auto pick = [&](Ref s) {
    std::vector<std::int8_t> x(2 * nv, -1);
    bdd_.sat_one(s, x);
    complete(x);
    return x;
  };
  using Key = std::pair<std::vector<std::int8_t>, long>;
  std::map<Key, std::size_t> index;
  std::vector<Key> nodes;
  std::vector<std::vector<std::optional<std::size_t>>> trans;
  auto intern = [&](Key k) {
    auto [it, fresh] = index.emplace(k, nodes.size());
    if (fresh) {
      if (nodes.size() >= opts_.witness_state_cap)
        throw Error(ErrorKind::ResourceExceeded, "witness state limit reached");
      nodes.push_back(std::move(k));
      trans.emplace_back(letters_.size());
    }
    return it->second;
  };
  const long ne = static_cast<long>(ev_.size());
  auto is_true = [&](std::uint32_t var, const std::vector<std::int8_t>& x) {
    return x[2 * pos_[var]] == 1;
  };
  auto demanded = [&](const Formula& t, std::size_t a, const std::vector<std::int8_t>& x) {
    auto it = next_of_[a].find(t);
    return it != next_of_[a].end() && is_true(it->second, x);
  };
  root = intern({pick(start), -1});
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const auto x = nodes[id].first;
    const long k = nodes[id].second;
    std::vector<Ref> succ(letters_.size(), Bdd::kFalse);
    for (std::size_t a = 0; a < letters_.size(); ++a)
      if (is_true(top_var_[a], x)) {
        Ref acc = bdd_.shift(w_, 1);
        for (Ref part : rel_[a].parts) acc = bdd_.land(acc, bdd_.restrict(part, x));
        succ[a] = bdd_.shift(acc, -1);
      }
    // pursuit of eventuality k, if still pending here
    std::optional<std::size_t> plet;
    Ref pset = Bdd::kFalse;
    long pnext = -1;
    if (k >= 0 && ev_active_[k] && bdd_.eval(to_bdd(memo_.at(ev_[k])), x)) {
      const std::size_t r = rank(k, x);
      if (r > 0 && r < stages_[k].size()) {
        for (std::size_t a = 0; a < letters_.size() && !plet; ++a) {
          auto ta = residual(ev_[k], letters_[a]);
          if (!ta || succ[a] == Bdd::kFalse || !demanded(*ta, a, x)) continue;
          Ref s = bdd_.land(succ[a], z_at(*ta, r - 1));
          if (s == Bdd::kFalse) continue;
          plet = a;
          pset = s;
          auto it = ev_index_.find(*ta);
          pnext = it == ev_index_.end() ? -1 : static_cast<long>(it->second);
        }
      }
    }
    for (std::size_t a = 0; a < letters_.size(); ++a) {
      if (succ[a] == Bdd::kFalse) continue;
      Key nk;
      if (plet && *plet == a) {
        nk = {pick(pset), pnext >= 0 ? pnext : (k + 1) % std::max(ne, 1L)};
      } else {
        // pursue the next eventuality (cyclically after k) demanded through a
        std::optional<std::size_t> chosen;
        for (long step = 1; step <= ne && !chosen; ++step) {
          const std::size_t e = static_cast<std::size_t>(((k < 0 ? -1 : k) + step + ne) % ne);
          if (ev_active_[e] && demanded(ev_[e], a, x)) chosen = e;
        }
        if (chosen) {
          Ref best = Bdd::kFalse;
          for (std::size_t r = 0; r < stages_[*chosen].size() && best == Bdd::kFalse; ++r)
            best = bdd_.land(succ[a], stages_[*chosen][r]);
          if (best == Bdd::kFalse) best = succ[a];
          nk = {pick(best), static_cast<long>(*chosen)};
        } else {
          nk = {pick(succ[a]), ne > 0 ? (k + 1) % ne : -1};
        }
      }
      trans[id][a] = intern(std::move(nk));
    }
  }
  DpdlModel m;
  m.alphabet = Alphabet(letters_);
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    m.states.push_back("w" + std::to_string(id));
    std::set<std::string> val;
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      if (vars_[v].next) continue;
      auto it = subst_.find(static_cast<std::uint32_t>(v));
      const bool on = it == subst_.end() ? nodes[id].first[2 * pos_[v]] == 1
                                         : bdd_.eval(to_bdd(it->second), nodes[id].first);
      if (on) val.insert(vars_[v].atom);
    }
    m.valuation.push_back(std::move(val));
  }
  m.trans = std::move(trans);
  return m;
}

DpdlSatResult Solver::run() {
  DpdlSatResult out;
  auto syms = symbols_of(root_);
  letters_.assign(syms.begin(), syms.end());
  next_of_.resize(letters_.size());
  for (std::size_t a = 0; a < letters_.size(); ++a) top_var_.push_back(next_var(a, Formula::top()));
  // Top-level [Sigma*]c conjuncts hold at every state of the generated
  // submodel, so they constrain every type instead of becoming eventualities.
  const Regex everything = make_star(make_sum([&] {
    std::vector<Regex> ls;
    for (const auto& a : letters_) ls.push_back(Regex::atom(a));
    return ls;
  }()));
  std::vector<Formula> stack{root_};
  while (!stack.empty()) {
    Formula f = stack.back();
    stack.pop_back();
    if (f.is(FK::And)) {
      stack.push_back(f.right());
      stack.push_back(f.left());
    } else if (f.is(FK::Box) && !letters_.empty() && language_equivalent(f.program(), everything)) {
      std::vector<Formula> inner{f.sub()};
      while (!inner.empty()) {
        Formula c = inner.back();
        inner.pop_back();
        if (auto def = definition(c)) {
          const std::uint32_t x = atom_var(def->first.name());
          const std::uint32_t g = compile(def->second);
          if (!depends(g, x)) {
            subst_.emplace(x, g);
            continue;
          }
        }
        if (c.is(FK::And)) {
          inner.push_back(c.right());
          inner.push_back(c.left());
        } else {
          inv_parts_.push_back(compile(c));
        }
      }
    } else {
      root_parts_.push_back(compile(f));
    }
  }
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    const Formula t = targets_[i].f;
    const std::uint32_t g = compile(t);
    targets_[i].gate = g;
  }
  for (const auto& t : targets_)
    // Dia over a disjunction is split by compile; its parts carry the demand.
    if (t.f.is(FK::Dia) && !t.f.sub().is(FK::Or) && !ev_index_.count(t.f)) {
      ev_index_.emplace(t.f, ev_.size());
      ev_.push_back(t.f);
    }
  stages_.resize(ev_.size());
  ev_active_.assign(ev_.size(), false);
  out.stats.targets = targets_.size();
  out.stats.bdd_vars = 2 * vars_.size();

  try {
    order_variables();
    gate_bdd_.assign(gates_.size(), Bdd::kNoVar);
    auto fold = [&](std::vector<std::pair<std::uint32_t, Ref>> items) {
      std::sort(items.begin(), items.end());
      std::vector<Ref> level;
      for (auto& [p, r] : items) level.push_back(r);
      if (level.empty()) return Bdd::kTrue;
      while (level.size() > 1) {
        std::vector<Ref> up;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) up.push_back(bdd_.land(level[i], level[i + 1]));
        if (level.size() % 2) up.push_back(level.back());
        level.swap(up);
      }
      return level[0];
    };
    rel_.assign(letters_.size(), Relation{});
    std::vector<std::pair<std::uint32_t, Ref>> loc;
    for (std::size_t a = 0; a < letters_.size(); ++a) {
      std::vector<std::pair<std::uint32_t, Ref>> items;
      for (const auto& t : targets_) {
        if (t.letter != a) continue;
        items.push_back({pos_[t.var], bdd_.liff(cur(t.var), bdd_.shift(to_bdd(t.gate), 1))});
        if (t.var != top_var_[a]) loc.push_back({pos_[t.var], bdd_.limp(cur(t.var), cur(top_var_[a]))});
      }
      build_relation(a, std::move(items));
    }
    for (auto g : inv_parts_) loc.push_back({0, to_bdd(g)});
    const Ref local = fold(std::move(loc));
    std::vector<std::pair<std::uint32_t, Ref>> top;
    for (auto g : root_parts_) top.push_back({0, to_bdd(g)});
    const Ref goal = bdd_.land(local, fold(std::move(top)));

    // types reachable from a root candidate
    Ref w = goal;
    for (Ref frontier = goal; frontier != Bdd::kFalse;) {
      Ref img = Bdd::kFalse;
      for (std::size_t a = 0; a < letters_.size(); ++a) img = bdd_.lor(img, post(a, frontier));
      img = bdd_.land(img, local);
      frontier = bdd_.land(img, bdd_.lnot(w));
      w = bdd_.lor(w, frontier);
    }
    for (;;) {
      ++rounds_;
      for (Ref prev = Bdd::kFalse; prev != w;) {
        prev = w;
        for (std::size_t a = 0; a < letters_.size(); ++a)
          w = bdd_.land(w, bdd_.lor(bdd_.lnot(cur(top_var_[a])), pre(a, w)));
      }
      if (bdd_.land(w, goal) == Bdd::kFalse) break;
      for (std::size_t e = 0; e < ev_.size(); ++e)
        ev_active_[e] = bdd_.land(w, to_bdd(memo_.at(ev_[e]))) != Bdd::kFalse;
      // residuals of active eventualities are needed too
      for (bool grew = true; grew;) {
        grew = false;
        for (std::size_t e = 0; e < ev_.size(); ++e) {
          if (!ev_active_[e]) continue;
          for (const auto& a : letters_)
            if (auto ta = residual(ev_[e], a))
              if (auto it = ev_index_.find(*ta); it != ev_index_.end() && !ev_active_[it->second])
                ev_active_[it->second] = grew = true;
        }
      }
      eventualities(w, false);
      Ref nw = w;
      for (std::size_t e = 0; e < ev_.size(); ++e)
        if (ev_active_[e])
          nw = bdd_.land(nw, bdd_.lor(bdd_.lnot(to_bdd(memo_.at(ev_[e]))), stages_[e].back()));
      if (nw == w) break;
      w = nw;
    }
    out.stats.rounds = rounds_;
    const Ref start = bdd_.land(w, goal);
    if (start == Bdd::kFalse) {
      out.status = SatStatus::Unsat;
      out.stats.bdd_nodes = bdd_.node_count();
      return out;
    }
    eventualities(w, true);
    std::size_t root = 0;
    DpdlModel m = extract(start, root);
    out.stats.bdd_nodes = bdd_.node_count();
    if (!dpdl_check(m, m.states[root], root_)) {
      detail::audit_witness_failure();
      out.status = SatStatus::Unknown;
      out.reason = "witness construction did not satisfy the formula";
      return out;
    }
    out.status = SatStatus::Sat;
    out.state = m.states[root];
    out.witness = std::move(m);
    detail::audit_sat_verdict();
    return out;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ResourceExceeded) throw;
    out.status = SatStatus::Unknown;
    out.reason = e.what();
    out.exhausted = true;
    out.stats.bdd_nodes = bdd_.node_count();
    return out;
  }
}

}  // namespace

DpdlSatResult dpdl_sat(const DpdlFormula& f, const DpdlSatOptions& opts) {
  Solver s(f, opts);
  return s.run();
}

}  // namespace pol

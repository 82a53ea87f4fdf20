#include "pol/model.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_set>

#include "pol/error.hpp"

namespace pol {

// ------------------------------------------------------------------- Model

std::optional<std::size_t> PolModel::find_state(std::string_view id) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].id == id) return i;
  return std::nullopt;
}

std::size_t PolModel::state_index(std::string_view id) const {
  if (auto i = find_state(id)) return *i;
  throw Error(ErrorKind::UnknownState, "unknown state '" + std::string(id) + "'");
}

std::optional<std::size_t> PolModel::find_agent(std::string_view name) const {
  for (std::size_t i = 0; i < agents.size(); ++i)
    if (agents[i] == name) return i;
  return std::nullopt;
}

std::size_t PolModel::agent_index(std::string_view name) const {
  if (auto i = find_agent(name)) return *i;
  throw Error(ErrorKind::UnknownAgent, "unknown agent '" + std::string(name) + "'");
}

std::vector<std::vector<std::size_t>> PolModel::partition(std::size_t agent) const {
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t s = 0; s < states.size(); ++s) groups[cls[agent][s]].push_back(s);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [rep, g] : groups) out.push_back(std::move(g));
  return out;
}

void PolModel::set_partition(std::size_t agent, const std::vector<std::vector<std::size_t>>& groups) {
  if (cls.size() < agents.size()) cls.resize(agents.size());
  std::vector<std::size_t> c(states.size(), states.size());
  for (const auto& g : groups) {
    if (g.empty()) throw Error(ErrorKind::Format, "empty class in relation of " + agents[agent]);
    std::size_t rep = *std::min_element(g.begin(), g.end());
    for (auto s : g) {
      if (s >= states.size()) throw Error(ErrorKind::Format, "class member out of range");
      if (c[s] != states.size())
        throw Error(ErrorKind::Format,
                    "state '" + states[s].id + "' in two classes of agent " + agents[agent]);
      c[s] = rep;
    }
  }
  for (std::size_t s = 0; s < states.size(); ++s)
    if (c[s] == states.size())
      throw Error(ErrorKind::Format,
                  "state '" + states[s].id + "' missing from the relation of " + agents[agent]);
  cls[agent] = std::move(c);
}

void PolModel::reset_relations() {
  cls.assign(agents.size(), {});
  for (auto& c : cls) {
    c.resize(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) c[s] = s;
  }
}

void PolModel::validate() const {
  std::set<std::string> ids;
  for (const auto& s : states) {
    if (!ids.insert(s.id).second) throw Error(ErrorKind::Format, "duplicate state id '" + s.id + "'");
    for (const auto& a : symbols_of(s.exp)) alphabet.require(a);
  }
  std::set<std::string> ags(agents.begin(), agents.end());
  if (ags.size() != agents.size()) throw Error(ErrorKind::Format, "duplicate agent");
  if (cls.size() != agents.size()) throw Error(ErrorKind::Format, "relation count mismatch");
  for (const auto& c : cls) {
    if (c.size() != states.size()) throw Error(ErrorKind::Format, "relation size mismatch");
    for (std::size_t s = 0; s < c.size(); ++s)
      if (c[s] > s || c[c[s]] != c[s]) throw Error(ErrorKind::Format, "malformed partition");
  }
}

PolModel restrict_model(const PolModel& m, const std::vector<std::size_t>& keep,
                        const std::vector<Regex>* exps) {
  PolModel out;
  out.alphabet = m.alphabet;
  out.agents = m.agents;
  std::vector<std::size_t> pos(m.size(), m.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    pos[keep[i]] = i;
    PolState st = m.states[keep[i]];
    if (exps) st.exp = (*exps)[keep[i]];
    out.states.push_back(std::move(st));
  }
  out.cls.assign(m.agents.size(), std::vector<std::size_t>(keep.size()));
  for (std::size_t a = 0; a < m.agents.size(); ++a) {
    std::map<std::size_t, std::size_t> rep;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      auto it = rep.emplace(m.cls[a][keep[i]], i).first;
      out.cls[a][i] = it->second;
    }
  }
  return out;
}

std::optional<PolModel> update(const PolModel& m, std::string_view symbol) {
  m.alphabet.require(symbol);
  std::vector<Regex> exps(m.size());
  std::vector<std::size_t> keep;
  for (std::size_t s = 0; s < m.size(); ++s) {
    exps[s] = derive(m.states[s].exp, symbol);
    if (!is_empty_language(exps[s])) keep.push_back(s);
  }
  if (keep.empty()) return std::nullopt;
  return restrict_model(m, keep, &exps);
}

std::optional<PolModel> update_word(const PolModel& m, const Word& w) {
  m.alphabet.require(w);
  std::optional<PolModel> cur = m;
  for (const auto& a : w) {
    cur = update(*cur, a);
    if (!cur) break;
  }
  return cur;
}

// -------------------------------------------------------- Residuation graph

namespace {

std::string key_of(const std::vector<Regex>& derivs, const std::vector<bool>& alive) {
  std::string key;
  for (std::size_t s = 0; s < derivs.size(); ++s) {
    key += alive[s] ? derivs[s].str() : std::string("-");
    key += '\x1f';
  }
  return key;
}

}  // namespace

ResiduationGraph::ResiduationGraph(const PolModel& m, std::size_t budget)
    : model_(std::make_shared<PolModel>(m)), budget_(std::max<std::size_t>(budget, 2)) {
  const std::size_t n = m.size();
  Node root;
  for (const auto& s : m.states) root.derivs.push_back(normalize(s.exp));
  root.alive.assign(n, true);
  nodes_.push_back(std::move(root));
  Node dead;
  dead.derivs.assign(n, Regex::empty());
  dead.alive.assign(n, false);
  dead.next.assign(m.alphabet.size(), kDead);
  nodes_.push_back(std::move(dead));
  // When nothing is dead at the root, M coincides with M|epsilon and the root
  // doubles as that node.
  std::vector<bool> alive(n);
  for (std::size_t s = 0; s < n; ++s) alive[s] = !is_empty_language(nodes_[kRoot].derivs[s]);
  if (n > 0 && std::all_of(alive.begin(), alive.end(), [](bool b) { return b; })) {
    index_.emplace(key_of(nodes_[kRoot].derivs, alive), kRoot);
    nodes_[kRoot].restricted = kRoot;
  }
}

std::size_t ResiduationGraph::intern(std::vector<Regex> derivs, std::vector<bool> alive, Word witness) {
  if (std::none_of(alive.begin(), alive.end(), [](bool b) { return b; })) return kDead;
  std::string key = key_of(derivs, alive);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  if (nodes_.size() >= budget_)
    throw ResourceExceeded("residuation graph exceeded " + std::to_string(budget_) + " nodes");
  Node node;
  node.derivs = std::move(derivs);
  node.alive = std::move(alive);
  node.witness = std::move(witness);
  nodes_.push_back(std::move(node));
  index_.emplace(std::move(key), nodes_.size() - 1);
  return nodes_.size() - 1;
}

std::size_t ResiduationGraph::step(std::size_t node, std::size_t i) {
  const std::size_t k = model_->alphabet.size();
  if (nodes_[node].next.empty()) nodes_[node].next.assign(k, npos);
  if (nodes_[node].next[i] != npos) return nodes_[node].next[i];
  const std::string& a = model_->alphabet.symbols()[i];
  const std::size_t n = model_->size();
  std::vector<Regex> derivs(n, Regex::empty());
  std::vector<bool> alive(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (!nodes_[node].alive[s]) continue;
    derivs[s] = derive(nodes_[node].derivs[s], a);
    alive[s] = !is_empty_language(derivs[s]);
  }
  Word w = nodes_[node].witness;
  w.push_back(a);
  std::size_t t = intern(std::move(derivs), std::move(alive), std::move(w));
  nodes_[node].next[i] = t;
  return t;
}

std::size_t ResiduationGraph::step(std::size_t node, std::string_view symbol) {
  auto i = model_->alphabet.index(symbol);
  if (!i) model_->alphabet.require(symbol);
  return step(node, *i);
}

std::size_t ResiduationGraph::run(const Word& w) {
  std::size_t cur = kRoot;
  for (const auto& a : w) cur = step(cur, a);
  return cur;
}

std::size_t ResiduationGraph::restrict(std::size_t node) {
  if (node != kRoot) return node;
  if (nodes_[kRoot].restricted == npos) {
    std::vector<bool> alive(model_->size());
    for (std::size_t s = 0; s < alive.size(); ++s)
      alive[s] = !is_empty_language(nodes_[kRoot].derivs[s]);
    auto derivs = nodes_[kRoot].derivs;
    std::size_t r = intern(std::move(derivs), std::move(alive), {});
    nodes_[kRoot].restricted = r;
  }
  return nodes_[kRoot].restricted;
}

std::vector<std::size_t> ResiduationGraph::survivors(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < model_->size(); ++s)
    if (nodes_[node].alive[s]) out.push_back(s);
  return out;
}

std::optional<PolModel> ResiduationGraph::model_at(std::size_t node) const {
  if (node == kRoot) return *model_;
  if (node == kDead) return std::nullopt;
  return restrict_model(*model_, survivors(node), &nodes_[node].derivs);
}

void ResiduationGraph::expand_all() {
  std::vector<bool> seen;
  std::deque<std::size_t> work{kRoot};
  auto mark = [&](std::size_t n) {
    if (seen.size() <= n) seen.resize(n + 1, false);
    if (seen[n]) return false;
    seen[n] = true;
    return true;
  };
  mark(kRoot);
  while (!work.empty()) {
    std::size_t n = work.front();
    work.pop_front();
    for (std::size_t i = 0; i < model_->alphabet.size(); ++i) {
      std::size_t t = step(n, i);
      if (mark(t)) work.push_back(t);
    }
  }
}

// ----------------------------------------------------------------- Checker

ModelChecker::ModelChecker(const PolModel& m, std::size_t budget) : graph_(m, budget) {}

const Dfa& ModelChecker::dfa(const Regex& r) {
  auto it = dfas_.find(r.str());
  if (it != dfas_.end()) return it->second;
  return dfas_.emplace(r.str(), to_dfa(r, model().alphabet)).first->second;
}

bool ModelChecker::check(std::size_t state, const Formula& f) {
  if (state >= model().size()) throw Error(ErrorKind::UnknownState, "state index out of range");
  return eval(ResiduationGraph::kRoot, state, f);
}

bool ModelChecker::check(std::string_view state, const Formula& f) {
  return check(model().state_index(state), f);
}

bool ModelChecker::check_at(std::size_t node, std::size_t state, const Formula& f) {
  return eval(node, state, f);
}

bool ModelChecker::eval(std::size_t node, std::size_t s, const Formula& f) {
  using FK = Formula::Kind;
  switch (f.kind()) {
    case FK::Top:
      return true;
    case FK::Prop:
      return model().states[s].props.count(f.name()) != 0;
    case FK::Not:
      return !eval(node, s, f.sub());
    case FK::And:
      return eval(node, s, f.left()) && eval(node, s, f.right());
    case FK::Or:
      return eval(node, s, f.left()) || eval(node, s, f.right());
    default:
      break;
  }
  Key key{node, s, f};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  bool v = false;
  if (f.is(FK::Hat) || f.is(FK::Know)) {
    const std::size_t ag = model().agent_index(f.agent());
    const bool hat = f.is(FK::Hat);
    v = !hat;
    for (std::size_t t = 0; t < model().size(); ++t) {
      if (!graph_.alive(node, t) || !model().related(ag, s, t)) continue;
      if (eval(node, t, f.sub()) == hat) {
        v = hat;
        break;
      }
    }
  } else {
    v = search(node, s, f, nullptr);
  }
  memo_.emplace(std::move(key), v);
  return v;
}

// Product search of the program automaton against the residuation graph.
// For a diamond: true iff some accepted word keeps s alive and the operand
// holds there. For a box: true iff no such word falsifies the operand.
bool ModelChecker::search(std::size_t node, std::size_t s, const Formula& f, Word* trace) {
  const bool dia = f.is(Formula::Kind::Dia);
  const Dfa& d = dfa(f.program());
  const std::size_t k = model().alphabet.size();
  struct Visit {
    std::size_t q, m, parent, sym;
  };
  std::vector<Visit> order;
  std::unordered_set<std::uint64_t> seen;
  auto push = [&](std::size_t q, std::size_t m, std::size_t parent, std::size_t sym) {
    if (!graph_.alive(m, s)) return;
    if (d.labels[q].kind() == Regex::Kind::Empty) return;
    if (seen.insert((static_cast<std::uint64_t>(m) << 24) ^ q).second)
      order.push_back({q, m, parent, sym});
  };
  push(d.initial, graph_.restrict(node), ResiduationGraph::npos, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Visit cur = order[i];
    if (d.accepting[cur.q]) {
      bool holds = eval(cur.m, s, f.sub());
      if (holds == dia) {
        if (trace) {
          trace->clear();
          for (std::size_t j = i; order[j].parent != ResiduationGraph::npos; j = order[j].parent)
            trace->push_back(model().alphabet.symbols()[order[j].sym]);
          std::reverse(trace->begin(), trace->end());
        }
        return dia;
      }
    }
    for (std::size_t a = 0; a < k; ++a) push(d.transitions[cur.q][a], graph_.step(cur.m, a), i, a);
  }
  return !dia;
}

std::optional<Word> ModelChecker::witness(std::size_t state, const Formula& f) {
  if (!f.is(Formula::Kind::Dia)) return std::nullopt;
  Word w;
  if (!search(ResiduationGraph::kRoot, state, f, &w)) return std::nullopt;
  return w;
}

bool check(const PolModel& m, std::string_view state, const Formula& f) {
  ModelChecker mc(m);
  return mc.check(state, f);
}

// ------------------------------------------------------------ Random models

std::vector<Regex> default_regex_pool(const Alphabet& sigma, std::size_t count) {
  const std::string x = sigma.empty() ? "a" : sigma.symbols()[0];
  const std::string y = sigma.size() > 1 ? sigma.symbols()[1] : x;
  std::string all;
  for (const auto& s : sigma.symbols()) all += (all.empty() ? "" : "+") + s;
  if (all.empty()) all = x;
  const std::vector<std::string> shapes{
      "0*",  x, y, x + "*", "(" + all + ")*", x + ";" + y + "*", x + ";" + x + "*",
      y + ";(" + all + ")*", x + ";" + y, "(" + x + ";" + y + ")*", y + "*", x + ";" + x,
  };
  std::vector<Regex> out;
  std::set<std::string> seen;
  for (const auto& s : shapes) {
    if (out.size() >= count) break;
    Regex r = parse_regex(s);
    if (seen.insert(normalize(r).str()).second) out.push_back(r);
  }
  return out;
}

PolModel random_model(std::mt19937_64& rng, const RandomModelShape& shape) {
  auto uni = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  PolModel m;
  m.alphabet = shape.alphabet;
  m.agents = shape.agents;
  const std::size_t n = uni(shape.min_states, shape.max_states);
  for (std::size_t i = 0; i < n; ++i) {
    PolState st;
    st.id = "s" + std::to_string(i);
    for (const auto& p : shape.props)
      if (uni(0, 1)) st.props.insert(p);
    st.exp = shape.pool.empty() ? Regex::epsilon() : shape.pool[uni(0, shape.pool.size() - 1)];
    m.states.push_back(std::move(st));
  }
  m.reset_relations();
  for (std::size_t a = 0; a < m.agents.size(); ++a) {
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t s = 0; s < n; ++s) groups[uni(0, n - 1)].push_back(s);
    std::vector<std::vector<std::size_t>> parts;
    for (auto& [k, g] : groups) parts.push_back(std::move(g));
    m.set_partition(a, parts);
  }
  return m;
}

ValiditySample validity_sample(const Formula& f, std::size_t trials, RandomModelShape shape,
                               std::uint64_t seed) {
  if (shape.agents.empty()) {
    auto ag = agents_of(f);
    shape.agents.assign(ag.begin(), ag.end());
    if (shape.agents.empty()) shape.agents = {"i"};
  }
  if (shape.props.empty()) {
    auto ps = props_of(f);
    shape.props.assign(ps.begin(), ps.end());
  }
  if (shape.alphabet.empty()) {
    auto sy = symbols_of(f);
    shape.alphabet = Alphabet(sy.empty() ? std::vector<std::string>{"a"}
                                         : std::vector<std::string>(sy.begin(), sy.end()));
  }
  if (shape.pool.empty()) shape.pool = default_regex_pool(shape.alphabet, 8);
  std::mt19937_64 rng(seed);
  ValiditySample out;
  for (std::size_t t = 0; t < trials; ++t) {
    ++out.trials;
    PolModel m = random_model(rng, shape);
    ModelChecker mc(m);
    for (std::size_t s = 0; s < m.size(); ++s) {
      if (!mc.check(s, f)) {
        out.valid = false;
        out.state = m.states[s].id;
        out.model = std::move(m);
        return out;
      }
    }
  }
  return out;
}

}  // namespace pol

#include "pol/filtration.hpp"

#include <functional>
#include <map>

namespace pol {

Filtration filtrate(const PolModel& m, const Formula& phi, Representative rep) {
  return filtrate(m, fl_closure(phi), rep);
}

Filtration filtrate(const PolModel& m, const FlClosure& fl, Representative rep) {
  const std::size_t n = m.size();
  ModelChecker mc(m);
  std::vector<std::vector<bool>> truth(n);
  for (std::size_t s = 0; s < n; ++s)
    for (const auto& psi : fl.members()) truth[s].push_back(mc.check(s, psi));

  Filtration out;
  std::map<std::vector<bool>, std::size_t> class_index;
  std::vector<std::vector<std::size_t>> members;
  out.class_of.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    auto [it, fresh] = class_index.emplace(truth[s], members.size());
    if (fresh) members.emplace_back();
    members[it->second].push_back(s);
    out.class_of[s] = it->second;
  }
  const std::size_t k = members.size();
  for (const auto& g : members) out.representative.push_back(rep == Representative::Least ? g.front() : g.back());

  const auto props = props_of(fl.base());
  out.model.alphabet = m.alphabet;
  out.model.agents = m.agents;
  for (std::size_t c = 0; c < k; ++c) {
    const auto& r = m.states[out.representative[c]];
    PolState st;
    st.id = "c" + std::to_string(c);
    for (const auto& p : r.props)
      if (props.count(p)) st.props.insert(p);
    st.exp = r.exp;
    out.model.states.push_back(std::move(st));
  }
  out.model.reset_relations();

  for (std::size_t a = 0; a < m.agents.size(); ++a) {
    // (1) some members are related in M
    std::vector<std::vector<bool>> rel(k, std::vector<bool>(k, false));
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t)
        if (m.related(a, s, t)) rel[out.class_of[s]][out.class_of[t]] = true;
    // (2) for every hK_a psi in the closure: psi | hK_a psi at the target
    // forces hK_a psi at the source
    for (std::size_t i = 0; i < fl.size(); ++i) {
      const auto& f = fl.members()[i];
      if (!f.is(Formula::Kind::Hat) || f.agent() != m.agents[a]) continue;
      const std::size_t j = fl.index_of(f.sub());
      for (std::size_t c = 0; c < k; ++c)
        for (std::size_t d = 0; d < k; ++d) {
          if (!rel[c][d]) continue;
          const auto& src = truth[members[c].front()];
          const auto& dst = truth[members[d].front()];
          if ((dst[j] || dst[i]) && !src[i]) rel[c][d] = false;
        }
    }
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t d = 0; d < k; ++d) {
        if (rel[c][d] != rel[d][c]) out.raw_symmetric = false;
        for (std::size_t e = 0; e < k; ++e)
          if (rel[c][d] && rel[d][e] && !rel[c][e]) out.raw_transitive = false;
      }
    // equivalence closure
    std::vector<std::size_t> parent(k);
    for (std::size_t c = 0; c < k; ++c) parent[c] = c;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t d = 0; d < k; ++d)
        if (rel[c][d]) parent[find(c)] = find(d);
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t c = 0; c < k; ++c) groups[find(c)].push_back(c);
    std::vector<std::vector<std::size_t>> parts;
    for (auto& [r, g] : groups) parts.push_back(std::move(g));
    out.model.set_partition(a, parts);
  }
  return out;
}

FiltrationCheck verify_filtration(const PolModel& m, const Formula& phi, std::size_t word_bound,
                                  Representative rep) {
  const FlClosure fl(phi);
  const Filtration f = filtrate(m, fl, rep);
  ModelChecker left(m);
  ModelChecker right(f.model);
  FiltrationCheck out;

  std::vector<Word> words{{}};
  for (std::size_t len = 0, begin = 0; len < word_bound; ++len) {
    const std::size_t end = words.size();
    for (std::size_t i = begin; i < end; ++i)
      for (const auto& a : m.alphabet.symbols()) {
        Word w = words[i];
        w.push_back(a);
        words.push_back(std::move(w));
      }
    begin = end;
  }

  for (const auto& w : words) {
    const std::size_t nl = left.graph().run(w);
    const std::size_t nr = right.graph().run(w);
    for (std::size_t s = 0; s < m.size(); ++s) {
      const std::size_t c = f.class_of[s];
      if (!w.empty()) {
        const bool ls = left.graph().alive(nl, s);
        const bool rs = right.graph().alive(nr, c);
        if (ls != rs) ++out.survival_mismatches;
        if (!ls || !rs) continue;
      }
      for (const auto& psi : fl.members()) {
        ++out.comparisons;
        const bool a = left.check_at(nl, s, psi);
        const bool b = right.check_at(nr, c, psi);
        if (a != b) {
          out.pass = false;
          out.word = w;
          out.state = m.states[s].id;
          out.formula = psi;
          out.truth_in_original = a;
          return out;
        }
      }
    }
  }
  return out;
}

}  // namespace pol

#pragma once

// Direct reading of the truth clauses over explicit word enumeration. Only
// complete for programs whose accepted words are no longer than `maxlen`.

#include <vector>

#include "oracle.hpp"
#include "pol/formula.hpp"
#include "pol/model.hpp"

namespace oracle {

struct PolView {
  const pol::PolModel& m;
  std::size_t maxlen;

  bool eval(const std::vector<pol::Regex>& exps, const std::vector<bool>& alive, std::size_t s,
            const pol::Formula& f) const {
    using K = pol::Formula::Kind;
    switch (f.kind()) {
      case K::Top:
        return true;
      case K::Prop:
        return m.states[s].props.count(f.name()) != 0;
      case K::Not:
        return !eval(exps, alive, s, f.sub());
      case K::And:
        return eval(exps, alive, s, f.left()) && eval(exps, alive, s, f.right());
      case K::Or:
        return eval(exps, alive, s, f.left()) || eval(exps, alive, s, f.right());
      case K::Hat:
      case K::Know: {
        auto ag = m.agent_index(f.agent());
        bool hat = f.is(K::Hat);
        for (std::size_t t = 0; t < m.size(); ++t)
          if (alive[t] && m.related(ag, s, t) && eval(exps, alive, t, f.sub()) == hat) return hat;
        return !hat;
      }
      case K::Dia:
      case K::Box: {
        bool dia = f.is(K::Dia);
        for (const auto& w : words_upto(m.alphabet.symbols(), maxlen)) {
          if (!matches(f.program(), w)) continue;
          std::vector<pol::Regex> e2(exps.size());
          std::vector<bool> a2(alive.size());
          for (std::size_t t = 0; t < m.size(); ++t) {
            e2[t] = pol::residuate(exps[t], w);
            a2[t] = alive[t] && !pol::is_empty_language(e2[t]);
          }
          if (!a2[s]) continue;
          if (eval(e2, a2, s, f.sub()) == dia) return dia;
        }
        return !dia;
      }
    }
    return false;
  }

  bool check(std::size_t s, const pol::Formula& f) const {
    std::vector<pol::Regex> exps;
    for (const auto& st : m.states) exps.push_back(st.exp);
    return eval(exps, std::vector<bool>(m.size(), true), s, f);
  }
};

inline bool star_free(const pol::Regex& r) {
  if (r.kind() == pol::Regex::Kind::Star) return false;
  for (const auto& o : r.operands())
    if (!star_free(o)) return false;
  return true;
}

inline bool star_free(const pol::Formula& f) {
  using K = pol::Formula::Kind;
  switch (f.kind()) {
    case K::Top:
    case K::Prop:
      return true;
    case K::And:
    case K::Or:
      return star_free(f.left()) && star_free(f.right());
    case K::Dia:
    case K::Box:
      if (!star_free(f.program())) return false;
      [[fallthrough]];
    default:
      return star_free(f.sub());
  }
}

}  // namespace oracle

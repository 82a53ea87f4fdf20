#pragma once

// Seeded random generators for property tests.

#include <random>
#include <string>
#include <vector>

#include "pol/formula.hpp"
#include "pol/regex.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline pol::Regex regex(Rng& rng, const std::vector<std::string>& sigma, int depth) {
  using pol::Regex;
  if (depth <= 0 || pick(rng, 4) == 0) {
    auto k = pick(rng, 10);
    if (k == 0) return Regex::empty();
    if (k == 1) return Regex::epsilon();
    return Regex::atom(sigma[pick(rng, sigma.size())]);
  }
  switch (pick(rng, 3)) {
    case 0:
      return Regex::sum(regex(rng, sigma, depth - 1), regex(rng, sigma, depth - 1));
    case 1:
      return Regex::concat(regex(rng, sigma, depth - 1), regex(rng, sigma, depth - 1));
    default:
      return Regex::star(regex(rng, sigma, depth - 1));
  }
}

struct FormulaShape {
  std::vector<std::string> props{"p", "q"};
  std::vector<std::string> agents{"i", "j"};
  std::vector<std::string> sigma{"a", "b"};
  int regex_depth = 2;
  bool boxes_and_knows = true;
};

inline pol::Formula formula(Rng& rng, const FormulaShape& s, int depth) {
  using pol::Formula;
  if (depth <= 0 || pick(rng, 4) == 0) {
    if (pick(rng, 8) == 0) return Formula::top();
    return Formula::prop(s.props[pick(rng, s.props.size())]);
  }
  auto k = pick(rng, s.boxes_and_knows ? 8 : 5);
  switch (k) {
    case 0:
      return Formula::neg(formula(rng, s, depth - 1));
    case 1:
      return Formula::disj(formula(rng, s, depth - 1), formula(rng, s, depth - 1));
    case 2:
      return Formula::hat(s.agents[pick(rng, s.agents.size())], formula(rng, s, depth - 1));
    case 3:
    case 4:
      return Formula::dia(regex(rng, s.sigma, s.regex_depth), formula(rng, s, depth - 1));
    case 5:
      return Formula::conj(formula(rng, s, depth - 1), formula(rng, s, depth - 1));
    case 6:
      return Formula::know(s.agents[pick(rng, s.agents.size())], formula(rng, s, depth - 1));
    default:
      return Formula::box(regex(rng, s.sigma, s.regex_depth), formula(rng, s, depth - 1));
  }
}

// Epistemic-free formulas for the DPDL solver.
inline pol::Formula dpdl_formula(Rng& rng, const FormulaShape& s, int depth) {
  using pol::Formula;
  if (depth <= 0 || pick(rng, 4) == 0) {
    if (pick(rng, 8) == 0) return Formula::top();
    return Formula::prop(s.props[pick(rng, s.props.size())]);
  }
  switch (pick(rng, 6)) {
    case 0:
      return Formula::neg(dpdl_formula(rng, s, depth - 1));
    case 1:
      return Formula::disj(dpdl_formula(rng, s, depth - 1), dpdl_formula(rng, s, depth - 1));
    case 2:
      return Formula::conj(dpdl_formula(rng, s, depth - 1), dpdl_formula(rng, s, depth - 1));
    case 3:
    case 4:
      return Formula::dia(regex(rng, s.sigma, s.regex_depth), dpdl_formula(rng, s, depth - 1));
    default:
      return Formula::box(regex(rng, s.sigma, s.regex_depth), dpdl_formula(rng, s, depth - 1));
  }
}

}  // namespace gen

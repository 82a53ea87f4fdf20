#pragma once

// Quotient of a model by agreement on the closure of a formula.

#include <optional>
#include <string>
#include <vector>

#include "pol/formula.hpp"
#include "pol/model.hpp"

namespace pol {

enum class Representative { Least, Greatest };

struct Filtration {
  PolModel model;
  // class_of[s] = state index of s's class in `model`
  std::vector<std::size_t> class_of;
  // Representative (index into the original model) of each class.
  std::vector<std::size_t> representative;
  // Whether the relation given directly by the two defining conditions was
  // already symmetric / transitive before taking the equivalence closure.
  bool raw_symmetric = true;
  bool raw_transitive = true;
};

Filtration filtrate(const PolModel& m, const Formula& phi,
                    Representative rep = Representative::Least);
Filtration filtrate(const PolModel& m, const FlClosure& fl,
                    Representative rep = Representative::Least);

struct FiltrationCheck {
  bool pass = true;
  std::size_t comparisons = 0;
  // Pairs (w, s) where exactly one of s and [s] survives. Not a failure.
  std::size_t survival_mismatches = 0;
  // First disagreement, if any.
  Word word;
  std::string state;
  std::optional<Formula> formula;
  bool truth_in_original = false;
};

FiltrationCheck verify_filtration(const PolModel& m, const Formula& phi, std::size_t word_bound = 3,
                                  Representative rep = Representative::Least);

}  // namespace pol

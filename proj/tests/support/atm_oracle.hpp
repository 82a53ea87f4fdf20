#pragma once

// Reference machine semantics and curve fitting for the hardness generator
// tests. Independent of the window successor function under test.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pol/lowerbound.hpp"

namespace oracle {

using pol::AtmSpec;
using pol::Branch;
using pol::Symbol;

// One full machine step on a tape whose '#' cells act as walls.
struct Config {
  std::vector<std::string> tape;  // "" is '#'
  std::size_t head = 0;
  std::string state;

  Symbol at(std::size_t k) const {
    if (tape[k].empty()) return Symbol::hash();
    return k == head ? Symbol::head(state, tape[k]) : Symbol::plain(tape[k]);
  }

  Config step(const AtmSpec& m, Branch br) const {
    auto moves = m.trans.find({state, tape[head]});
    if (moves == m.trans.end()) return *this;
    const auto& mv = br == Branch::B && moves->second[1] ? moves->second[1] : moves->second[0];
    if (!mv) return *this;
    Config c = *this;
    c.tape[head] = mv->write;
    c.state = mv->next;
    const std::size_t target = mv->move == 'L' ? head - 1 : head + 1;
    if (!tape[target].empty()) c.head = target;
    return c;
  }
};

// Embeds the window between filler cells. Without a head in the window the
// head sits on the outermost filler, two cells away from the middle.
inline Config embed(const AtmSpec& m, const Symbol& a, const Symbol& b, const Symbol& c) {
  Config cfg;
  cfg.tape = {"", "0", "0", a.letter, b.letter, c.letter, "0", "0", ""};
  cfg.head = 1;
  cfg.state = m.states[0].name;
  const Symbol* w[3] = {&a, &b, &c};
  for (std::size_t k = 0; k < 3; ++k)
    if (w[k]->has_head()) {
      cfg.head = 3 + k;
      cfg.state = w[k]->state;
    }
  return cfg;
}

// Least-squares polynomial of the given degree; returns the worst relative
// residual.
inline double fit_residual(const std::vector<double>& xs, const std::vector<double>& ys, int degree) {
  const int k = degree + 1;
  std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t s = 0; s < xs.size(); ++s)
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) a[r][c] += std::pow(xs[s], r + c);
      a[r][k] += std::pow(xs[s], r) * ys[s];
    }
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (int r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
    }
  }
  double worst = 0;
  for (std::size_t s = 0; s < xs.size(); ++s) {
    double y = 0;
    for (int r = 0; r < k; ++r) y += a[r][k] / a[r][r] * std::pow(xs[s], r);
    worst = std::max(worst, std::abs(y - ys[s]) / ys[s]);
  }
  return worst;
}

}  // namespace oracle

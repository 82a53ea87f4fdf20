#pragma once

// Independent reference semantics used as test oracles. Nothing here calls
// the derivative machinery under test.

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "pol/regex.hpp"

namespace oracle {

// End positions reachable when matching r against w from position i.
inline std::set<std::size_t> ends(const pol::Regex& r, const pol::Word& w, std::size_t i) {
  using K = pol::Regex::Kind;
  switch (r.kind()) {
    case K::Empty:
      return {};
    case K::Epsilon:
      return {i};
    case K::Atom:
      if (i < w.size() && w[i] == r.symbol()) return {i + 1};
      return {};
    case K::Sum: {
      std::set<std::size_t> out;
      for (const auto& o : r.operands()) {
        auto e = ends(o, w, i);
        out.insert(e.begin(), e.end());
      }
      return out;
    }
    case K::Concat: {
      std::set<std::size_t> out;
      for (auto j : ends(r.left(), w, i)) {
        auto e = ends(r.right(), w, j);
        out.insert(e.begin(), e.end());
      }
      return out;
    }
    case K::Star: {
      std::set<std::size_t> seen{i};
      std::vector<std::size_t> todo{i};
      while (!todo.empty()) {
        auto j = todo.back();
        todo.pop_back();
        for (auto k : ends(r.body(), w, j))
          if (seen.insert(k).second) todo.push_back(k);
      }
      return seen;
    }
  }
  return {};
}

inline bool matches(const pol::Regex& r, const pol::Word& w) { return ends(r, w, 0).count(w.size()) != 0; }

inline std::vector<pol::Word> words_upto(const std::vector<std::string>& sigma, std::size_t k) {
  std::vector<pol::Word> out{{}};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= k; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (const auto& a : sigma) {
        auto w = out[i];
        w.push_back(a);
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

inline pol::Word concat(pol::Word a, const pol::Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace oracle

#include "bdd.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "pol/error.hpp"

namespace pol::detail {

namespace {

constexpr std::size_t kCacheBits = 20;

inline std::size_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = a * 0x9e3779b97f4a7c15ull;
  h ^= (b + 0x632be59bd9b4e019ull) * 0xc2b2ae3d27d4eb4full;
  h ^= (c + 0x165667b19e3779f9ull) * 0x27d4eb2f165667c5ull;
  return static_cast<std::size_t>(h ^ (h >> 29));
}

}  // namespace

Bdd::Bdd(std::size_t node_cap) : cap_(node_cap), cache_(std::size_t(1) << kCacheBits) {
  nodes_.push_back({kNoVar, 0, 0});
  nodes_.push_back({kNoVar, 1, 1});
  table_.assign(1 << 12, 0);
}

void Bdd::grow_table() {
  std::vector<Ref> t(table_.size() * 2, 0);
  const std::size_t mask = t.size() - 1;
  for (Ref r = 2; r < nodes_.size(); ++r) {
    const Node& n = nodes_[r];
    std::size_t i = mix(n.var, n.lo, n.hi) & mask;
    while (t[i]) i = (i + 1) & mask;
    t[i] = r;
  }
  table_.swap(t);
}

Bdd::Ref Bdd::mk(std::uint32_t v, Ref lo, Ref hi) {
  if (lo == hi) return lo;
  const std::size_t mask = table_.size() - 1;
  std::size_t i = mix(v, lo, hi) & mask;
  while (Ref r = table_[i]) {
    const Node& n = nodes_[r];
    if (n.var == v && n.lo == lo && n.hi == hi) return r;
    i = (i + 1) & mask;
  }
  if (nodes_.size() >= cap_)
    throw Error(ErrorKind::ResourceExceeded,
                "BDD node limit of " + std::to_string(cap_) + " reached");
  Ref r = static_cast<Ref>(nodes_.size());
  nodes_.push_back({v, lo, hi});
  table_[i] = r;
  if (nodes_.size() * 2 > table_.size()) grow_table();
  return r;
}

bool Bdd::cached(std::uint32_t op, Ref a, Ref b, std::uint32_t c, Ref& r) const {
  const CacheEntry& e = cache_[mix(op * 7919u + c, a, b) & (cache_.size() - 1)];
  if (e.op == op && e.a == a && e.b == b && e.c == c) {
    r = e.r;
    return true;
  }
  return false;
}

void Bdd::store(std::uint32_t op, Ref a, Ref b, std::uint32_t c, Ref r) {
  cache_[mix(op * 7919u + c, a, b) & (cache_.size() - 1)] = {op, a, b, c, r};
}

Bdd::Ref Bdd::var(std::uint32_t v) { return mk(v, kFalse, kTrue); }
Bdd::Ref Bdd::nvar(std::uint32_t v) { return mk(v, kTrue, kFalse); }

Bdd::Ref Bdd::land(Ref a, Ref b) {
  if (a == kFalse || b == kFalse) return kFalse;
  if (a == kTrue) return b;
  if (b == kTrue || a == b) return a;
  if (a > b) std::swap(a, b);
  Ref r;
  if (cached(And, a, b, 0, r)) return r;
  const Node na = nodes_[a], nb = nodes_[b];
  const std::uint32_t v = std::min(na.var, nb.var);
  Ref l = land(na.var == v ? na.lo : a, nb.var == v ? nb.lo : b);
  Ref h = land(na.var == v ? na.hi : a, nb.var == v ? nb.hi : b);
  r = mk(v, l, h);
  store(And, a, b, 0, r);
  return r;
}

Bdd::Ref Bdd::lor(Ref a, Ref b) {
  if (a == kTrue || b == kTrue) return kTrue;
  if (a == kFalse) return b;
  if (b == kFalse || a == b) return a;
  if (a > b) std::swap(a, b);
  Ref r;
  if (cached(Or, a, b, 0, r)) return r;
  const Node na = nodes_[a], nb = nodes_[b];
  const std::uint32_t v = std::min(na.var, nb.var);
  Ref l = lor(na.var == v ? na.lo : a, nb.var == v ? nb.lo : b);
  Ref h = lor(na.var == v ? na.hi : a, nb.var == v ? nb.hi : b);
  r = mk(v, l, h);
  store(Or, a, b, 0, r);
  return r;
}

Bdd::Ref Bdd::lnot(Ref a) {
  if (a <= kTrue) return a ^ 1u;
  Ref r;
  if (cached(Not, a, 0, 0, r)) return r;
  const Node n = nodes_[a];
  Ref l = lnot(n.lo);
  Ref h = lnot(n.hi);
  r = mk(n.var, l, h);
  store(Not, a, 0, 0, r);
  return r;
}

Bdd::Ref Bdd::liff(Ref a, Ref b) {
  if (a == b) return kTrue;
  if (a == kTrue) return b;
  if (b == kTrue) return a;
  if (a == kFalse) return lnot(b);
  if (b == kFalse) return lnot(a);
  if (a > b) std::swap(a, b);
  Ref r;
  if (cached(Iff, a, b, 0, r)) return r;
  const Node na = nodes_[a], nb = nodes_[b];
  const std::uint32_t v = std::min(na.var, nb.var);
  Ref l = liff(na.var == v ? na.lo : a, nb.var == v ? nb.lo : b);
  Ref h = liff(na.var == v ? na.hi : a, nb.var == v ? nb.hi : b);
  r = mk(v, l, h);
  store(Iff, a, b, 0, r);
  return r;
}

std::uint32_t Bdd::varset(const std::vector<std::uint32_t>& vars) {
  std::uint32_t mx = 0;
  for (auto v : vars) mx = std::max(mx, v);
  std::vector<bool> in(vars.empty() ? 0 : mx + 1, false);
  for (auto v : vars) in[v] = true;
  sets_.push_back(std::move(in));
  set_max_.push_back(vars.empty() ? 0 : mx);
  return static_cast<std::uint32_t>(sets_.size() - 1);
}

Bdd::Ref Bdd::exists(Ref f, std::uint32_t set) {
  if (sets_[set].empty()) return f;
  return exists_rec(f, set);
}

Bdd::Ref Bdd::exists_rec(Ref f, std::uint32_t set) {
  if (f <= kTrue) return f;
  const Node n = nodes_[f];
  if (n.var > set_max_[set]) return f;
  Ref r;
  if (cached(Exists, f, 0, set, r)) return r;
  Ref l = exists_rec(n.lo, set);
  if (sets_[set][n.var]) {
    r = l == kTrue ? kTrue : lor(l, exists_rec(n.hi, set));
  } else {
    r = mk(n.var, l, exists_rec(n.hi, set));
  }
  store(Exists, f, 0, set, r);
  return r;
}

Bdd::Ref Bdd::and_exists(Ref f, Ref g, std::uint32_t set) {
  if (sets_[set].empty()) return land(f, g);
  return and_exists_rec(f, g, set);
}

Bdd::Ref Bdd::and_exists_rec(Ref f, Ref g, std::uint32_t set) {
  if (f == kFalse || g == kFalse) return kFalse;
  if (f == kTrue && g == kTrue) return kTrue;
  if (f == kTrue || f == g) return exists_rec(g, set);
  if (g == kTrue) return exists_rec(f, set);
  if (f > g) std::swap(f, g);
  const Node nf = nodes_[f], ng = nodes_[g];
  const std::uint32_t v = std::min(nf.var, ng.var);
  if (v > set_max_[set]) return land(f, g);
  Ref r;
  if (cached(AndExists, f, g, set, r)) return r;
  Ref f0 = nf.var == v ? nf.lo : f, f1 = nf.var == v ? nf.hi : f;
  Ref g0 = ng.var == v ? ng.lo : g, g1 = ng.var == v ? ng.hi : g;
  Ref l = and_exists_rec(f0, g0, set);
  if (sets_[set][v]) {
    r = l == kTrue ? kTrue : lor(l, and_exists_rec(f1, g1, set));
  } else {
    r = mk(v, l, and_exists_rec(f1, g1, set));
  }
  store(AndExists, f, g, set, r);
  return r;
}

Bdd::Ref Bdd::shift(Ref f, int delta) {
  if (delta == 0) return f;
  return shift_rec(f, delta);
}

Bdd::Ref Bdd::shift_rec(Ref f, int delta) {
  if (f <= kTrue) return f;
  Ref r;
  const std::uint32_t key = static_cast<std::uint32_t>(delta);
  if (cached(Shift, f, 0, key, r)) return r;
  const Node n = nodes_[f];
  Ref l = shift_rec(n.lo, delta);
  Ref h = shift_rec(n.hi, delta);
  r = mk(static_cast<std::uint32_t>(static_cast<int>(n.var) + delta), l, h);
  store(Shift, f, 0, key, r);
  return r;
}

Bdd::Ref Bdd::restrict(Ref f, const std::vector<std::int8_t>& value) {
  std::unordered_map<Ref, Ref> memo;
  auto rec = [&](auto& self, Ref g) -> Ref {
    if (g <= kTrue) return g;
    if (auto it = memo.find(g); it != memo.end()) return it->second;
    const Node n = nodes_[g];
    const std::int8_t x = n.var < value.size() ? value[n.var] : -1;
    Ref r;
    if (x == 0) {
      r = self(self, n.lo);
    } else if (x == 1) {
      r = self(self, n.hi);
    } else {
      Ref l = self(self, n.lo);
      r = mk(n.var, l, self(self, n.hi));
    }
    memo.emplace(g, r);
    return r;
  };
  return rec(rec, f);
}

bool Bdd::eval(Ref f, const std::vector<std::int8_t>& value) const {
  while (f > kTrue) {
    const Node& n = nodes_[f];
    f = (n.var < value.size() && value[n.var] == 1) ? n.hi : n.lo;
  }
  return f == kTrue;
}

bool Bdd::sat_one(Ref f, std::vector<std::int8_t>& value) const {
  if (f == kFalse) return false;
  while (f > kTrue) {
    const Node& n = nodes_[f];
    if (n.var >= value.size()) value.resize(n.var + 1, -1);
    if (n.lo != kFalse) {
      value[n.var] = 0;
      f = n.lo;
    } else {
      value[n.var] = 1;
      f = n.hi;
    }
  }
  return true;
}

std::vector<std::uint32_t> Bdd::support(Ref f) const {
  std::unordered_set<Ref> seen;
  std::vector<std::uint32_t> vars;
  std::vector<Ref> stack{f};
  while (!stack.empty()) {
    Ref g = stack.back();
    stack.pop_back();
    if (g <= kTrue || !seen.insert(g).second) continue;
    vars.push_back(nodes_[g].var);
    stack.push_back(nodes_[g].lo);
    stack.push_back(nodes_[g].hi);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

std::size_t Bdd::dag_size(Ref f) const {
  std::unordered_set<Ref> seen;
  std::vector<Ref> stack{f};
  while (!stack.empty()) {
    Ref g = stack.back();
    stack.pop_back();
    if (g <= kTrue || !seen.insert(g).second) continue;
    stack.push_back(nodes_[g].lo);
    stack.push_back(nodes_[g].hi);
  }
  return seen.size();
}

}  // namespace pol::detail

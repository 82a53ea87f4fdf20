#pragma once

// Minimal reduced ordered BDD package: no complement edges, no garbage
// collection, a hard node cap (ResourceExceeded) and a lossy computed cache.
// Variable order is the variable index.

#include <cstdint>
#include <vector>

namespace pol::detail {

class Bdd {
 public:
  using Ref = std::uint32_t;
  static constexpr Ref kFalse = 0;
  static constexpr Ref kTrue = 1;
  static constexpr std::uint32_t kNoVar = 0xffffffffu;

  explicit Bdd(std::size_t node_cap = std::size_t(1) << 22);

  Ref var(std::uint32_t v);
  Ref nvar(std::uint32_t v);
  Ref land(Ref a, Ref b);
  Ref lor(Ref a, Ref b);
  Ref lnot(Ref a);
  Ref limp(Ref a, Ref b) { return lor(lnot(a), b); }
  Ref liff(Ref a, Ref b);

  // Quantifier sets are registered once and referred to by id.
  std::uint32_t varset(const std::vector<std::uint32_t>& vars);
  Ref exists(Ref f, std::uint32_t set);
  Ref and_exists(Ref f, Ref g, std::uint32_t set);
  // Renames every variable v to v + delta (delta may be negative). The
  // caller guarantees the mapping is order preserving on the support of f.
  Ref shift(Ref f, int delta);
  // Cofactor by a partial assignment: value[v] is 0, 1 or -1 (free).
  Ref restrict(Ref f, const std::vector<std::int8_t>& value);
  bool eval(Ref f, const std::vector<std::int8_t>& value) const;
  // Fills value[v] for the variables on one satisfying path, preferring 0.
  // Variables off the path are left untouched. Returns false for kFalse.
  bool sat_one(Ref f, std::vector<std::int8_t>& value) const;

  // Sorted variables f depends on, and its number of internal nodes.
  std::vector<std::uint32_t> support(Ref f) const;
  std::size_t dag_size(Ref f) const;

  std::uint32_t top_var(Ref f) const { return nodes_[f].var; }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    std::uint32_t var;
    Ref lo, hi;
  };
  struct CacheEntry {
    std::uint32_t op = 0xffffffffu;
    Ref a = 0, b = 0;
    std::uint32_t c = 0;
    Ref r = 0;
  };
  enum Op : std::uint32_t { And = 1, Or, Not, Iff, Exists, AndExists, Shift };

  Ref mk(std::uint32_t v, Ref lo, Ref hi);
  void grow_table();
  bool cached(std::uint32_t op, Ref a, Ref b, std::uint32_t c, Ref& r) const;
  void store(std::uint32_t op, Ref a, Ref b, std::uint32_t c, Ref r);
  Ref and_exists_rec(Ref f, Ref g, std::uint32_t set);
  Ref exists_rec(Ref f, std::uint32_t set);
  Ref shift_rec(Ref f, int delta);

  std::vector<Node> nodes_;
  std::vector<Ref> table_;  // open addressing, 0 = empty slot
  std::size_t cap_;
  std::vector<CacheEntry> cache_;
  std::vector<std::vector<bool>> sets_;
  std::vector<std::uint32_t> set_max_;
};

}  // namespace pol::detail

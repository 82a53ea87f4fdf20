#include "pol/lowerbound.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <set>

#include "io_internal.hpp"
#include "pol/error.hpp"
#include "pol/io.hpp"

namespace pol {

// ------------------------------------------------------------ space bound

namespace {

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
    throw Error(ErrorKind::Format, "space bound: bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSat / a) return kSat;
  return a * b;
}

}  // namespace

SpaceBound SpaceBound::parse(std::string_view text) {
  SpaceBound s;
  if (text.rfind("2^", 0) == 0) {
    s.kind = Kind::Exp;
    s.k = parse_u64(text.substr(2), "exponent factor");
    if (s.k == 0) throw Error(ErrorKind::Format, "space bound: exponent factor must be positive");
    return s;
  }
  if (text.rfind("poly:", 0) == 0) {
    auto rest = text.substr(5);
    auto comma = rest.find(',');
    if (comma == std::string_view::npos) throw Error(ErrorKind::Format, "space bound: expected poly:c,d");
    s.kind = Kind::Poly;
    s.c = parse_u64(rest.substr(0, comma), "coefficient");
    s.d = parse_u64(rest.substr(comma + 1), "degree");
    if (s.c == 0) throw Error(ErrorKind::Format, "space bound: coefficient must be positive");
    return s;
  }
  throw Error(ErrorKind::Format, "space bound must be '2^k' or 'poly:c,d', got '" + std::string(text) + "'");
}

std::string SpaceBound::str() const {
  if (kind == Kind::Exp) return "2^" + std::to_string(k);
  return "poly:" + std::to_string(c) + "," + std::to_string(d);
}

std::uint64_t SpaceBound::eval(std::size_t m) const {
  if (kind == Kind::Exp) {
    const std::uint64_t bits = mul_sat(k, m);
    return bits >= 64 ? kSat : std::uint64_t(1) << bits;
  }
  std::uint64_t v = c;
  for (std::uint64_t i = 0; i < d; ++i) v = mul_sat(v, m);
  return v;
}

// ---------------------------------------------------------------- machine

const AtmState& AtmSpec::state(std::string_view name) const {
  for (const auto& s : states)
    if (s.name == name) return s;
  throw Error(ErrorKind::Format, "unknown machine state '" + std::string(name) + "'");
}

std::optional<AtmMove> AtmSpec::move(const std::string& q, const std::string& letter, Branch br) const {
  auto it = trans.find({q, letter});
  if (it == trans.end()) return std::nullopt;
  if (br == Branch::B && it->second[1]) return it->second[1];
  return it->second[0];
}

void AtmSpec::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Format, "machine: " + m); };
  if (states.empty()) fail("no states");
  std::set<std::string> names;
  for (const auto& s : states) {
    if (!is_identifier(s.name)) fail("state name '" + s.name + "' is not an identifier");
    if (!names.insert(s.name).second) fail("duplicate state '" + s.name + "'");
  }
  if (!states[0].existential) fail("the initial state must be existential");
  if (!names.count(accept) || !names.count(reject)) fail("accept and reject must be declared states");
  if (accept == reject) fail("accept and reject must differ");
  if (terminal(states[0].name)) fail("the initial state cannot be terminal");
  auto letter_ok = [](const std::string& l) {
    return std::find(kTapeLetters.begin(), kTapeLetters.end(), l) != kTapeLetters.end();
  };
  for (const auto& [key, moves] : trans) {
    const auto& [q, l] = key;
    if (!names.count(q)) fail("transition from unknown state '" + q + "'");
    if (!letter_ok(l)) fail("transition on unknown letter '" + l + "'");
    if (terminal(q)) fail("terminal state '" + q + "' has transitions");
    if (!moves[0] && moves[1]) fail("branch b without branch a at " + q + "," + l);
    for (const auto& mv : moves) {
      if (!mv) continue;
      if (!letter_ok(mv->write)) fail("write of unknown letter '" + mv->write + "'");
      if (mv->move != 'L' && mv->move != 'R') fail("move must be L or R");
      if (!names.count(mv->next)) fail("move to unknown state '" + mv->next + "'");
      if (state(mv->next).existential == state(q).existential)
        fail("transition " + q + " -> " + mv->next + " does not alternate modes");
      if (terminal(mv->next) && mv->write != "_")
        fail("transition into terminal state '" + mv->next + "' must write the blank");
    }
  }
}

namespace {

std::string canonical_letter(const std::string& l) { return l == "␣" ? "_" : l; }

AtmMove read_move(const detail::Json& j) {
  AtmMove m;
  m.write = canonical_letter(detail::str(detail::field(j, "write"), "write"));
  const auto mv = detail::str(detail::field(j, "move"), "move");
  if (mv != "L" && mv != "R") throw Error(ErrorKind::Format, "machine: move must be \"L\" or \"R\"");
  m.move = mv[0];
  m.next = detail::str(detail::field(j, "next"), "next");
  return m;
}

}  // namespace

AtmSpec atm_from_json(std::string_view text) {
  using detail::field;
  using detail::str;
  auto j = detail::parse_json(text);
  AtmSpec m;
  const auto& states = field(j, "states");
  if (!states.is_array()) throw Error(ErrorKind::Format, "machine: states must be an array");
  for (const auto& s : states) {
    AtmState st;
    st.name = str(field(s, "name"), "state name");
    const auto mode = str(field(s, "mode"), "mode");
    if (mode != "exists" && mode != "forall")
      throw Error(ErrorKind::Format, "machine: mode must be \"exists\" or \"forall\"");
    st.existential = mode == "exists";
    m.states.push_back(std::move(st));
  }
  m.accept = str(field(j, "accept"), "accept");
  m.reject = str(field(j, "reject"), "reject");
  const auto& tr = field(j, "trans");
  if (!tr.is_object()) throw Error(ErrorKind::Format, "machine: trans must be an object");
  for (auto it = tr.begin(); it != tr.end(); ++it) {
    const std::string key = it.key();
    auto comma = key.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::Format, "machine: trans key '" + key + "' is not state,letter");
    std::array<std::optional<AtmMove>, 2> moves;
    if (it->contains("a")) moves[0] = read_move((*it)["a"]);
    if (it->contains("b")) moves[1] = read_move((*it)["b"]);
    m.trans[{key.substr(0, comma), canonical_letter(key.substr(comma + 1))}] = moves;
  }
  m.space = SpaceBound::parse(str(field(j, "space"), "space"));
  m.validate();
  return m;
}

std::string atm_to_json(const AtmSpec& m, int indent) {
  detail::Json j;
  j["schema"] = kSchema;
  j["states"] = detail::Json::array();
  for (const auto& s : m.states) j["states"].push_back({{"name", s.name}, {"mode", s.existential ? "exists" : "forall"}});
  j["accept"] = m.accept;
  j["reject"] = m.reject;
  j["trans"] = detail::Json::object();
  for (const auto& [key, moves] : m.trans) {
    detail::Json e = detail::Json::object();
    const char* names[2] = {"a", "b"};
    for (int b = 0; b < 2; ++b)
      if (moves[b])
        e[names[b]] = {{"write", moves[b]->write}, {"move", std::string(1, moves[b]->move)}, {"next", moves[b]->next}};
    j["trans"][key.first + "," + key.second] = e;
  }
  j["space"] = m.space.str();
  return j.dump(indent);
}

// ---------------------------------------------------------------- symbols

namespace {

std::string letter_ident(const std::string& l) { return l == "_" ? "sb" : "s" + l; }

}  // namespace

std::string Symbol::text() const {
  if (is_hash()) return "#";
  return has_head() ? state + "." + letter : letter;
}

std::string Symbol::ident() const {
  if (is_hash()) return "hash";
  return has_head() ? state + "_" + letter_ident(letter) : letter_ident(letter);
}

std::vector<std::string> SymbolTable::alphabet() const {
  std::vector<std::string> out{"a", "b", "win", "ex"};
  for (std::size_t m = 1; m <= 3 * n; ++m) {
    out.push_back(obs_pos(m));
    out.push_back(obs_neg(m));
  }
  for (int i = 1; i <= 3; ++i)
    for (const auto& s : sym) out.push_back(obs_cell(i, s));
  return out;
}

SymbolTable symbol_table(const AtmSpec& m, std::size_t input_length, std::size_t max_bits) {
  SymbolTable t;
  t.sym.push_back(Symbol::hash());
  for (const auto& l : kTapeLetters) t.sym.push_back(Symbol::plain(l));
  for (const auto& q : m.states)
    for (const auto& l : kTapeLetters) t.sym.push_back(Symbol::head(q.name, l));
  t.space = m.space.eval(input_length);
  if (t.space == kSat)
    throw Error(ErrorKind::SpaceBoundTooLarge, "space bound " + m.space.str() + " overflows at |x| = " +
                                                   std::to_string(input_length));
  std::size_t n = 0;
  while (n < 64 && (std::uint64_t(1) << n) < t.space) ++n;
  t.n = std::max<std::size_t>(n, 1);
  if (t.n > max_bits)
    throw Error(ErrorKind::SpaceBoundTooLarge, "positions need " + std::to_string(t.n) +
                                                   " bits, above the cap of " + std::to_string(max_bits));
  return t;
}

Symbol succ(const AtmSpec& m, Branch br, const Symbol& a, const Symbol& b, const Symbol& c) {
  const int heads = a.has_head() + b.has_head() + c.has_head();
  for (const Symbol* s : {&a, &b, &c})
    if (s->has_head() && s->is_hash())
      throw Error(ErrorKind::InconsistentTriple, "state paired with '#' in " + a.text() + " " + b.text() + " " + c.text());
  if (heads > 1)
    throw Error(ErrorKind::InconsistentTriple, "several heads in " + a.text() + " " + b.text() + " " + c.text());
  if (b.has_head()) {
    auto mv = m.move(b.state, b.letter, br);
    if (!mv) return b;
    const Symbol& target = mv->move == 'L' ? a : c;
    if (target.is_hash()) return Symbol::head(mv->next, mv->write);
    return Symbol::plain(mv->write);
  }
  if (a.has_head()) {
    auto mv = m.move(a.state, a.letter, br);
    if (mv && mv->move == 'R' && !b.is_hash()) return Symbol::head(mv->next, b.letter);
    return b;
  }
  if (c.has_head()) {
    auto mv = m.move(c.state, c.letter, br);
    if (mv && mv->move == 'L' && !b.is_hash()) return Symbol::head(mv->next, b.letter);
    return b;
  }
  return b;
}

// --------------------------------------------------------------- positions

namespace {

// Bit k (0 = most significant) of position block i.
Formula bit(int i, std::size_t k, std::size_t n) {
  return Formula::prop("p" + std::to_string((i - 1) * n + k + 1));
}

Formula literal(const Formula& p, bool value) { return value ? p : Formula::neg(p); }

bool const_bit(std::uint64_t v, std::size_t k, std::size_t n) { return (v >> (n - 1 - k)) & 1; }

// pos_i = v
Formula pos_is(int i, std::uint64_t v, std::size_t n) {
  if (n < 64 && v >> n) return Formula::falsum();
  std::vector<Formula> cs;
  for (std::size_t k = 0; k < n; ++k) cs.push_back(literal(bit(i, k, n), const_bit(v, k, n)));
  return conj_all(cs);
}

// pos_i >= v
Formula pos_at_least(int i, std::uint64_t v, std::size_t n) {
  if (v == 0) return Formula::top();
  if (n < 64 && v >> n) return Formula::falsum();
  // greater at the first differing bit, or equal throughout
  std::vector<Formula> alts{pos_is(i, v, n)};
  for (std::size_t k = 0; k < n; ++k) {
    if (const_bit(v, k, n)) continue;
    std::vector<Formula> cs;
    for (std::size_t h = 0; h < k; ++h) cs.push_back(literal(bit(i, h, n), const_bit(v, h, n)));
    cs.push_back(bit(i, k, n));
    alts.push_back(conj_all(cs));
  }
  return disj_all(alts);
}

// pos_j = pos_i + 1
Formula pos_next(int j, int i, std::size_t n) {
  std::vector<Formula> alts;
  for (std::size_t t = 0; t < n; ++t) {  // t: the lowest zero bit of pos_i
    std::vector<Formula> cs;
    for (std::size_t h = 0; h < t; ++h) cs.push_back(iff(bit(i, h, n), bit(j, h, n)));
    cs.push_back(Formula::neg(bit(i, t, n)));
    cs.push_back(bit(j, t, n));
    for (std::size_t h = t + 1; h < n; ++h) {
      cs.push_back(bit(i, h, n));
      cs.push_back(Formula::neg(bit(j, h, n)));
    }
    alts.push_back(conj_all(cs));
  }
  return disj_all(alts);
}

}  // namespace

Formula exactly_one(const std::vector<Formula>& fs) {
  std::vector<Formula> alts;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    std::vector<Formula> cs;
    for (std::size_t h = 0; h < fs.size(); ++h) cs.push_back(h == k ? fs[h] : Formula::neg(fs[h]));
    alts.push_back(conj_all(cs));
  }
  return disj_all(alts);
}

Formula pos_equal_encoding(int i, int j, std::size_t n) {
  if (i < 1 || j > 3 || i >= j) throw Error(ErrorKind::Format, "position blocks must satisfy 1 <= i < j <= 3");
  std::vector<Formula> cs;
  for (std::size_t k = 0; k < n; ++k) cs.push_back(iff(bit(i, k, n), bit(j, k, n)));
  return conj_all(cs);
}

// --------------------------------------------------------------- generator

namespace {

// Programs are built with the raw binary constructors, nested to the right as
// the parser nests them, so the output reads back to the same tree.
Regex sum_of(const std::vector<Regex>& rs) {
  Regex r = rs.back();
  for (std::size_t k = rs.size() - 1; k-- > 0;) r = Regex::sum(rs[k], std::move(r));
  return r;
}

class Generator {
 public:
  Generator(const AtmSpec& m, std::string_view x, const GenerateOptions& o)
      : m_(m), x_(x), t_(symbol_table(m, x.size(), o.max_bits)) {
    n_ = t_.n;
    depth_ = o.tree_depth ? o.tree_depth : 3 * n_;
    ab_ = Regex::sum(Regex::atom("a"), Regex::atom("b"));
    ab_star_ = Regex::star(ab_);
    std::vector<Regex> all, pos;
    for (const auto& s : t_.alphabet()) all.push_back(Regex::atom(s));
    for (std::size_t k = 1; k <= 3 * n_; ++k) {
      pos.push_back(Regex::atom(t_.obs_pos(k)));
      pos.push_back(Regex::atom(t_.obs_neg(k)));
    }
    sigma_star_ = Regex::star(sum_of(all));
    pos_star_ = Regex::star(sum_of(pos));
  }

  Formula run();

 private:
  static const char* agent(std::size_t depth) { return depth % 2 ? "j" : "i"; }
  Formula dia(std::size_t d, Formula f) const { return Formula::hat(agent(d), std::move(f)); }
  Formula box(std::size_t d, Formula f) const { return Formula::know(agent(d), std::move(f)); }
  // box^k with body built at depth d + k
  template <class F>
  Formula box_pow(std::size_t d, std::size_t k, F body) const {
    Formula f = body(d + k);
    for (std::size_t s = k; s-- > 0;) f = box(d + s, std::move(f));
    return f;
  }
  template <class F>
  Formula dia_pow(std::size_t d, std::size_t k, F body) const {
    Formula f = body(d + k);
    for (std::size_t s = k; s-- > 0;) f = dia(d + s, std::move(f));
    return f;
  }
  Formula leaves(Formula f) const {
    return box_pow(0, 3 * n_, [&](std::size_t) { return f; });
  }
  Formula always(Formula f) const { return Formula::box(ab_star_, std::move(f)); }
  Formula obs(const std::string& o) const { return Formula::dia(Regex::atom(o), Formula::top()); }
  Formula cell(int i, const Symbol& s) const { return obs(t_.obs_cell(i, s)); }
  Formula final_formula(const std::string& q) const {
    return dia_pow(0, 3 * n_, [&](std::size_t) { return cell(1, Symbol::head(q, "_")); });
  }
  Formula unique_symbol(int i) const;
  Regex choose(int i) const;

  const AtmSpec& m_;
  std::string x_;
  SymbolTable t_;
  std::size_t n_ = 0, depth_ = 0;
  Regex ab_, ab_star_, sigma_star_, pos_star_;
};

Formula Generator::unique_symbol(int i) const {
  std::vector<Formula> cells;
  for (const auto& s : t_.sym) cells.push_back(cell(i, s));
  return exactly_one(cells);
}

Regex Generator::choose(int i) const {
  auto bit = [&](std::size_t k) {
    const std::size_t m = (i - 1) * n_ + k + 1;
    return Regex::sum(Regex::atom(t_.obs_pos(m)), Regex::atom(t_.obs_neg(m)));
  };
  Regex r = bit(n_ - 1);
  for (std::size_t k = n_ - 1; k-- > 0;) r = Regex::concat(bit(k), std::move(r));
  return r;
}

Formula Generator::run() {
  std::vector<Formula> parts;
  const Formula bot = Formula::falsum();

  // a binary tree branching over p_1..p_D
  for (std::size_t l = 1; l <= depth_; ++l) {
    parts.push_back(box_pow(0, l - 1, [&](std::size_t d) {
      const Formula p = Formula::prop("p" + std::to_string(l));
      std::vector<Formula> cs{dia(d, p), dia(d, Formula::neg(p))};
      for (std::size_t k = 1; k < l; ++k) {
        const Formula q = Formula::prop("p" + std::to_string(k));
        cs.push_back(implies(q, box(d, q)));
        cs.push_back(implies(Formula::neg(q), box(d, Formula::neg(q))));
      }
      return conj_all(cs);
    }));
  }
  // position bits are observable
  for (std::size_t k = 1; k <= 3 * n_; ++k) {
    const Formula p = Formula::prop(t_.prop(k));
    const Formula pos = obs(t_.obs_pos(k)), neg = obs(t_.obs_neg(k));
    const Formula no_pos = Formula::box(Regex::atom(t_.obs_pos(k)), bot);
    const Formula no_neg = Formula::box(Regex::atom(t_.obs_neg(k)), bot);
    parts.push_back(always(leaves(Formula::box(sigma_star_, iff(p, Formula::conj(pos, no_neg))))));
    parts.push_back(always(leaves(Formula::box(sigma_star_, iff(Formula::neg(p), Formula::conj(neg, no_pos))))));
  }
  // one symbol per cell
  for (int i = 1; i <= 3; ++i) parts.push_back(always(leaves(unique_symbol(i))));
  // cell symbols survive position observations
  for (int i = 1; i <= 3; ++i) {
    std::vector<Formula> keep, lose;
    for (const auto& s : t_.sym) {
      keep.push_back(implies(cell(i, s), Formula::box(pos_star_, cell(i, s))));
      lose.push_back(implies(Formula::neg(cell(i, s)), Formula::box(pos_star_, Formula::neg(cell(i, s)))));
    }
    parts.push_back(always(leaves(conj_all(keep))));
    parts.push_back(always(leaves(conj_all(lose))));
  }
  // leaves agreeing on pos_i agree on the symbol
  for (int i = 1; i <= 3; ++i) {
    std::vector<Formula> alts;
    for (const auto& s : t_.sym) alts.push_back(leaves(cell(i, s)));
    parts.push_back(always(Formula::box(choose(i), disj_all(alts))));
  }
  // the three configurations coincide
  for (int i = 1; i <= 3; ++i)
    for (int j = i + 1; j <= 3; ++j) {
      std::vector<Formula> alts;
      for (const auto& s : t_.sym) alts.push_back(Formula::conj(cell(i, s), cell(j, s)));
      parts.push_back(always(leaves(implies(pos_equal_encoding(i, j, n_), disj_all(alts)))));
    }
  // a and b are observable uniformly in the tree
  for (const auto& letter : {"a", "b"})
    for (bool positive : {true, false}) {
      const Formula psi = positive ? obs(letter) : Formula::neg(obs(letter));
      std::vector<Formula> cs;
      for (std::size_t k = 0; k <= depth_; ++k) cs.push_back(box_pow(0, k, [&](std::size_t) { return psi; }));
      parts.push_back(always(implies(psi, conj_all(cs))));
    }
  // the extremal cells hold '#'
  parts.push_back(always(leaves(implies(pos_is(1, 0, n_), cell(1, Symbol::hash())))));
  parts.push_back(always(leaves(implies(pos_is(1, t_.space - 1, n_), cell(1, Symbol::hash())))));
  // the input, with the initial state on x_1 at position 1
  {
    const std::string q0 = m_.states[0].name;
    std::vector<Formula> cs;
    for (std::size_t k = 1; k <= x_.size(); ++k) {
      const std::string letter(1, x_[k - 1]);
      const Symbol s = k == 1 ? Symbol::head(q0, letter) : Symbol::plain(letter);
      cs.push_back(implies(pos_is(1, k, n_), cell(1, s)));
    }
    parts.push_back(leaves(conj_all(cs)));
  }
  // blanks after the input
  {
    const Formula range = Formula::conj(pos_at_least(1, x_.size() + 1, n_),
                                        Formula::neg(pos_at_least(1, t_.space - 1, n_)));
    parts.push_back(leaves(implies(range, cell(1, Symbol::plain("_")))));
  }
  const Formula accepted = final_formula(m_.accept);
  const Formula rejected = final_formula(m_.reject);
  const Formula fin = Formula::disj(accepted, rejected);
  // the next configuration follows the transition
  {
    std::vector<Formula> steps;
    for (const auto& a : t_.sym)
      for (const auto& b : t_.sym)
        for (const auto& c : t_.sym) {
          if (a.has_head() + b.has_head() + c.has_head() > 1) continue;
          const Symbol sa = succ(m_, Branch::A, a, b, c), sb = succ(m_, Branch::B, a, b, c);
          const Formula window = conj_all({cell(1, a), cell(2, b), cell(3, c)});
          const Formula next = Formula::conj(Formula::dia(Regex::atom("a"), cell(2, sa)),
                                             Formula::dia(Regex::atom("b"), cell(2, sb)));
          steps.push_back(implies(window, next));
        }
    const Formula adjacent = Formula::conj(pos_next(2, 1, n_), pos_next(3, 2, n_));
    parts.push_back(always(implies(Formula::neg(fin), leaves(implies(adjacent, conj_all(steps))))));
  }
  // final configurations have no successor
  parts.push_back(always(implies(fin, Formula::box(ab_, bot))));
  // existential and universal configurations alternate
  const Formula ex = obs("ex"), win = obs("win");
  parts.push_back(always(implies(ex, Formula::box(ab_, Formula::neg(ex)))));
  parts.push_back(always(implies(Formula::neg(ex), Formula::box(ab_, ex))));
  // winning
  parts.push_back(always(implies(accepted, win)));
  parts.push_back(always(implies(rejected, Formula::neg(win))));
  parts.push_back(always(implies(Formula::conj(Formula::neg(fin), Formula::neg(ex)),
                                 iff(win, Formula::box(ab_, win)))));
  parts.push_back(always(implies(Formula::conj(Formula::neg(fin), ex), iff(win, Formula::dia(ab_, win)))));

  // the goal conjunct stays last, outside the balanced conjunction
  return Formula::conj(conj_all(parts), Formula::conj(win, ex));
}

}  // namespace

Formula generate(const AtmSpec& m, std::string_view input, const GenerateOptions& opts) {
  m.validate();
  if (input.empty()) throw Error(ErrorKind::Format, "input word must be non-empty");
  for (char ch : input)
    if (ch != '0' && ch != '1') throw Error(ErrorKind::Format, "input letters must be 0 or 1");
  return Generator(m, input, opts).run();
}

int generate_degree_bound(const AtmSpec&) {
  // Position arithmetic, the bit-observability clauses and the branching
  // clauses are quadratic in the bit width n, which is linear in |x| for
  // exponential bounds and logarithmic for polynomial ones; the input clause
  // is |x| times n. Everything else is linear in n for a fixed machine.
  return 2;
}

}  // namespace pol

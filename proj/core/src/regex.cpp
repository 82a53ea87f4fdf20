#include "pol/regex.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <unordered_map>

#include "parse_internal.hpp"
#include "pol/error.hpp"

namespace pol {

// ---------------------------------------------------------------- Alphabet

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const auto& s = symbols_[i];
    if (!is_identifier(s))
      throw Error(ErrorKind::Format, "observation name '" + s + "' is not an identifier");
    if (!index_.emplace(s, i).second)
      throw Error(ErrorKind::Format, "duplicate observation name '" + s + "'");
  }
}

bool Alphabet::contains(std::string_view s) const { return index_.find(s) != index_.end(); }

std::optional<std::size_t> Alphabet::index(std::string_view s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Alphabet::require(std::string_view s) const {
  if (!contains(s))
    throw Error(ErrorKind::UnknownSymbol, "unknown observation symbol '" + std::string(s) + "'");
}

void Alphabet::require(const Word& w) const {
  for (const auto& s : w) require(s);
}

Alphabet Alphabet::merged(const std::set<std::string>& extra) const {
  std::vector<std::string> out = symbols_;
  for (const auto& s : extra)
    if (!contains(s)) out.push_back(s);
  return Alphabet(std::move(out));
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

// ------------------------------------------------------------------- Nodes

struct Regex::Node {
  Kind kind = Kind::Empty;
  std::string symbol;
  std::vector<Regex> ops;
  std::string text;
  std::size_t hash = 0;
  std::size_t size = 1;
  bool nullable = false;
  bool normal = false;
};

struct RegexFactory {
  static Regex make(Regex::Kind kind, std::string symbol, std::vector<Regex> ops, bool normal) {
    auto n = std::make_shared<Regex::Node>();
    n->kind = kind;
    n->symbol = std::move(symbol);
    n->ops = std::move(ops);
    n->normal = normal;
    using K = Regex::Kind;
    switch (kind) {
      case K::Empty:
        n->text = "0";
        n->nullable = false;
        break;
      case K::Epsilon:
        n->text = "0*";
        n->nullable = true;
        break;
      case K::Atom:
        n->text = n->symbol;
        n->nullable = false;
        break;
      case K::Sum: {
        n->nullable = false;
        for (std::size_t i = 0; i < n->ops.size(); ++i) {
          const auto& o = n->ops[i];
          if (i) n->text += "+";
          bool paren = o.kind() == K::Sum && i + 1 < n->ops.size();
          n->text += paren ? "(" + o.str() + ")" : o.str();
          n->nullable = n->nullable || o.nullable();
        }
        break;
      }
      case K::Concat: {
        const auto& l = n->ops[0];
        const auto& r = n->ops[1];
        bool pl = l.kind() == K::Sum || l.kind() == K::Concat;
        bool pr = r.kind() == K::Sum;
        n->text = (pl ? "(" + l.str() + ")" : l.str()) + ";" + (pr ? "(" + r.str() + ")" : r.str());
        n->nullable = l.nullable() && r.nullable();
        break;
      }
      case K::Star: {
        const auto& b = n->ops[0];
        bool p = b.kind() == K::Sum || b.kind() == K::Concat;
        n->text = (p ? "(" + b.str() + ")" : b.str()) + "*";
        n->nullable = true;
        break;
      }
    }
    for (const auto& o : n->ops) n->size += o.size();
    n->hash = std::hash<std::string>{}(n->text);
    return Regex(std::move(n));
  }
};

namespace {

const Regex& empty_const() {
  static const Regex r = RegexFactory::make(Regex::Kind::Empty, "", {}, true);
  return r;
}

const Regex& epsilon_const() {
  static const Regex r = RegexFactory::make(Regex::Kind::Epsilon, "", {}, true);
  return r;
}

}  // namespace

Regex::Regex() : Regex(empty_const()) {}

Regex Regex::empty() { return empty_const(); }
Regex Regex::epsilon() { return epsilon_const(); }

Regex Regex::atom(std::string symbol) {
  if (!is_identifier(symbol))
    throw Error(ErrorKind::Format, "observation name '" + symbol + "' is not an identifier");
  return RegexFactory::make(Kind::Atom, std::move(symbol), {}, true);
}

Regex Regex::sum(Regex a, Regex b) {
  return RegexFactory::make(Kind::Sum, "", {std::move(a), std::move(b)}, false);
}

Regex Regex::concat(Regex a, Regex b) {
  return RegexFactory::make(Kind::Concat, "", {std::move(a), std::move(b)}, false);
}

Regex Regex::star(Regex a) {
  if (a.kind() == Kind::Empty || a.kind() == Kind::Epsilon) return epsilon();
  return RegexFactory::make(Kind::Star, "", {std::move(a)}, false);
}

Regex::Kind Regex::kind() const { return node_->kind; }
const std::string& Regex::symbol() const { return node_->symbol; }
std::span<const Regex> Regex::operands() const { return node_->ops; }
const std::string& Regex::str() const { return node_->text; }
std::size_t Regex::hash() const { return node_->hash; }
std::size_t Regex::size() const { return node_->size; }
bool Regex::nullable() const { return node_->nullable; }
bool Regex::normalized() const { return node_->normal; }

bool operator==(const Regex& a, const Regex& b) {
  if (a.node_ == b.node_) return true;
  return a.node_->hash == b.node_->hash && a.node_->text == b.node_->text;
}

bool operator<(const Regex& a, const Regex& b) { return a.str() < b.str(); }

// ------------------------------------------------------------ Normalizing

Regex make_sum(std::vector<Regex> operands) {
  std::vector<Regex> flat;
  std::function<void(const Regex&)> add = [&](const Regex& r) {
    const Regex n = r.normalized() ? r : normalize(r);
    if (n.kind() == Regex::Kind::Sum) {
      for (const auto& o : n.operands()) add(o);
    } else if (n.kind() != Regex::Kind::Empty) {
      flat.push_back(n);
    }
  };
  for (const auto& r : operands) add(r);
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return Regex::empty();
  if (flat.size() == 1) return flat.front();
  return RegexFactory::make(Regex::Kind::Sum, "", std::move(flat), true);
}

Regex make_concat(const Regex& a0, const Regex& b0) {
  const Regex a = a0.normalized() ? a0 : normalize(a0);
  const Regex b = b0.normalized() ? b0 : normalize(b0);
  using K = Regex::Kind;
  if (a.kind() == K::Empty || b.kind() == K::Empty) return Regex::empty();
  if (a.kind() == K::Epsilon) return b;
  if (b.kind() == K::Epsilon) return a;
  if (a.kind() == K::Concat) return make_concat(a.left(), make_concat(a.right(), b));
  return RegexFactory::make(K::Concat, "", {a, b}, true);
}

Regex make_star(const Regex& a0) {
  const Regex a = a0.normalized() ? a0 : normalize(a0);
  using K = Regex::Kind;
  switch (a.kind()) {
    case K::Empty:
    case K::Epsilon:
      return Regex::epsilon();
    case K::Star:
      return a;
    case K::Sum: {
      std::vector<Regex> rest;
      bool had_eps = false;
      for (const auto& o : a.operands()) {
        if (o.kind() == K::Epsilon)
          had_eps = true;
        else
          rest.push_back(o);
      }
      if (had_eps) return make_star(make_sum(std::move(rest)));
      break;
    }
    default:
      break;
  }
  return RegexFactory::make(K::Star, "", {a}, true);
}

Regex normalize(const Regex& r) {
  if (r.normalized()) return r;
  switch (r.kind()) {
    case Regex::Kind::Sum: {
      std::vector<Regex> ops(r.operands().begin(), r.operands().end());
      return make_sum(std::move(ops));
    }
    case Regex::Kind::Concat:
      return make_concat(normalize(r.left()), normalize(r.right()));
    case Regex::Kind::Star:
      return make_star(normalize(r.body()));
    default:
      return r;
  }
}

// ------------------------------------------------------------ Derivatives

Regex derive(const Regex& r0, std::string_view a) {
  const Regex r = normalize(r0);
  using K = Regex::Kind;
  switch (r.kind()) {
    case K::Empty:
    case K::Epsilon:
      return Regex::empty();
    case K::Atom:
      return r.symbol() == a ? Regex::epsilon() : Regex::empty();
    case K::Sum: {
      std::vector<Regex> ds;
      for (const auto& o : r.operands()) ds.push_back(derive(o, a));
      return make_sum(std::move(ds));
    }
    case K::Concat: {
      Regex d = make_concat(derive(r.left(), a), r.right());
      if (r.left().nullable()) return make_sum({d, derive(r.right(), a)});
      return d;
    }
    case K::Star:
      return make_concat(derive(r.body(), a), r);
  }
  return Regex::empty();
}

Regex derive(const Regex& r, std::string_view a, const Alphabet& sigma) {
  sigma.require(a);
  return derive(r, a);
}

Regex residuate(const Regex& r, const Word& w) {
  Regex cur = normalize(r);
  for (const auto& a : w) {
    if (cur.kind() == Regex::Kind::Empty) break;
    cur = derive(cur, a);
  }
  return cur;
}

Regex residuate(const Regex& r, const Word& w, const Alphabet& sigma) {
  sigma.require(w);
  return residuate(r, w);
}

bool is_empty_language(const Regex& r) {
  using K = Regex::Kind;
  switch (r.kind()) {
    case K::Empty:
      return true;
    case K::Epsilon:
    case K::Atom:
    case K::Star:
      return false;
    case K::Sum:
      return std::all_of(r.operands().begin(), r.operands().end(),
                         [](const Regex& o) { return is_empty_language(o); });
    case K::Concat:
      return is_empty_language(r.left()) || is_empty_language(r.right());
  }
  return true;
}

bool member(const Regex& r, const Word& w) { return residuate(r, w).nullable(); }

bool member(const Regex& r, const Word& w, const Alphabet& sigma) {
  sigma.require(w);
  return member(r, w);
}

std::set<std::string> symbols_of(const Regex& r) {
  std::set<std::string> out;
  std::function<void(const Regex&)> go = [&](const Regex& x) {
    if (x.kind() == Regex::Kind::Atom) out.insert(x.symbol());
    for (const auto& o : x.operands()) go(o);
  };
  go(r);
  return out;
}

// ------------------------------------------------------------------ Parser

namespace detail {

namespace {

Regex parse_sum(Lexer& lex);

Regex parse_atom(Lexer& lex) {
  const Token& t = lex.peek();
  switch (t.kind) {
    case Tok::Zero:
      lex.take();
      return Regex::empty();
    case Tok::Ident:
      return Regex::atom(lex.take().text);
    case Tok::LParen: {
      lex.take();
      Regex r = parse_sum(lex);
      lex.expect(Tok::RParen, "')'");
      return r;
    }
    default:
      lex.fail("expected observation expression");
  }
}

Regex parse_post(Lexer& lex) {
  Regex r = parse_atom(lex);
  while (lex.accept(Tok::Star)) r = Regex::star(std::move(r));
  return r;
}

bool starts_factor(Tok k) { return k == Tok::Zero || k == Tok::Ident || k == Tok::LParen; }

Regex parse_cat(Lexer& lex) {
  Regex r = parse_post(lex);
  if (lex.accept(Tok::Semi)) return Regex::concat(std::move(r), parse_cat(lex));
  if (starts_factor(lex.peek().kind)) return Regex::concat(std::move(r), parse_cat(lex));
  return r;
}

Regex parse_sum(Lexer& lex) {
  Regex r = parse_cat(lex);
  if (lex.accept(Tok::Plus)) return Regex::sum(std::move(r), parse_sum(lex));
  return r;
}

}  // namespace

Regex parse_regex_expr(Lexer& lex) { return parse_sum(lex); }

}  // namespace detail

Regex parse_regex(std::string_view text) {
  detail::Lexer lex(text);
  Regex r = detail::parse_regex_expr(lex);
  if (lex.peek().kind != detail::Tok::End) lex.fail("trailing input after expression");
  return r;
}

Regex parse_regex(std::string_view text, const Alphabet& sigma) {
  Regex r = parse_regex(text);
  for (const auto& s : symbols_of(r)) sigma.require(s);
  return r;
}

// --------------------------------------------------------------- Automata

bool Dfa::accepts(const Word& w) const {
  std::size_t q = initial;
  for (const auto& a : w) {
    auto i = alphabet.index(a);
    if (!i) return false;
    q = transitions[q][*i];
  }
  return accepting[q];
}

Dfa to_dfa(const Regex& r, const Alphabet& sigma, std::size_t budget) {
  Dfa d;
  d.alphabet = sigma;
  std::unordered_map<Regex, std::size_t, Regex::Hash> ids;
  std::deque<std::size_t> work;
  auto intern = [&](const Regex& x) {
    auto [it, fresh] = ids.emplace(x, d.labels.size());
    if (fresh) {
      if (d.labels.size() >= budget)
        throw ResourceExceeded("derivative automaton exceeded " + std::to_string(budget) +
                               " states");
      d.labels.push_back(x);
      d.accepting.push_back(x.nullable());
      d.transitions.emplace_back(sigma.size(), 0);
      work.push_back(it->second);
    }
    return it->second;
  };
  d.initial = intern(normalize(r));
  while (!work.empty()) {
    std::size_t q = work.front();
    work.pop_front();
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      Regex next = derive(d.labels[q], sigma.symbols()[i]);
      std::size_t t = intern(next);
      d.transitions[q][i] = t;
    }
  }
  return d;
}

bool language_equivalent(const Regex& a, const Regex& b, const Alphabet& sigma,
                         std::size_t budget) {
  Dfa da = to_dfa(a, sigma, budget);
  Dfa db = to_dfa(b, sigma, budget);
  std::vector<std::vector<bool>> seen(da.size(), std::vector<bool>(db.size(), false));
  std::deque<std::pair<std::size_t, std::size_t>> work{{da.initial, db.initial}};
  seen[da.initial][db.initial] = true;
  while (!work.empty()) {
    auto [p, q] = work.front();
    work.pop_front();
    if (da.accepting[p] != db.accepting[q]) return false;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      std::size_t p2 = da.transitions[p][i], q2 = db.transitions[q][i];
      if (!seen[p2][q2]) {
        seen[p2][q2] = true;
        work.emplace_back(p2, q2);
      }
    }
  }
  return true;
}

bool language_equivalent(const Regex& a, const Regex& b) {
  std::set<std::string> syms = symbols_of(a);
  auto sb = symbols_of(b);
  syms.insert(sb.begin(), sb.end());
  return language_equivalent(a, b, Alphabet(std::vector<std::string>(syms.begin(), syms.end())));
}

Regex state_elimination(const AutomatonSpec& a) {
  // Generalized automaton: states 0..n-1, source n, sink n+1.
  const std::size_t n = a.states;
  const std::size_t src = n, dst = n + 1;
  std::vector<std::vector<Regex>> g(n + 2, std::vector<Regex>(n + 2, Regex::empty()));
  for (const auto& e : a.edges) g[e.from][e.to] = make_sum({g[e.from][e.to], Regex::atom(e.symbol)});
  g[src][a.initial] = Regex::epsilon();
  for (std::size_t q = 0; q < n; ++q)
    if (a.accepting[q]) g[q][dst] = make_sum({g[q][dst], Regex::epsilon()});

  std::vector<bool> gone(n + 2, false);
  for (std::size_t k = 0; k < n; ++k) {
    Regex loop = make_star(g[k][k]);
    for (std::size_t p = 0; p < n + 2; ++p) {
      if (gone[p] || p == k || g[p][k].kind() == Regex::Kind::Empty) continue;
      for (std::size_t q = 0; q < n + 2; ++q) {
        if (gone[q] || q == k || g[k][q].kind() == Regex::Kind::Empty) continue;
        g[p][q] = make_sum({g[p][q], make_concat(g[p][k], make_concat(loop, g[k][q]))});
      }
    }
    gone[k] = true;
  }
  return g[src][dst];
}

}  // namespace pol

#include "pol/formula.hpp"

#include <deque>
#include <functional>

#include "parse_internal.hpp"
#include "pol/error.hpp"

namespace pol {

struct Formula::Node {
  Kind kind = Kind::Top;
  std::string name;
  Regex program;
  std::vector<Formula> kids;
  std::size_t hash = 0;
  std::size_t size = 1;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

struct FormulaFactory {
  static Formula make(Formula::Kind kind, std::string name, Regex program,
                      std::vector<Formula> kids) {
    auto n = std::make_shared<Formula::Node>();
    n->kind = kind;
    n->name = std::move(name);
    n->program = std::move(program);
    n->kids = std::move(kids);
    std::size_t h = static_cast<std::size_t>(kind) * 0x100000001b3ULL;
    if (!n->name.empty()) h = mix(h, std::hash<std::string>{}(n->name));
    if (kind == Formula::Kind::Dia || kind == Formula::Kind::Box) {
      h = mix(h, n->program.hash());
      n->size += n->program.size();
    }
    for (const auto& k : n->kids) {
      h = mix(h, k.hash());
      n->size += k.size();
    }
    n->hash = h;
    return Formula(std::move(n));
  }
};

namespace {

const Formula& top_const() {
  static const Formula f = FormulaFactory::make(Formula::Kind::Top, "", Regex(), {});
  return f;
}

}  // namespace

Formula::Formula() : Formula(top_const()) {}

Formula Formula::top() { return top_const(); }
Formula Formula::falsum() { return neg(top()); }

Formula Formula::prop(std::string name) {
  if (name.empty()) throw Error(ErrorKind::Format, "empty proposition name");
  return FormulaFactory::make(Kind::Prop, std::move(name), Regex(), {});
}

Formula Formula::neg(Formula f) { return FormulaFactory::make(Kind::Not, "", Regex(), {std::move(f)}); }

Formula Formula::conj(Formula a, Formula b) {
  return FormulaFactory::make(Kind::And, "", Regex(), {std::move(a), std::move(b)});
}

Formula Formula::disj(Formula a, Formula b) {
  return FormulaFactory::make(Kind::Or, "", Regex(), {std::move(a), std::move(b)});
}

Formula Formula::hat(std::string agent, Formula f) {
  if (!is_identifier(agent)) throw Error(ErrorKind::Format, "bad agent name '" + agent + "'");
  return FormulaFactory::make(Kind::Hat, std::move(agent), Regex(), {std::move(f)});
}

Formula Formula::know(std::string agent, Formula f) {
  if (!is_identifier(agent)) throw Error(ErrorKind::Format, "bad agent name '" + agent + "'");
  return FormulaFactory::make(Kind::Know, std::move(agent), Regex(), {std::move(f)});
}

Formula Formula::dia(Regex program, Formula f) {
  return FormulaFactory::make(Kind::Dia, "", std::move(program), {std::move(f)});
}

Formula Formula::box(Regex program, Formula f) {
  return FormulaFactory::make(Kind::Box, "", std::move(program), {std::move(f)});
}

Formula::Kind Formula::kind() const { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }
const Regex& Formula::program() const { return node_->program; }
const Formula& Formula::sub() const { return node_->kids[0]; }
const Formula& Formula::left() const { return node_->kids[0]; }
const Formula& Formula::right() const { return node_->kids[1]; }
std::size_t Formula::hash() const { return node_->hash; }
std::size_t Formula::size() const { return node_->size; }

bool Formula::is_modal() const {
  auto k = kind();
  return k == Kind::Hat || k == Kind::Know || k == Kind::Dia || k == Kind::Box;
}

std::string Formula::str() const { return print_formula(*this); }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.hash != y.hash || x.kind != y.kind || x.size != y.size || x.name != y.name) return false;
  if ((x.kind == Formula::Kind::Dia || x.kind == Formula::Kind::Box) && x.program != y.program)
    return false;
  for (std::size_t i = 0; i < x.kids.size(); ++i)
    if (!(x.kids[i] == y.kids[i])) return false;
  return true;
}

namespace {

int compare(const Formula& a, const Formula& b) {
  if (a == b) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  if (int c = a.name().compare(b.name())) return c < 0 ? -1 : 1;
  if (a.is(Formula::Kind::Dia) || a.is(Formula::Kind::Box)) {
    if (int c = a.program().str().compare(b.program().str())) return c < 0 ? -1 : 1;
  }
  switch (a.kind()) {
    case Formula::Kind::Top:
    case Formula::Kind::Prop:
      return 0;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      if (int c = compare(a.left(), b.left())) return c;
      return compare(a.right(), b.right());
    default:
      return compare(a.sub(), b.sub());
  }
}

}  // namespace

bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

Formula complement(const Formula& f) { return f.is(Formula::Kind::Not) ? f.sub() : Formula::neg(f); }

namespace {

Formula fold(const std::vector<Formula>& fs, std::size_t lo, std::size_t hi, bool is_and) {
  if (hi - lo == 1) return fs[lo];
  std::size_t mid = lo + (hi - lo) / 2;
  Formula l = fold(fs, lo, mid, is_and);
  Formula r = fold(fs, mid, hi, is_and);
  return is_and ? Formula::conj(std::move(l), std::move(r)) : Formula::disj(std::move(l), std::move(r));
}

}  // namespace

Formula conj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::top();
  return fold(fs, 0, fs.size(), true);
}

Formula disj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::falsum();
  return fold(fs, 0, fs.size(), false);
}

Formula implies(const Formula& a, const Formula& b) { return Formula::disj(Formula::neg(a), b); }

Formula iff(const Formula& a, const Formula& b) {
  return Formula::conj(Formula::disj(Formula::neg(a), b), Formula::disj(a, Formula::neg(b)));
}

// ------------------------------------------------------------------ Printer

namespace {

bool bare_prop(const std::string& n) {
  if (!is_identifier(n)) return false;
  if (n == "true" || n == "false") return false;
  if (n.rfind("K_", 0) == 0 || n.rfind("hK_", 0) == 0) return false;
  return true;
}

void quote(const std::string& n, std::string& out) {
  out += '"';
  for (char c : n) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

// Precedence: 1 = |, 2 = &, 3 = unary/atomic.
int level(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Or:
      return 1;
    case Formula::Kind::And:
      return 2;
    default:
      return 3;
  }
}

void print(const Formula& f, std::string& out);

void print_paren(const Formula& f, bool paren, std::string& out) {
  if (paren) out += '(';
  print(f, out);
  if (paren) out += ')';
}

void print(const Formula& f, std::string& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Top:
      out += "true";
      return;
    case K::Prop:
      if (bare_prop(f.name()))
        out += f.name();
      else
        quote(f.name(), out);
      return;
    case K::Not:
      out += '~';
      print_paren(f.sub(), level(f.sub()) < 3, out);
      return;
    case K::And:
      print_paren(f.left(), level(f.left()) <= 2, out);
      out += " & ";
      print_paren(f.right(), level(f.right()) < 2, out);
      return;
    case K::Or:
      print_paren(f.left(), level(f.left()) <= 1, out);
      out += " | ";
      print(f.right(), out);
      return;
    case K::Hat:
    case K::Know:
      out += f.is(K::Hat) ? "hK_" : "K_";
      out += f.agent();
      out += ' ';
      print_paren(f.sub(), level(f.sub()) < 3, out);
      return;
    case K::Dia:
    case K::Box:
      out += f.is(K::Dia) ? '<' : '[';
      out += f.program().str();
      out += f.is(K::Dia) ? '>' : ']';
      print_paren(f.sub(), level(f.sub()) < 3, out);
      return;
  }
}

}  // namespace

std::string print_formula(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

// ------------------------------------------------------------------- Parser

namespace {

using detail::Lexer;
using detail::Tok;

Formula parse_or(Lexer& lex);

Formula parse_unary(Lexer& lex) {
  const auto& t = lex.peek();
  switch (t.kind) {
    case Tok::Tilde:
      lex.take();
      return Formula::neg(parse_unary(lex));
    case Tok::LParen: {
      lex.take();
      Formula f = parse_or(lex);
      lex.expect(Tok::RParen, "')'");
      return f;
    }
    case Tok::Lt: {
      lex.take();
      Regex r = detail::parse_regex_expr(lex);
      lex.expect(Tok::Gt, "'>'");
      return Formula::dia(std::move(r), parse_unary(lex));
    }
    case Tok::LBrack: {
      lex.take();
      Regex r = detail::parse_regex_expr(lex);
      lex.expect(Tok::RBrack, "']'");
      return Formula::box(std::move(r), parse_unary(lex));
    }
    case Tok::Quoted:
      return Formula::prop(lex.take().text);
    case Tok::Ident: {
      const std::string& s = t.text;
      if (s == "true") {
        lex.take();
        return Formula::top();
      }
      if (s == "false") {
        lex.take();
        return Formula::falsum();
      }
      for (const char* pre : {"hK_", "K_"}) {
        std::string_view p(pre);
        if (s.size() >= p.size() && s.compare(0, p.size(), p) == 0) {
          if (s.size() == p.size()) lex.fail("missing agent name");
          std::string agent = s.substr(p.size());
          bool hat = p.size() == 3;
          lex.take();
          Formula body = parse_unary(lex);
          return hat ? Formula::hat(std::move(agent), std::move(body))
                     : Formula::know(std::move(agent), std::move(body));
        }
      }
      return Formula::prop(lex.take().text);
    }
    default:
      lex.fail("expected formula");
  }
}

Formula parse_and(Lexer& lex) {
  Formula f = parse_unary(lex);
  if (lex.accept(Tok::Amp)) return Formula::conj(std::move(f), parse_and(lex));
  return f;
}

Formula parse_or(Lexer& lex) {
  Formula f = parse_and(lex);
  if (lex.accept(Tok::Bar)) return Formula::disj(std::move(f), parse_or(lex));
  return f;
}

}  // namespace

Formula parse_formula(std::string_view text) {
  Lexer lex(text);
  Formula f = parse_or(lex);
  if (lex.peek().kind != Tok::End) lex.fail("trailing input after formula");
  return f;
}

// ------------------------------------------------------------------ Queries

namespace {

void walk(const Formula& f, const std::function<void(const Formula&)>& visit) {
  visit(f);
  switch (f.kind()) {
    case Formula::Kind::Top:
    case Formula::Kind::Prop:
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      walk(f.left(), visit);
      walk(f.right(), visit);
      return;
    default:
      walk(f.sub(), visit);
  }
}

}  // namespace

std::set<std::string> props_of(const Formula& f) {
  std::set<std::string> out;
  walk(f, [&](const Formula& g) {
    if (g.is(Formula::Kind::Prop)) out.insert(g.name());
  });
  return out;
}

std::set<std::string> agents_of(const Formula& f) {
  std::set<std::string> out;
  walk(f, [&](const Formula& g) {
    if (g.is(Formula::Kind::Hat) || g.is(Formula::Kind::Know)) out.insert(g.agent());
  });
  return out;
}

std::set<std::string> symbols_of(const Formula& f) {
  std::set<std::string> out;
  walk(f, [&](const Formula& g) {
    if (g.is(Formula::Kind::Dia) || g.is(Formula::Kind::Box)) {
      auto s = symbols_of(g.program());
      out.insert(s.begin(), s.end());
    }
  });
  return out;
}

std::size_t modal_depth(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Top:
    case Formula::Kind::Prop:
      return 0;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      return std::max(modal_depth(f.left()), modal_depth(f.right()));
    case Formula::Kind::Not:
      return modal_depth(f.sub());
    default:
      return 1 + modal_depth(f.sub());
  }
}

void require_vocabulary(const Formula& f, const std::set<std::string>& agents,
                        const Alphabet& sigma) {
  for (const auto& a : agents_of(f))
    if (!agents.count(a)) throw Error(ErrorKind::UnknownAgent, "unknown agent '" + a + "'");
  for (const auto& s : symbols_of(f)) sigma.require(s);
}

// ------------------------------------------------------------------ Closure

std::vector<Formula> fl_successors(const Formula& f) {
  using K = Formula::Kind;
  using RK = Regex::Kind;
  std::vector<Formula> out;
  if (!f.is(K::Not)) out.push_back(Formula::neg(f));
  switch (f.kind()) {
    case K::Top:
    case K::Prop:
      break;
    case K::And:
    case K::Or:
      out.push_back(f.left());
      out.push_back(f.right());
      break;
    case K::Not:
    case K::Hat:
    case K::Know:
      out.push_back(f.sub());
      break;
    case K::Dia:
    case K::Box: {
      out.push_back(f.sub());
      const bool dia = f.is(K::Dia);
      auto mod = [dia](const Regex& r, Formula g) {
        return dia ? Formula::dia(r, std::move(g)) : Formula::box(r, std::move(g));
      };
      const Regex& pi = f.program();
      switch (pi.kind()) {
        case RK::Concat:
          out.push_back(mod(pi.left(), mod(pi.right(), f.sub())));
          break;
        case RK::Sum: {
          auto ops = pi.operands();
          out.push_back(mod(ops[0], f.sub()));
          if (ops.size() == 2) {
            out.push_back(mod(ops[1], f.sub()));
          } else {
            out.push_back(mod(make_sum(std::vector<Regex>(ops.begin() + 1, ops.end())), f.sub()));
          }
          break;
        }
        case RK::Star:
          out.push_back(mod(pi.body(), f));
          break;
        case RK::Epsilon:
          // epsilon is the star of the empty expression
          out.push_back(mod(Regex::empty(), f));
          break;
        case RK::Empty:
        case RK::Atom:
          break;
      }
      break;
    }
  }
  return out;
}

FlClosure::FlClosure(const Formula& base) : base_(base) {
  std::deque<std::size_t> work;
  auto add = [&](const Formula& g) {
    if (index_.emplace(g, members_.size()).second) {
      members_.push_back(g);
      work.push_back(members_.size() - 1);
    }
  };
  add(base);
  while (!work.empty()) {
    std::size_t i = work.front();
    work.pop_front();
    Formula g = members_[i];
    for (const auto& h : fl_successors(g)) add(h);
  }
}

std::size_t FlClosure::index_of(const Formula& f) const {
  auto it = index_.find(f);
  return it == index_.end() ? npos : it->second;
}

FlClosure fl_closure(const Formula& f) { return FlClosure(f); }

}  // namespace pol

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "pol/bts.hpp"
#include "pol/dpdl.hpp"
#include "pol/error.hpp"
#include "pol/filtration.hpp"
#include "pol/io.hpp"
#include "pol/lowerbound.hpp"
#include "pol/model.hpp"

using namespace pol;
using Json = nlohmann::ordered_json;

namespace {

enum Exit : int { kTrue = 0, kFalse = 1, kUnknown = 2, kUsage = 64, kDataErr = 65, kResource = 70 };

struct Global {
  bool json = false;
  std::uint64_t seed = 0;
};

// Collects a JSON document and a human rendering; prints one of them.
class Out {
 public:
  Out(const Global& g, const std::string& command) : g_(g) {
    j_["schema"] = kSchema;
    j_["command"] = command;
  }
  Json& json() { return j_; }
  std::ostream& text() { return text_; }
  void flush() const {
    if (g_.json)
      std::cout << j_.dump(2) << '\n';
    else
      std::cout << text_.str();
  }

 private:
  const Global& g_;
  Json j_;
  std::ostringstream text_;
};

// "ba" is read letter by letter; "s,p,c" or "s p c" splits on the separator.
Word parse_word(const std::string& s) {
  Word w;
  if (s.find_first_of(", ") == std::string::npos) {
    for (char c : s) w.emplace_back(1, c);
    return w;
  }
  std::string cur;
  for (char c : s + ",") {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) w.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return w;
}

std::string show_word(const Word& w) {
  if (w.empty()) return "(empty word)";
  std::string s;
  for (const auto& a : w) s += (s.empty() ? "" : ",") + a;
  return s;
}

const char* kind_name(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Top: return "true";
    case Formula::Kind::Prop: return "prop";
    case Formula::Kind::Not: return "not";
    case Formula::Kind::And: return "and";
    case Formula::Kind::Or: return "or";
    case Formula::Kind::Hat: return "hat";
    case Formula::Kind::Know: return "know";
    case Formula::Kind::Dia: return "dia";
    case Formula::Kind::Box: return "box";
  }
  return "?";
}

Json ast(const Formula& f) {
  Json j;
  j["kind"] = kind_name(f.kind());
  switch (f.kind()) {
    case Formula::Kind::Top:
      break;
    case Formula::Kind::Prop:
      j["name"] = f.name();
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      j["left"] = ast(f.left());
      j["right"] = ast(f.right());
      break;
    case Formula::Kind::Hat:
    case Formula::Kind::Know:
      j["agent"] = f.agent();
      j["sub"] = ast(f.sub());
      break;
    case Formula::Kind::Dia:
    case Formula::Kind::Box:
      j["program"] = f.program().str();
      j["sub"] = ast(f.sub());
      break;
    case Formula::Kind::Not:
      j["sub"] = ast(f.sub());
      break;
  }
  return j;
}

void tree(std::ostream& os, const Formula& f, int indent) {
  os << std::string(indent, ' ') << kind_name(f.kind());
  switch (f.kind()) {
    case Formula::Kind::Prop: os << ' ' << f.name(); break;
    case Formula::Kind::Hat:
    case Formula::Kind::Know: os << ' ' << f.agent(); break;
    case Formula::Kind::Dia:
    case Formula::Kind::Box: os << ' ' << f.program().str(); break;
    default: break;
  }
  os << '\n';
  switch (f.kind()) {
    case Formula::Kind::Top:
    case Formula::Kind::Prop:
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      tree(os, f.left(), indent + 2);
      tree(os, f.right(), indent + 2);
      return;
    default:
      tree(os, f.sub(), indent + 2);
  }
}

// Diamonds reachable from the root through boolean connectives only.
void top_diamonds(const Formula& f, std::vector<Formula>& out) {
  switch (f.kind()) {
    case Formula::Kind::Dia:
      out.push_back(f);
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      top_diamonds(f.left(), out);
      top_diamonds(f.right(), out);
      return;
    case Formula::Kind::Not:
      top_diamonds(f.sub(), out);
      return;
    default:
      return;
  }
}

LabelBudget parse_labels(const std::string& s, const Formula& phi) {
  if (s == "full") return LabelBudget::full_for(phi);
  std::uint64_t v = 0;
  try {
    std::size_t used = 0;
    v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw Error(ErrorKind::BudgetInvalid, "--labels must be a positive integer or 'full', got '" + s + "'");
  }
  return LabelBudget::of(v);
}

Json model_json(const PolModel& m) { return Json::parse(model_to_json(m)); }

int sat_exit(SatStatus s, bool exhausted) {
  if (s == SatStatus::Sat) return kTrue;
  if (s == SatStatus::Unsat) return kFalse;
  return exhausted ? kResource : kUnknown;
}

int error_exit(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::BudgetInvalid:
      return kUsage;
    case ErrorKind::ResourceExceeded:
    case ErrorKind::ClosureTooLarge:
    case ErrorKind::SpaceBoundTooLarge:
      return kResource;
    case ErrorKind::NotABts:
      return kFalse;
    default:
      return kDataErr;
  }
}

struct Args {
  std::string formula, regex, word, model, state, bts, labels = "full", backend = "dpdl", machine, input, out,
      rep = "least";
  std::size_t max_states = 2, pool = kDefaultPoolSize, graph_budget = ResiduationGraph::kDefaultBudget,
              bdd_cap = DpdlSatOptions{}.bdd_node_cap, witness_cap = DpdlSatOptions{}.witness_state_cap,
              tree_depth = 0, max_bits = kMaxPositionBits, trials = 500;
  std::uint64_t max_nodes = kDefaultTranslationCap;
  bool trace = false;
};

using Handler = std::function<int(Out&)>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toolkit for public observation logic: model checking, filtration, "
               "satisfiability via DPDL and the hardness reduction."};
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  Global g;
  Args a;
  bool version = false, formats = false;
  app.add_flag("--json", g.json, "Machine-readable JSON on stdout");
  app.add_option("--seed", g.seed, "Seed for randomized subcommands (default 0)");
  app.add_flag("--version", version, "Print the version and schema");
  app.add_flag("--formats", formats, "Print the supported file formats");
  app.require_subcommand(0, 1);

  std::map<CLI::App*, Handler> handlers;
  auto sub = [&](const char* name, const char* help, Handler h) {
    auto* s = app.add_subcommand(name, help);
    handlers[s] = std::move(h);
    return s;
  };
  auto formula_opt = [&](CLI::App* s) { s->add_option("-f,--formula", a.formula, "Formula text")->required(); };
  auto model_opt = [&](CLI::App* s) {
    s->add_option("-m,--model", a.model, "Model JSON file")->required()->check(CLI::ExistingFile);
  };
  auto budget_opt = [&](CLI::App* s) {
    s->add_option("--graph-budget", a.graph_budget, "Residuation graph node budget")->capture_default_str();
  };
  auto dpdl_opts = [&](CLI::App* s) {
    s->add_option("--bdd-cap", a.bdd_cap, "BDD node budget")->capture_default_str();
    s->add_option("--witness-cap", a.witness_cap, "Witness state budget")->capture_default_str();
  };
  auto dpdl_options = [&] { return DpdlSatOptions{a.bdd_cap, a.witness_cap}; };

  auto* parse = sub("parse", "Parse a formula and dump its syntax tree", [&](Out& o) {
    auto f = parse_formula(a.formula);
    o.json()["formula"] = f.str();
    o.json()["size"] = f.size();
    o.json()["ast"] = ast(f);
    o.text() << f.str() << "\nsize " << f.size() << '\n';
    tree(o.text(), f, 0);
    return kTrue;
  });
  formula_opt(parse);

  auto* fl = sub("fl", "List the closure of a formula", [&](Out& o) {
    FlClosure c(parse_formula(a.formula));
    o.json()["size"] = c.size();
    o.json()["members"] = Json::array();
    for (const auto& m : c.members()) {
      o.json()["members"].push_back(m.str());
      o.text() << m.str() << '\n';
    }
    return kTrue;
  });
  formula_opt(fl);

  auto* residuate_cmd = sub("residuate", "Residuate a regular expression by a word", [&](Out& o) {
    auto r = parse_regex(a.regex);
    auto w = parse_word(a.word);
    auto res = residuate(r, w);
    o.json()["regex"] = r.str();
    o.json()["word"] = w;
    o.json()["result"] = res.str();
    o.json()["empty"] = is_empty_language(res);
    o.text() << res.str() << '\n';
    return kTrue;
  });
  residuate_cmd->add_option("-r,--regex", a.regex, "Regular expression")->required();
  residuate_cmd->add_option("-w,--word", a.word, "Word: letters, or symbols separated by ','")->required();

  auto* update_cmd = sub("update", "Update a model by an observed word", [&](Out& o) {
    auto m = model_from_json(read_file(a.model));
    auto w = parse_word(a.word);
    m.alphabet.require(w);
    auto r = update_word(m, w);
    o.json()["word"] = w;
    if (!r) {
      o.json()["dead"] = true;
      o.text() << "DEAD\n";
      return kFalse;
    }
    o.json()["dead"] = false;
    o.json()["model"] = model_json(*r);
    o.text() << model_to_json(*r) << '\n';
    return kTrue;
  });
  model_opt(update_cmd);
  update_cmd->add_option("-w,--word", a.word, "Word: letters, or symbols separated by ','")->required();

  auto* check_cmd = sub("check", "Model check a formula at a state", [&](Out& o) {
    auto m = model_from_json(read_file(a.model));
    auto f = parse_formula(a.formula);
    ModelChecker mc(m, a.graph_budget);
    const bool v = mc.check(a.state, f);
    o.json()["state"] = a.state;
    o.json()["formula"] = f.str();
    o.json()["verdict"] = v;
    o.text() << (v ? "true" : "false") << '\n';
    if (a.trace) {
      std::vector<Formula> dias;
      top_diamonds(f, dias);
      o.json()["trace"] = Json::array();
      for (const auto& d : dias) {
        Json t{{"diamond", d.str()}};
        auto w = mc.check(a.state, d) ? mc.witness(m.state_index(a.state), d) : std::nullopt;
        t["witness"] = w ? Json(*w) : Json(nullptr);
        o.json()["trace"].push_back(t);
        o.text() << "  " << d.str() << ": " << (w ? show_word(*w) : "false") << '\n';
      }
    }
    return v ? kTrue : kFalse;
  });
  model_opt(check_cmd);
  check_cmd->add_option("-s,--state", a.state, "State id")->required();
  formula_opt(check_cmd);
  check_cmd->add_flag("--trace", a.trace, "Print a witness word for each top-level diamond");
  budget_opt(check_cmd);

  auto* filtrate_cmd = sub("filtrate", "Filtrate a model through the closure of a formula", [&](Out& o) {
    auto m = model_from_json(read_file(a.model));
    auto f = parse_formula(a.formula);
    auto r = filtrate(m, f, a.rep == "greatest" ? Representative::Greatest : Representative::Least);
    Json cls = Json::object();
    for (std::size_t s = 0; s < m.states.size(); ++s) cls[m.states[s].id] = r.model.states[r.class_of[s]].id;
    o.json()["classes"] = r.model.states.size();
    o.json()["class_of"] = cls;
    o.json()["model"] = model_json(r.model);
    o.text() << r.model.states.size() << " classes\n";
    for (auto it = cls.begin(); it != cls.end(); ++it)
      o.text() << "  " << it.key() << " -> " << it->get<std::string>() << '\n';
    o.text() << model_to_json(r.model) << '\n';
    return kTrue;
  });
  model_opt(filtrate_cmd);
  formula_opt(filtrate_cmd);
  filtrate_cmd->add_option("--rep", a.rep, "Class representative: least or greatest")
      ->check(CLI::IsMember({"least", "greatest"}))
      ->capture_default_str();

  auto bts_opt = [&](CLI::App* s) {
    s->add_option("-b,--bts", a.bts, "BTS JSON file")->required()->check(CLI::ExistingFile);
  };
  auto* bts_verify = sub("bts-verify", "Validate a bubble transition structure", [&](Out& o) {
    auto t = bts_from_json(read_file(a.bts));
    auto v = is_bts(t);
    o.json()["valid"] = v.ok;
    if (!v) o.json()["violation"] = v.violation;
    o.text() << (v ? "valid" : "invalid: " + v.violation) << '\n';
    return v ? kTrue : kFalse;
  });
  bts_opt(bts_verify);

  auto* bts_extract = sub("bts-extract", "Extract a model from a bubble transition structure", [&](Out& o) {
    auto ex = extract_model(bts_from_json(read_file(a.bts)));
    o.json()["pointed"] = ex.pointed;
    o.json()["model"] = model_json(ex.model);
    o.text() << "pointed state " << ex.pointed << '\n' << model_to_json(ex.model) << '\n';
    return kTrue;
  });
  bts_opt(bts_extract);

  auto* translate_cmd = sub("translate", "Translate a formula to DPDL at a label budget", [&](Out& o) {
    auto f = parse_formula(a.formula);
    auto budget = parse_labels(a.labels, f);
    auto tr = translate(f, budget, a.max_nodes);
    o.json()["labels"] = budget.labels;
    o.json()["full"] = budget.full;
    o.json()["size"] = tr.size();
    o.json()["formula"] = tr.str();
    o.text() << tr.str() << '\n';
    return kTrue;
  });
  formula_opt(translate_cmd);
  translate_cmd->add_option("--labels", a.labels, "Label budget: a number or 'full'")->capture_default_str();
  translate_cmd->add_option("--max-nodes", a.max_nodes, "Output size budget")->capture_default_str();

  auto* dpdl_cmd = sub("dpdl-sat", "Decide a deterministic PDL formula", [&](Out& o) {
    auto f = parse_formula(a.formula);
    auto r = dpdl_sat(f, dpdl_options());
    o.json()["verdict"] = to_string(r.status);
    o.text() << to_string(r.status) << '\n';
    if (r.witness) {
      o.json()["state"] = r.state;
      o.json()["witness"] = Json::parse(dpdl_model_to_json(*r.witness));
      o.text() << "at state " << r.state << '\n' << dpdl_model_to_json(*r.witness) << '\n';
    }
    if (!r.reason.empty()) {
      o.json()["reason"] = r.reason;
      o.text() << r.reason << '\n';
    }
    return sat_exit(r.status, r.exhausted);
  });
  formula_opt(dpdl_cmd);
  dpdl_opts(dpdl_cmd);

  auto* sat_cmd = sub("sat", "Decide a POL formula", [&](Out& o) {
    auto f = parse_formula(a.formula);
    PolSatResult r;
    if (a.backend == "bounded") {
      auto syms = symbols_of(f);
      if (syms.empty()) syms.insert("a");
      auto pool = default_regex_pool(Alphabet(std::vector<std::string>(syms.begin(), syms.end())), a.pool);
      r = pol_bounded_sat(f, a.max_states, pool);
      o.json()["max_states"] = a.max_states;
    } else {
      r = pol_sat(f, parse_labels(a.labels, f), dpdl_options());
      o.json()["labels"] = r.budget.labels;
      o.json()["full"] = r.budget.full;
    }
    o.json()["backend"] = a.backend;
    o.json()["verdict"] = to_string(r.status);
    o.text() << to_string(r.status) << '\n';
    if (r.witness) {
      o.json()["state"] = r.state;
      o.json()["witness"] = model_json(*r.witness);
      o.text() << "at state " << r.state << '\n' << model_to_json(*r.witness) << '\n';
    }
    if (!r.reason.empty()) {
      o.json()["reason"] = r.reason;
      o.text() << r.reason << '\n';
    }
    return sat_exit(r.status, r.exhausted);
  });
  formula_opt(sat_cmd);
  sat_cmd->add_option("--labels", a.labels, "Label budget: a number or 'full'")->capture_default_str();
  sat_cmd->add_option("--backend", a.backend, "dpdl (translation) or bounded (small models)")
      ->check(CLI::IsMember({"dpdl", "bounded"}))
      ->capture_default_str();
  sat_cmd->add_option("--max-states", a.max_states, "States for the bounded backend")->capture_default_str();
  sat_cmd->add_option("--pool", a.pool, "Expectation pool size for the bounded backend")->capture_default_str();
  dpdl_opts(sat_cmd);

  auto* validity_cmd = sub("validity", "Search random models for a counterexample", [&](Out& o) {
    auto f = parse_formula(a.formula);
    auto r = validity_sample(f, a.trials, RandomModelShape{}, g.seed);
    o.json()["seed"] = g.seed;
    o.json()["trials"] = r.trials;
    o.json()["valid"] = r.valid;
    o.text() << (r.valid ? "no counterexample" : "counterexample") << " after " << r.trials << " models\n";
    if (r.model) {
      o.json()["state"] = r.state;
      o.json()["model"] = model_json(*r.model);
      o.text() << "at state " << r.state << '\n' << model_to_json(*r.model) << '\n';
    }
    return r.valid ? kTrue : kFalse;
  });
  formula_opt(validity_cmd);
  validity_cmd->add_option("--trials", a.trials, "Number of random models")->capture_default_str();

  auto* gen_cmd = sub("gen-atm", "Generate the hardness formula for a machine and input", [&](Out& o) {
    auto m = atm_from_json(read_file(a.machine));
    auto t = symbol_table(m, a.input.size(), a.max_bits);
    auto f = generate(m, a.input, GenerateOptions{a.tree_depth, a.max_bits});
    const std::string text = f.str();
    if (!a.out.empty()) {
      std::ofstream os(a.out);
      if (!os) throw Error(ErrorKind::Format, "cannot write " + a.out);
      os << text << '\n';
    }
    o.json()["input"] = a.input;
    o.json()["space"] = t.space;
    o.json()["bits"] = t.n;
    o.json()["size"] = f.size();
    if (a.out.empty())
      o.json()["formula"] = text;
    else
      o.json()["out"] = a.out;
    if (a.out.empty())
      o.text() << text << '\n';
    else
      o.text() << "wrote " << a.out << ": size " << f.size() << ", " << t.n << " position bits\n";
    return kTrue;
  });
  gen_cmd->add_option("--machine", a.machine, "Machine JSON file")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--input", a.input, "Input word over 0 and 1")->required();
  gen_cmd->add_option("--out", a.out, "Output file (stdout when omitted)");
  gen_cmd->add_option("--tree-depth", a.tree_depth, "Branching depth (0 means 3n)")->capture_default_str();
  gen_cmd->add_option("--max-bits", a.max_bits, "Cap on position bits")->capture_default_str();


  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  if (version) {
    std::cout << "pol " << POL_VERSION << " (schema " << kSchema << ")\n";
    return kTrue;
  }
  if (formats) {
    Json j{{"schema", kSchema},
           {"formats", {"model", "bts", "dpdl-model", "atm"}},
           {"formula", "text syntax accepted by parse"}};
    if (g.json)
      std::cout << j.dump(2) << '\n';
    else
      std::cout << "schema " << kSchema << "\nformats: model, bts, dpdl-model, atm\n";
    return kTrue;
  }
  auto subs = app.get_subcommands();
  if (subs.empty()) {
    std::cerr << app.help();
    return kUsage;
  }
  Out out(g, subs.front()->get_name());
  try {
    const int rc = handlers.at(subs.front())(out);
    out.flush();
    return rc;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const int rc = error_exit(e);
    if (rc == kResource || rc == kFalse) {
      out.json()["verdict"] = rc == kResource ? "UNKNOWN" : "INVALID";
      out.json()["reason"] = e.what();
      if (g.json) out.flush();
    }
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataErr;
  }
}

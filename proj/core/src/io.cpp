#include "pol/io.hpp"

#include <fstream>
#include <algorithm>
#include <sstream>

#include "io_internal.hpp"
#include "pol/error.hpp"

namespace pol {

namespace detail {

Json parse_json(std::string_view text) {
  try {
    Json j = Json::parse(text.begin(), text.end());
    if (!j.is_object()) throw Error(ErrorKind::Format, "top-level JSON value must be an object");
    if (j.contains("schema") && j["schema"] != kSchema)
      throw Error(ErrorKind::Format, "unsupported schema " + j["schema"].dump());
    return j;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Format, std::string("malformed JSON: ") + e.what());
  }
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name))
    throw Error(ErrorKind::Format, std::string("missing field '") + name + "'");
  return j[name];
}

std::string str(const Json& j, const char* what) {
  if (!j.is_string()) throw Error(ErrorKind::Format, std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::vector<std::string> strings(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::Format, std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(str(e, what));
  return out;
}

Json relations_json(const std::vector<std::string>& agents, const std::vector<std::string>& ids,
                    const std::vector<std::vector<std::size_t>>& cls) {
  Json rel = Json::object();
  for (std::size_t a = 0; a < agents.size(); ++a) {
    std::map<std::size_t, std::vector<std::string>> groups;
    for (std::size_t s = 0; s < ids.size(); ++s) groups[cls[a][s]].push_back(ids[s]);
    Json parts = Json::array();
    for (auto& [rep, g] : groups) parts.push_back(g);
    rel[agents[a]] = parts;
  }
  return rel;
}

std::vector<std::vector<std::size_t>> read_partition(
    const Json& parts, const std::string& agent,
    const std::function<std::size_t(const std::string&)>& index) {
  if (!parts.is_array())
    throw Error(ErrorKind::Format, "relation of agent " + agent + " must be a list of classes");
  std::vector<std::vector<std::size_t>> groups;
  for (const auto& g : parts) {
    std::vector<std::size_t> grp;
    for (const auto& id : strings(g, "relation class")) grp.push_back(index(id));
    groups.push_back(std::move(grp));
  }
  return groups;
}

}  // namespace detail

using detail::field;
using detail::Json;

PolModel model_from_json(std::string_view text) {
  Json j = detail::parse_json(text);
  PolModel m;
  try {
    m.alphabet = Alphabet(detail::strings(field(j, "alphabet"), "alphabet"));
  } catch (const Error& e) {
    throw Error(ErrorKind::Format, e.what());
  }
  m.agents = detail::strings(field(j, "agents"), "agents");
  const Json& states = field(j, "states");
  if (!states.is_array() || states.empty())
    throw Error(ErrorKind::Format, "states must be a nonempty array");
  for (const auto& s : states) {
    PolState st;
    st.id = detail::str(field(s, "id"), "state id");
    if (s.contains("props")) {
      auto ps = detail::strings(s["props"], "props");
      st.props.insert(ps.begin(), ps.end());
    }
    st.exp = s.contains("exp") ? parse_regex(detail::str(s["exp"], "exp"), m.alphabet)
                               : Regex::epsilon();
    m.states.push_back(std::move(st));
  }
  m.reset_relations();
  auto index = [&](const std::string& id) {
    auto i = m.find_state(id);
    if (!i) throw Error(ErrorKind::UnknownState, "relation mentions unknown state '" + id + "'");
    return *i;
  };
  if (j.contains("relations")) {
    const Json& rel = j["relations"];
    if (!rel.is_object()) throw Error(ErrorKind::Format, "relations must be an object");
    for (auto it = rel.begin(); it != rel.end(); ++it) {
      std::size_t a = m.agent_index(it.key());
      m.set_partition(a, detail::read_partition(it.value(), it.key(), index));
    }
  }
  m.validate();
  return m;
}

std::string model_to_json(const PolModel& m, int indent) {
  return detail::model_json(m).dump(indent);
}

namespace detail {

Json model_json(const PolModel& m) {
  Json j;
  j["schema"] = kSchema;
  j["alphabet"] = m.alphabet.symbols();
  j["agents"] = m.agents;
  Json states = Json::array();
  std::vector<std::string> ids;
  for (const auto& s : m.states) {
    Json js;
    js["id"] = s.id;
    js["props"] = std::vector<std::string>(s.props.begin(), s.props.end());
    js["exp"] = s.exp.str();
    states.push_back(js);
    ids.push_back(s.id);
  }
  j["states"] = states;
  j["relations"] = relations_json(m.agents, ids, m.cls);
  return j;
}

}  // namespace detail

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Format, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pol

namespace pol {

Bts bts_from_json(std::string_view text) {
  using detail::strings;
  Json j = detail::parse_json(text);
  Bts t;
  t.formula = parse_formula(detail::str(field(j, "formula"), "formula"));
  t.closure = std::make_shared<FlClosure>(t.formula);
  const Json& bubbles = field(j, "bubbles");
  const Json& delta = j.contains("delta") ? j["delta"] : Json::object();
  if (!bubbles.is_array()) throw Error(ErrorKind::Format, "bubbles must be an array");
  if (!delta.is_object()) throw Error(ErrorKind::Format, "delta must be an object");

  std::set<std::string> syms = symbols_of(t.formula);
  for (auto it = delta.begin(); it != delta.end(); ++it) {
    if (!it.value().is_object()) throw Error(ErrorKind::Format, "delta rows must be objects");
    for (auto e = it.value().begin(); e != it.value().end(); ++e) syms.insert(e.key());
  }
  if (j.contains("alphabet")) {
    t.alphabet = Alphabet(strings(j["alphabet"], "alphabet"));
    for (const auto& s : syms) t.alphabet.require(s);
  } else {
    t.alphabet = Alphabet(std::vector<std::string>(syms.begin(), syms.end()));
  }
  std::set<std::string> ags = agents_of(t.formula);
  for (const auto& b : bubbles)
    if (b.contains("relations"))
      for (auto it = b["relations"].begin(); it != b["relations"].end(); ++it) ags.insert(it.key());
  if (j.contains("agents")) {
    t.agents = strings(j["agents"], "agents");
    for (const auto& a : ags)
      if (std::find(t.agents.begin(), t.agents.end(), a) == t.agents.end())
        throw Error(ErrorKind::UnknownAgent, "unknown agent '" + a + "'");
  } else {
    t.agents.assign(ags.begin(), ags.end());
  }

  std::map<std::string, std::size_t> ids;
  for (const auto& jb : bubbles) {
    Bubble b;
    b.id = detail::str(field(jb, "id"), "bubble id");
    if (!ids.emplace(b.id, t.bubbles.size()).second)
      throw Error(ErrorKind::Format, "duplicate bubble id '" + b.id + "'");
    for (const auto& js : field(jb, "states")) {
      b.states.push_back(detail::str(field(js, "id"), "state id"));
      std::vector<Formula> fs;
      for (const auto& text : strings(field(js, "label"), "label")) fs.push_back(parse_formula(text));
      try {
        b.labels.push_back(label_of(t.fl(), fs));
      } catch (const Error& e) {
        throw Error(ErrorKind::NotABts, std::string("condition 2 of bubbles: ") + e.what());
      }
    }
    PolModel shape;  // reuse partition parsing
    shape.agents = t.agents;
    for (const auto& s : b.states) shape.states.push_back({s, {}, Regex::epsilon()});
    shape.reset_relations();
    auto index = [&](const std::string& id) {
      auto i = shape.find_state(id);
      if (!i) throw Error(ErrorKind::UnknownState, "relation mentions unknown state '" + id + "'");
      return *i;
    };
    if (jb.contains("relations"))
      for (auto it = jb["relations"].begin(); it != jb["relations"].end(); ++it)
        shape.set_partition(shape.agent_index(it.key()),
                            detail::read_partition(it.value(), it.key(), index));
    shape.validate();
    b.cls = shape.cls;
    t.bubbles.push_back(std::move(b));
  }
  auto bubble = [&](const std::string& id) {
    auto it = ids.find(id);
    if (it == ids.end()) throw Error(ErrorKind::Format, "unknown bubble '" + id + "'");
    return it->second;
  };
  t.delta.assign(t.bubbles.size(), std::vector<std::optional<std::size_t>>(t.alphabet.size()));
  for (auto it = delta.begin(); it != delta.end(); ++it) {
    std::size_t from = bubble(it.key());
    for (auto e = it.value().begin(); e != it.value().end(); ++e) {
      if (e.value().is_null()) continue;
      t.delta[from][*t.alphabet.index(e.key())] = bubble(detail::str(e.value(), "delta target"));
    }
  }
  t.initial = j.contains("initial") ? bubble(detail::str(j["initial"], "initial"))
                                    : std::size_t{0};
  return t;
}

namespace detail {

Json bts_json(const Bts& t) {
  Json j;
  j["schema"] = kSchema;
  j["formula"] = t.formula.str();
  j["alphabet"] = t.alphabet.symbols();
  j["agents"] = t.agents;
  Json bubbles = Json::array();
  for (const auto& b : t.bubbles) {
    Json jb;
    jb["id"] = b.id;
    Json states = Json::array();
    for (std::size_t s = 0; s < b.states.size(); ++s) {
      Json js;
      js["id"] = b.states[s];
      Json label = Json::array();
      for (const auto& f : formulas_of(t.fl(), b.labels[s])) label.push_back(f.str());
      js["label"] = label;
      states.push_back(js);
    }
    jb["states"] = states;
    jb["relations"] = relations_json(t.agents, b.states, b.cls);
    bubbles.push_back(jb);
  }
  j["bubbles"] = bubbles;
  Json delta = Json::object();
  for (std::size_t b = 0; b < t.bubbles.size(); ++b) {
    Json row = Json::object();
    for (std::size_t a = 0; a < t.alphabet.size(); ++a) {
      const auto& d = t.delta[b][a];
      row[t.alphabet.symbols()[a]] = d ? Json(t.bubbles[*d].id) : Json(nullptr);
    }
    delta[t.bubbles[b].id] = row;
  }
  j["delta"] = delta;
  j["initial"] = t.bubbles.empty() ? Json(nullptr) : Json(t.bubbles[t.initial].id);
  return j;
}

}  // namespace detail

std::string bts_to_json(const Bts& t, int indent) { return detail::bts_json(t).dump(indent); }

}  // namespace pol

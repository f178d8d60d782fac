#pragma once

// JSON reading and writing of quotient models.
//
//   { "classes": [{"id": "n0", "faulty": false, "initial": true, "obs": "o0"}, ...],
//     "actions": [{"name": "tick", "kind": "external"}, ...],
//     "edges":   [{"src": "n0", "action": "tick", "dst": "n1"}, ...],
//     "time":    [{"src": "n0", "dst": "n1"}, {"src": "f1", "dst": "f1", "divergent": true}] }
//
// Ids and observables may be strings or non-negative integers. Unknown keys
// are rejected at every level.

#include <fstream>
#include <initializer_list>
#include <iterator>
#include <string>
#include <string_view>

#include "hydiag/error.hpp"
#include "hydiag/quotient_model.hpp"
#include "json.hpp"

namespace hydiag {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(std::string("invalid JSON: ") + e.what(), line, col);
  }
}

inline void require_object(const Json& j, std::string_view where) {
  if (!j.is_object()) throw ParseError(std::string(where) + ": expected an object");
}

inline void require_array(const Json& j, std::string_view where) {
  if (!j.is_array()) throw ParseError(std::string(where) + ": expected an array");
}

inline void check_keys(const Json& j, std::string_view where,
                       std::initializer_list<std::string_view> allowed) {
  require_object(j, where);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ParseError(std::string(where) + ": unknown key '" + it.key() + "'");
  }
}

inline const Json& field(const Json& j, std::string_view where, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError(std::string(where) + ": missing key '" + key + "'");
  return *it;
}

inline std::string name_field(const Json& j, std::string_view where, const char* key) {
  const Json& v = field(j, where, key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return std::to_string(v.get<std::int64_t>());
  throw ParseError(std::string(where) + ": '" + key + "' must be a string or natural number");
}

inline bool bool_field(const Json& j, std::string_view where, const char* key) {
  const Json& v = field(j, where, key);
  if (!v.is_boolean()) throw ParseError(std::string(where) + ": '" + key + "' must be a boolean");
  return v.get<bool>();
}

inline std::string string_field(const Json& j, std::string_view where, const char* key) {
  const Json& v = field(j, where, key);
  if (!v.is_string()) throw ParseError(std::string(where) + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

inline std::string at(std::string_view base, std::size_t i) {
  return std::string(base) + "[" + std::to_string(i) + "]";
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline QuotientModel model_from_json(std::string_view text) {
  using namespace detail;
  const Json root = parse_json(text);
  check_keys(root, "model", {"classes", "actions", "edges", "time"});

  std::vector<ClassInfo> classes;
  std::vector<std::string> observables;
  const Json& jc = field(root, "model", "classes");
  require_array(jc, "classes");
  for (std::size_t i = 0; i < jc.size(); ++i) {
    const auto where = at("classes", i);
    check_keys(jc[i], where, {"id", "faulty", "initial", "obs"});
    ClassInfo ci;
    ci.name = name_field(jc[i], where, "id");
    ci.faulty = bool_field(jc[i], where, "faulty");
    ci.initial = bool_field(jc[i], where, "initial");
    const auto obs = name_field(jc[i], where, "obs");
    auto pos = std::find(observables.begin(), observables.end(), obs);
    if (pos == observables.end()) pos = observables.insert(observables.end(), obs);
    ci.observable = ObservableId{static_cast<std::size_t>(pos - observables.begin())};
    classes.push_back(std::move(ci));
  }

  std::vector<ActionLabel> actions;
  const Json& ja = field(root, "model", "actions");
  require_array(ja, "actions");
  for (std::size_t i = 0; i < ja.size(); ++i) {
    const auto where = at("actions", i);
    check_keys(ja[i], where, {"name", "kind"});
    ActionLabel a;
    a.name = name_field(ja[i], where, "name");
    auto kind = parse_action_kind(string_field(ja[i], where, "kind"));
    if (!kind) throw ParseError(where + ": kind must be external, internal or fault");
    a.kind = *kind;
    actions.push_back(std::move(a));
  }

  auto class_of = [&](const std::string& name, const std::string& where) {
    for (std::size_t k = 0; k < classes.size(); ++k)
      if (classes[k].name == name) return ClassId{k};
    throw ModelError(where + ": unknown class '" + name + "'");
  };
  auto action_of = [&](const std::string& name, const std::string& where) {
    for (std::size_t k = 0; k < actions.size(); ++k)
      if (actions[k].name == name) return ActionId{k};
    throw ModelError(where + ": unknown action '" + name + "'");
  };

  std::vector<DiscreteEdge> edges;
  const Json& je = field(root, "model", "edges");
  require_array(je, "edges");
  for (std::size_t i = 0; i < je.size(); ++i) {
    const auto where = at("edges", i);
    check_keys(je[i], where, {"src", "action", "dst"});
    edges.push_back({class_of(name_field(je[i], where, "src"), where),
                     action_of(name_field(je[i], where, "action"), where),
                     class_of(name_field(je[i], where, "dst"), where)});
  }

  std::vector<TimeEdge> time;
  std::vector<ClassId> divergent;
  const Json& jt = field(root, "model", "time");
  require_array(jt, "time");
  for (std::size_t i = 0; i < jt.size(); ++i) {
    const auto where = at("time", i);
    check_keys(jt[i], where, {"src", "dst", "divergent"});
    TimeEdge t{class_of(name_field(jt[i], where, "src"), where),
               class_of(name_field(jt[i], where, "dst"), where)};
    if (jt[i].contains("divergent") && bool_field(jt[i], where, "divergent")) {
      if (t.src != t.dst) throw ModelError(where + ": only a self-loop can be divergent");
      divergent.push_back(t.src);
    }
    time.push_back(t);
  }
  return QuotientModel(std::move(classes), std::move(actions), std::move(observables),
                       std::move(edges), std::move(time), std::move(divergent));
}

inline QuotientModel load_model(const std::string& path) { return model_from_json(read_file(path)); }

inline Json to_json(const QuotientModel& m) {
  Json root;
  Json classes = Json::array();
  for (const auto& c : m.classes())
    classes.push_back({{"id", c.name},
                       {"faulty", c.faulty},
                       {"initial", c.initial},
                       {"obs", m.vocabulary().name(c.observable)}});
  root["classes"] = std::move(classes);
  Json actions = Json::array();
  for (const auto& a : m.actions())
    actions.push_back({{"name", a.name}, {"kind", std::string(to_string(a.kind))}});
  root["actions"] = std::move(actions);
  Json edges = Json::array();
  for (const auto& e : m.edges())
    edges.push_back({{"src", m.info(e.src).name},
                     {"action", m.action(e.action).name},
                     {"dst", m.info(e.dst).name}});
  root["edges"] = std::move(edges);
  Json time = Json::array();
  for (std::size_t i = 0; i < m.class_count(); ++i) {
    const ClassId c{i};
    if (m.divergent(c))
      time.push_back({{"src", m.info(c).name}, {"dst", m.info(c).name}, {"divergent", true}});
    for (ClassId d : m.time_successors(c))
      if (d != c) time.push_back({{"src", m.info(c).name}, {"dst", m.info(d).name}});
  }
  root["time"] = std::move(time);
  return root;
}

}  // namespace hydiag

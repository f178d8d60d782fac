#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hydiag/hydiag.hpp"

namespace hydiag::test {

inline std::string fixture(const std::string& name) { return std::string(HYDIAG_FIXTURE_DIR) + "/" + name; }

inline QuotientModel load_fixture(const std::string& name) { return load_model(fixture(name)); }

// Compact model construction through the JSON reader.
class ModelBuilder {
 public:
  ModelBuilder& cls(const std::string& name, const std::string& obs, bool faulty = false,
                    bool initial = false) {
    classes_.push_back({{"id", name}, {"faulty", faulty}, {"initial", initial}, {"obs", obs}});
    return *this;
  }
  ModelBuilder& action(const std::string& name, const std::string& kind = "external") {
    actions_.push_back({{"name", name}, {"kind", kind}});
    return *this;
  }
  ModelBuilder& edge(const std::string& src, const std::string& action, const std::string& dst) {
    edges_.push_back({{"src", src}, {"action", action}, {"dst", dst}});
    return *this;
  }
  ModelBuilder& time(const std::string& src, const std::string& dst, bool divergent = false) {
    Json t{{"src", src}, {"dst", dst}};
    if (divergent) t["divergent"] = true;
    time_.push_back(std::move(t));
    return *this;
  }
  Json json() const {
    return {{"classes", classes_}, {"actions", actions_}, {"edges", edges_}, {"time", time_}};
  }
  QuotientModel build() const { return model_from_json(json().dump()); }

 private:
  Json classes_ = Json::array();
  Json actions_ = Json::array();
  Json edges_ = Json::array();
  Json time_ = Json::array();
};

inline ClassId id(const QuotientModel& m, const std::string& name) {
  for (std::size_t i = 0; i < m.class_count(); ++i)
    if (m.info(ClassId{i}).name == name) return ClassId{i};
  throw std::invalid_argument("no class " + name);
}

inline ClassSet set(const QuotientModel& m, std::initializer_list<const char*> names) {
  ClassSet s;
  for (const char* n : names) s.push_back(id(m, n));
  normalize(s);
  return s;
}

inline ActionId act(const QuotientModel& m, const std::string& name) {
  return *m.vocabulary().find_action(name);
}

inline ObservableId obs(const QuotientModel& m, const std::string& name) {
  return *m.vocabulary().find_observable(name);
}

// Builds a trace from alternating names: head, action, obs, action, obs, ...
inline UTrace trace(const Vocabulary& v, std::initializer_list<const char*> words) {
  std::vector<std::string> w(words.begin(), words.end());
  UTrace t{*v.find_observable(w.at(0)), {}};
  for (std::size_t i = 1; i + 1 < w.size(); i += 2)
    t.steps.push_back({*v.find_action(w[i]), *v.find_observable(w[i + 1])});
  return t;
}

// Cycle detection on the subgraph induced by indeterminate estimator states,
// without tracking which faulty member is carried along.
inline bool induced_subgraph_acyclic(const EstimatorGraph& est) {
  graph::Digraph<int> g(est.size());
  auto ind = [&](StateId s) { return est.state(s).classification == Classification::Indeterminate; };
  for (const auto& t : est.transitions())
    if (ind(t.src) && ind(t.dst)) g.add_edge(t.src.index(), t.dst.index(), 0);
  const auto cyc = graph::cyclic_nodes(g);
  return std::find(cyc.begin(), cyc.end(), 1) == cyc.end();
}

// Replays a lasso through the estimator: the cycle must come back to the
// state it starts from and visit only indeterminate states.
inline bool witness_replays(const EstimatorGraph& est, const Lasso& w) {
  const auto pre = est.replay(w.prefix);
  if (pre.empty()) return false;
  auto cur = pre.back();
  const auto start = cur;
  if (w.cycle.steps.empty() || w.cycle.head != w.prefix.last()) return false;
  for (const auto& s : w.cycle.steps) {
    if (est.state(cur).classification != Classification::Indeterminate) return false;
    auto nxt = est.successor(cur, s.action, s.observable);
    if (!nxt) return false;
    cur = *nxt;
  }
  return cur == start;
}

}  // namespace hydiag::test

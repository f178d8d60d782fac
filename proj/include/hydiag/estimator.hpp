#pragma once

// Deterministic state estimator over sets of quotient classes, built by
// subset construction from the minimal initial estimates.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "hydiag/error.hpp"
#include "hydiag/ids.hpp"
#include "hydiag/model_io.hpp"
#include "hydiag/quotient_model.hpp"

namespace hydiag {

enum class Classification { Faulty, NonFaulty, Indeterminate };

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Faulty: return "faulty";
    case Classification::NonFaulty: return "nonfaulty";
    case Classification::Indeterminate: return "indeterminate";
  }
  return "?";
}

inline std::optional<Classification> parse_classification(std::string_view s) {
  if (s == "faulty") return Classification::Faulty;
  if (s == "nonfaulty") return Classification::NonFaulty;
  if (s == "indeterminate") return Classification::Indeterminate;
  return std::nullopt;
}

inline Classification classify(const ClassSet& s, const QuotientModel& m) {
  if (s.empty()) throw std::invalid_argument("classify: empty class set");
  bool any_faulty = false, any_nonfaulty = false;
  for (ClassId c : s) (m.faulty(c) ? any_faulty : any_nonfaulty) = true;
  if (any_faulty && any_nonfaulty) return Classification::Indeterminate;
  return any_faulty ? Classification::Faulty : Classification::NonFaulty;
}

struct EstimatorState {
  ClassSet members;
  Classification classification = Classification::NonFaulty;

  friend bool operator==(const EstimatorState&, const EstimatorState&) = default;
};

// A faulty member of the source state and a faulty member of the target state
// that one transition connects at class level.
struct FaultLink {
  ClassId from;
  ClassId to;

  friend auto operator<=>(const FaultLink&, const FaultLink&) = default;
};

struct EstimatorTransition {
  StateId src;
  ActionId action;
  ObservableId observable;
  StateId dst;
  std::vector<FaultLink> fault_links;
};

class EstimatorGraph {
 public:
  EstimatorGraph(Vocabulary vocab, std::vector<std::string> class_names,
                 std::vector<EstimatorState> states,
                 std::map<ObservableId, StateId> initials,
                 std::vector<EstimatorTransition> transitions)
      : vocab_(std::move(vocab)),
        class_names_(std::move(class_names)),
        states_(std::move(states)),
        initials_(std::move(initials)),
        transitions_(std::move(transitions)) {
    std::sort(transitions_.begin(), transitions_.end(), [](const auto& a, const auto& b) {
      return std::tie(a.src, a.action, a.observable) < std::tie(b.src, b.action, b.observable);
    });
    offset_.assign(states_.size() + 1, 0);
    for (const auto& t : transitions_) {
      if (t.src.index() >= states_.size() || t.dst.index() >= states_.size())
        throw ModelError("estimator transition refers to an unknown state");
      ++offset_[t.src.index() + 1];
    }
    for (std::size_t i = 0; i < states_.size(); ++i) offset_[i + 1] += offset_[i];
  }

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  std::size_t size() const noexcept { return states_.size(); }
  std::span<const EstimatorState> states() const noexcept { return states_; }
  const EstimatorState& state(StateId s) const { return states_.at(s.index()); }
  const std::map<ObservableId, StateId>& initials() const noexcept { return initials_; }
  std::span<const EstimatorTransition> transitions() const noexcept { return transitions_; }

  std::span<const EstimatorTransition> out(StateId s) const {
    return std::span<const EstimatorTransition>(transitions_)
        .subspan(offset_[s.index()], offset_[s.index() + 1] - offset_[s.index()]);
  }

  std::optional<StateId> initial(ObservableId o) const {
    auto it = initials_.find(o);
    if (it == initials_.end()) return std::nullopt;
    return it->second;
  }

  const EstimatorTransition* find(StateId s, ActionId a, ObservableId o) const {
    for (const auto& t : out(s))
      if (t.action == a && t.observable == o) return &t;
    return nullptr;
  }

  std::optional<StateId> successor(StateId s, ActionId a, ObservableId o) const {
    if (const auto* t = find(s, a, o)) return t->dst;
    return std::nullopt;
  }

  // Estimator states visited along `trace`; empty if the trace leaves the
  // reachable fragment.
  std::vector<StateId> replay(const UTrace& trace) const {
    auto cur = initial(trace.head);
    if (!cur) return {};
    std::vector<StateId> path{*cur};
    for (const auto& step : trace.steps) {
      cur = successor(*cur, step.action, step.observable);
      if (!cur) return {};
      path.push_back(*cur);
    }
    return path;
  }

 private:
  Vocabulary vocab_;
  std::vector<std::string> class_names_;
  std::vector<EstimatorState> states_;
  std::map<ObservableId, StateId> initials_;
  std::vector<EstimatorTransition> transitions_;
  std::vector<std::size_t> offset_;
};

inline std::map<ObservableId, EstimatorState> initial_estimates(const QuotientModel& m) {
  std::map<ObservableId, ClassSet> by_obs;
  for (ClassId c : m.initial_classes()) by_obs[m.observable(c)].push_back(c);
  std::map<ObservableId, EstimatorState> out;
  for (auto& [o, s] : by_obs) {
    normalize(s);
    out.emplace(o, EstimatorState{s, classify(s, m)});
  }
  return out;
}

inline std::optional<EstimatorState> delta(const QuotientModel& m, const EstimatorState& s,
                                           ActionId a, ObservableId o) {
  auto next = external_successors(m, s.members, a, o);
  if (next.empty()) return std::nullopt;
  auto cls = classify(next, m);
  return EstimatorState{std::move(next), cls};
}

inline constexpr std::size_t kDefaultMaxEstimatorStates = 1'000'000;

inline EstimatorGraph build_estimator(const QuotientModel& m,
                                      std::size_t max_states = kDefaultMaxEstimatorStates) {
  std::vector<EstimatorState> states;
  std::map<ClassSet, StateId> index;
  std::vector<EstimatorTransition> transitions;

  auto intern = [&](ClassSet members) {
    auto it = index.find(members);
    if (it != index.end()) return it->second;
    if (states.size() >= max_states) throw CapExceeded("estimator states", max_states);
    StateId id{states.size()};
    auto cls = classify(members, m);
    index.emplace(members, id);
    states.push_back({std::move(members), cls});
    return id;
  };

  std::map<ObservableId, StateId> initials;
  for (auto& [o, s] : initial_estimates(m)) initials.emplace(o, intern(s.members));

  const auto externals = m.external_actions();
  const auto n_obs = m.observable_count();
  for (std::size_t cur = 0; cur < states.size(); ++cur) {
    const ClassSet members = states[cur].members;
    const ClassSet closure = unobservable_closure(m, members);
    std::vector<std::pair<ClassId, ClassSet>> faulty_closures;
    for (ClassId c : members)
      if (m.faulty(c)) faulty_closures.emplace_back(c, unobservable_closure(m, {c}));

    for (ActionId a : externals) {
      std::vector<ClassSet> by_obs(n_obs);
      for (ClassId c : closure)
        for (const auto& e : m.out_edges(c))
          if (e.action == a) by_obs[m.observable(e.dst).index()].push_back(e.dst);
      for (std::size_t o = 0; o < n_obs; ++o) {
        if (by_obs[o].empty()) continue;
        normalize(by_obs[o]);
        std::vector<FaultLink> links;
        for (const auto& [from, fc] : faulty_closures)
          for (ClassId c : fc)
            for (const auto& e : m.out_edges(c))
              if (e.action == a && m.observable(e.dst).index() == o) links.push_back({from, e.dst});
        std::sort(links.begin(), links.end());
        links.erase(std::unique(links.begin(), links.end()), links.end());
        StateId dst = intern(std::move(by_obs[o]));
        transitions.push_back({StateId{cur}, a, ObservableId{o}, dst, std::move(links)});
      }
    }
  }
  std::vector<std::string> names;
  for (const auto& c : m.classes()) names.push_back(c.name);
  return EstimatorGraph(m.vocabulary(), std::move(names), std::move(states), std::move(initials),
                        std::move(transitions));
}

inline Json to_json(const EstimatorGraph& g) {
  Json root;
  Json states = Json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    Json members = Json::array();
    for (ClassId c : g.states()[i].members) members.push_back(g.class_names().at(c.index()));
    states.push_back({{"id", i},
                      {"members", std::move(members)},
                      {"class", std::string(to_string(g.states()[i].classification))}});
  }
  root["states"] = std::move(states);
  Json initials = Json::object();
  for (const auto& [o, s] : g.initials()) initials[g.vocabulary().name(o)] = s.index();
  root["initials"] = std::move(initials);
  Json transitions = Json::array();
  for (const auto& t : g.transitions())
    transitions.push_back({{"src", t.src.index()},
                           {"action", g.vocabulary().name(t.action)},
                           {"obs", g.vocabulary().name(t.observable)},
                           {"dst", t.dst.index()}});
  root["transitions"] = std::move(transitions);
  return root;
}

}  // namespace hydiag

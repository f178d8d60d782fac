#pragma once

// The diagnoser: a Moore machine over estimator states that answers yes
// exactly in faulty states, driven online by observation events.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "hydiag/error.hpp"
#include "hydiag/estimator.hpp"
#include "hydiag/model_io.hpp"

namespace hydiag {

enum class Answer { No, Yes };

inline std::string_view to_string(Answer a) { return a == Answer::Yes ? "yes" : "no"; }

struct Verdict {
  Answer answer = Answer::No;
  Classification status = Classification::NonFaulty;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

inline std::string_view status_name(Classification c) {
  switch (c) {
    case Classification::Faulty: return "determinate-faulty";
    case Classification::NonFaulty: return "determinate-nonfaulty";
    case Classification::Indeterminate: return "indeterminate";
  }
  return "?";
}

struct InitEvent {
  ObservableId observable;
};

struct StepEvent {
  ActionId action;
  ObservableId observable;
};

using ObsEvent = std::variant<InitEvent, StepEvent>;

class DiagnoserAutomaton {
 public:
  struct State {
    std::vector<std::string> members;  // class names, informational
    Classification status = Classification::NonFaulty;
    Answer output = Answer::No;
  };

  struct Transition {
    StateId src;
    ActionId action;
    ObservableId observable;
    StateId dst;
  };

  DiagnoserAutomaton(Vocabulary vocab, std::vector<State> states,
                     std::map<ObservableId, StateId> initials, std::vector<Transition> transitions)
      : vocab_(std::move(vocab)),
        states_(std::move(states)),
        initials_(std::move(initials)),
        transitions_(std::move(transitions)) {
    for (const auto& t : transitions_) {
      if (t.src.index() >= states_.size() || t.dst.index() >= states_.size())
        throw ModelError("diagnoser transition refers to an unknown state");
      auto [it, inserted] = table_.try_emplace(std::tuple{t.src, t.action, t.observable}, t.dst);
      if (!inserted && it->second != t.dst)
        throw ModelError("diagnoser transitions are not deterministic");
    }
    for (const auto& [o, s] : initials_)
      if (s.index() >= states_.size()) throw ModelError("diagnoser initial state out of range");
    for (const auto& s : states_)
      if ((s.output == Answer::Yes) != (s.status == Classification::Faulty))
        throw ModelError("diagnoser output must be yes exactly on faulty states");
  }

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  std::size_t size() const noexcept { return states_.size(); }
  const State& state(StateId s) const { return states_.at(s.index()); }
  const std::map<ObservableId, StateId>& initials() const noexcept { return initials_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }

  std::optional<StateId> next(StateId s, ActionId a, ObservableId o) const {
    auto it = table_.find(std::tuple{s, a, o});
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

  Verdict verdict(StateId s) const { return {state(s).output, state(s).status}; }

 private:
  Vocabulary vocab_;
  std::vector<State> states_;
  std::map<ObservableId, StateId> initials_;
  std::vector<Transition> transitions_;
  std::map<std::tuple<StateId, ActionId, ObservableId>, StateId> table_;
};

inline DiagnoserAutomaton synthesize(const EstimatorGraph& est) {
  std::vector<DiagnoserAutomaton::State> states;
  for (const auto& s : est.states()) {
    DiagnoserAutomaton::State ds;
    for (ClassId c : s.members) ds.members.push_back(est.class_names().at(c.index()));
    ds.status = s.classification;
    ds.output = s.classification == Classification::Faulty ? Answer::Yes : Answer::No;
    states.push_back(std::move(ds));
  }
  std::vector<DiagnoserAutomaton::Transition> transitions;
  for (const auto& t : est.transitions())
    transitions.push_back({t.src, t.action, t.observable, t.dst});
  return DiagnoserAutomaton(est.vocabulary(), std::move(states), est.initials(),
                            std::move(transitions));
}

// One online step. `current` is empty before the Init event. `index` is the
// position of `ev` in the stream and is only used for error reporting.
inline std::pair<StateId, Verdict> step(const DiagnoserAutomaton& d,
                                        std::optional<StateId> current, const ObsEvent& ev,
                                        std::size_t index = 0) {
  if (const auto* init = std::get_if<InitEvent>(&ev)) {
    if (current) throw std::logic_error("init event after the stream has started");
    auto it = d.initials().find(init->observable);
    if (it == d.initials().end())
      throw NoConsistentExecution("no initial state observes '" +
                                      d.vocabulary().name(init->observable) + "'",
                                  index);
    return {it->second, d.verdict(it->second)};
  }
  const auto& st = std::get<StepEvent>(ev);
  if (!current) throw std::logic_error("step event before init");
  auto nxt = d.next(*current, st.action, st.observable);
  if (!nxt)
    throw NoConsistentExecution("no execution consistent with '" +
                                    d.vocabulary().name(st.action) + " " +
                                    d.vocabulary().name(st.observable) + "'",
                                index);
  return {*nxt, d.verdict(*nxt)};
}

// Verdict after the initial observable and after every step.
inline std::vector<Verdict> run_trace(const DiagnoserAutomaton& d, const UTrace& trace) {
  std::vector<Verdict> out;
  auto [cur, v] = step(d, std::nullopt, InitEvent{trace.head}, 0);
  out.push_back(v);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    std::tie(cur, v) = step(d, cur, StepEvent{trace.steps[i].action, trace.steps[i].observable}, i + 1);
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files: the estimator schema plus an "output" map from state id to yes/no.

inline Json to_json(const DiagnoserAutomaton& d) {
  Json root;
  Json states = Json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& s = d.state(StateId{i});
    states.push_back({{"id", i}, {"members", s.members}, {"class", std::string(to_string(s.status))}});
  }
  root["states"] = std::move(states);
  Json initials = Json::object();
  for (const auto& [o, s] : d.initials()) initials[d.vocabulary().name(o)] = s.index();
  root["initials"] = std::move(initials);
  Json transitions = Json::array();
  for (const auto& t : d.transitions())
    transitions.push_back({{"src", t.src.index()},
                           {"action", d.vocabulary().name(t.action)},
                           {"obs", d.vocabulary().name(t.observable)},
                           {"dst", t.dst.index()}});
  root["transitions"] = std::move(transitions);
  Json output = Json::object();
  for (std::size_t i = 0; i < d.size(); ++i)
    output[std::to_string(i)] = std::string(to_string(d.state(StateId{i}).output));
  root["output"] = std::move(output);
  return root;
}

// The vocabulary of a loaded diagnoser holds only the names its file mentions.
inline DiagnoserAutomaton diagnoser_from_json(std::string_view text) {
  using namespace detail;
  const Json root = parse_json(text);
  check_keys(root, "diagnoser", {"states", "initials", "transitions", "output"});
  Vocabulary vocab;
  auto action = [&](const std::string& n) {
    if (auto a = vocab.find_action(n)) return *a;
    vocab.actions.push_back({n, ActionKind::External});
    return ActionId{vocab.actions.size() - 1};
  };
  auto observable = [&](const std::string& n) {
    if (auto o = vocab.find_observable(n)) return *o;
    vocab.observables.push_back(n);
    return ObservableId{vocab.observables.size() - 1};
  };
  auto state_index = [](const Json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ParseError(where + ": state id must be a natural number");
    return StateId{v.get<std::size_t>()};
  };

  const Json& js = field(root, "diagnoser", "states");
  require_array(js, "states");
  std::vector<DiagnoserAutomaton::State> states(js.size());
  for (std::size_t i = 0; i < js.size(); ++i) {
    const auto where = at("states", i);
    check_keys(js[i], where, {"id", "members", "class"});
    if (state_index(field(js[i], where, "id"), where).index() != i)
      throw ParseError(where + ": state ids must be dense and in order");
    const Json& mem = field(js[i], where, "members");
    require_array(mem, where + ".members");
    for (const auto& m : mem) {
      if (!m.is_string()) throw ParseError(where + ": members must be strings");
      states[i].members.push_back(m.get<std::string>());
    }
    auto cls = parse_classification(string_field(js[i], where, "class"));
    if (!cls) throw ParseError(where + ": unknown class");
    states[i].status = *cls;
  }

  const Json& jo = field(root, "diagnoser", "output");
  require_object(jo, "output");
  for (auto it = jo.begin(); it != jo.end(); ++it) {
    std::size_t id = 0;
    try {
      std::size_t pos = 0;
      id = std::stoul(it.key(), &pos);
      if (pos != it.key().size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParseError("output: key '" + it.key() + "' is not a state id");
    }
    if (id >= states.size()) throw ParseError("output: unknown state " + it.key());
    if (!it.value().is_string()) throw ParseError("output: values must be yes or no");
    const auto s = it.value().get<std::string>();
    if (s != "yes" && s != "no") throw ParseError("output: values must be yes or no");
    states[id].output = s == "yes" ? Answer::Yes : Answer::No;
  }

  std::map<ObservableId, StateId> initials;
  const Json& ji = field(root, "diagnoser", "initials");
  require_object(ji, "initials");
  for (auto it = ji.begin(); it != ji.end(); ++it)
    initials.emplace(observable(it.key()), state_index(it.value(), "initials"));

  std::vector<DiagnoserAutomaton::Transition> transitions;
  const Json& jt = field(root, "diagnoser", "transitions");
  require_array(jt, "transitions");
  for (std::size_t i = 0; i < jt.size(); ++i) {
    const auto where = at("transitions", i);
    check_keys(jt[i], where, {"src", "action", "obs", "dst"});
    transitions.push_back({state_index(field(jt[i], where, "src"), where),
                           action(string_field(jt[i], where, "action")),
                           observable(string_field(jt[i], where, "obs")),
                           state_index(field(jt[i], where, "dst"), where)});
  }
  return DiagnoserAutomaton(std::move(vocab), std::move(states), std::move(initials),
                            std::move(transitions));
}

}  // namespace hydiag

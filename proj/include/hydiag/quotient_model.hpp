#pragma once

// Finite time-abstract bisimulation quotient of a hybrid automaton with
// faults, its structural validation, and the two primitive set operations
// the estimator is built from.

#include <algorithm>
#include <compare>
#include <deque>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hydiag/error.hpp"
#include "hydiag/ids.hpp"

namespace hydiag {

enum class ActionKind { External, Internal, Fault };

inline std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::External: return "external";
    case ActionKind::Internal: return "internal";
    case ActionKind::Fault: return "fault";
  }
  return "?";
}

inline std::optional<ActionKind> parse_action_kind(std::string_view s) {
  if (s == "external") return ActionKind::External;
  if (s == "internal") return ActionKind::Internal;
  if (s == "fault") return ActionKind::Fault;
  return std::nullopt;
}

struct ActionLabel {
  std::string name;
  ActionKind kind = ActionKind::External;

  bool silent() const noexcept { return kind != ActionKind::External; }
};

struct ClassInfo {
  std::string name;
  bool faulty = false;
  bool initial = false;
  ObservableId observable;
};

struct DiscreteEdge {
  ClassId src;
  ActionId action;
  ClassId dst;

  friend auto operator<=>(const DiscreteEdge&, const DiscreteEdge&) = default;
};

struct TimeEdge {
  ClassId src;
  ClassId dst;
};

// Names of actions and observables. Shared by the model, the estimator and
// the diagnoser so traces can be rendered without the model at hand.
struct Vocabulary {
  std::vector<ActionLabel> actions;
  std::vector<std::string> observables;

  std::optional<ActionId> find_action(std::string_view name) const {
    for (std::size_t i = 0; i < actions.size(); ++i)
      if (actions[i].name == name) return ActionId{i};
    return std::nullopt;
  }

  std::optional<ObservableId> find_observable(std::string_view name) const {
    for (std::size_t i = 0; i < observables.size(); ++i)
      if (observables[i] == name) return ObservableId{i};
    return std::nullopt;
  }

  const std::string& name(ActionId a) const { return actions.at(a.index()).name; }
  const std::string& name(ObservableId o) const { return observables.at(o.index()); }
};

// Untimed observation trace O0 a0 O1 a1 ... On.
struct UTrace {
  struct Step {
    ActionId action;
    ObservableId observable;

    friend auto operator<=>(const Step&, const Step&) = default;
  };

  ObservableId head;
  std::vector<Step> steps;

  std::size_t length() const noexcept { return steps.size(); }
  ObservableId last() const { return steps.empty() ? head : steps.back().observable; }

  friend auto operator<=>(const UTrace&, const UTrace&) = default;
};

inline std::string format(const UTrace& t, const Vocabulary& v) {
  std::ostringstream os;
  os << v.name(t.head);
  for (const auto& s : t.steps) os << ' ' << v.name(s.action) << ' ' << v.name(s.observable);
  return os.str();
}

// Finite prefix plus a repeatable cycle. cycle.head == prefix.last().
struct Lasso {
  UTrace prefix;
  UTrace cycle;
};

class QuotientModel {
 public:
  // Throws ModelError on dangling ids, duplicate names, or a fault action
  // count other than one. Time edges are closed reflexively and transitively;
  // `divergent` marks classes whose time self-loop lets time elapse forever.
  QuotientModel(std::vector<ClassInfo> classes, std::vector<ActionLabel> actions,
                std::vector<std::string> observables, std::vector<DiscreteEdge> edges,
                std::vector<TimeEdge> time, std::vector<ClassId> divergent = {})
      : classes_(std::move(classes)),
        vocab_{std::move(actions), std::move(observables)},
        edges_(std::move(edges)),
        divergent_(classes_.size(), false) {
    check_structure(time, divergent);
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    edge_offset_.assign(classes_.size() + 1, 0);
    for (const auto& e : edges_) ++edge_offset_[e.src.index() + 1];
    for (std::size_t i = 0; i < classes_.size(); ++i) edge_offset_[i + 1] += edge_offset_[i];
    for (ClassId c : divergent) divergent_[c.index()] = true;
    close_time(time);
  }

  std::size_t class_count() const noexcept { return classes_.size(); }
  std::span<const ClassInfo> classes() const noexcept { return classes_; }
  const ClassInfo& info(ClassId c) const { return classes_.at(c.index()); }
  bool faulty(ClassId c) const { return info(c).faulty; }
  ObservableId observable(ClassId c) const { return info(c).observable; }

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  std::span<const ActionLabel> actions() const noexcept { return vocab_.actions; }
  const ActionLabel& action(ActionId a) const { return vocab_.actions.at(a.index()); }
  std::size_t observable_count() const noexcept { return vocab_.observables.size(); }
  ActionId fault_action() const noexcept { return fault_; }

  std::vector<ActionId> external_actions() const {
    std::vector<ActionId> out;
    for (std::size_t i = 0; i < vocab_.actions.size(); ++i)
      if (vocab_.actions[i].kind == ActionKind::External) out.emplace_back(i);
    return out;
  }

  // All discrete edges sorted by (src, action, dst).
  std::span<const DiscreteEdge> edges() const noexcept { return edges_; }

  std::span<const DiscreteEdge> out_edges(ClassId c) const {
    return std::span<const DiscreteEdge>(edges_).subspan(
        edge_offset_[c.index()], edge_offset_[c.index() + 1] - edge_offset_[c.index()]);
  }

  // Reflexive-transitive time successors, sorted.
  const ClassSet& time_successors(ClassId c) const { return time_.at(c.index()); }

  bool divergent(ClassId c) const { return divergent_.at(c.index()); }

  std::optional<ClassId> find_class(std::string_view name) const {
    for (std::size_t i = 0; i < classes_.size(); ++i)
      if (classes_[i].name == name) return ClassId{i};
    return std::nullopt;
  }

  std::vector<ClassId> initial_classes() const {
    std::vector<ClassId> out;
    for (std::size_t i = 0; i < classes_.size(); ++i)
      if (classes_[i].initial) out.emplace_back(i);
    return out;
  }

  // Original time edges are not kept; this lists the closure minus identities.
  std::vector<TimeEdge> proper_time_edges() const {
    std::vector<TimeEdge> out;
    for (std::size_t i = 0; i < time_.size(); ++i)
      for (ClassId d : time_[i])
        if (d.index() != i) out.push_back({ClassId{i}, d});
    return out;
  }

 private:
  void check_structure(const std::vector<TimeEdge>& time, const std::vector<ClassId>& divergent) {
    const auto n = classes_.size();
    auto class_ok = [n](ClassId c) { return c.index() < n; };
    std::unordered_map<std::string, int> seen;
    for (const auto& c : classes_) {
      if (c.name.empty()) throw ModelError("class with empty name");
      if (seen[c.name]++) throw ModelError("duplicate class name '" + c.name + "'");
    }
    seen.clear();
    std::size_t faults = 0;
    for (std::size_t i = 0; i < vocab_.actions.size(); ++i) {
      const auto& a = vocab_.actions[i];
      if (a.name.empty()) throw ModelError("action with empty name");
      if (seen[a.name]++) throw ModelError("duplicate action name '" + a.name + "'");
      if (a.kind == ActionKind::Fault) {
        ++faults;
        fault_ = ActionId{i};
      }
    }
    if (faults != 1)
      throw ModelError("expected exactly one fault action, found " + std::to_string(faults));
    seen.clear();
    for (const auto& o : vocab_.observables) {
      if (o.empty()) throw ModelError("observable with empty name");
      if (seen[o]++) throw ModelError("duplicate observable name '" + o + "'");
    }
    for (const auto& e : edges_) {
      if (!class_ok(e.src) || !class_ok(e.dst) || e.action.index() >= vocab_.actions.size())
        throw ModelError("discrete edge refers to an unknown class or action");
    }
    for (const auto& t : time)
      if (!class_ok(t.src) || !class_ok(t.dst))
        throw ModelError("time edge refers to an unknown class");
    for (ClassId c : divergent)
      if (!class_ok(c)) throw ModelError("divergent mark refers to an unknown class");
  }

  void close_time(const std::vector<TimeEdge>& time) {
    const auto n = classes_.size();
    std::vector<std::vector<ClassId>> adj(n);
    for (const auto& t : time) adj[t.src.index()].push_back(t.dst);
    time_.assign(n, {});
    std::vector<char> mark(n);
    for (std::size_t s = 0; s < n; ++s) {
      std::fill(mark.begin(), mark.end(), 0);
      std::vector<ClassId> stack{ClassId{s}};
      mark[s] = 1;
      auto& out = time_[s];
      while (!stack.empty()) {
        ClassId c = stack.back();
        stack.pop_back();
        out.push_back(c);
        for (ClassId d : adj[c.index()])
          if (!mark[d.index()]) {
            mark[d.index()] = 1;
            stack.push_back(d);
          }
      }
      normalize(out);
    }
  }

  std::vector<ClassInfo> classes_;
  Vocabulary vocab_;
  std::vector<DiscreteEdge> edges_;
  std::vector<std::size_t> edge_offset_;
  std::vector<ClassSet> time_;
  std::vector<bool> divergent_;
  ActionId fault_;
};

// ---------------------------------------------------------------------------
// Validation

enum class Rule { D1, D2, D3, T1, InitNonFaulty, ObsTotal, Nonempty };

inline std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::D1: return "D1";
    case Rule::D2: return "D2";
    case Rule::D3: return "D3";
    case Rule::T1: return "T1";
    case Rule::InitNonFaulty: return "InitNonFaulty";
    case Rule::ObsTotal: return "ObsTotal";
    case Rule::Nonempty: return "Nonempty";
  }
  return "?";
}

struct Violation {
  Rule rule;
  std::string subject;  // class name or rendered edge
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(Rule r) const {
    return std::any_of(violations.begin(), violations.end(),
                       [r](const Violation& v) { return v.rule == r; });
  }
};

inline std::string describe_edge(const QuotientModel& m, const DiscreteEdge& e) {
  return m.info(e.src).name + " -" + m.action(e.action).name + "-> " + m.info(e.dst).name;
}

inline ValidationReport validate_model(const QuotientModel& m) {
  ValidationReport r;
  auto add = [&r](Rule rule, std::string subject, std::string msg) {
    r.violations.push_back({rule, std::move(subject), std::move(msg)});
  };
  if (m.class_count() == 0) add(Rule::Nonempty, "", "model has no classes");
  bool any_initial = false;
  for (std::size_t i = 0; i < m.class_count(); ++i) {
    const ClassId c{i};
    const auto& ci = m.info(c);
    if (ci.observable.index() >= m.observable_count())
      add(Rule::ObsTotal, ci.name, "class has no observable in the observation partition");
    if (ci.initial) {
      any_initial = true;
      if (ci.faulty) add(Rule::InitNonFaulty, ci.name, "initial class is faulty");
    }
    if (!ci.faulty) {
      const auto out = m.out_edges(c);
      bool has_fault = std::any_of(out.begin(), out.end(), [&](const DiscreteEdge& e) {
        return e.action == m.fault_action();
      });
      if (!has_fault) add(Rule::D1, ci.name, "non-faulty class has no outgoing fault edge");
    }
  }
  if (m.class_count() > 0 && !any_initial) add(Rule::Nonempty, "", "model has no initial class");
  for (const auto& e : m.edges()) {
    const bool sf = m.faulty(e.src), df = m.faulty(e.dst);
    if (e.action == m.fault_action()) {
      if (sf || !df)
        add(Rule::D2, describe_edge(m, e), "fault edge must lead from non-faulty to faulty");
    } else if (sf != df) {
      add(Rule::D3, describe_edge(m, e), "non-fault edge changes the faulty flag");
    }
  }
  for (const auto& t : m.proper_time_edges())
    if (m.faulty(t.src) != m.faulty(t.dst))
      add(Rule::T1, m.info(t.src).name + " ~> " + m.info(t.dst).name,
          "time edge changes the faulty flag");
  return r;
}

// ---------------------------------------------------------------------------
// Set operations

// Least superset of `s` closed under time edges and internal/fault edges.
inline ClassSet unobservable_closure(const QuotientModel& m, const ClassSet& s) {
  std::vector<char> in(m.class_count(), 0);
  std::vector<ClassId> work;
  for (ClassId c : s)
    if (!in[c.index()]) {
      in[c.index()] = 1;
      work.push_back(c);
    }
  ClassSet out;
  while (!work.empty()) {
    ClassId c = work.back();
    work.pop_back();
    out.push_back(c);
    auto visit = [&](ClassId d) {
      if (!in[d.index()]) {
        in[d.index()] = 1;
        work.push_back(d);
      }
    };
    for (ClassId d : m.time_successors(c)) visit(d);
    for (const auto& e : m.out_edges(c))
      if (m.action(e.action).silent()) visit(e.dst);
  }
  normalize(out);
  return out;
}

// Classes reachable from `s` by unobservable moves followed by one `a` edge
// landing in a class that observes `o`.
inline ClassSet external_successors(const QuotientModel& m, const ClassSet& s, ActionId a,
                                    ObservableId o) {
  if (m.action(a).kind != ActionKind::External)
    throw std::invalid_argument("external_successors: action '" + m.action(a).name +
                                "' is not external");
  ClassSet out;
  for (ClassId c : unobservable_closure(m, s))
    for (const auto& e : m.out_edges(c))
      if (e.action == a && m.observable(e.dst) == o) out.push_back(e.dst);
  normalize(out);
  return out;
}

}  // namespace hydiag

#pragma once

// Progressiveness of a quotient and time-abstract diagnosability of its
// estimator, with lasso witnesses for negative answers.

#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hydiag/estimator.hpp"
#include "hydiag/graph.hpp"
#include "hydiag/quotient_model.hpp"

namespace hydiag {

// ---------------------------------------------------------------------------
// Progressiveness

struct ProgressWitness {
  enum class Kind { Deadlock, SilentCycle };
  Kind kind = Kind::Deadlock;
  std::vector<ClassId> classes;     // for a cycle, first == last
  std::vector<std::string> labels;  // one per step between classes
};

struct ProgressReport {
  std::optional<ProgressWitness> witness;

  bool progressive() const noexcept { return !witness.has_value(); }
};

inline std::string describe(const ProgressWitness& w, const QuotientModel& m) {
  std::ostringstream os;
  if (w.kind == ProgressWitness::Kind::Deadlock) {
    os << "deadlock at " << m.info(w.classes.front()).name;
    return os.str();
  }
  os << "silent cycle " << m.info(w.classes.front()).name;
  for (std::size_t i = 0; i < w.labels.size(); ++i)
    os << " -" << w.labels[i] << "-> " << m.info(w.classes[i + 1]).name;
  return os.str();
}

inline std::vector<char> reachable_classes(const QuotientModel& m) {
  std::vector<char> seen(m.class_count(), 0);
  std::vector<ClassId> work = m.initial_classes();
  for (ClassId c : work) seen[c.index()] = 1;
  while (!work.empty()) {
    ClassId c = work.back();
    work.pop_back();
    auto visit = [&](ClassId d) {
      if (!seen[d.index()]) {
        seen[d.index()] = 1;
        work.push_back(d);
      }
    };
    for (ClassId d : m.time_successors(c)) visit(d);
    for (const auto& e : m.out_edges(c)) visit(e.dst);
  }
  return seen;
}

// A reachable class is a dead end when nothing in its time closure has a
// discrete edge. Silent cycles use internal and fault edges, time edges
// between distinct classes, and divergent time self-loops; reflexive
// closure edges are ignored.
inline ProgressReport check_progressive(const QuotientModel& m) {
  const auto reach = reachable_classes(m);
  for (std::size_t i = 0; i < m.class_count(); ++i) {
    if (!reach[i]) continue;
    bool live = false;
    for (ClassId d : m.time_successors(ClassId{i})) live = live || !m.out_edges(d).empty();
    if (!live)
      return {ProgressWitness{ProgressWitness::Kind::Deadlock, {ClassId{i}}, {}}};
  }

  graph::Digraph<std::string> g(m.class_count());
  for (std::size_t i = 0; i < m.class_count(); ++i) {
    if (!reach[i]) continue;
    const ClassId c{i};
    for (const auto& e : m.out_edges(c))
      if (m.action(e.action).silent()) g.add_edge(i, e.dst.index(), m.action(e.action).name);
    for (ClassId d : m.time_successors(c))
      if (d != c) g.add_edge(i, d.index(), "time");
    if (m.divergent(c)) g.add_edge(i, i, "time*");
  }
  const auto cyclic = graph::cyclic_nodes(g);
  std::optional<graph::Path<std::string>> best;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!cyclic[i]) continue;
    auto p = graph::shortest_cycle_through(g, i, cyclic);
    if (p && (!best || p->labels.size() < best->labels.size())) best = std::move(p);
  }
  if (!best) return {};
  ProgressWitness w{ProgressWitness::Kind::SilentCycle, {}, best->labels};
  for (auto n : best->nodes) w.classes.emplace_back(n);
  return {std::move(w)};
}

// ---------------------------------------------------------------------------
// Diagnosability
//
// The offending structure is a reachable cycle of indeterminate estimator
// states along which some faulty member is carried from state to state
// (through the fault links). Nodes of the tracking graph are pairs
// (indeterminate state, faulty member).

struct DiagnosabilityVerdict {
  std::optional<Lasso> witness;
  std::vector<StateId> cycle_states;  // estimator states along the cycle, first == last

  bool diagnosable() const noexcept { return !witness.has_value(); }
};

namespace detail {

struct FaultTracking {
  graph::Digraph<UTrace::Step> graph;
  std::vector<std::pair<StateId, ClassId>> nodes;
};

inline FaultTracking fault_tracking_graph(const EstimatorGraph& est) {
  FaultTracking t;
  std::map<std::pair<StateId, ClassId>, std::size_t> index;
  auto node = [&](StateId s, ClassId c) {
    auto [it, inserted] = index.try_emplace({s, c}, t.nodes.size());
    if (inserted) {
      t.nodes.emplace_back(s, c);
      t.graph.add_node();
    }
    return it->second;
  };
  auto indeterminate = [&](StateId s) {
    return est.state(s).classification == Classification::Indeterminate;
  };
  for (std::size_t i = 0; i < est.size(); ++i) {
    const StateId s{i};
    if (!indeterminate(s)) continue;
    // Faulty members of an indeterminate state; their flag is implied by the
    // links, so every member referenced by a link becomes a node.
    for (const auto& tr : est.out(s)) {
      if (!indeterminate(tr.dst)) continue;
      for (const auto& l : tr.fault_links)
        t.graph.add_edge(node(s, l.from), node(tr.dst, l.to), {tr.action, tr.observable});
    }
  }
  return t;
}

}  // namespace detail

inline DiagnosabilityVerdict check_diagnosable(const EstimatorGraph& est) {
  const auto track = detail::fault_tracking_graph(est);
  const auto cyclic = graph::cyclic_nodes(track.graph);
  if (std::find(cyclic.begin(), cyclic.end(), 1) == cyclic.end()) return {};

  // Estimator-level adjacency for the prefix search.
  graph::Digraph<UTrace::Step> eg(est.size());
  for (const auto& t : est.transitions())
    eg.add_edge(t.src.index(), t.dst.index(), {t.action, t.observable});
  std::vector<char> on_cycle(est.size(), 0);
  for (std::size_t n = 0; n < track.nodes.size(); ++n)
    if (cyclic[n]) on_cycle[track.nodes[n].first.index()] = 1;

  // Shortest prefix, trying initial observables in order so the head is known.
  std::optional<graph::Path<UTrace::Step>> prefix;
  ObservableId head;
  for (const auto& [o, s] : est.initials()) {
    auto p = graph::shortest_path(eg, {s.index()}, [&](std::size_t u) { return on_cycle[u]; });
    if (p && (!prefix || p->labels.size() < prefix->labels.size())) {
      prefix = std::move(p);
      head = o;
    }
  }
  if (!prefix) throw std::logic_error("indeterminate cycle unreachable from initial estimates");
  const StateId target{prefix->nodes.back()};

  std::optional<graph::Path<UTrace::Step>> cycle;
  for (std::size_t n = 0; n < track.nodes.size(); ++n) {
    if (!cyclic[n] || track.nodes[n].first != target) continue;
    auto c = graph::shortest_cycle_through(track.graph, n, cyclic);
    if (c && (!cycle || c->labels.size() < cycle->labels.size())) cycle = std::move(c);
  }

  DiagnosabilityVerdict v;
  Lasso lasso;
  lasso.prefix.head = head;
  lasso.prefix.steps = prefix->labels;
  lasso.cycle.head = lasso.prefix.last();
  lasso.cycle.steps = cycle->labels;
  for (auto n : cycle->nodes) v.cycle_states.push_back(track.nodes[n].first);
  v.witness = std::move(lasso);
  return v;
}

// Upper bound on the number of external events between a fault and the first
// faulty estimator state: longest run of indeterminate states a faulty member
// can be carried through, plus one.
inline std::size_t detection_delay_bound(const EstimatorGraph& est) {
  const auto track = detail::fault_tracking_graph(est);
  const auto cyclic = graph::cyclic_nodes(track.graph);
  if (std::find(cyclic.begin(), cyclic.end(), 1) != cyclic.end())
    throw std::invalid_argument("detection_delay_bound: estimator is not diagnosable");
  // Indeterminate states with a faulty member but no links still delay by one.
  std::size_t longest = graph::longest_path_nodes(track.graph);
  for (const auto& s : est.states()) {
    if (s.classification == Classification::Indeterminate) {
      longest = std::max<std::size_t>(longest, 1);
      break;
    }
  }
  return longest + 1;
}

}  // namespace hydiag

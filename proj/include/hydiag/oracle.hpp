#pragma once

// Brute-force reference procedures that avoid the estimator entirely: a
// twin-plant product for diagnosability, bounded path enumeration of
// untimed observation traces, and exhaustive play of the environment
// against a diagnoser.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "hydiag/diagnoser.hpp"
#include "hydiag/error.hpp"
#include "hydiag/graph.hpp"
#include "hydiag/quotient_model.hpp"

namespace hydiag::oracle {

// Classes reachable from `c` without an external action, by recursive DFS
// over the raw time and silent edge lists.
inline std::vector<ClassId> silent_reach(const QuotientModel& m, ClassId c) {
  std::vector<char> seen(m.class_count(), 0);
  std::vector<ClassId> out;
  auto dfs = [&](auto&& self, ClassId u) -> void {
    if (seen[u.index()]) return;
    seen[u.index()] = 1;
    out.push_back(u);
    for (ClassId d : m.time_successors(u)) self(self, d);
    for (const auto& e : m.out_edges(u))
      if (m.action(e.action).kind != ActionKind::External) self(self, e.dst);
  };
  dfs(dfs, c);
  return out;
}

struct Move {
  ActionId action;
  ClassId target;  // landing class; its observable is the sampled one
};

// All (silent*, external) moves from `c`.
inline std::vector<Move> external_moves(const QuotientModel& m, ClassId c) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<Move> out;
  for (ClassId u : silent_reach(m, c))
    for (const auto& e : m.out_edges(u))
      if (m.action(e.action).kind == ActionKind::External &&
          seen.emplace(e.action.index(), e.dst.index()).second)
        out.push_back({e.action, e.dst});
  return out;
}

// ---------------------------------------------------------------------------
// Twin plant

struct TwinState {
  ClassId left;
  ClassId right;
  bool left_faulty = false;
  bool right_faulty = false;

  friend auto operator<=>(const TwinState&, const TwinState&) = default;
};

struct TwinGraph {
  std::vector<TwinState> states;
  std::vector<std::size_t> initials;
  graph::Digraph<UTrace::Step> edges;
};

inline TwinGraph twin_product(const QuotientModel& m) {
  TwinGraph g;
  std::map<std::pair<ClassId, ClassId>, std::size_t> index;
  auto node = [&](ClassId l, ClassId r) {
    auto [it, inserted] = index.try_emplace({l, r}, g.states.size());
    if (inserted) {
      g.states.push_back({l, r, m.faulty(l), m.faulty(r)});
      g.edges.add_node();
    }
    return it->second;
  };
  const auto init = m.initial_classes();
  for (ClassId l : init)
    for (ClassId r : init)
      if (m.observable(l) == m.observable(r)) g.initials.push_back(node(l, r));
  std::vector<std::vector<Move>> moves(m.class_count());
  std::vector<char> have(m.class_count(), 0);
  auto moves_of = [&](ClassId c) -> const std::vector<Move>& {
    if (!have[c.index()]) {
      moves[c.index()] = external_moves(m, c);
      have[c.index()] = 1;
    }
    return moves[c.index()];
  };
  for (std::size_t cur = 0; cur < g.states.size(); ++cur) {
    const auto [l, r, lf, rf] = g.states[cur];
    for (const auto& ml : moves_of(l))
      for (const auto& mr : moves_of(r))
        if (ml.action == mr.action && m.observable(ml.target) == m.observable(mr.target)) {
          const auto to = node(ml.target, mr.target);
          g.edges.add_edge(cur, to, {ml.action, m.observable(ml.target)});
        }
  }
  return g;
}

// Two runs that share an untimed observation lasso; the left one is faulty,
// the right one never is. Runs list the landing class after each step, with
// the initial class first, over prefix followed by one pass of the cycle.
struct CounterExample {
  Lasso shared_trace;
  std::vector<ClassId> left_run;
  std::vector<ClassId> right_run;
};

struct OracleVerdict {
  bool diagnosable = true;
  std::optional<CounterExample> counterexample;
};

inline OracleVerdict brute_force_diagnosable(const QuotientModel& m) {
  const auto tw = twin_product(m);
  const auto n = tw.states.size();
  graph::Digraph<UTrace::Step> bad(n);
  for (std::size_t u = 0; u < n; ++u) {
    const auto& s = tw.states[u];
    if (!(s.left_faulty && !s.right_faulty)) continue;
    for (const auto& e : tw.edges.out(u)) {
      const auto& t = tw.states[e.to];
      if (t.left_faulty && !t.right_faulty) bad.add_edge(u, e.to, e.label);
    }
  }
  const auto cyclic = graph::cyclic_nodes(bad);
  auto prefix = graph::shortest_path(tw.edges, tw.initials,
                                     [&](std::size_t u) { return cyclic[u] != 0; });
  if (!prefix) return {};
  auto cycle = graph::shortest_cycle_through(bad, prefix->nodes.back(), cyclic);

  CounterExample cx;
  const auto& first = tw.states[prefix->nodes.front()];
  cx.shared_trace.prefix.head = m.observable(first.left);
  cx.shared_trace.prefix.steps = prefix->labels;
  cx.shared_trace.cycle.head = cx.shared_trace.prefix.last();
  cx.shared_trace.cycle.steps = cycle->labels;
  for (auto u : prefix->nodes) {
    cx.left_run.push_back(tw.states[u].left);
    cx.right_run.push_back(tw.states[u].right);
  }
  for (std::size_t i = 1; i < cycle->nodes.size(); ++i) {
    cx.left_run.push_back(tw.states[cycle->nodes[i]].left);
    cx.right_run.push_back(tw.states[cycle->nodes[i]].right);
  }
  return {false, std::move(cx)};
}

// Checks that `run` (landing classes) realizes `trace` from an initial class.
inline bool replays(const QuotientModel& m, const UTrace& trace, const std::vector<ClassId>& run) {
  if (run.size() != trace.steps.size() + 1) return false;
  if (!m.info(run[0]).initial || m.observable(run[0]) != trace.head) return false;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    if (m.observable(run[i + 1]) != s.observable) return false;
    bool ok = false;
    for (const auto& mv : external_moves(m, run[i]))
      ok = ok || (mv.action == s.action && mv.target == run[i + 1]);
    if (!ok) return false;
  }
  return true;
}

inline UTrace unroll(const Lasso& l) {
  UTrace t = l.prefix;
  t.steps.insert(t.steps.end(), l.cycle.steps.begin(), l.cycle.steps.end());
  return t;
}

// ---------------------------------------------------------------------------
// Bounded trace enumeration

struct TraceInfo {
  ClassSet classes;  // classes a path realizing the trace can land in
  bool faulty_run = false;
  bool nonfaulty_run = false;
};

inline constexpr std::size_t kDefaultEnumerationCap = 5'000'000;

// Every untimed observation trace with at most `k` external steps that some
// path from an initial class realizes.
inline std::map<UTrace, TraceInfo> enumerate_utraces(const QuotientModel& m, std::size_t k,
                                                     std::size_t cap = kDefaultEnumerationCap) {
  std::map<UTrace, TraceInfo> out;
  std::set<std::pair<UTrace, ClassId>> expanded;
  std::size_t work = 0;
  auto record = [&](const UTrace& t, ClassId c) {
    auto& info = out[t];
    info.classes.push_back(c);
    normalize(info.classes);
    (m.faulty(c) ? info.faulty_run : info.nonfaulty_run) = true;
  };
  auto walk = [&](auto&& self, ClassId c, const UTrace& t) -> void {
    if (!expanded.emplace(t, c).second) return;
    if (++work > cap) throw CapExceeded("trace enumeration", cap);
    if (t.length() == k) return;
    for (const auto& mv : external_moves(m, c)) {
      UTrace next = t;
      next.steps.push_back({mv.action, m.observable(mv.target)});
      record(next, mv.target);
      self(self, mv.target, next);
    }
  };
  for (ClassId c : m.initial_classes()) {
    UTrace t{m.observable(c), {}};
    record(t, c);
    walk(walk, c, t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Environment simulation

struct LosingRun {
  enum class Kind { FalseAlarm, LateDetection, Undetected, Inconsistent };
  Kind kind = Kind::FalseAlarm;
  UTrace trace;
  std::vector<ClassId> run;      // landing classes
  std::optional<std::size_t> fault_after;  // external events before the fault
  std::vector<Answer> answers;   // one per event including the initial one
};

inline std::string_view to_string(LosingRun::Kind k) {
  switch (k) {
    case LosingRun::Kind::FalseAlarm: return "false alarm";
    case LosingRun::Kind::LateDetection: return "late detection";
    case LosingRun::Kind::Undetected: return "undetected";
    case LosingRun::Kind::Inconsistent: return "inconsistent";
  }
  return "?";
}

struct SimulationOptions {
  // Faulty runs must be answered yes within this many events after the
  // fault. Without a bound, a faulty run that reaches the horizon without a
  // yes counts as undetected.
  std::optional<std::size_t> delay_bound;
  std::size_t exhaustive_cap = 2'000'000;  // configurations before sampling
  std::size_t samples = 100'000;
  std::uint64_t seed = 1;
  std::size_t keep_losing = 16;
};

struct SimulationReport {
  bool exhaustive = true;
  std::size_t configurations = 0;
  std::size_t faulty_runs_checked = 0;
  std::size_t losing_count = 0;
  std::vector<LosingRun> losing;

  bool winning() const noexcept { return losing_count == 0; }
};

namespace detail {

struct Config {
  ClassId cls;
  std::optional<std::size_t> fault_at;
  StateId diag;
  std::optional<std::size_t> first_yes;

  friend auto operator<=>(const Config&, const Config&) = default;
};

struct SimNode {
  Config cfg;
  std::size_t parent;
  std::optional<UTrace::Step> step;  // model vocabulary
  Answer answer;
};

}  // namespace detail

// Plays every environment behavior of up to `k` external events (choosing
// the fault timing at every non-faulty step) against `d`, and scores each
// play against the diagnoser's winning condition. Behaviors reaching the
// same (class, fault time, diagnoser state, first yes) are merged.
inline SimulationReport simulate_runs(const QuotientModel& m, const DiagnoserAutomaton& d,
                                      std::size_t k, const SimulationOptions& opt = {}) {
  using detail::Config;
  using detail::SimNode;
  constexpr auto none = static_cast<std::size_t>(-1);

  // Name-based translation so diagnosers loaded from files work too.
  std::vector<std::optional<ActionId>> act(m.actions().size());
  for (std::size_t i = 0; i < act.size(); ++i)
    act[i] = d.vocabulary().find_action(m.actions()[i].name);
  std::vector<std::optional<ObservableId>> obs(m.observable_count());
  for (std::size_t i = 0; i < obs.size(); ++i)
    obs[i] = d.vocabulary().find_observable(m.vocabulary().observables[i]);

  std::vector<std::vector<ClassId>> reach(m.class_count());
  for (std::size_t i = 0; i < m.class_count(); ++i) reach[i] = silent_reach(m, ClassId{i});

  SimulationReport rep;
  std::vector<SimNode> nodes;

  auto rebuild = [&](std::size_t leaf, LosingRun::Kind kind) {
    LosingRun lr;
    lr.kind = kind;
    std::vector<std::size_t> chain;
    for (auto i = leaf; i != none; i = nodes[i].parent) chain.push_back(i);
    std::reverse(chain.begin(), chain.end());
    lr.trace.head = m.observable(nodes[chain.front()].cfg.cls);
    for (auto i : chain) {
      lr.run.push_back(nodes[i].cfg.cls);
      lr.answers.push_back(nodes[i].answer);
      if (nodes[i].step) lr.trace.steps.push_back(*nodes[i].step);
    }
    lr.fault_after = nodes[leaf].cfg.fault_at;
    return lr;
  };
  auto lose = [&](LosingRun lr) {
    ++rep.losing_count;
    if (rep.losing.size() < opt.keep_losing) rep.losing.push_back(std::move(lr));
  };
  // Scores a configuration reached after `depth` events.
  auto score = [&](std::size_t id, std::size_t depth) {
    const auto& c = nodes[id].cfg;
    if (!c.fault_at) {
      if (c.first_yes) lose(rebuild(id, LosingRun::Kind::FalseAlarm));
      return;
    }
    if (opt.delay_bound) {
      const auto deadline = *c.fault_at + *opt.delay_bound;
      if (depth == deadline) {
        ++rep.faulty_runs_checked;
        if (!c.first_yes || *c.first_yes > deadline)
          lose(rebuild(id, LosingRun::Kind::LateDetection));
      }
    } else if (depth == k) {
      ++rep.faulty_runs_checked;
      if (!c.first_yes) lose(rebuild(id, LosingRun::Kind::Undetected));
    }
  };

  // Successor configurations of node `id` reached by one external event.
  auto expand = [&](std::size_t id, std::size_t depth, auto&& emit) {
    const Config c = nodes[id].cfg;
    for (ClassId u : reach[c.cls.index()]) {
      std::optional<std::size_t> fault_at = c.fault_at;
      if (!fault_at && m.faulty(u)) fault_at = depth;
      for (const auto& e : m.out_edges(u)) {
        if (m.action(e.action).kind != ActionKind::External) continue;
        const UTrace::Step st{e.action, m.observable(e.dst)};
        auto da = act[e.action.index()];
        auto dob = obs[st.observable.index()];
        std::optional<StateId> nd;
        if (da && dob) nd = d.next(c.diag, *da, *dob);
        Config nc{e.dst, m.faulty(e.dst) ? fault_at : std::nullopt, nd.value_or(c.diag),
                  c.first_yes};
        if (!nd) {
          nodes.push_back({nc, id, st, Answer::No});
          lose(rebuild(nodes.size() - 1, LosingRun::Kind::Inconsistent));
          continue;
        }
        const Answer ans = d.state(*nd).output;
        if (ans == Answer::Yes && !nc.first_yes) nc.first_yes = depth + 1;
        emit(nc, st, ans);
      }
    }
  };

  auto init_config = [&](ClassId c) -> std::optional<SimNode> {
    auto dob = obs[m.observable(c).index()];
    auto it = dob ? d.initials().find(*dob) : d.initials().end();
    if (it == d.initials().end()) {
      nodes.push_back({{c, std::nullopt, StateId{}, std::nullopt}, none, std::nullopt, Answer::No});
      lose(rebuild(nodes.size() - 1, LosingRun::Kind::Inconsistent));
      return std::nullopt;
    }
    const Answer ans = d.state(it->second).output;
    return SimNode{{c, std::nullopt, it->second,
                    ans == Answer::Yes ? std::optional<std::size_t>(0) : std::nullopt},
                   none, std::nullopt, ans};
  };

  // Exhaustive layered search.
  bool overflow = false;
  std::vector<std::size_t> layer;
  {
    std::set<Config> seen;
    for (ClassId c : m.initial_classes())
      if (auto n = init_config(c); n && seen.insert(n->cfg).second) {
        nodes.push_back(*n);
        layer.push_back(nodes.size() - 1);
        score(layer.back(), 0);
      }
  }
  for (std::size_t depth = 0; depth < k && !overflow; ++depth) {
    std::set<Config> seen;
    std::vector<std::size_t> next;
    for (auto id : layer) {
      expand(id, depth, [&](const Config& nc, const UTrace::Step& st, Answer ans) {
        if (!seen.insert(nc).second) return;
        nodes.push_back({nc, id, st, ans});
        next.push_back(nodes.size() - 1);
        score(next.back(), depth + 1);
      });
      if (nodes.size() > opt.exhaustive_cap) {
        overflow = true;
        break;
      }
    }
    layer = std::move(next);
  }
  rep.configurations = nodes.size();
  if (!overflow) return rep;

  // Random walks once the configuration space is too large.
  rep = SimulationReport{};
  rep.exhaustive = false;
  nodes.clear();
  std::mt19937_64 rng(opt.seed);
  const auto init = m.initial_classes();
  for (std::size_t s = 0; s < opt.samples && !init.empty(); ++s) {
    nodes.clear();
    auto n0 = init_config(init[std::uniform_int_distribution<std::size_t>(0, init.size() - 1)(rng)]);
    if (!n0) continue;
    nodes.push_back(*n0);
    std::size_t cur = 0;
    score(cur, 0);
    for (std::size_t depth = 0; depth < k; ++depth) {
      std::vector<std::tuple<Config, UTrace::Step, Answer>> options;
      expand(cur, depth, [&](const Config& nc, const UTrace::Step& st, Answer ans) {
        options.emplace_back(nc, st, ans);
      });
      if (options.empty()) break;
      auto& [nc, st, ans] =
          options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
      nodes.push_back({nc, cur, st, ans});
      cur = nodes.size() - 1;
      score(cur, depth + 1);
    }
    rep.configurations += nodes.size();
  }
  return rep;
}

}  // namespace hydiag::oracle

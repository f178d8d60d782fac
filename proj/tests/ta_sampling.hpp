#pragma once

// Random small timed automata and concrete-state sampling inside regions,
// used to test the region quotient against the dense-time semantics.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hydiag/hydiag.hpp"

namespace hydiag::test {

// Clock values are integers in units of 1/kScale.
inline constexpr std::int64_t kScale = 1 << 16;

using Valuation = std::vector<std::int64_t>;

// A random automaton source with at most two clocks and constants up to 3.
inline std::string random_ta_source(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  const char* ops[] = {"<", "<=", "==", ">=", ">"};

  const int n_clocks = pick(1, 2);
  const std::vector<std::string> clocks = n_clocks == 1 ? std::vector<std::string>{"x"}
                                                        : std::vector<std::string>{"x", "y"};
  Json external = Json::array(), internal = Json::array();
  for (const auto& c : clocks) (c == "x" || coin(0.5) ? external : internal).push_back(c);

  const int n_loc = pick(2, 4);
  const int healthy = pick(1, n_loc - 1);
  std::vector<std::vector<std::string>> invariants(n_loc);
  Json locations = Json::array();
  for (int l = 0; l < n_loc; ++l) {
    Json inv = Json::array();
    for (const auto& c : clocks)
      if (coin(0.35)) {
        const int b = pick(1, 3);
        const std::string k = c + (coin(0.5) ? "<=" : "<") + std::to_string(b);
        inv.push_back(k);
        invariants[l].push_back(c);
      }
    locations.push_back({{"name", "l" + std::to_string(l)},
                         {"faulty", l >= healthy},
                         {"initial", l == 0},
                         {"invariant", inv}});
  }
  auto guard = [&] {
    Json g = Json::array();
    const int n = pick(0, 2);
    for (int i = 0; i < n; ++i)
      g.push_back(clocks[pick(0, n_clocks - 1)] + ops[pick(0, 4)] + std::to_string(pick(0, 3)));
    return g;
  };
  auto resets = [&] {
    Json r = Json::array();
    for (const auto& c : clocks)
      if (coin(0.4)) r.push_back(c);
    return r;
  };
  Json edges = Json::array();
  for (int l = 0; l < healthy; ++l) {
    const int dst = pick(healthy, n_loc - 1);
    Json r = resets();
    for (const auto& c : invariants[dst])
      if (std::find(r.begin(), r.end(), Json(c)) == r.end()) r.push_back(c);
    edges.push_back({{"src", "l" + std::to_string(l)}, {"dst", "l" + std::to_string(dst)},
                     {"action", "f"}, {"kind", "fault"}, {"guard", Json::array()}, {"resets", r}});
  }
  for (int l = 0; l < n_loc; ++l) {
    const int lo = l < healthy ? 0 : healthy, hi = l < healthy ? healthy - 1 : n_loc - 1;
    const int n = pick(1, 3);
    for (int i = 0; i < n; ++i)
      edges.push_back({{"src", "l" + std::to_string(l)},
                       {"dst", "l" + std::to_string(pick(lo, hi))},
                       {"action", coin(0.5) ? "a" : "b"},
                       {"kind", "external"},
                       {"guard", guard()},
                       {"resets", resets()}});
    if (coin(0.15))
      edges.push_back({{"src", "l" + std::to_string(l)}, {"dst", "l" + std::to_string(pick(lo, hi))},
                       {"action", "h"}, {"kind", "internal"}, {"guard", guard()}, {"resets", resets()}});
  }

  Json observation = Json::array();
  const std::string e0 = external[0].get<std::string>();
  const std::string c = std::to_string(pick(1, 3));
  switch (pick(0, 2)) {
    case 0:
      observation = {{{"id", "lo"}, {"pred", e0 + "<" + c}}, {{"id", "hi"}, {"pred", e0 + ">=" + c}}};
      break;
    case 1:
      observation = {{{"id", "lo"}, {"pred", e0 + "<" + c}},
                     {{"id", "at"}, {"pred", e0 + "==" + c}},
                     {{"id", "hi"}, {"pred", e0 + ">" + c}}};
      break;
    default:
      if (external.size() == 2) {
        const std::string p = "x<" + c + " & y<1";
        observation = {{{"id", "in"}, {"pred", p}}, {{"id", "out"}, {"pred", "!(" + p + ")"}}};
      } else {
        observation = {{{"id", "lo"}, {"pred", e0 + "<=" + c}}, {{"id", "hi"}, {"pred", "!(" + e0 + "<=" + c + ")"}}};
      }
  }
  Json root{{"locations", locations},
            {"clocks", {{"internal", internal}, {"external", external}}},
            {"edges", edges},
            {"observation", observation}};
  return root.dump();
}

// A uniformly random valuation inside region `r`.
inline Valuation sample_in(const Region& r, const std::vector<int>& ceil, std::mt19937_64& rng) {
  const int top = r.rank.empty() ? 0 : *std::max_element(r.rank.begin(), r.rank.end());
  std::set<std::int64_t> fr;
  while (static_cast<int>(fr.size()) < top)
    fr.insert(std::uniform_int_distribution<std::int64_t>(1, kScale - 1)(rng));
  const std::vector<std::int64_t> fracs(fr.begin(), fr.end());
  Valuation v(r.integer.size());
  for (std::size_t x = 0; x < v.size(); ++x) {
    if (r.integer[x] > ceil[x])
      v[x] = ceil[x] * kScale + std::uniform_int_distribution<std::int64_t>(1, 4 * kScale)(rng);
    else
      v[x] = r.integer[x] * kScale + (r.rank[x] ? fracs[r.rank[x] - 1] : 0);
  }
  return v;
}

inline bool holds(const std::vector<ClockConstraint>& ks, const Valuation& v, std::int64_t scale) {
  return std::all_of(ks.begin(), ks.end(), [&](const auto& k) { return k.holds_scaled(v[k.clock], scale); });
}

// Index of the single observable holding at `v`, or -1 if not exactly one.
inline int concrete_observable(const TimedAutomaton& ta, const Valuation& v) {
  int found = -1, count = 0;
  for (std::size_t o = 0; o < ta.observation.size(); ++o)
    if (ta.observation[o].pred.eval([&](const ClockConstraint& k) { return k.holds_scaled(v[k.clock], kScale); })) {
      found = static_cast<int>(o);
      ++count;
    }
  return count == 1 ? found : -1;
}

// Regions visited while time elapses from `v` in `loc`, for as long as the
// invariant holds.
inline std::vector<Region> concrete_time_regions(const TimedAutomaton& ta, std::size_t loc,
                                                 const Valuation& v, const std::vector<int>& ceil) {
  std::set<std::int64_t> events;
  for (std::size_t x = 0; x < v.size(); ++x)
    for (std::int64_t m = 0; m <= ceil[x]; ++m)
      if (m * kScale > v[x]) events.insert(m * kScale - v[x]);
  std::vector<std::int64_t> points{0};  // delays in units of 1/(2 kScale)
  std::int64_t prev = 0;
  for (auto e : events) {
    points.push_back(prev + e);  // midpoint (prev + e) / 2, doubled
    points.push_back(2 * e);
    prev = e;
  }
  points.push_back(2 * prev + 2 * kScale);
  std::vector<Region> out;
  for (auto d : points) {
    Valuation w(v.size());
    for (std::size_t x = 0; x < v.size(); ++x) w[x] = 2 * v[x] + d;
    if (!holds(ta.locations[loc].invariant, w, 2 * kScale)) break;
    Region r = region::of_valuation(w, 2 * kScale, ceil);
    if (out.empty() || out.back() != r) out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<Region> region_time_chain(const TimedAutomaton& ta, std::size_t loc, Region r,
                                             const std::vector<int>& ceil) {
  std::vector<Region> chain{r};
  while (true) {
    Region n = region::time_successor(r, ceil);
    if (n == r || !region::holds_all(n, ta.locations[loc].invariant, ceil)) break;
    chain.push_back(n);
    r = std::move(n);
  }
  return chain;
}

struct SamplingReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  std::vector<std::string> messages;

  void fail(std::string m) {
    ++violations;
    if (messages.size() < 8) messages.push_back(std::move(m));
  }
};

// Samples `pairs` pairs of valuations per class and checks that both members
// agree with each other and with the quotient on observables, enabled edges,
// successor classes and time-successor sequences.
inline SamplingReport sample_regions(const TimedAutomaton& ta, const RegionGraph& g, std::size_t pairs,
                                     std::mt19937_64& rng) {
  SamplingReport rep;
  const auto& ceil = g.ceilings;
  const auto& m = g.model;
  std::map<std::pair<std::size_t, Region>, ClassId> index;
  for (std::size_t i = 0; i < g.classes.size(); ++i) index.emplace(g.classes[i], ClassId{i});

  for (std::size_t ci = 0; ci < g.classes.size(); ++ci) {
    const auto& [loc, reg] = g.classes[ci];
    const ClassId cls{ci};
    const auto name = m.info(cls).name;
    const auto chain = region_time_chain(ta, loc, reg, ceil);
    for (std::size_t p = 0; p < pairs; ++p) {
      ++rep.pairs;
      const Valuation v1 = sample_in(reg, ceil, rng), v2 = sample_in(reg, ceil, rng);
      for (const auto* v : {&v1, &v2}) {
        if (region::of_valuation(*v, kScale, ceil) != reg) rep.fail(name + ": sample outside its region");
        if (concrete_observable(ta, *v) != static_cast<int>(m.observable(cls).index()))
          rep.fail(name + ": sampled valuation observes a different cell");
        if (concrete_time_regions(ta, loc, *v, ceil) != chain)
          rep.fail(name + ": time-successor sequence differs");
      }
      for (const auto& e : ta.edges) {
        if (e.src != loc) continue;
        const bool g1 = holds(e.guard, v1, kScale), g2 = holds(e.guard, v2, kScale);
        if (g1 != g2 || g1 != region::holds_all(reg, e.guard, ceil)) {
          rep.fail(name + ": guard enabledness differs");
          continue;
        }
        if (!g1) continue;
        Valuation w1 = v1, w2 = v2;
        for (auto x : e.resets) w1[x] = w2[x] = 0;
        const bool i1 = holds(ta.locations[e.dst].invariant, w1, kScale);
        const bool i2 = holds(ta.locations[e.dst].invariant, w2, kScale);
        if (i1 != i2) {
          rep.fail(name + ": target invariant differs");
          continue;
        }
        if (!i1) continue;
        const Region r1 = region::of_valuation(w1, kScale, ceil);
        if (r1 != region::of_valuation(w2, kScale, ceil)) {
          rep.fail(name + ": successors land in different regions");
          continue;
        }
        auto it = index.find({e.dst, r1});
        if (it == index.end()) {
          rep.fail(name + ": successor region missing from the quotient");
          continue;
        }
        const auto out = m.out_edges(cls);
        const DiscreteEdge want{cls, e.action, it->second};
        if (std::find(out.begin(), out.end(), want) == out.end())
          rep.fail(name + ": quotient lacks edge " + describe_edge(m, want));
      }
    }
    // The closure of the chain is exactly the class's time successors.
    ClassSet expect;
    for (const auto& r : chain) {
      auto it = index.find({loc, r});
      if (it == index.end()) rep.fail(name + ": time successor missing from the quotient");
      else expect.push_back(it->second);
    }
    normalize(expect);
    const auto ts = m.time_successors(cls);
    if (!std::equal(expect.begin(), expect.end(), ts.begin(), ts.end()))
      rep.fail(name + ": time edges differ from the region chain");
  }
  return rep;
}

}  // namespace hydiag::test

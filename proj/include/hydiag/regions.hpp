#pragma once

// Region quotient of a timed automaton: a finite time-abstract bisimulation
// whose classes are (location, clock region) pairs.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hydiag/error.hpp"
#include "hydiag/quotient_model.hpp"
#include "hydiag/timed_automaton.hpp"

namespace hydiag {

// Canonical region. `integer[x]` is the integral part of clock x, or
// ceiling + 1 once x exceeds its ceiling. `rank[x]` is 0 when the fractional
// part is zero (or x is above its ceiling), otherwise the position of x's
// fractional part among the distinct nonzero fractional parts, from 1.
struct Region {
  std::vector<int> integer;
  std::vector<int> rank;

  friend auto operator<=>(const Region&, const Region&) = default;
};

namespace region {

inline Region zero(std::size_t clocks) { return {std::vector<int>(clocks, 0), std::vector<int>(clocks, 0)}; }

inline bool above(const Region& r, std::size_t x, const std::vector<int>& ceil) {
  return r.integer[x] > ceil[x];
}

inline bool holds(const Region& r, const ClockConstraint& k, const std::vector<int>& ceil) {
  const int i = r.integer[k.clock];
  if (above(r, k.clock, ceil)) return k.op == CmpOp::Gt || k.op == CmpOp::Ge;
  const bool z = r.rank[k.clock] == 0;
  switch (k.op) {
    case CmpOp::Lt: return i < k.bound;
    case CmpOp::Le: return z ? i <= k.bound : i < k.bound;
    case CmpOp::Eq: return z && i == k.bound;
    case CmpOp::Ge: return i >= k.bound;
    case CmpOp::Gt: return z ? i > k.bound : i >= k.bound;
  }
  return false;
}

inline bool holds_all(const Region& r, const std::vector<ClockConstraint>& ks,
                      const std::vector<int>& ceil) {
  return std::all_of(ks.begin(), ks.end(), [&](const auto& k) { return holds(r, k, ceil); });
}

inline bool holds(const Region& r, const Predicate& p, const std::vector<int>& ceil) {
  return p.eval([&](const ClockConstraint& k) { return holds(r, k, ceil); });
}

// Renumbers nonzero ranks densely from 1, keeping their order.
inline void compact(Region& r) {
  std::set<int> used;
  for (int k : r.rank)
    if (k > 0) used.insert(k);
  std::map<int, int> renum;
  int next = 1;
  for (int k : used) renum[k] = next++;
  for (int& k : r.rank)
    if (k > 0) k = renum[k];
}

// The region entered by letting time elapse. A region whose clocks all exceed
// their ceilings is its own successor.
inline Region time_successor(const Region& r, const std::vector<int>& ceil) {
  Region s = r;
  const std::size_t n = r.integer.size();
  bool any_zero = false;
  for (std::size_t x = 0; x < n; ++x) any_zero = any_zero || (!above(r, x, ceil) && r.rank[x] == 0);
  if (any_zero) {
    for (std::size_t x = 0; x < n; ++x) {
      if (above(r, x, ceil)) continue;
      if (r.rank[x] > 0) {
        ++s.rank[x];
      } else if (r.integer[x] == ceil[x]) {
        s.integer[x] = ceil[x] + 1;
      } else {
        s.rank[x] = 1;
      }
    }
    compact(s);
    return s;
  }
  const int top = r.rank.empty() ? 0 : *std::max_element(r.rank.begin(), r.rank.end());
  if (top == 0) return s;
  for (std::size_t x = 0; x < n; ++x) {
    if (r.rank[x] == top) {
      ++s.integer[x];
      s.rank[x] = 0;
    }
  }
  return s;
}

inline bool is_divergent(const Region& r, const std::vector<int>& ceil) {
  for (std::size_t x = 0; x < r.integer.size(); ++x)
    if (!above(r, x, ceil)) return false;
  return true;
}

inline Region reset(const Region& r, const std::vector<std::size_t>& clocks) {
  Region s = r;
  for (auto x : clocks) {
    s.integer[x] = 0;
    s.rank[x] = 0;
  }
  compact(s);
  return s;
}

// Region of a concrete valuation given in units of 1/scale.
inline Region of_valuation(const std::vector<std::int64_t>& scaled, std::int64_t scale,
                           const std::vector<int>& ceil) {
  Region r = zero(scaled.size());
  std::set<std::int64_t> fracs;
  for (std::size_t x = 0; x < scaled.size(); ++x) {
    if (scaled[x] > static_cast<std::int64_t>(ceil[x]) * scale) {
      r.integer[x] = ceil[x] + 1;
    } else {
      r.integer[x] = static_cast<int>(scaled[x] / scale);
      if (scaled[x] % scale) fracs.insert(scaled[x] % scale);
    }
  }
  for (std::size_t x = 0; x < scaled.size(); ++x) {
    if (r.integer[x] > ceil[x] || scaled[x] % scale == 0) continue;
    r.rank[x] = static_cast<int>(std::distance(fracs.begin(), fracs.find(scaled[x] % scale))) + 1;
  }
  return r;
}

inline std::string describe(const Region& r, const std::vector<std::string>& names,
                            const std::vector<int>& ceil) {
  std::string out;
  auto add = [&](const std::string& s) { out += (out.empty() ? "" : ",") + s; };
  int top = 0;
  for (std::size_t x = 0; x < names.size(); ++x) {
    const auto& v = names[x];
    const auto i = r.integer[x];
    if (above(r, x, ceil)) add(v + ">" + std::to_string(ceil[x]));
    else if (r.rank[x] == 0) add(v + "=" + std::to_string(i));
    else add(std::to_string(i) + "<" + v + "<" + std::to_string(i + 1));
    top = std::max(top, r.rank[x]);
  }
  std::size_t fractional = 0;
  for (int k : r.rank) fractional += k > 0;
  if (fractional >= 2) {
    std::string order;
    for (int k = 1; k <= top; ++k) {
      std::string group;
      for (std::size_t x = 0; x < names.size(); ++x)
        if (r.rank[x] == k) group += (group.empty() ? "" : "=") + names[x];
      order += (order.empty() ? "" : "<") + group;
    }
    out += ";" + order;
  }
  return "{" + out + "}";
}

}  // namespace region

inline constexpr std::size_t kDefaultMaxClasses = 100'000;

// Reads HYDIAG_MAX_CLASSES, falling back to the default.
inline std::size_t default_max_classes() {
  if (const char* env = std::getenv("HYDIAG_MAX_CLASSES")) {
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(env, &pos);
      if (pos == std::string(env).size() && v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return kDefaultMaxClasses;
}

// |Loc| * prod(2c+2) * n! * 2^n, saturating at the largest size_t.
inline std::size_t region_count_bound(const TimedAutomaton& ta) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t acc = ta.locations.size();
  auto mul = [&](std::size_t f) {
    if (acc != 0 && f > kMax / acc) acc = kMax;
    else acc *= f;
  };
  const auto ceil = ta.ceilings();
  for (int c : ceil) mul(static_cast<std::size_t>(2 * c + 2));
  for (std::size_t k = 2; k <= ta.clocks.size(); ++k) mul(k);
  for (std::size_t k = 0; k < ta.clocks.size(); ++k) mul(2);
  return acc;
}

struct RegionGraph {
  QuotientModel model;
  std::vector<std::pair<std::size_t, Region>> classes;  // (location, region) per class id
  std::vector<int> ceilings;
};

// Reachable region graph. Throws CapExceeded past `max_classes` classes.
inline RegionGraph region_graph(const TimedAutomaton& ta, std::size_t max_classes) {
  using Key = std::pair<std::size_t, Region>;
  const auto ceil = ta.ceilings();
  std::map<Key, std::size_t> index;
  std::vector<Key> keys;
  std::vector<ClassInfo> infos;
  std::vector<DiscreteEdge> edges;
  std::vector<TimeEdge> time;
  std::vector<ClassId> divergent;

  auto observable_of = [&](const Region& r) {
    std::optional<std::size_t> found;
    for (std::size_t o = 0; o < ta.observation.size(); ++o) {
      if (!region::holds(r, ta.observation[o].pred, ceil)) continue;
      if (found) throw std::logic_error("observables overlap on a region");
      found = o;
    }
    if (!found) throw std::logic_error("no observable holds on a region");
    return ObservableId{*found};
  };
  auto intern = [&](std::size_t loc, Region r, bool initial) {
    Key key{loc, std::move(r)};
    auto it = index.find(key);
    if (it != index.end()) return ClassId{it->second};
    if (keys.size() >= max_classes)
      throw CapExceeded("region quotient classes", max_classes);
    const std::size_t id = keys.size();
    const auto& l = ta.locations[loc];
    infos.push_back({l.name + region::describe(key.second, ta.clocks, ceil), l.faulty, initial,
                     observable_of(key.second)});
    index.emplace(key, id);
    keys.push_back(std::move(key));
    return ClassId{id};
  };

  const Region start = region::zero(ta.clocks.size());
  for (std::size_t l = 0; l < ta.locations.size(); ++l) {
    if (!ta.locations[l].initial) continue;
    if (!region::holds_all(start, ta.locations[l].invariant, ceil))
      throw ModelError("initial location '" + ta.locations[l].name +
                       "' violates its invariant at time zero");
    intern(l, start, true);
  }

  for (std::size_t cur = 0; cur < keys.size(); ++cur) {
    const std::size_t loc = keys[cur].first;
    const Region r = keys[cur].second;
    const ClassId self{cur};
    const Region next = region::time_successor(r, ceil);
    if (next == r) {
      divergent.push_back(self);
    } else if (region::holds_all(next, ta.locations[loc].invariant, ceil)) {
      time.push_back({self, intern(loc, next, false)});
    }
    for (const auto& e : ta.edges) {
      if (e.src != loc || !region::holds_all(r, e.guard, ceil)) continue;
      Region after = region::reset(r, e.resets);
      if (!region::holds_all(after, ta.locations[e.dst].invariant, ceil)) continue;
      edges.push_back({self, e.action, intern(e.dst, std::move(after), false)});
    }
  }

  std::vector<std::string> observables;
  for (const auto& o : ta.observation) observables.push_back(o.id);
  for (ClassId d : divergent) time.push_back({d, d});
  RegionGraph g{QuotientModel(std::move(infos), ta.actions, std::move(observables),
                              std::move(edges), std::move(time), std::move(divergent)),
                std::move(keys), ceil};
  return g;
}

inline QuotientModel region_quotient(const TimedAutomaton& ta,
                                     std::size_t max_classes = default_max_classes()) {
  return region_graph(ta, max_classes).model;
}

}  // namespace hydiag

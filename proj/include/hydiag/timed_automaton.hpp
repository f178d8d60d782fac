#pragma once

// Timed automata with faults: clock constraints, observation predicates over
// external clocks, the JSON source format, and syntactic validation of the
// fault axioms.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hydiag/error.hpp"
#include "hydiag/model_io.hpp"
#include "hydiag/quotient_model.hpp"

namespace hydiag {

enum class CmpOp { Lt, Le, Eq, Ge, Gt };

inline std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

struct ClockConstraint {
  std::size_t clock = 0;
  CmpOp op = CmpOp::Le;
  int bound = 0;

  // Evaluates against a value scaled by `scale` (value = scaled / scale).
  bool holds_scaled(std::int64_t scaled, std::int64_t scale) const {
    const std::int64_t b = static_cast<std::int64_t>(bound) * scale;
    switch (op) {
      case CmpOp::Lt: return scaled < b;
      case CmpOp::Le: return scaled <= b;
      case CmpOp::Eq: return scaled == b;
      case CmpOp::Ge: return scaled >= b;
      case CmpOp::Gt: return scaled > b;
    }
    return false;
  }
};

// Boolean combination of clock constraints.
struct Predicate {
  enum class Kind { True, False, Atom, Not, And, Or };
  Kind kind = Kind::True;
  ClockConstraint atom;
  std::vector<Predicate> args;

  // `atom_holds` decides a single constraint.
  template <typename F>
  bool eval(F&& atom_holds) const {
    switch (kind) {
      case Kind::True: return true;
      case Kind::False: return false;
      case Kind::Atom: return atom_holds(atom);
      case Kind::Not: return !args[0].eval(atom_holds);
      case Kind::And:
        return std::all_of(args.begin(), args.end(), [&](const Predicate& p) { return p.eval(atom_holds); });
      case Kind::Or:
        return std::any_of(args.begin(), args.end(), [&](const Predicate& p) { return p.eval(atom_holds); });
    }
    return false;
  }

  template <typename F>
  void for_each_atom(F&& f) const {
    if (kind == Kind::Atom) f(atom);
    for (const auto& a : args) a.for_each_atom(f);
  }
};

struct Location {
  std::string name;
  bool faulty = false;
  bool initial = false;
  std::vector<ClockConstraint> invariant;
};

struct TaEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  ActionId action;
  std::vector<ClockConstraint> guard;
  std::vector<std::size_t> resets;
};

struct ObservableSpec {
  std::string id;
  Predicate pred;
};

struct TimedAutomaton {
  std::vector<Location> locations;
  std::vector<std::string> clocks;
  std::vector<bool> external;  // per clock
  std::vector<ActionLabel> actions;
  std::vector<TaEdge> edges;
  std::vector<ObservableSpec> observation;

  // Largest constant compared against `clock` anywhere in the automaton.
  int ceiling(std::size_t clock) const {
    int c = 0;
    auto see = [&](const ClockConstraint& k) {
      if (k.clock == clock) c = std::max(c, k.bound);
    };
    for (const auto& l : locations)
      for (const auto& k : l.invariant) see(k);
    for (const auto& e : edges)
      for (const auto& k : e.guard) see(k);
    for (const auto& o : observation) o.pred.for_each_atom(see);
    return c;
  }

  std::vector<int> ceilings() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < clocks.size(); ++i) out.push_back(ceiling(i));
    return out;
  }

  std::optional<std::size_t> find_clock(std::string_view name) const {
    for (std::size_t i = 0; i < clocks.size(); ++i)
      if (clocks[i] == name) return i;
    return std::nullopt;
  }
};

// ---------------------------------------------------------------------------
// Constraint and predicate syntax:  x <= 1,  (x < 1 | x > 2) & !y == 0

namespace detail {

class PredicateParser {
 public:
  PredicateParser(std::string_view text, std::string where, const TimedAutomaton& ta,
                  bool external_only)
      : text_(text), where_(std::move(where)), ta_(ta), external_only_(external_only) {}

  Predicate parse_predicate() {
    Predicate p = parse_or();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

  ClockConstraint parse_single() {
    auto c = parse_constraint();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input after constraint");
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(where_ + ": " + msg + " in \"" + std::string(text_) + "\" at column " +
                     std::to_string(pos_ + 1));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Predicate combine(Predicate::Kind kind, Predicate first, Predicate::Kind, auto next, char sep) {
    std::vector<Predicate> args{std::move(first)};
    while (eat(sep)) args.push_back(next());
    if (args.size() == 1) return std::move(args.front());
    Predicate p;
    p.kind = kind;
    p.args = std::move(args);
    return p;
  }

  Predicate parse_or() {
    return combine(Predicate::Kind::Or, parse_and(), Predicate::Kind::Or,
                   [this] { return parse_and(); }, '|');
  }

  Predicate parse_and() {
    return combine(Predicate::Kind::And, parse_not(), Predicate::Kind::And,
                   [this] { return parse_not(); }, '&');
  }

  Predicate parse_not() {
    if (eat('!')) {
      Predicate p;
      p.kind = Predicate::Kind::Not;
      p.args.push_back(parse_not());
      return p;
    }
    if (eat('(')) {
      Predicate p = parse_or();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    skip_ws();
    const auto save = pos_;
    const auto word = identifier();
    if (word == "true" || word == "false") {
      Predicate p;
      p.kind = word == "true" ? Predicate::Kind::True : Predicate::Kind::False;
      return p;
    }
    pos_ = save;
    Predicate p;
    p.kind = Predicate::Kind::Atom;
    p.atom = parse_constraint();
    return p;
  }

  std::string identifier() {
    skip_ws();
    const auto start = pos_;
    if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  ClockConstraint parse_constraint() {
    const auto name = identifier();
    if (name.empty()) fail("expected a clock name");
    const auto clock = ta_.find_clock(name);
    if (!clock) fail("unknown clock '" + name + "'");
    if (external_only_ && !ta_.external[*clock])
      fail("observation refers to internal clock '" + name + "'");
    ClockConstraint c;
    c.clock = *clock;
    skip_ws();
    auto rest = text_.substr(pos_);
    if (rest.starts_with("<=")) c.op = CmpOp::Le, pos_ += 2;
    else if (rest.starts_with(">=")) c.op = CmpOp::Ge, pos_ += 2;
    else if (rest.starts_with("==")) c.op = CmpOp::Eq, pos_ += 2;
    else if (rest.starts_with("<")) c.op = CmpOp::Lt, pos_ += 1;
    else if (rest.starts_with(">")) c.op = CmpOp::Gt, pos_ += 1;
    else fail("expected one of < <= == >= >");
    skip_ws();
    const auto start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
            text_[pos_] == 'e' || text_[pos_] == 'E'))
      ++pos_;
    const auto num = std::string(text_.substr(start, pos_ - start));
    if (num.empty()) fail("expected an integer constant");
    if (num.find_first_of(".eE") != std::string::npos)
      fail("non-integral constant " + num);
    if (num[0] == '-') fail("negative constant " + num);
    try {
      c.bound = std::stoi(num);
    } catch (const std::exception&) {
      fail("constant out of range " + num);
    }
    return c;
  }

  std::string_view text_;
  std::string where_;
  const TimedAutomaton& ta_;
  bool external_only_;
  std::size_t pos_ = 0;
};

inline std::string format_half_units(std::int64_t h) {
  return h % 2 ? std::to_string(h / 2) + ".5" : std::to_string(h / 2);
}

}  // namespace detail

// Checks that exactly one observable holds at every external valuation.
// Atoms compare single clocks with integers, so the valuations 0, 0.5, 1, ...,
// c, c + 0.5 per clock (c its largest observation constant) cover every case.
inline void check_observation_partition(const TimedAutomaton& ta) {
  std::vector<std::size_t> ext;
  for (std::size_t i = 0; i < ta.clocks.size(); ++i)
    if (ta.external[i]) ext.push_back(i);
  std::vector<int> ceil(ta.clocks.size(), 0);
  for (const auto& o : ta.observation)
    o.pred.for_each_atom([&](const ClockConstraint& k) { ceil[k.clock] = std::max(ceil[k.clock], k.bound); });
  std::vector<std::int64_t> half(ta.clocks.size(), 0);  // value * 2
  while (true) {
    std::size_t holding = 0;
    for (const auto& o : ta.observation)
      if (o.pred.eval([&](const ClockConstraint& k) { return k.holds_scaled(half[k.clock], 2); }))
        ++holding;
    if (holding != 1) {
      std::string w;
      for (auto x : ext) w += (w.empty() ? "" : ", ") + ta.clocks[x] + "=" + detail::format_half_units(half[x]);
      if (w.empty()) w = "the empty valuation";
      throw PartitionError(w, holding ? "observables overlap" : "no observable holds");
    }
    std::size_t i = 0;
    for (; i < ext.size(); ++i) {
      if (half[ext[i]] < 2 * ceil[ext[i]] + 1) {
        ++half[ext[i]];
        break;
      }
      half[ext[i]] = 0;
    }
    if (i == ext.size()) break;
  }
}

inline void validate_ta(const TimedAutomaton& ta) {
  if (ta.locations.empty()) throw AxiomError("Nonempty", "automaton has no locations");
  bool any_initial = false;
  for (const auto& l : ta.locations) {
    if (l.initial) {
      any_initial = true;
      if (l.faulty) throw AxiomError("InitNonFaulty", "initial location '" + l.name + "' is faulty");
    }
  }
  if (!any_initial) throw AxiomError("Nonempty", "automaton has no initial location");
  std::size_t faults = 0;
  for (const auto& a : ta.actions) faults += a.kind == ActionKind::Fault;
  if (faults != 1)
    throw ModelError("expected exactly one fault action, found " + std::to_string(faults));
  std::vector<char> has_fault(ta.locations.size(), 0);
  for (const auto& e : ta.edges) {
    const auto& s = ta.locations[e.src];
    const auto& d = ta.locations[e.dst];
    const auto& a = ta.actions[e.action.index()];
    const auto desc = s.name + " -" + a.name + "-> " + d.name;
    if (a.kind == ActionKind::Fault) {
      if (s.faulty || !d.faulty)
        throw AxiomError("D2", "fault edge " + desc + " must lead from non-faulty to faulty");
      has_fault[e.src] = 1;
    } else if (s.faulty != d.faulty) {
      throw AxiomError("D3", "edge " + desc + " changes the faulty flag");
    }
  }
  for (std::size_t i = 0; i < ta.locations.size(); ++i)
    if (!ta.locations[i].faulty && !has_fault[i])
      throw AxiomError("D1", "non-faulty location '" + ta.locations[i].name + "' has no fault edge");
  if (ta.observation.empty()) throw PartitionError("any valuation", "observation is empty");
  for (std::size_t i = 0; i < ta.observation.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (ta.observation[i].id == ta.observation[j].id)
        throw ModelError("duplicate observable id '" + ta.observation[i].id + "'");
  check_observation_partition(ta);
}

// Parses and validates the JSON source of a timed automaton.
inline TimedAutomaton parse_ta(std::string_view text) {
  using namespace detail;
  const Json root = parse_json(text);
  check_keys(root, "automaton", {"locations", "clocks", "edges", "observation"});
  TimedAutomaton ta;

  const Json& jclk = field(root, "automaton", "clocks");
  check_keys(jclk, "clocks", {"internal", "external"});
  for (const char* group : {"internal", "external"}) {
    if (!jclk.contains(group)) continue;
    const Json& arr = jclk.at(group);
    require_array(arr, std::string("clocks.") + group);
    for (const auto& c : arr) {
      if (!c.is_string()) throw ParseError(std::string("clocks.") + group + ": names must be strings");
      const auto name = c.get<std::string>();
      if (name.empty() || name == "true" || name == "false" ||
          !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
        throw ParseError("clocks: invalid clock name '" + name + "'");
      if (ta.find_clock(name)) throw ModelError("duplicate clock '" + name + "'");
      ta.clocks.push_back(name);
      ta.external.push_back(std::string_view(group) == "external");
    }
  }

  auto constraints = [&](const Json& j, const std::string& where) {
    require_array(j, where);
    std::vector<ClockConstraint> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_string()) throw ParseError(at(where, i) + ": constraint must be a string");
      const auto s = j[i].get<std::string>();
      out.push_back(PredicateParser(s, at(where, i), ta, false).parse_single());
    }
    return out;
  };

  const Json& jl = field(root, "automaton", "locations");
  require_array(jl, "locations");
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const auto where = at("locations", i);
    check_keys(jl[i], where, {"name", "faulty", "initial", "invariant"});
    Location l;
    l.name = name_field(jl[i], where, "name");
    l.faulty = bool_field(jl[i], where, "faulty");
    l.initial = bool_field(jl[i], where, "initial");
    if (jl[i].contains("invariant")) l.invariant = constraints(jl[i].at("invariant"), where + ".invariant");
    for (const auto& other : ta.locations)
      if (other.name == l.name) throw ModelError("duplicate location '" + l.name + "'");
    ta.locations.push_back(std::move(l));
  }
  auto location_of = [&](const std::string& name, const std::string& where) {
    for (std::size_t k = 0; k < ta.locations.size(); ++k)
      if (ta.locations[k].name == name) return k;
    throw ModelError(where + ": unknown location '" + name + "'");
  };

  const Json& je = field(root, "automaton", "edges");
  require_array(je, "edges");
  for (std::size_t i = 0; i < je.size(); ++i) {
    const auto where = at("edges", i);
    check_keys(je[i], where, {"src", "dst", "action", "kind", "guard", "resets"});
    TaEdge e;
    e.src = location_of(name_field(je[i], where, "src"), where);
    e.dst = location_of(name_field(je[i], where, "dst"), where);
    const auto action = name_field(je[i], where, "action");
    const auto kind = parse_action_kind(string_field(je[i], where, "kind"));
    if (!kind) throw ParseError(where + ": kind must be external, internal or fault");
    auto pos = std::find_if(ta.actions.begin(), ta.actions.end(),
                            [&](const ActionLabel& a) { return a.name == action; });
    if (pos == ta.actions.end()) {
      pos = ta.actions.insert(ta.actions.end(), ActionLabel{action, *kind});
    } else if (pos->kind != *kind) {
      throw ModelError(where + ": action '" + action + "' used with two kinds");
    }
    e.action = ActionId{static_cast<std::size_t>(pos - ta.actions.begin())};
    if (je[i].contains("guard")) e.guard = constraints(je[i].at("guard"), where + ".guard");
    if (je[i].contains("resets")) {
      const Json& jr = je[i].at("resets");
      require_array(jr, where + ".resets");
      for (const auto& r : jr) {
        if (!r.is_string()) throw ParseError(where + ".resets: clock names must be strings");
        auto c = ta.find_clock(r.get<std::string>());
        if (!c) throw ModelError(where + ": unknown clock '" + r.get<std::string>() + "'");
        e.resets.push_back(*c);
      }
    }
    ta.edges.push_back(std::move(e));
  }

  const Json& jo = field(root, "automaton", "observation");
  require_array(jo, "observation");
  for (std::size_t i = 0; i < jo.size(); ++i) {
    const auto where = at("observation", i);
    check_keys(jo[i], where, {"id", "pred"});
    ObservableSpec o;
    o.id = name_field(jo[i], where, "id");
    o.pred = PredicateParser(string_field(jo[i], where, "pred"), where + ".pred", ta, true)
                 .parse_predicate();
    ta.observation.push_back(std::move(o));
  }
  validate_ta(ta);
  return ta;
}

inline TimedAutomaton load_ta(const std::string& path) { return parse_ta(read_file(path)); }

}  // namespace hydiag

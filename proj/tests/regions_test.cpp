#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "ta_sampling.hpp"

using namespace hydiag;
using namespace hydiag::test;

namespace {

Json ta1_json() { return Json::parse(read_file(fixture("ta1.ta.json"))); }

TimedAutomaton parse(const Json& j) { return parse_ta(j.dump()); }

std::vector<std::string> class_names(const QuotientModel& m) {
  std::vector<std::string> out;
  for (const auto& c : m.classes()) out.push_back(c.name);
  return out;
}

}  // namespace

TEST(ParseTa, Ta1) {
  const auto ta = load_ta(fixture("ta1.ta.json"));
  EXPECT_EQ(ta.locations.size(), 2u);
  EXPECT_EQ(ta.clocks.size(), 1u);
  EXPECT_EQ(ta.edges.size(), 3u);
  EXPECT_EQ(ta.ceilings(), std::vector<int>{1});
}

TEST(ParseTa, FaultEdgeFromFaultyIsD2) {
  auto j = ta1_json();
  j["edges"].push_back({{"src", "leak"}, {"dst", "leak"}, {"action", "f"}, {"kind", "fault"}});
  try {
    parse(j);
    FAIL();
  } catch (const AxiomError& e) {
    EXPECT_EQ(e.rule(), "D2");
  }
}

TEST(ParseTa, OtherAxioms) {
  auto j = ta1_json();
  j["locations"].push_back({{"name", "spare"}, {"faulty", false}, {"initial", false}, {"invariant", {"x<=1"}}});
  j["edges"].push_back({{"src", "spare"}, {"dst", "spare"}, {"action", "tick"}, {"kind", "external"}});
  try {
    parse(j);
    FAIL();
  } catch (const AxiomError& e) {
    EXPECT_EQ(e.rule(), "D1");
  }
  j = ta1_json();
  j["edges"].push_back({{"src", "leak"}, {"dst", "ok"}, {"action", "tick"}, {"kind", "external"}});
  try {
    parse(j);
    FAIL();
  } catch (const AxiomError& e) {
    EXPECT_EQ(e.rule(), "D3");
  }
  j = ta1_json();
  j["locations"][1]["initial"] = true;
  try {
    parse(j);
    FAIL();
  } catch (const AxiomError& e) {
    EXPECT_EQ(e.rule(), "InitNonFaulty");
  }
}

TEST(ParseTa, PartitionWitness) {
  auto j = ta1_json();
  j["observation"] = {{{"id", "lo"}, {"pred", "x<1"}}, {{"id", "hi"}, {"pred", "x>1"}}};
  try {
    parse(j);
    FAIL();
  } catch (const PartitionError& e) {
    EXPECT_EQ(e.witness(), "x=1");
  }
  j["observation"] = {{{"id", "lo"}, {"pred", "x<=1"}}, {{"id", "hi"}, {"pred", "x>=1"}}};
  EXPECT_THROW(parse(j), PartitionError);
  j["observation"] = {{{"id", "lo"}, {"pred", "x<1 | (x==1 & !true)"}}, {{"id", "hi"}, {"pred", "!(x<1)"}}};
  EXPECT_NO_THROW(parse(j));
}

TEST(ParseTa, SyntaxErrors) {
  auto j = ta1_json();
  j["edges"][0]["guard"] = {"x==1.5"};
  EXPECT_THROW(parse(j), ParseError);
  j["edges"][0]["guard"] = {"x>=-1"};
  EXPECT_THROW(parse(j), ParseError);
  j["edges"][0]["guard"] = {"z==1"};
  EXPECT_THROW(parse(j), ParseError);
  j["edges"][0]["guard"] = {"x=1"};
  EXPECT_THROW(parse(j), ParseError);
  j = ta1_json();
  j["observation"][0]["pred"] = "(x<1";
  EXPECT_THROW(parse(j), ParseError);
  j = ta1_json();
  j["clocks"] = {{"internal", {"y"}}, {"external", {"x"}}};
  j["observation"][0]["pred"] = "x<1 & y<1";
  EXPECT_THROW(parse(j), ParseError);
  EXPECT_THROW(parse_ta("{\"locations\": [}"), ParseError);
}

TEST(RegionBound, Examples) {
  EXPECT_EQ(region_count_bound(parse(ta1_json())), 16u);
  // One location, one clock, ceiling 1; the bound needs no validation.
  TimedAutomaton ta;
  ta.locations.push_back({"l", false, true, {}});
  ta.clocks = {"x"};
  ta.external = {true};
  ta.observation.push_back({"o", {}});
  ta.locations[0].invariant.push_back({0, CmpOp::Le, 1});
  EXPECT_EQ(region_count_bound(ta), 8u);
  ta.clocks.clear();
  ta.external.clear();
  ta.locations[0].invariant.clear();
  ta.locations.push_back({"m", false, false, {}});
  ta.locations.push_back({"n", false, false, {}});
  EXPECT_EQ(region_count_bound(ta), 3u);
}

TEST(RegionQuotient, Ta1Golden) {
  const auto ta = load_ta(fixture("ta1.ta.json"));
  const auto m = region_quotient(ta);
  EXPECT_EQ(class_names(m), (std::vector<std::string>{"ok{x=0}", "ok{0<x<1}", "leak{x=0}", "ok{x=1}",
                                                       "leak{0<x<1}", "leak{x=1}"}));
  EXPECT_LE(m.class_count(), region_count_bound(ta));
  EXPECT_TRUE(validate_model(m).ok());
  EXPECT_TRUE(check_progressive(m).progressive());
  EXPECT_EQ(m.initial_classes(), std::vector<ClassId>{id(m, "ok{x=0}")});
  EXPECT_EQ(m.observable(id(m, "ok{x=1}")), obs(m, "o1"));
  EXPECT_EQ(m.observable(id(m, "leak{0<x<1}")), obs(m, "o0"));
}

TEST(RegionQuotient, ZeroClocksIsTheLocationGraph) {
  Json j{{"locations",
          {{{"name", "a"}, {"faulty", false}, {"initial", true}},
           {{"name", "b"}, {"faulty", false}, {"initial", false}},
           {{"name", "z"}, {"faulty", true}, {"initial", false}}}},
         {"clocks", Json::object()},
         {"edges",
          {{{"src", "a"}, {"dst", "b"}, {"action", "go"}, {"kind", "external"}},
           {{"src", "b"}, {"dst", "a"}, {"action", "go"}, {"kind", "external"}},
           {{"src", "a"}, {"dst", "z"}, {"action", "f"}, {"kind", "fault"}},
           {{"src", "b"}, {"dst", "z"}, {"action", "f"}, {"kind", "fault"}},
           {{"src", "z"}, {"dst", "z"}, {"action", "go"}, {"kind", "external"}}}},
         {"observation", {{{"id", "o"}, {"pred", "true"}}}}};
  const auto ta = parse(j);
  EXPECT_EQ(region_count_bound(ta), 3u);
  const auto m = region_quotient(ta);
  EXPECT_EQ(class_names(m), (std::vector<std::string>{"a{}", "b{}", "z{}"}));
  EXPECT_EQ(m.edges().size(), 5u);
  for (std::size_t i = 0; i < m.class_count(); ++i) EXPECT_TRUE(m.divergent(ClassId{i}));
  EXPECT_TRUE(validate_model(m).ok());
}

TEST(RegionQuotient, CapExceeded) {
  const auto ta = load_ta(fixture("ta1.ta.json"));
  try {
    region_quotient(ta, 4);
    FAIL();
  } catch (const CapExceeded& e) {
    EXPECT_EQ(e.count(), 4u);
  }
}

TEST(Region, TimeSuccessorTwoClocks) {
  const std::vector<int> ceil{1, 2};
  Region r = region::zero(2);
  std::vector<Region> seen{r};
  for (int i = 0; i < 10; ++i) {
    Region n = region::time_successor(r, ceil);
    if (n == r) break;
    seen.push_back(n);
    r = n;
  }
  // (0,0) (0<x=y<1) (1,1) (x>1, 1<y<2) (x>1, y=2) (x>1, y>2)
  ASSERT_EQ(seen.size(), 6u);
  EXPECT_TRUE(region::is_divergent(seen.back(), ceil));
  EXPECT_EQ(region::describe(seen[1], {"x", "y"}, ceil), "{0<x<1,0<y<1;x=y}");
  EXPECT_EQ(region::describe(seen[3], {"x", "y"}, ceil), "{x>1,1<y<2}");
}

TEST(Region, ResetKeepsOrder) {
  const std::vector<int> ceil{3, 3, 3};
  const Valuation v{kScale / 4, kScale + kScale / 2, 2 * kScale + 3 * kScale / 4};
  const Region r = region::of_valuation(v, kScale, ceil);
  EXPECT_EQ(r.rank, (std::vector<int>{1, 2, 3}));
  const Region s = region::reset(r, {1});
  EXPECT_EQ(s.rank, (std::vector<int>{1, 0, 2}));
  EXPECT_EQ(s.integer, (std::vector<int>{0, 0, 2}));
}

TEST(Region, SamplingTa1) {
  const auto ta = load_ta(fixture("ta1.ta.json"));
  const auto g = region_graph(ta, kDefaultMaxClasses);
  std::mt19937_64 rng(3);
  const auto rep = sample_regions(ta, g, 100, rng);
  EXPECT_EQ(rep.violations, 0u) << (rep.messages.empty() ? "" : rep.messages.front());
}

TEST(Region, SamplingRandomAutomata) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    const auto src = random_ta_source(rng);
    const auto ta = parse_ta(src);
    const auto g = region_graph(ta, kDefaultMaxClasses);
    EXPECT_LE(g.model.class_count(), region_count_bound(ta));
    EXPECT_TRUE(validate_model(g.model).ok()) << src;
    const auto rep = sample_regions(ta, g, 20, rng);
    EXPECT_EQ(rep.violations, 0u) << src << "\n" << (rep.messages.empty() ? "" : rep.messages.front());
  }
}

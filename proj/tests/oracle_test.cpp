#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace hydiag;
using namespace hydiag::test;

namespace {

bool has_mixed_cycle(const oracle::TwinGraph& tw) {
  graph::Digraph<int> g(tw.states.size());
  auto mixed = [&](std::size_t u) { return tw.states[u].left_faulty != tw.states[u].right_faulty; };
  for (std::size_t u = 0; u < tw.states.size(); ++u)
    for (const auto& e : tw.edges.out(u))
      if (mixed(u) && mixed(e.to)) g.add_edge(u, e.to, 0);
  const auto c = graph::cyclic_nodes(g);
  return std::find(c.begin(), c.end(), 1) != c.end();
}

}  // namespace

TEST(Twin, Q1AndQ2) {
  EXPECT_FALSE(has_mixed_cycle(oracle::twin_product(load_fixture("q1.quot.json"))));
  EXPECT_TRUE(has_mixed_cycle(oracle::twin_product(load_fixture("q2.quot.json"))));
}

TEST(Twin, DiagonalInitials) {
  const auto m = load_fixture("q1.quot.json");
  const auto tw = oracle::twin_product(m);
  for (ClassId c : m.initial_classes()) {
    bool found = false;
    for (auto i : tw.initials) {
      const auto& s = tw.states[i];
      found = found || (s.left == c && s.right == c && !s.left_faulty && !s.right_faulty);
    }
    EXPECT_TRUE(found);
  }
}

TEST(BruteForce, Fixtures) {
  EXPECT_TRUE(oracle::brute_force_diagnosable(load_fixture("q1.quot.json")).diagnosable);
  const auto m = load_fixture("q2.quot.json");
  const auto v = oracle::brute_force_diagnosable(m);
  ASSERT_FALSE(v.diagnosable);
  const auto& cx = *v.counterexample;
  EXPECT_EQ(cx.shared_trace.cycle.length(), 2u);
  const auto t = oracle::unroll(cx.shared_trace);
  EXPECT_TRUE(oracle::replays(m, t, cx.left_run));
  EXPECT_TRUE(oracle::replays(m, t, cx.right_run));
  EXPECT_TRUE(m.faulty(cx.left_run.back()));
  for (ClassId c : cx.right_run) EXPECT_FALSE(m.faulty(c));
}

TEST(BruteForce, FaultyOnlyAfterFaultToy) {
  ModelBuilder b;
  b.cls("n", "o0", false, true).cls("z", "o1", true).action("a").action("f", "fault");
  b.edge("n", "a", "n").edge("n", "f", "z").edge("z", "a", "z");
  EXPECT_TRUE(oracle::brute_force_diagnosable(b.build()).diagnosable);
}

TEST(Enumerate, Q1DepthOne) {
  const auto m = load_fixture("q1.quot.json");
  const auto& v = m.vocabulary();
  const auto traces = oracle::enumerate_utraces(m, 1);
  ASSERT_EQ(traces.size(), 3u);
  EXPECT_EQ(traces.at(trace(v, {"o0"})).classes, set(m, {"n0"}));
  EXPECT_EQ(traces.at(trace(v, {"o0", "tick", "o1"})).classes, set(m, {"n1"}));
  EXPECT_EQ(traces.at(trace(v, {"o0", "tick", "o0"})).classes, set(m, {"f0"}));
}

TEST(Enumerate, DepthZeroAndQ2) {
  const auto m = load_fixture("q2.quot.json");
  const auto zero = oracle::enumerate_utraces(m, 0);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero.begin()->second.classes, set(m, {"n0"}));
  const auto one = oracle::enumerate_utraces(m, 1);
  EXPECT_EQ(one.at(trace(m.vocabulary(), {"o0", "tick", "o1"})).classes, set(m, {"n1", "f1"}));
}

TEST(Enumerate, Cap) {
  EXPECT_THROW(oracle::enumerate_utraces(load_fixture("q2.quot.json"), 10, 5), CapExceeded);
}

TEST(Simulate, Q1Wins) {
  const auto m = load_fixture("q1.quot.json");
  const auto est = build_estimator(m);
  oracle::SimulationOptions opt;
  opt.delay_bound = detection_delay_bound(est);
  const auto rep = oracle::simulate_runs(m, synthesize(est), 6, opt);
  EXPECT_TRUE(rep.exhaustive);
  EXPECT_TRUE(rep.winning());
  EXPECT_GT(rep.faulty_runs_checked, 0u);
}

TEST(Simulate, Q2Loses) {
  const auto m = load_fixture("q2.quot.json");
  const auto rep = oracle::simulate_runs(m, synthesize(build_estimator(m)), 6);
  ASSERT_FALSE(rep.winning());
  bool undetected = false;
  for (const auto& lr : rep.losing) undetected = undetected || lr.kind == oracle::LosingRun::Kind::Undetected;
  EXPECT_TRUE(undetected);
}

TEST(Simulate, ImmediateDetectionWithoutBound) {
  ModelBuilder b;
  b.cls("n", "o0", false, true).cls("z", "o1", true).action("a").action("f", "fault");
  b.edge("n", "a", "n").edge("n", "f", "z").edge("z", "a", "z");
  const auto m = b.build();
  const auto rep = oracle::simulate_runs(m, synthesize(build_estimator(m)), 5);
  EXPECT_TRUE(rep.winning());
}

TEST(Simulate, FalseAlarmIsCaught) {
  const auto m = load_fixture("q1.quot.json");
  auto j = to_json(synthesize(build_estimator(m)));
  // Claim a fault in every state, including non-faulty ones.
  for (auto& s : j["states"]) s["class"] = "faulty";
  for (auto& [k, v] : j["output"].items()) v = "yes";
  const auto liar = diagnoser_from_json(j.dump());
  const auto rep = oracle::simulate_runs(m, liar, 3);
  ASSERT_FALSE(rep.winning());
  EXPECT_EQ(rep.losing.front().kind, oracle::LosingRun::Kind::FalseAlarm);
}

TEST(Simulate, SampledBeyondCap) {
  const auto m = load_fixture("q1.quot.json");
  const auto est = build_estimator(m);
  oracle::SimulationOptions opt;
  opt.delay_bound = 1;
  opt.exhaustive_cap = 10;
  opt.samples = 500;
  const auto rep = oracle::simulate_runs(m, synthesize(est), 12, opt);
  EXPECT_FALSE(rep.exhaustive);
  EXPECT_TRUE(rep.winning());
}

TEST(Enumerate, EstimatorMatchesReachableClassesOnRandomModels) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto m = random_model(rng);
    const auto est = build_estimator(m);
    for (const auto& [t, info] : oracle::enumerate_utraces(m, 4)) {
      const auto path = est.replay(t);
      ASSERT_FALSE(path.empty());
      EXPECT_EQ(est.state(path.back()).members, info.classes);
    }
  }
}

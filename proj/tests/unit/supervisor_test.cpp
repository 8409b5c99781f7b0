#include <gtest/gtest.h>

#include "caccguard/errors.hpp"
#include "caccguard/scenario.hpp"
#include "caccguard/supervisor.hpp"

using namespace caccguard;

namespace {

SensorFrame frame(double y51, double y52, double y61, double y62) {
  SensorFrame f;
  f.duplicated = {y51, y52, y61, y62};
  return f;
}

const Tolerance kTol;

}  // namespace

TEST(FlowSet, Examples) {
  EXPECT_TRUE(in_flow_set(Mode::q0, {0.5, 0.5, 0.5, 0.5}, frame(1, 1, 0, 0), kTol));
  EXPECT_TRUE(in_flow_set(Mode::q_1_1, {7.0, 0.5, 0.5, 0.5}, frame(1.5, 1.0, 0, 0), kTol));
  EXPECT_FALSE(in_flow_set(Mode::q_1_1, {7.0, 0.5, 0.5, 0.5}, frame(1.0, 1.0, 0, 0), kTol));
  EXPECT_FALSE(in_flow_set(Mode::q0, {0.7, 0.5, 0.5, 0.5}, frame(1, 1, 0, 0), kTol));
}

TEST(Guards, Examples) {
  EXPECT_EQ(evaluate_guards(Mode::q_1_1, {3.0, 0.5, 0.5, 0.9}, frame(1, 1, 0, 0), kTol),
            (GuardEdge{Mode::q_1_1, Mode::q_2_2}));
  EXPECT_EQ(evaluate_guards(Mode::q_1_1, {3.0, 0.9, 0.5, 0.5}, frame(1.2, 1.0, 0, 0), kTol),
            (GuardEdge{Mode::q_1_1, Mode::q_1_2}));
  EXPECT_EQ(evaluate_guards(Mode::q0, {0.7, 0.5, 0.5, 0.5}, frame(1, 1, 0, 0), kTol),
            (GuardEdge{Mode::q0, Mode::q_1_1}));
  EXPECT_EQ(evaluate_guards(Mode::q_1_1, {3.0, 0.5, 0.5, 0.5}, frame(1, 1, 0, 0), kTol),
            (GuardEdge{Mode::q_1_1, Mode::q0}));
  EXPECT_EQ(evaluate_guards(Mode::q0, {0.5, 0.5, 0.5, 0.5}, frame(1, 1, 0, 0), kTol), std::nullopt);
}

TEST(Guards, DetectionSingleOutInEveryRealization) {
  for (Realization r : kRealizations) {
    ControlQuad quad{0.5, 0.5, 0.5, 0.5};
    quad[r.index()] = 0.8;
    EXPECT_EQ(evaluate_guards(Mode::q0, quad, frame(1, 1, 0, 0), kTol), (GuardEdge{Mode::q0, attack_mode(r)}));
  }
}

TEST(Guards, AtMostOneHoldsOnSampledInputs) {
  // Exhaustive sweep over quads and frames built from two levels.
  const double lv[] = {0.5, 0.9};
  const double ys[] = {1.0, 1.4};
  for (Mode m : kModes) {
    for (int qi = 0; qi < 16; ++qi) {
      for (int fi = 0; fi < 16; ++fi) {
        const ControlQuad quad{lv[qi & 1], lv[(qi >> 1) & 1], lv[(qi >> 2) & 1], lv[(qi >> 3) & 1]};
        const auto f = frame(ys[fi & 1], ys[(fi >> 1) & 1], ys[(fi >> 2) & 1], ys[(fi >> 3) & 1]);
        EXPECT_LE(matching_guards(m, quad, f, kTol).size(), 1u);
      }
    }
  }
}

TEST(Reset, RecoverCopiesSibling) {
  const RealizationState rho{9.9, 2.0, 4.0, 5.0};
  EXPECT_EQ(apply_reset(Mode::q_1_1, Mode::q0, rho, frame(1, 1, 0, 0), 0.2),
            (RealizationState{2.0, 2.0, 4.0, 5.0}));
}

TEST(Reset, VariantSecondFamilyAddsCoupling) {
  const RealizationState rho{2.0, 2.0, 7.0, 2.2};
  const auto out = apply_reset(Mode::q_2_1, Mode::q_2_2, rho, frame(1.0, 1.0, 0, 0), 0.2);
  EXPECT_DOUBLE_EQ(out[(Realization{2, 1}).index()], 2.2);
}

TEST(Reset, VariantFirstFamilySubtractsCoupling) {
  const RealizationState rho{7.0, 2.8, 3.0, 3.0};
  const auto out = apply_reset(Mode::q_1_1, Mode::q_1_2, rho, frame(1.0, 5.0, 0, 0), 0.2);
  EXPECT_DOUBLE_EQ(out[(Realization{1, 1}).index()], 2.8);
}

TEST(Reset, FlippedSignMovesTheOtherWay) {
  const RealizationState rho{7.0, 2.8, 3.0, 3.0};
  const auto out = apply_reset(Mode::q_1_1, Mode::q_1_2, rho, frame(1.0, 5.0, 0, 0), 0.2, {true});
  EXPECT_DOUBLE_EQ(out[(Realization{1, 1}).index()], 3.2);
}

TEST(Reset, DetectionLeavesStateAlone) {
  const RealizationState rho{1, 2, 3, 4};
  EXPECT_EQ(apply_reset(Mode::q0, Mode::q_2_1, rho, frame(0, 0, 0, 0), 0.2), rho);
}

TEST(Reset, SelfLoopIsRejected) {
  EXPECT_THROW(apply_reset(Mode::q_1_2, Mode::q_1_2, {}, frame(0, 0, 0, 0), 0.2), ContractViolation);
}

TEST(SelectControl, Examples) {
  EXPECT_EQ(select_control(Mode::q0, {0.5, 0.5, 0.5, 0.5}), 0.5);
  EXPECT_EQ(select_control(Mode::q_1_1, {9.0, 0.5, 0.5, 0.5}), 0.5);
  EXPECT_EQ(selected_realization(Mode::q_1_1), (Realization{1, 2}));
  EXPECT_EQ(select_control(Mode::q_2_2, {0.5, 0.5, 0.5, 9.0}), 0.5);
  EXPECT_EQ(selected_realization(Mode::q_2_2), (Realization{1, 1}));
}

TEST(GuardEdges, TwentyDistinctEdgesThatRoundTrip) {
  const auto& edges = all_guard_edges();
  ASSERT_EQ(edges.size(), 20u);
  int counts[4] = {};
  for (const auto& e : edges) {
    EXPECT_EQ(parse_guard(to_string(e)), e);
    ++counts[static_cast<int>(e.kind())];
  }
  EXPECT_EQ(counts[static_cast<int>(GuardKind::Detect)], 4);
  EXPECT_EQ(counts[static_cast<int>(GuardKind::Recover)], 4);
  EXPECT_EQ(counts[static_cast<int>(GuardKind::Cross)], 8);
  EXPECT_EQ(counts[static_cast<int>(GuardKind::Variant)], 4);
}

namespace {

std::vector<Mode> sequence_of(const RunResult& r) {
  std::vector<Mode> out{Mode::q0};
  for (const auto& e : r.events) out.push_back(e.to);
  return out;
}

Scenario with_preset(const char* name) {
  Scenario s = default_scenario();
  s.leader.segments = {{5, 0.5}, {15, -0.5}, {25, 0.5}, {35, -0.5}, {45, 0.0}};
  s.attack = preset(name);
  return s;
}

}  // namespace

TEST(ClosedLoop, HealthyRunNeverJumps) {
  Scenario s = default_scenario();
  s.leader.segments = {{5, 1.0}, {10, 0.0}};
  const auto r = run(s);
  EXPECT_TRUE(r.events.empty());
  EXPECT_EQ(r.arc.termination, hybrid::Termination::HorizonReached);
}

TEST(ClosedLoop, SingleBurstGoesOutAndBack) {
  const auto r = run(with_preset("single-burst-5-1"));
  EXPECT_EQ(sequence_of(r), (std::vector<Mode>{Mode::q0, Mode::q_1_1, Mode::q0}));
  EXPECT_EQ(r.arc.jumps.size(), 2u);
}

TEST(ClosedLoop, SwitchAcrossFamiliesWithoutDwell) {
  const auto r = run(with_preset("switch-5-1-to-6-2"));
  EXPECT_EQ(sequence_of(r), (std::vector<Mode>{Mode::q0, Mode::q_1_1, Mode::q_2_2, Mode::q0}));
  ASSERT_EQ(r.events.size(), 3u);
  EXPECT_EQ(r.events[1].t, 30.0);
  EXPECT_EQ(r.events[1].j, r.events[0].j + 1);
}

TEST(ClosedLoop, PlatoonWithAttackOnSecondFollower) {
  Scenario s = with_preset("single-burst-5-1");
  s.followers = 3;
  s.attacked_vehicle = 2;
  const auto r = run(s);
  EXPECT_EQ(r.arc.termination, hybrid::Termination::HorizonReached);
  EXPECT_EQ(sequence_of(r), (std::vector<Mode>{Mode::q0, Mode::q_1_1, Mode::q0}));
  for (const auto& e : r.events) EXPECT_EQ(e.follower, 2);
  EXPECT_EQ(r.rows.front().vehicles.size(), 4u);
}

#include <cmath>

#include <gtest/gtest.h>

#include "caccguard/controllers.hpp"
#include "caccguard/errors.hpp"
#include "caccguard/hybrid.hpp"
#include "caccguard/scenario.hpp"

using namespace caccguard;

namespace {

ControllerGains uncoupled() {
  ControllerGains g;
  g.coupling = 0.0;
  return g;
}

SensorFrame frame(double e, double dv, double a, double u_ff, const SpacingPolicy& policy = {}) {
  SensorFrame f;
  f.trusted = {e, dv, 20.0, u_ff};
  const double s6 = dv - policy.headway * a;
  f.duplicated = {a, a, s6, s6};
  return f;
}

}  // namespace

TEST(RealizationDerivative, UncoupledArithmetic) {
  const auto f = frame(1.0, 0.0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(realization_derivative({1, 1}, 0.0, f, 0.0, uncoupled(), {}, {}), 0.4);
}

TEST(RealizationDerivative, UncoupledEquilibrium) {
  const auto g = uncoupled();
  const auto f = frame(1.0, 0.0, 0.0, 0.0);
  EXPECT_EQ(realization_derivative({1, 1}, g.kp * 1.0, f, 0.0, g, {}, {}), 0.0);
}

TEST(RealizationDerivative, UncoupledFamiliesAgreeExactlyOnHealthyFrame) {
  const auto g = uncoupled();
  for (double a : {-1.3, 0.0, 0.77}) {
    const auto f = frame(0.4, -0.9, a, 0.25);
    for (int k : {1, 2}) {
      EXPECT_EQ(realization_derivative({1, k}, 0.31, f, 0.2, g, {}, {}),
                realization_derivative({2, k}, 0.31, f, 0.2, g, {}, {}));
    }
  }
}

TEST(RealizationOutput, UncoupledIsStateReadout) {
  EXPECT_EQ(realization_output({1, 2}, 0.7, frame(3, 2, 1, 0), uncoupled(), {}), 0.7);
  EXPECT_EQ(realization_output({2, 1}, 0.7, frame(3, 2, 1, 0), uncoupled(), {}), 0.7);
}

TEST(RealizationOutput, ConsistentQuadAgreesOnHealthyFrame) {
  const ControllerGains g;
  const auto f = frame(0.3, 0.5, 0.8, 0.1);
  const auto rho = consistent_initialization(0.42, f.y5(1), g);
  const auto quad = realization_outputs(rho, f, g, {});
  for (double u : quad) EXPECT_NEAR(u, 0.42, 1e-15);
}

TEST(Coupling, Examples) {
  EXPECT_DOUBLE_EQ(coupling_forward(2.0, 1.0, 0.2), 2.2);
  EXPECT_DOUBLE_EQ(coupling_backward(3.0, 1.0, 0.2), 2.8);
  EXPECT_EQ(coupling_forward(1.7, 9.0, 0.0), 1.7);
  EXPECT_EQ(coupling_backward(1.7, 9.0, 0.0), 1.7);
}

TEST(Coupling, BackwardUndoesForward) {
  // Exact for values where rho and c * y5 share an exponent range.
  for (double rho : {-2.0, 0.0, 0.5, 3.0}) {
    for (double y5 : {-1.0, 0.25, 2.0}) {
      for (double c : {0.0, 0.25, 0.5}) {
        EXPECT_EQ(coupling_backward(coupling_forward(rho, y5, c), y5, c), rho);
      }
    }
  }
}

TEST(Nominal, OriginIsEquilibrium) {
  EXPECT_EQ(nominal_derivative(0.0, frame(0, 0, 0, 0), {}, {}), 0.0);
  EXPECT_EQ(nominal_output(0.0), 0.0);
}

TEST(Nominal, StepResponseIsFirstOrderFilter) {
  const ControllerGains g;
  const SpacingPolicy policy;
  const auto f = frame(1.0, 0.0, 0.0, 0.0);
  hybrid::SystemDef<int> sys;
  sys.dimension = 1;
  sys.flow_map = [&](const hybrid::State& x, const int&, double) {
    return hybrid::State{nominal_derivative(x[0], f, g, policy)};
  };
  sys.jump_map = [](const hybrid::State& x, const int&) { return x; };
  sys.flow_set = [](const hybrid::State&, const int&) { return true; };
  sys.jump_set = [](const hybrid::State&, const int&) { return false; };
  const auto arc = hybrid::solve(sys, {0.0}, hybrid::InputSource<int>([](double, const hybrid::State&) { return 0; }),
                                 {1e-3, 5.0, 0});
  for (const auto& s : arc.samples) {
    const double oracle = g.kp * 1.0 * (1.0 - std::exp(-s.time.t / policy.headway));
    EXPECT_NEAR(nominal_output(s.x[0]), oracle, 1e-10);
  }
  EXPECT_NEAR(arc.samples.back().x[0], g.kp, 1e-4 * g.kp + g.kp * std::exp(-10.0));
}

TEST(RealizationProperties, Examples) {
  const Tolerance tol;
  const auto f = frame(0, 0, 1.0, 0);
  EXPECT_TRUE(check_realization_properties(f, {0.5, 0.5, 0.5, 0.5}, tol));
  EXPECT_FALSE(check_realization_properties(f, {0.7, 0.5, 0.5, 0.5}, tol));
  auto near = f;
  near.duplicated[1] += 0.5 * tol.sensor.abs;
  EXPECT_TRUE(check_realization_properties(near, {0.5, 0.5, 0.5, 0.5}, tol));
  auto far = f;
  far.duplicated[3] += 10 * tol.sensor.abs;
  EXPECT_FALSE(check_realization_properties(far, {0.5, 0.5, 0.5, 0.5}, tol));
}

TEST(SensorLocality, PerturbingOneChannelTouchesOnlyItsRealization) {
  for (double coupling : {0.0, 0.2}) {
    for (double split : {0.0, 0.5, 1.0}) {
      ControllerGains g;
      g.coupling = coupling;
      g.split = split;
      const auto base = frame(0.3, -0.4, 0.6, 0.2);
      const auto rho = consistent_initialization(0.1, base.y5(1), g);
      for (Realization channel : kRealizations) {
        auto hit = base;
        hit.duplicated[channel.index()] += 0.75;
        for (Realization r : kRealizations) {
          const double rho_r = rho[r.index()];
          const bool d_same = realization_derivative(r, rho_r, base, 0.1, g, {}, {}) ==
                              realization_derivative(r, rho_r, hit, 0.1, g, {}, {});
          const bool y_same = realization_output(r, rho_r, base, g, {}) == realization_output(r, rho_r, hit, g, {});
          EXPECT_EQ(d_same, !(r == channel)) << channel_name(channel) << " vs F" << r.j << r.k;
          if (coupling * (r.j == 1 ? split : 1.0 - split) != 0.0) {
            EXPECT_EQ(y_same, !(r == channel)) << channel_name(channel) << " vs F" << r.j << r.k;
          } else {
            EXPECT_TRUE(y_same);
          }
        }
      }
    }
  }
}

TEST(SensorLocality, CoupledOutputsReadOwnSensorAtOnce) {
  // With both offsets non-zero an injection shows in the output without a flow step.
  const ControllerGains g;
  const auto f = frame(0.0, 0.0, 0.5, 0.0);
  const auto rho = consistent_initialization(0.0, 0.5, g);
  auto hit = f;
  hit.duplicated[0] += 1.0;
  const auto quad = realization_outputs(rho, hit, g, {});
  EXPECT_GT(std::abs(quad[0] - quad[1]), 0.05);
  EXPECT_NEAR(quad[1], quad[2], 1e-15);
  EXPECT_NEAR(quad[2], quad[3], 1e-15);
}

TEST(Validate, RejectsBadGains) {
  ControllerGains g;
  g.kp = 0.0;
  EXPECT_THROW(validate(g), ConfigError);
  g = {};
  g.coupling = -0.1;
  EXPECT_THROW(validate(g), ConfigError);
  g = {};
  g.split = 1.5;
  EXPECT_THROW(validate(g), ConfigError);
}

namespace {

// Co-simulates the healthy supervised loop and its nominal baseline, then
// compares every realization output against the baseline input.
double worst_gap_to_nominal(double coupling) {
  Scenario s = default_scenario();
  s.gains.coupling = coupling;
  s.solver.horizon = 30.0;
  s.leader.segments = {{2.0, 1.0}, {6.0, -1.5}, {12.0, 0.0}};
  const RunResult r = run(s);
  const BaselineTrace b = run_baseline(s);
  EXPECT_EQ(r.rows.size(), b.u.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < r.rows.size() && i < b.u.size(); ++i) {
    for (double u : r.rows[i].u) worst = std::max(worst, std::abs(u - b.u[i]));
  }
  return worst;
}

}  // namespace

TEST(HealthyLoop, CoupledQuadTracksNominal) { EXPECT_LT(worst_gap_to_nominal(0.2), 1e-9); }

TEST(HealthyLoop, UncoupledQuadTracksNominal) { EXPECT_LT(worst_gap_to_nominal(0.0), 1e-12); }

#include <benchmark/benchmark.h>

#include "caccguard/attack.hpp"
#include "caccguard/closed_loop.hpp"
#include "caccguard/controllers.hpp"
#include "caccguard/platoon.hpp"
#include "caccguard/scenario.hpp"
#include "caccguard/supervisor.hpp"

using namespace caccguard;

namespace {

SensorFrame healthy_frame(const AttackOffsets& offsets = {}) {
  const VehicleState pred{30.0, 20.0, 0.4};
  const VehicleState ego{17.5, 19.8, 0.3};
  return measure(pred, ego, 0.4, PlantParams{}, SpacingPolicy{}, offsets);
}

void BM_RealizationOutputs(benchmark::State& state) {
  const ControllerGains gains;
  const auto frame = healthy_frame();
  const auto rho = consistent_initialization(0.3, frame.y5(1), gains);
  for (auto _ : state) benchmark::DoNotOptimize(realization_outputs(rho, frame, gains, SpacingPolicy{}));
}
BENCHMARK(BM_RealizationOutputs);

void BM_GuardEvaluation(benchmark::State& state) {
  const ControllerGains gains;
  const bool attacked = state.range(0) != 0;
  const auto frame = healthy_frame(attacked ? AttackOffsets{1.0, 0, 0, 0} : AttackOffsets{});
  const auto rho = consistent_initialization(0.3, frame.y5(2), gains);
  const auto quad = realization_outputs(rho, frame, gains, SpacingPolicy{});
  const Tolerance tol;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_guards(Mode::q0, quad, frame, tol));
}
BENCHMARK(BM_GuardEvaluation)->Arg(0)->Arg(1);

void BM_ClosedLoopFlowStep(benchmark::State& state) {
  ClosedLoopConfig config;
  config.followers = static_cast<int>(state.range(0));
  const auto loop = supervisor_as_hybrid_system(config);
  const auto u = loop.input(0.0, loop.initial);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hybrid::integrate_flow_step(loop.system, loop.initial, u, 0.0, 1e-3));
  }
}
BENCHMARK(BM_ClosedLoopFlowStep)->Arg(1)->Arg(4);

void BM_Run(benchmark::State& state) {
  Scenario s = default_scenario();
  s.solver.horizon = 30.0;
  if (state.range(0) != 0) s.attack = preset("single-burst-5-1");
  for (auto _ : state) benchmark::DoNotOptimize(run(s));
  state.SetItemsProcessed(state.iterations() * 30000);
}
BENCHMARK(BM_Run)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "caccguard/attack.hpp"
#include "caccguard/closed_loop.hpp"
#include "caccguard/controllers.hpp"
#include "caccguard/hybrid.hpp"
#include "caccguard/platoon.hpp"
#include "caccguard/supervisor.hpp"
#include "caccguard/tolerance.hpp"
#include "caccguard/trace.hpp"

namespace caccguard {

struct Scenario {
  std::string name = "scenario";
  PlantParams plant;
  SpacingPolicy policy;
  ControllerGains gains;  // gains.coupling already resolved
  LeaderProfile leader;
  AttackSchedule attack;
  int attacked_vehicle = 1;
  hybrid::SolverSettings solver;
  Tolerance supervisor;
  int followers = 1;
};

// Defaults for every field, with coupling = tau / h.
Scenario default_scenario();

// Parses the sectioned key-value format documented in docs/config.md.
// Throws ConfigError (with line or key) on malformed input and on any
// component invariant violation, ScheduleOverlap on overlapping attacks.
Scenario parse_scenario(std::string_view text, std::string name = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

// Checks every component invariant; throws ConfigError / ScheduleOverlap.
void validate(const Scenario& scenario);

ClosedLoopConfig to_closed_loop(const Scenario& scenario, const Mutation& mutation = {});

struct RunResult {
  ClosedLoop loop;
  hybrid::Arc arc;
  std::vector<TraceRow> rows;
  std::vector<JumpEvent> events;
};

// Simulates the supervised loop. Solver errors (NumericalBlowup,
// AmbiguousGuards) propagate.
RunResult run(const Scenario& scenario, const Mutation& mutation = {});

// u_nominal of the attacked follower at every step of the attack-free
// baseline loop, indexed like the solver's flow samples.
struct BaselineTrace {
  std::vector<double> t;
  std::vector<double> u;
};
BaselineTrace run_baseline(const Scenario& scenario);

std::vector<TraceRow> trace_rows(const ClosedLoop& loop, const hybrid::Arc& arc,
                                 const std::vector<JumpEvent>& events);
std::vector<JumpEvent> jump_events(const ClosedLoop& loop, const hybrid::Arc& arc);

}  // namespace caccguard

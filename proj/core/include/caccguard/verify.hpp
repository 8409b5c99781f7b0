#pragma once

// Property checks over simulated scenarios, shared by the `verify`
// subcommand and the acceptance suite.
//
// Each scenario is simulated twice: once with the supervisor (under an
// optional mutation) and once as the attack-free nominal baseline. The
// properties compare the two and inspect the mode timeline against the
// attack schedule.

#include <filesystem>
#include <string>
#include <vector>

#include "caccguard/closed_loop.hpp"
#include "caccguard/scenario.hpp"

namespace caccguard {

struct PropertyResult {
  std::string property;
  std::string scenario;
  double deviation = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

// Property names, in report order.
namespace property {
inline constexpr const char* kCoverage = "coverage";
inline constexpr const char* kHealthyEquivalence = "healthy-equivalence";
inline constexpr const char* kNominalCoincidence = "nominal-coincidence";
inline constexpr const char* kDetectionLatency = "detection-latency";
inline constexpr const char* kModeIdentification = "mode-identification";
inline constexpr const char* kRecoveryLatency = "recovery-latency";
inline constexpr const char* kResetSpread = "reset-spread";
inline constexpr const char* kSwitchTransition = "switch-transition";
inline constexpr const char* kModeSequence = "mode-sequence";
}  // namespace property

// Thresholds.
inline constexpr double kHealthySpreadMax = 1e-8;
inline constexpr double kHealthySpreadMaxUncoupled = 1e-12;
inline constexpr double kNominalDeviationMax = 1e-6;
inline constexpr double kResetSpreadMax = 1e-8;

struct SuiteCase {
  Scenario scenario;
  BaselineTrace baseline;
};

// Index of the last row at each distinct t: the state from which flow resumes.
std::vector<std::size_t> final_rows(const std::vector<TraceRow>& rows);

// Mode timeline implied by a schedule: q0, then each target, with q0 after
// every segment not followed by an abutting one (and ending before horizon).
std::vector<Mode> expected_mode_sequence(const ValidatedSchedule& schedule, double horizon);

// Runs every property on one scenario.
std::vector<PropertyResult> check_scenario(const Scenario& scenario, const BaselineTrace& baseline,
                                           const Mutation& mutation = {});

// Loads every *.ini under `dir` (sorted by file name) and simulates its
// baseline. Throws ConfigError / IoError.
std::vector<SuiteCase> load_suite(const std::filesystem::path& dir);

std::vector<PropertyResult> verify_suite(const std::vector<SuiteCase>& suite,
                                         const Mutation& mutation = {});

bool all_passed(const std::vector<PropertyResult>& results);

// property=<name> scenario=<name> max_deviation=<x> threshold=<y> result=PASS|FAIL
std::string format_result(const PropertyResult& result);

// Sign flip of the variant reset, then each of the twenty guards disabled.
std::vector<Mutation> standard_mutants();

struct MutantOutcome {
  Mutation mutation;
  bool killed = false;
  std::vector<std::string> failing;  // "<property>@<scenario>"
};

// A mutant is killed when a detection/mitigation property (nominal
// coincidence, latency, identification, reset, switching) fails.
std::vector<MutantOutcome> mutation_sweep(const std::vector<SuiteCase>& suite,
                                          const std::vector<Mutation>& mutants);

// $CACCGUARD_SUITE_DIR if set, otherwise the suite shipped with the sources.
std::filesystem::path default_suite_dir();

}  // namespace caccguard

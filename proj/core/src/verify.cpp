#include "caccguard/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "caccguard/errors.hpp"

#ifndef CACCGUARD_DEFAULT_SUITE_DIR
#define CACCGUARD_DEFAULT_SUITE_DIR "suite"
#endif

namespace caccguard {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack for comparing sample times built as n * dt against schedule times.
constexpr double kTimeSlack = 1e-9;

PropertyResult make(const char* name, const std::string& scenario, double deviation,
                    double threshold, std::string detail = {}) {
  const bool ok = std::isfinite(deviation) && deviation <= threshold;
  return {name, scenario, deviation, threshold, ok, std::move(detail)};
}

bool abutting(const AttackSegment& prev, const AttackSegment& next) {
  return std::abs(prev.t_end - next.t_start) <= kTimeSlack;
}

std::string join_modes(const std::vector<Mode>& modes) {
  std::vector<std::string_view> names;
  for (Mode m : modes) names.push_back(to_string(m));
  return fmt::format("{}", fmt::join(names, ">"));
}

struct Timeline {
  std::vector<double> t;
  std::vector<Mode> mode;
  std::vector<double> u_star;
  std::vector<double> spread;
};

Timeline final_timeline(const std::vector<TraceRow>& rows) {
  Timeline out;
  for (std::size_t i : final_rows(rows)) {
    const auto& r = rows[i];
    out.t.push_back(r.t);
    out.mode.push_back(parse_mode(r.mode).value_or(Mode::q0));
    out.u_star.push_back(r.u_star);
    out.spread.push_back(output_spread(r.u));
  }
  return out;
}

// First index with t >= t0 (with slack).
std::size_t first_at_or_after(const Timeline& tl, double t0) {
  const auto it = std::lower_bound(tl.t.begin(), tl.t.end(), t0 - kTimeSlack);
  return static_cast<std::size_t>(it - tl.t.begin());
}

const std::set<std::string>& mitigation_properties() {
  static const std::set<std::string> names{
      property::kNominalCoincidence, property::kDetectionLatency, property::kModeIdentification,
      property::kRecoveryLatency,    property::kResetSpread,      property::kSwitchTransition,
      property::kModeSequence};
  return names;
}

}  // namespace

std::vector<std::size_t> final_rows(const std::vector<TraceRow>& rows) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i + 1 == rows.size() || rows[i + 1].t != rows[i].t) out.push_back(i);
  }
  return out;
}

std::vector<Mode> expected_mode_sequence(const ValidatedSchedule& schedule, double horizon) {
  std::vector<Mode> seq{Mode::q0};
  const auto& segs = schedule.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].t_start > horizon) break;
    seq.push_back(attack_mode(segs[i].target));
    const bool followed = i + 1 < segs.size() && abutting(segs[i], segs[i + 1]) &&
                          segs[i + 1].t_start <= horizon;
    if (!followed && segs[i].t_end <= horizon) seq.push_back(Mode::q0);
  }
  return seq;
}

std::vector<PropertyResult> check_scenario(const Scenario& scenario, const BaselineTrace& baseline,
                                           const Mutation& mutation) {
  const std::string& name = scenario.name;
  const double dt = scenario.solver.dt;
  const double latency_max = dt * (1.0 + 1e-6);
  const ValidatedSchedule schedule = validate_schedule(scenario.attack);
  const auto& segs = schedule.segments();

  std::vector<PropertyResult> out;
  std::optional<RunResult> attempt;
  try {
    attempt.emplace(run(scenario, mutation));
  } catch (const Error& e) {
    out.push_back(make(property::kCoverage, name, kInf, 0.0, e.what()));
    for (const char* p : {property::kNominalCoincidence, property::kDetectionLatency,
                          property::kModeIdentification, property::kModeSequence}) {
      out.push_back(make(p, name, kInf, 0.0, "run aborted"));
    }
    return out;
  }
  const RunResult& result = *attempt;

  const bool completed = result.arc.termination == hybrid::Termination::HorizonReached;
  out.push_back(make(property::kCoverage, name, completed ? 0.0 : 1.0, 0.0,
                     std::string(hybrid::to_string(result.arc.termination))));

  const Timeline tl = final_timeline(result.rows);

  if (segs.empty()) {
    double spread = 0.0;
    for (const auto& r : result.rows) spread = std::max(spread, output_spread(r.u));
    const double limit = scenario.gains.coupling == 0.0 ? kHealthySpreadMaxUncoupled : kHealthySpreadMax;
    out.push_back(make(property::kHealthyEquivalence, name, spread, limit));
  }

  {
    double dev = 0.0;
    std::string detail;
    if (tl.t.size() != baseline.t.size()) {
      dev = kInf;
      detail = fmt::format("{} of {} samples", tl.t.size(), baseline.t.size());
    } else {
      for (std::size_t i = 0; i < tl.t.size(); ++i) {
        if (tl.t[i] != baseline.t[i]) {
          dev = kInf;
          detail = "sample times differ";
          break;
        }
        dev = std::max(dev, std::abs(tl.u_star[i] - baseline.u[i]));
      }
    }
    out.push_back(make(property::kNominalCoincidence, name, dev, kNominalDeviationMax, detail));
  }

  const double horizon = scenario.solver.horizon;
  const double end_time = tl.t.empty() ? 0.0 : tl.t.back();

  // Onsets from the healthy mode.
  bool any_onset = false;
  double worst_latency = 0.0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (segs[i].t_start >= horizon) break;
    if (i > 0 && abutting(segs[i - 1], segs[i])) continue;
    any_onset = true;
    double latency = kInf;
    for (std::size_t n = first_at_or_after(tl, segs[i].t_start); n < tl.t.size(); ++n) {
      if (tl.mode[n] != Mode::q0) {
        latency = tl.t[n] - segs[i].t_start;
        break;
      }
    }
    worst_latency = std::max(worst_latency, latency);
  }
  if (any_onset) out.push_back(make(property::kDetectionLatency, name, worst_latency, latency_max));

  if (!segs.empty()) {
    // Occupancy of the matching mode from one sample after onset to the end.
    long mismatches = 0;
    for (const auto& s : segs) {
      const Mode want = attack_mode(s.target);
      for (std::size_t n = first_at_or_after(tl, s.t_start + dt); n < tl.t.size(); ++n) {
        if (tl.t[n] >= s.t_end - kTimeSlack) break;
        if (tl.mode[n] != want) ++mismatches;
      }
      if (end_time < std::min(s.t_end, horizon) - kTimeSlack) ++mismatches;
    }
    out.push_back(make(property::kModeIdentification, name, static_cast<double>(mismatches), 0.0));

    // Return to q0 after each segment that is not immediately followed by another.
    double worst_recovery = 0.0;
    double worst_spread = 0.0;
    bool any_recovery = false;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (i + 1 < segs.size() && abutting(segs[i], segs[i + 1])) continue;
      if (segs[i].t_end >= horizon) continue;
      any_recovery = true;
      double latency = kInf;
      for (std::size_t n = first_at_or_after(tl, segs[i].t_end); n < tl.t.size(); ++n) {
        if (tl.mode[n] == Mode::q0) {
          latency = tl.t[n] - segs[i].t_end;
          worst_spread = std::max(worst_spread, tl.spread[n]);
          if (n + 1 < tl.t.size()) worst_spread = std::max(worst_spread, tl.spread[n + 1]);
          break;
        }
      }
      if (!std::isfinite(latency)) worst_spread = kInf;
      worst_recovery = std::max(worst_recovery, latency);
    }
    if (any_recovery) {
      out.push_back(make(property::kRecoveryLatency, name, worst_recovery, latency_max));
      out.push_back(make(property::kResetSpread, name, worst_spread, kResetSpreadMax));
    }
  }

  std::vector<JumpEvent> events;
  for (const auto& e : result.events) {
    if (e.follower == scenario.attacked_vehicle) events.push_back(e);
  }

  {
    bool any_switch = false;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
      if (!abutting(segs[i], segs[i + 1]) || segs[i + 1].t_start >= horizon) continue;
      any_switch = true;
      const double at = segs[i + 1].t_start;
      const Mode from = attack_mode(segs[i].target);
      const Mode to = attack_mode(segs[i + 1].target);
      double delay = kInf;
      for (const auto& e : events) {
        if (e.from == from && e.to == to && e.t >= at - kTimeSlack && e.t <= at + latency_max) {
          delay = e.t - at;
          break;
        }
      }
      worst = std::max(worst, delay);
    }
    if (any_switch) out.push_back(make(property::kSwitchTransition, name, worst, latency_max));
  }

  {
    std::vector<Mode> actual{Mode::q0};
    for (const auto& e : events) actual.push_back(e.to);
    const auto expected = expected_mode_sequence(schedule, horizon);
    const bool same = actual == expected;
    out.push_back(make(property::kModeSequence, name, same ? 0.0 : 1.0, 0.0,
                       same ? join_modes(actual)
                            : fmt::format("got {} want {}", join_modes(actual), join_modes(expected))));
  }
  return out;
}

std::vector<SuiteCase> load_suite(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError(fmt::format("suite directory '{}' does not exist", dir.string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ini") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SuiteCase> suite;
  for (const auto& f : files) {
    Scenario s = load_scenario(f);
    BaselineTrace b = run_baseline(s);
    suite.push_back({std::move(s), std::move(b)});
  }
  return suite;
}

std::vector<PropertyResult> verify_suite(const std::vector<SuiteCase>& suite, const Mutation& mutation) {
  std::vector<PropertyResult> out;
  for (const auto& c : suite) {
    auto r = check_scenario(c.scenario, c.baseline, mutation);
    out.insert(out.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  }
  return out;
}

bool all_passed(const std::vector<PropertyResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

std::string format_result(const PropertyResult& r) {
  std::string line = fmt::format("property={} scenario={} max_deviation={:.6g} threshold={:.6g} result={}",
                                 r.property, r.scenario, r.deviation, r.threshold,
                                 r.passed ? "PASS" : "FAIL");
  if (!r.detail.empty()) line += fmt::format(" detail=\"{}\"", r.detail);
  return line;
}

std::vector<Mutation> standard_mutants() {
  std::vector<Mutation> out;
  out.push_back(Mutation{true, std::nullopt});
  for (const auto& edge : all_guard_edges()) out.push_back(Mutation{false, edge});
  return out;
}

std::vector<MutantOutcome> mutation_sweep(const std::vector<SuiteCase>& suite,
                                          const std::vector<Mutation>& mutants) {
  std::vector<MutantOutcome> out;
  for (const auto& m : mutants) {
    MutantOutcome o{m, false, {}};
    for (const auto& r : verify_suite(suite, m)) {
      if (!r.passed && mitigation_properties().contains(r.property)) {
        o.killed = true;
        o.failing.push_back(fmt::format("{}@{}", r.property, r.scenario));
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::filesystem::path default_suite_dir() {
  if (const char* env = std::getenv("CACCGUARD_SUITE_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return CACCGUARD_DEFAULT_SUITE_DIR;
}

}  // namespace caccguard

// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any fails. Scenarios come from the shipped suite directory (or
// $CACCGUARD_SUITE_DIR).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "caccguard/errors.hpp"
#include "caccguard/hybrid.hpp"
#include "caccguard/scenario.hpp"
#include "caccguard/verify.hpp"

using namespace caccguard;

namespace {

struct Outcome {
  bool passed = false;
  std::string measured;
};

const SuiteCase& find(const std::vector<SuiteCase>& suite, const std::string& name) {
  for (const auto& c : suite) {
    if (c.scenario.name == name) return c;
  }
  throw ConfigError(fmt::format("suite has no scenario named '{}'", name));
}

const PropertyResult* lookup(const std::vector<PropertyResult>& results, const char* property) {
  for (const auto& r : results) {
    if (r.property == property) return &r;
  }
  return nullptr;
}

double max_spread(const RunResult& r) {
  double s = 0.0;
  for (const auto& row : r.rows) s = std::max(s, output_spread(row.u));
  return s;
}

Outcome healthy_equivalence(const std::vector<SuiteCase>& suite) {
  Scenario coupled = find(suite, "healthy").scenario;
  Scenario uncoupled = coupled;
  uncoupled.gains.coupling = 0.0;
  const double a = max_spread(run(coupled));
  const double b = max_spread(run(uncoupled));
  return {a <= 1e-8 && b <= 1e-12, fmt::format("spread {:.3g} (<= 1e-8), uncoupled {:.3g} (<= 1e-12)", a, b)};
}

const char* const kPresets[] = {"single-burst-5-1", "switch-5-1-to-6-2", "switch-5-1-to-5-2",
                                "round-robin-all-four"};

Outcome nominal_coincidence(const std::vector<SuiteCase>& suite) {
  bool ok = true;
  double worst = 0.0;
  for (const char* name : kPresets) {
    const auto& c = find(suite, name);
    const auto* r = lookup(check_scenario(c.scenario, c.baseline), property::kNominalCoincidence);
    ok = ok && r && r->passed;
    worst = std::max(worst, r ? r->deviation : INFINITY);
  }
  return {ok, fmt::format("max |u* - u_nominal| {:.3g} over 4 presets (<= 1e-6)", worst)};
}

Outcome detection_latency(const std::vector<SuiteCase>& suite) {
  const auto& c = find(suite, "single-burst-5-1");
  const auto r = run(c.scenario);
  const double dt = c.scenario.solver.dt;
  const auto finals = final_rows(r.rows);
  // First sample with t >= 20.
  for (std::size_t i : finals) {
    if (r.rows[i].t < 20.0 - 1e-9) continue;
    const bool left = r.rows[i].mode != "q0";
    const double first_out = r.events.empty() ? INFINITY : r.events.front().t;
    return {left && first_out - 20.0 <= dt,
            fmt::format("mode {} at t = {:.6g}; latency {:.3g} s (<= {:g})", r.rows[i].mode, r.rows[i].t,
                        first_out - 20.0, dt)};
  }
  return {false, "no sample at or after t = 20"};
}

Outcome mode_identification(const std::vector<SuiteCase>& suite) {
  bool ok = true;
  std::vector<std::string> notes;
  for (const char* name : {"single-burst-5-1", "single-5-2", "single-6-1", "single-6-2"}) {
    const auto& c = find(suite, name);
    const auto results = check_scenario(c.scenario, c.baseline);
    const auto* id = lookup(results, property::kModeIdentification);
    const auto* back = lookup(results, property::kRecoveryLatency);
    const auto* spread = lookup(results, property::kResetSpread);
    const auto* seq = lookup(results, property::kModeSequence);
    const bool here = id && back && spread && seq && id->passed && back->passed && spread->passed && seq->passed;
    ok = ok && here;
    notes.push_back(fmt::format("{}: {} wrong-mode samples, return {:.3g} s, spread {:.3g}", name,
                                id ? id->deviation : INFINITY, back ? back->deviation : INFINITY,
                                spread ? spread->deviation : INFINITY));
  }
  std::string joined;
  for (const auto& n : notes) joined += (joined.empty() ? "" : "; ") + n;
  return {ok, joined};
}

Outcome switching(const std::vector<SuiteCase>& suite) {
  struct Case {
    const char* name;
    std::vector<Mode> want;
  };
  const Case cases[] = {
      {"switch-5-1-to-6-2", {Mode::q0, Mode::q_1_1, Mode::q_2_2, Mode::q0}},
      {"switch-5-1-to-5-2", {Mode::q0, Mode::q_1_1, Mode::q_1_2, Mode::q0}},
  };
  bool ok = true;
  std::string notes;
  for (const auto& k : cases) {
    const auto r = run(find(suite, k.name).scenario);
    std::vector<Mode> got{Mode::q0};
    for (const auto& e : r.events) got.push_back(e.to);
    bool here = got == k.want;
    std::string at = "-";
    if (here) {
      const auto& in = r.events[0];
      const auto& mid = r.events[1];
      // Middle transition at the abutment instant, one jump after entry.
      here = mid.t == 30.0 && mid.j == in.j + 1;
      at = fmt::format("t = {:g}, j = {}", mid.t, mid.j);
    }
    ok = ok && here;
    std::vector<std::string> names;
    for (Mode m : got) names.emplace_back(to_string(m));
    std::string seq;
    for (const auto& n : names) seq += (seq.empty() ? "" : ">") + n;
    notes += fmt::format("{}{}: {} (switch at {})", notes.empty() ? "" : "; ", k.name, seq, at);
  }
  return {ok, notes};
}

Outcome coverage(const std::vector<SuiteCase>& suite) {
  int runs = 0;
  int bad = 0;
  std::string first;
  for (const auto& c : suite) {
    ++runs;
    try {
      const auto r = run(c.scenario);
      if (r.arc.termination != hybrid::Termination::HorizonReached) {
        ++bad;
        if (first.empty()) first = fmt::format("{}: {}", c.scenario.name, hybrid::to_string(r.arc.termination));
      }
    } catch (const AmbiguousGuards& e) {
      ++bad;
      if (first.empty()) first = fmt::format("{}: {}", c.scenario.name, e.what());
    }
  }
  return {bad == 0, fmt::format("{} of {} suite runs ambiguous or uncovered{}", bad, runs,
                                first.empty() ? "" : " (" + first + ")")};
}

Outcome hybrid_oracle() {
  struct None {};
  using hybrid::State;
  hybrid::InputSource<None> none = [](double, const State&) { return None{}; };

  hybrid::SystemDef<None> saw;
  saw.dimension = 1;
  saw.flow_map = [](const State&, const None&, double) { return State{1.0}; };
  saw.flow_set = [](const State& x, const None&) { return x[0] <= 1.0; };
  saw.jump_set = [](const State& x, const None&) { return x[0] >= 1.0; };
  saw.jump_map = [](const State&, const None&) { return State{0.0}; };
  const double dt = 1e-3;
  const auto arc = hybrid::solve(saw, {0.0}, none, {dt, 3.5, 100});
  bool saw_ok = arc.jumps.size() == 3;
  double worst = 0.0;
  for (std::size_t i = 0; i < arc.jumps.size() && i < 3; ++i) {
    worst = std::max(worst, std::abs(arc.jumps[i].t - static_cast<double>(i + 1)));
  }
  saw_ok = saw_ok && worst <= dt;

  hybrid::SystemDef<None> decay;
  decay.dimension = 1;
  decay.flow_map = [](const State& x, const None&, double) { return State{-x[0]}; };
  decay.flow_set = [](const State&, const None&) { return true; };
  decay.jump_set = [](const State&, const None&) { return false; };
  decay.jump_map = [](const State& x, const None&) { return x; };
  const auto d = hybrid::solve(decay, {1.0}, none, {dt, 1.0, 0});
  const double err = std::abs(d.samples.back().x[0] - std::exp(-1.0));
  return {saw_ok && err < 1e-10,
          fmt::format("{} sawtooth jumps, worst |t_jump - n| {:.3g} (<= {:g}); |x(1) - e^-1| {:.3g} (< 1e-10)",
                      arc.jumps.size(), worst, dt, err)};
}

Outcome regulation() {
  Scenario s = default_scenario();
  s.name = "leader-step";
  s.leader.segments = {{10.0, 2.0}, {15.0, 0.0}};
  s.solver.horizon = 60.0;
  const auto r = run(s);
  const double settle_by = 15.0 + 30.0;
  double worst = 0.0;
  double peak = 0.0;
  for (const auto& row : r.rows) {
    peak = std::max(peak, std::abs(row.e));
    if (row.t >= settle_by) worst = std::max(worst, std::abs(row.e));
  }
  const bool ok = r.arc.termination == hybrid::Termination::HorizonReached && worst < 0.01;
  return {ok, fmt::format("max |e| for t >= {:g} s: {:.3g} m (< 0.01); peak |e| {:.3g} m", settle_by, worst, peak)};
}

Outcome mutation_sensitivity(const std::vector<SuiteCase>& suite) {
  const auto outcomes = mutation_sweep(suite, standard_mutants());
  std::vector<std::string> survivors;
  for (const auto& o : outcomes) {
    if (!o.killed) survivors.push_back(to_string(o.mutation));
  }
  std::string list;
  for (const auto& s : survivors) list += (list.empty() ? "" : ", ") + s;
  return {survivors.empty(), fmt::format("{} of {} mutants killed{}", outcomes.size() - survivors.size(),
                                         outcomes.size(), list.empty() ? "" : "; survivors: " + list)};
}

}  // namespace

int main() {
  std::vector<SuiteCase> suite;
  try {
    suite = load_suite(default_suite_dir());
  } catch (const Error& e) {
    fmt::print("cannot load suite: {}\n", e.what());
    return 2;
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"healthy equivalence", [&] { return healthy_equivalence(suite); }},
      {"nominal coincidence under attack", [&] { return nominal_coincidence(suite); }},
      {"detection latency", [&] { return detection_latency(suite); }},
      {"mode identification", [&] { return mode_identification(suite); }},
      {"instantaneous switching", [&] { return switching(suite); }},
      {"guard disjointness and coverage", [&] { return coverage(suite); }},
      {"hybrid solver oracle", [] { return hybrid_oracle(); }},
      {"closed-loop regulation", [] { return regulation(); }},
      {"mutation sensitivity", [&] { return mutation_sensitivity(suite); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const Error& e) {
      o = {false, fmt::format("error: {}", e.what())};
    }
    failures += !o.passed;
    fmt::print("criterion {} {}: {} | {}\n", i + 1, criteria[i].first, o.passed ? "PASS" : "FAIL", o.measured);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}

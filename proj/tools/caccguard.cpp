// caccguard command-line tool.
//
// Exit codes:
//   0  success
//   1  usage error
//   2  configuration error
//   3  solver error (blow-up, ambiguous guards, run stopped before horizon)
//   4  verification failure
//   5  I/O error

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "caccguard/errors.hpp"
#include "caccguard/plot.hpp"
#include "caccguard/scenario.hpp"
#include "caccguard/trace.hpp"
#include "caccguard/verify.hpp"

namespace fs = std::filesystem;
using namespace caccguard;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kConfig = 2, kSolver = 3, kVerify = 4, kIo = 5 };

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Writes to `path`, or stdout for "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  fn(out);
  if (!out) throw IoError(fmt::format("failed writing '{}'", path));
}

struct RunOptions {
  std::string config;
  std::string output;
  std::string preset;
};

int cmd_run(const RunOptions& o) {
  Scenario s = load_scenario(o.config);
  if (!o.preset.empty()) s.attack = preset(o.preset);
  validate(s);
  const RunResult r = run(s);
  const std::string out = o.output.empty() ? s.name + ".csv" : o.output;
  with_output(out, [&](std::ostream& os) { write_trace(os, r.rows); });
  fmt::print(stderr, "{}: {} samples, {} jumps, {}\n", s.name, r.arc.samples.size(),
             r.arc.jumps.size(), hybrid::to_string(r.arc.termination));
  return r.arc.termination == hybrid::Termination::HorizonReached ? kOk : kSolver;
}

struct PlotOptions {
  std::string trace;
  std::string output;
  std::string variables;
};

int cmd_plot(const PlotOptions& o) {
  const std::string out = o.output.empty() ? fs::path(o.trace).replace_extension(".svg").string() : o.output;
  plot(o.trace, out, split_list(o.variables));
  return kOk;
}

struct VerifyOptions {
  std::string suite;
  std::string report;
  bool mutations = false;
};

int cmd_verify(const VerifyOptions& o) {
  const fs::path dir = o.suite.empty() ? default_suite_dir() : fs::path(o.suite);
  const auto suite = load_suite(dir);
  if (suite.empty()) throw IoError(fmt::format("suite directory '{}' has no *.ini scenarios", dir.string()));
  const auto results = verify_suite(suite);
  bool ok = all_passed(results);

  std::vector<MutantOutcome> mutants;
  if (o.mutations) mutants = mutation_sweep(suite, standard_mutants());

  with_output(o.report, [&](std::ostream& os) {
    for (const auto& r : results) fmt::print(os, "{}\n", format_result(r));
    for (const auto& m : mutants) {
      fmt::print(os, "mutant={} result={}", to_string(m.mutation), m.killed ? "KILLED" : "SURVIVED");
      if (!m.failing.empty()) fmt::print(os, " failing={}", m.failing.front());
      fmt::print(os, "\n");
      ok = ok && m.killed;
    }
  });
  return ok ? kOk : kVerify;
}

int cmd_modes(const std::string& trace) {
  const auto rows = read_trace(fs::path(trace));
  if (rows.empty()) return kOk;
  std::string current = rows.front().mode;
  double since = rows.front().t;
  fmt::print("# timeline: t_from t_to mode\n");
  for (const auto& r : rows) {
    if (r.mode == current) continue;
    fmt::print("{:.6f} {:.6f} {}\n", since, r.t, current);
    current = r.mode;
    since = r.t;
  }
  fmt::print("{:.6f} {:.6f} {}\n", since, rows.back().t, current);
  fmt::print("# jumps: t j guard\n");
  for (const auto& r : rows) {
    if (!r.guard.empty()) fmt::print("{:.6f} {} {}\n", r.t, r.j, r.guard);
  }
  return kOk;
}

struct SweepOptions {
  std::string config;
  std::string out_dir = "sweep";
  std::string target = "y5_1";
  std::vector<double> onsets{20.0};
  std::vector<double> magnitudes{0.5, 1.0, 2.0};
  double duration = 10.0;
  unsigned jobs = 0;
};

struct Cell {
  double onset = 0.0;
  double magnitude = 0.0;
  std::string file;
  std::string termination;
  std::size_t jumps = 0;
  double deviation = 0.0;
  std::string error;
};

int cmd_sweep(const SweepOptions& o) {
  const Scenario base = load_scenario(o.config);
  const auto target = parse_target(o.target);
  if (!target) throw ConfigError(fmt::format("unknown attack target '{}'", o.target));
  if (!(o.duration > 0.0)) throw ConfigError("sweep duration must be > 0");
  validate(base);

  fs::create_directories(o.out_dir);
  const BaselineTrace baseline = run_baseline(base);

  std::vector<Cell> cells;
  for (double onset : o.onsets) {
    for (double mag : o.magnitudes) {
      Cell c;
      c.onset = onset;
      c.magnitude = mag;
      cells.push_back(c);
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& c = cells[i];
      c.file = fmt::format("{}_onset{}_mag{}.csv", base.name, c.onset, c.magnitude);
      try {
        Scenario s = base;
        s.attack.segments = {AttackSegment{*target, c.onset, c.onset + o.duration, ConstantSignal{c.magnitude}}};
        const RunResult r = run(s);
        write_trace(fs::path(o.out_dir) / c.file, r.rows);
        c.termination = hybrid::to_string(r.arc.termination);
        c.jumps = r.arc.jumps.size();
        const auto finals = final_rows(r.rows);
        if (finals.size() != baseline.u.size()) {
          c.deviation = std::numeric_limits<double>::infinity();
        } else {
          for (std::size_t k = 0; k < finals.size(); ++k) {
            c.deviation = std::max(c.deviation, std::abs(r.rows[finals[k]].u_star - baseline.u[k]));
          }
        }
      } catch (const Error& e) {
        c.error = e.what();
      }
    }
  };

  unsigned jobs = o.jobs > 0 ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
  }

  bool failed = false;
  with_output((fs::path(o.out_dir) / "summary.csv").string(), [&](std::ostream& os) {
    fmt::print(os, "onset,magnitude,trace,termination,jumps,max_u_star_deviation,error\n");
    for (const auto& c : cells) {
      fmt::print(os, "{:.17g},{:.17g},{},{},{},{:.17g},\"{}\"\n", c.onset, c.magnitude, c.file,
                 c.termination, c.jumps, c.deviation, c.error);
      failed = failed || !c.error.empty() || c.termination != "horizon-reached";
    }
  });
  fmt::print(stderr, "{} cells written to {}\n", cells.size(), o.out_dir);
  return failed ? kSolver : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supervised CACC simulator under sensor attacks"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write its trace");
  run_cmd->add_option("config", run_opts.config, "Scenario file")->required();
  run_cmd->add_option("-o,--output", run_opts.output, "Trace CSV (default <name>.csv, '-' for stdout)");
  run_cmd->add_option("--preset", run_opts.preset, "Replace the attack schedule by a named preset");

  PlotOptions plot_opts;
  auto* plot_cmd = app.add_subcommand("plot", "Render a trace as SVG");
  plot_cmd->add_option("trace", plot_opts.trace, "Trace CSV")->required();
  plot_cmd->add_option("-o,--output", plot_opts.output, "SVG file (default: trace name with .svg)");
  plot_cmd->add_option("--vars", plot_opts.variables, "Comma-separated panels (default v,u_star,mode)");

  VerifyOptions verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "Check properties over a scenario suite");
  verify_cmd->add_option("--suite", verify_opts.suite, "Suite directory (default $CACCGUARD_SUITE_DIR)");
  verify_cmd->add_option("-o,--report", verify_opts.report, "Report file (default stdout)");
  verify_cmd->add_flag("--mutations", verify_opts.mutations, "Also run the mutation scenarios");

  std::string modes_trace;
  auto* modes_cmd = app.add_subcommand("modes", "Print the mode timeline and jumps of a trace");
  modes_cmd->add_option("trace", modes_trace, "Trace CSV")->required();

  SweepOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid over attack onset and magnitude");
  sweep_cmd->add_option("config", sweep_opts.config, "Base scenario file")->required();
  sweep_cmd->add_option("-o,--out-dir", sweep_opts.out_dir, "Output directory")->capture_default_str();
  sweep_cmd->add_option("--target", sweep_opts.target, "Attacked channel")->capture_default_str();
  sweep_cmd->add_option("--onsets", sweep_opts.onsets, "Onset times [s]")->delimiter(',');
  sweep_cmd->add_option("--magnitudes", sweep_opts.magnitudes, "Constant offsets")->delimiter(',');
  sweep_cmd->add_option("--duration", sweep_opts.duration, "Attack length [s]")->capture_default_str();
  sweep_cmd->add_option("-j,--jobs", sweep_opts.jobs, "Worker threads (default: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts);
    if (*plot_cmd) return cmd_plot(plot_opts);
    if (*verify_cmd) return cmd_verify(verify_opts);
    if (*modes_cmd) return cmd_modes(modes_trace);
    if (*sweep_cmd) return cmd_sweep(sweep_opts);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const ScheduleOverlap& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const IoError& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kIo;
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "i/o error: {}\n", e.what());
    return kIo;
  } catch (const Error& e) {
    fmt::print(stderr, "solver error: {}\n", e.what());
    return kSolver;
  }
  return kUsage;
}

#include "caccguard/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "caccguard/errors.hpp"

namespace caccguard {

namespace {

namespace pt = boost::property_tree;

// Reads the keys of one section and rejects any key it was not asked about.
class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {
    for (const auto& [key, child] : tree_) {
      if (!child.empty()) throw ConfigError(fmt::format("[{}] {}: nested keys are not allowed", name_, key));
      if (!seen_.insert(key).second) {
        throw ConfigError(fmt::format("[{}] {}: duplicate key", name_, key));
      }
    }
  }

  std::optional<std::string> text(const std::string& key) {
    used_.insert(key);
    for (const auto& [k, child] : tree_) {
      if (k == key) return child.data();
    }
    return std::nullopt;
  }

  void number(const std::string& key, double& out) {
    if (auto v = text(key)) out = parse_double(key, *v);
  }

  void integer(const std::string& key, int& out) {
    if (auto v = text(key)) {
      int value = 0;
      const auto* end = v->data() + v->size();
      const auto [ptr, ec] = std::from_chars(v->data(), end, value);
      if (ec != std::errc{} || ptr != end) {
        throw ConfigError(fmt::format("[{}] {}: expected an integer, got '{}'", name_, key, *v));
      }
      out = value;
    }
  }

  double require_number(const std::string& key) {
    auto v = text(key);
    if (!v) throw ConfigError(fmt::format("[{}] {}: missing required key", name_, key));
    return parse_double(key, *v);
  }

  double parse_double(const std::string& key, const std::string& v) const {
    double value = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
      throw ConfigError(fmt::format("[{}] {}: expected a finite number, got '{}'", name_, key, v));
    }
    return value;
  }

  void finish() const {
    for (const auto& key : seen_) {
      if (!used_.contains(key)) throw ConfigError(fmt::format("[{}] {}: unknown key", name_, key));
    }
  }

 private:
  std::string name_;
  const pt::ptree& tree_;
  std::set<std::string> seen_;
  std::set<std::string> used_;
};

// "leader.3" -> 3
std::optional<int> indexed_section(const std::string& name, std::string_view prefix) {
  if (!name.starts_with(prefix)) return std::nullopt;
  const std::string_view digits = std::string_view(name).substr(prefix.size());
  int index = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || index < 1) {
    throw ConfigError(fmt::format("[{}]: section index must be a positive integer", name));
  }
  return index;
}

AttackSegment parse_segment(const std::string& name, Section& s) {
  AttackSegment seg;
  const auto target = s.text("target");
  if (!target) throw ConfigError(fmt::format("[{}] target: missing required key", name));
  const auto r = parse_target(*target);
  if (!r) {
    throw ConfigError(
        fmt::format("[{}] target: expected one of y5_1, y5_2, y6_1, y6_2, got '{}'", name, *target));
  }
  seg.target = *r;
  seg.t_start = s.require_number("start");
  seg.t_end = s.require_number("end");

  const std::string kind = s.text("signal").value_or("constant");
  if (kind == "constant") {
    seg.signal = ConstantSignal{s.require_number("offset")};
  } else if (kind == "ramp") {
    seg.signal = RampSignal{s.require_number("rate")};
  } else if (kind == "sinusoid") {
    SinusoidSignal sig;
    sig.amplitude = s.require_number("amplitude");
    sig.frequency = s.require_number("frequency");
    s.number("phase", sig.phase);
    seg.signal = sig;
  } else {
    throw ConfigError(
        fmt::format("[{}] signal: expected constant, ramp or sinusoid, got '{}'", name, kind));
  }
  return seg;
}

}  // namespace

Scenario default_scenario() {
  Scenario s;
  s.gains.coupling = s.plant.tau / s.policy.headway;
  return s;
}

void validate(const Scenario& s) {
  validate(s.plant);
  validate(s.policy);
  validate(s.gains);
  validate(s.leader);
  validate(s.supervisor);
  if (!(s.solver.dt > 0.0)) throw ConfigError("solver.dt must be > 0");
  if (!(s.solver.horizon > 0.0)) throw ConfigError("solver.horizon must be > 0");
  if (s.solver.max_jumps < 0) throw ConfigError("solver.max_jumps must be >= 0");
  if (s.solver.horizon / s.solver.dt > 1e8) throw ConfigError("solver.horizon / solver.dt exceeds 1e8 steps");
  if (s.followers < 1) throw ConfigError("platoon.followers must be >= 1");
  if (s.attacked_vehicle < 1 || s.attacked_vehicle > s.followers) {
    throw ConfigError(fmt::format("attack.vehicle must be in 1..{}", s.followers));
  }
  (void)validate_schedule(s.attack);
}

Scenario parse_scenario(std::string_view text, std::string name) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
  }

  Scenario s = default_scenario();
  s.name = std::move(name);
  std::string coupling = "auto";
  std::optional<std::string> preset_name;
  std::map<int, LeaderSegment> leader_segments;
  std::map<int, AttackSegment> attack_segments;

  for (const auto& [section_name, child] : tree) {
    if (child.empty() && !child.data().empty()) {
      throw ConfigError(fmt::format("{}: key outside of any section", section_name));
    }
    Section sec(section_name, child);
    if (section_name == "scenario") {
      if (auto v = sec.text("name")) s.name = *v;
    } else if (section_name == "plant") {
      sec.number("tau", s.plant.tau);
      sec.number("length", s.plant.length);
    } else if (section_name == "policy") {
      sec.number("headway", s.policy.headway);
      sec.number("standstill", s.policy.standstill);
    } else if (section_name == "gains") {
      sec.number("kp", s.gains.kp);
      sec.number("kd", s.gains.kd);
      if (auto v = sec.text("coupling")) coupling = *v;
      sec.number("split", s.gains.split);
    } else if (section_name == "leader") {
      sec.number("initial_velocity", s.leader.initial_velocity);
    } else if (section_name == "attack") {
      preset_name = sec.text("preset");
      sec.integer("vehicle", s.attacked_vehicle);
    } else if (section_name == "solver") {
      sec.number("dt", s.solver.dt);
      sec.number("horizon", s.solver.horizon);
      sec.integer("max_jumps", s.solver.max_jumps);
    } else if (section_name == "supervisor") {
      sec.number("eps_u_abs", s.supervisor.control.abs);
      sec.number("eps_u_rel", s.supervisor.control.rel);
      sec.number("eps_y_abs", s.supervisor.sensor.abs);
      sec.number("eps_y_rel", s.supervisor.sensor.rel);
    } else if (section_name == "platoon") {
      sec.integer("followers", s.followers);
    } else if (auto i = indexed_section(section_name, "leader.")) {
      LeaderSegment seg;
      seg.t_start = sec.require_number("start");
      seg.acceleration = sec.require_number("accel");
      leader_segments[*i] = seg;
    } else if (auto k = indexed_section(section_name, "attack.")) {
      attack_segments[*k] = parse_segment(section_name, sec);
    } else {
      throw ConfigError(fmt::format("[{}]: unknown section", section_name));
    }
    sec.finish();
  }

  for (const auto& [i, seg] : leader_segments) s.leader.segments.push_back(seg);
  if (preset_name && !attack_segments.empty()) {
    throw ConfigError("[attack] preset cannot be combined with explicit [attack.N] segments");
  }
  if (preset_name) s.attack = preset(*preset_name);
  for (const auto& [i, seg] : attack_segments) s.attack.segments.push_back(seg);

  validate(s.plant);
  validate(s.policy);
  if (coupling == "auto") {
    s.gains.coupling = s.plant.tau / s.policy.headway;
  } else {
    Section dummy("gains", pt::ptree{});
    s.gains.coupling = dummy.parse_double("coupling", coupling);
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open scenario '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str(), path.stem().string());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

ClosedLoopConfig to_closed_loop(const Scenario& s, const Mutation& mutation) {
  ClosedLoopConfig c;
  c.plant = s.plant;
  c.policy = s.policy;
  c.gains = s.gains;
  c.leader = s.leader;
  c.attack = validate_schedule(s.attack);
  c.followers = s.followers;
  c.attacked_vehicle = s.attacked_vehicle;
  c.tolerance = s.supervisor;
  c.mutation = mutation;
  return c;
}

std::vector<JumpEvent> jump_events(const ClosedLoop& loop, const hybrid::Arc& arc) {
  std::vector<JumpEvent> events;
  events.reserve(arc.jumps.size());
  for (const auto& jr : arc.jumps) {
    for (int f = 1; f <= loop.layout.followers(); ++f) {
      const Mode from = loop.layout.mode(jr.before, f);
      const Mode to = loop.layout.mode(jr.after, f);
      if (from == to) continue;
      events.push_back({jr.t, jr.j_after, f, from, to, GuardEdge{from, to}, describe_reset(from, to)});
      break;
    }
  }
  return events;
}

std::vector<TraceRow> trace_rows(const ClosedLoop& loop, const hybrid::Arc& arc,
                                 const std::vector<JumpEvent>& events) {
  const auto& cfg = *loop.config;
  const int target = cfg.attacked_vehicle;
  std::map<int, const JumpEvent*> by_index;
  for (const auto& e : events) by_index[e.j] = &e;

  std::vector<TraceRow> rows;
  rows.reserve(arc.samples.size());
  for (std::size_t s = 0; s < arc.samples.size(); ++s) {
    const auto& sample = arc.samples[s];
    const double t = sample.time.t;
    const Observation obs = loop.observe(t, sample.x, target);

    TraceRow row;
    row.t = t;
    row.j = sample.time.j;
    row.mode = std::string(to_string(obs.mode));
    row.vehicles.reserve(static_cast<std::size_t>(loop.layout.followers() + 1));
    for (int i = 0; i <= loop.layout.followers(); ++i) row.vehicles.push_back(loop.layout.vehicle(sample.x, i));
    row.e = obs.frame.trusted.spacing_error;
    row.rho = loop.layout.rho(sample.x, target);
    row.u = obs.quad;
    row.u_star = obs.u_star;
    if (const auto* seg = active_segment(cfg.attack, t)) row.attack = std::string(channel_name(seg->target));
    if (s > 0 && sample.time.j > arc.samples[s - 1].time.j) {
      if (auto it = by_index.find(sample.time.j); it != by_index.end()) {
        row.guard = to_string(it->second->guard);
        if (it->second->follower != target) row.guard += fmt::format("@{}", it->second->follower);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

RunResult run(const Scenario& scenario, const Mutation& mutation) {
  ClosedLoop loop = supervisor_as_hybrid_system(to_closed_loop(scenario, mutation));
  hybrid::Arc arc = hybrid::solve(loop.system, loop.initial, loop.input, scenario.solver);
  auto events = jump_events(loop, arc);
  auto rows = trace_rows(loop, arc, events);
  return RunResult{std::move(loop), std::move(arc), std::move(rows), std::move(events)};
}

BaselineTrace run_baseline(const Scenario& scenario) {
  ClosedLoop loop = baseline_hybrid_system(to_closed_loop(scenario));
  const hybrid::Arc arc = hybrid::solve(loop.system, loop.initial, loop.input, scenario.solver);
  BaselineTrace out;
  out.t.reserve(arc.samples.size());
  out.u.reserve(arc.samples.size());
  for (const auto& sample : arc.samples) {
    out.t.push_back(sample.time.t);
    out.u.push_back(loop.observe(sample.time.t, sample.x, scenario.attacked_vehicle).u_star);
  }
  return out;
}

}  // namespace caccguard

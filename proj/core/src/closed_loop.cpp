#include "caccguard/closed_loop.hpp"

#include <fmt/format.h>

#include "caccguard/errors.hpp"

namespace caccguard {

namespace {

constexpr std::size_t kVehicleWidth = 3;
constexpr std::size_t kSupervisorWidth = 5;

using hybrid::State;

void check(const ClosedLoopConfig& c) {
  validate(c.plant);
  validate(c.policy);
  validate(c.gains);
  validate(c.leader);
  validate(c.tolerance);
  if (c.followers < 1) throw ConfigError("platoon needs at least one follower");
  if (c.attacked_vehicle < 1 || c.attacked_vehicle > c.followers) {
    throw ConfigError(fmt::format("attacked vehicle {} is not a follower index in 1..{}",
                                  c.attacked_vehicle, c.followers));
  }
}

double feedforward(const LoopInput& in, int follower) {
  return follower == 1 ? in.leader_command : in.applied[static_cast<std::size_t>(follower - 2)];
}

const AttackOffsets& offsets_for(const ClosedLoopConfig& c, const LoopInput& in, int follower) {
  static const AttackOffsets healthy{};
  return follower == c.attacked_vehicle ? in.offsets : healthy;
}

SensorFrame frame_for(const ClosedLoopConfig& c, const StateLayout& layout, const State& x,
                      const LoopInput& in, int follower) {
  return measure(layout.vehicle(x, follower - 1), layout.vehicle(x, follower),
                 feedforward(in, follower), c.plant, c.policy, offsets_for(c, in, follower));
}

State initial_state(const ClosedLoopConfig& c, const StateLayout& layout) {
  State x(layout.dimension(), 0.0);
  const double v0 = c.leader.initial_velocity;
  const double gap = c.plant.length + c.policy.standstill + c.policy.headway * v0;
  VehicleState vehicle{0.0, v0, 0.0};
  layout.set_vehicle(x, 0, vehicle);
  for (int f = 1; f <= c.followers; ++f) {
    vehicle.p -= gap;
    layout.set_vehicle(x, f, vehicle);
    // Equilibrium: zero commanded input.
    if (layout.supervised()) {
      layout.set_rho(x, f, consistent_initialization(0.0, vehicle.a, c.gains));
      layout.set_mode(x, f, Mode::q0);
    } else {
      layout.set_nominal(x, f, 0.0);
    }
  }
  return x;
}

}  // namespace

std::string to_string(const Mutation& mutation) {
  if (!mutation.any()) return "none";
  std::string out;
  if (mutation.flip_variant_sign) out = "flip-reset-sign";
  if (mutation.disabled_guard) {
    out += (out.empty() ? "" : "+") + fmt::format("disable-guard:{}", to_string(*mutation.disabled_guard));
  }
  return out;
}

StateLayout::StateLayout(int followers, bool supervised)
    : followers_(followers), supervised_(supervised) {}

std::size_t StateLayout::dimension() const {
  const auto n = static_cast<std::size_t>(followers_);
  return kVehicleWidth * (n + 1) + (supervised_ ? kSupervisorWidth : 1) * n;
}

VehicleState StateLayout::vehicle(const State& x, int i) const {
  const auto o = kVehicleWidth * static_cast<std::size_t>(i);
  return {x[o], x[o + 1], x[o + 2]};
}

void StateLayout::set_vehicle(State& x, int i, const VehicleState& v) const {
  const auto o = kVehicleWidth * static_cast<std::size_t>(i);
  x[o] = v.p;
  x[o + 1] = v.v;
  x[o + 2] = v.a;
}

std::size_t StateLayout::controller_offset(int follower) const {
  const auto base = kVehicleWidth * static_cast<std::size_t>(followers_ + 1);
  return base + (supervised_ ? kSupervisorWidth : 1) * static_cast<std::size_t>(follower - 1);
}

RealizationState StateLayout::rho(const State& x, int follower) const {
  const auto o = controller_offset(follower);
  return {x[o], x[o + 1], x[o + 2], x[o + 3]};
}

void StateLayout::set_rho(State& x, int follower, const RealizationState& rho) const {
  const auto o = controller_offset(follower);
  for (std::size_t i = 0; i < 4; ++i) x[o + i] = rho[i];
}

Mode StateLayout::mode(const State& x, int follower) const {
  return static_cast<Mode>(static_cast<int>(x[controller_offset(follower) + 4]));
}

void StateLayout::set_mode(State& x, int follower, Mode mode) const {
  x[controller_offset(follower) + 4] = static_cast<double>(static_cast<int>(mode));
}

double StateLayout::nominal(const State& x, int follower) const {
  return x[controller_offset(follower)];
}

void StateLayout::set_nominal(State& x, int follower, double rho) const {
  x[controller_offset(follower)] = rho;
}

std::optional<GuardEdge> active_guard(const ClosedLoopConfig& config, Mode mode,
                                      const ControlQuad& quad, const SensorFrame& frame) {
  if (!config.mutation.disabled_guard) return evaluate_guards(mode, quad, frame, config.tolerance);
  auto hits = matching_guards(mode, quad, frame, config.tolerance);
  std::erase(hits, *config.mutation.disabled_guard);
  if (hits.empty()) return std::nullopt;
  if (hits.size() > 1) return evaluate_guards(mode, quad, frame, config.tolerance);  // throws
  return hits.front();
}

Observation ClosedLoop::observe(double t, const State& x, int follower) const {
  const auto& c = *config;
  const LoopInput in = input(t, x);
  Observation obs;
  obs.frame = frame_for(c, layout, x, in, follower);
  if (layout.supervised()) {
    obs.quad = realization_outputs(layout.rho(x, follower), obs.frame, c.gains, c.policy);
    obs.mode = layout.mode(x, follower);
    obs.u_star = select_control(obs.mode, obs.quad);
  } else {
    obs.u_star = nominal_output(layout.nominal(x, follower));
    obs.quad.fill(obs.u_star);
  }
  return obs;
}

ClosedLoop supervisor_as_hybrid_system(ClosedLoopConfig config) {
  check(config);
  auto cfg = std::make_shared<const ClosedLoopConfig>(std::move(config));
  StateLayout layout(cfg->followers, true);

  hybrid::InputSource<LoopInput> input = [cfg, layout](double t, const State& x) {
    LoopInput in;
    in.leader_command = leader_acceleration(t, cfg->leader);
    in.offsets = evaluate(cfg->attack, t);
    in.applied.assign(static_cast<std::size_t>(cfg->followers), 0.0);
    for (int f = 1; f <= cfg->followers; ++f) {
      const SensorFrame frame = frame_for(*cfg, layout, x, in, f);
      const ControlQuad quad = realization_outputs(layout.rho(x, f), frame, cfg->gains, cfg->policy);
      in.applied[static_cast<std::size_t>(f - 1)] = select_control(layout.mode(x, f), quad);
    }
    return in;
  };

  hybrid::SystemDef<LoopInput> sys;
  sys.dimension = layout.dimension();
  sys.flow_map = [cfg, layout](const State& x, const LoopInput& in, double) {
    State dx(x.size(), 0.0);
    const VehicleState leader = layout.vehicle(x, 0);
    layout.set_vehicle(dx, 0, vehicle_derivative(leader, in.leader_command, cfg->plant));
    for (int f = 1; f <= cfg->followers; ++f) {
      const double u = in.applied[static_cast<std::size_t>(f - 1)];
      layout.set_vehicle(dx, f, vehicle_derivative(layout.vehicle(x, f), u, cfg->plant));
      const SensorFrame frame = frame_for(*cfg, layout, x, in, f);
      const RealizationState rho = layout.rho(x, f);
      RealizationState drho{};
      for (Realization r : kRealizations) {
        drho[r.index()] = realization_derivative(r, rho[r.index()], frame, u, cfg->gains,
                                                 cfg->plant, cfg->policy);
      }
      layout.set_rho(dx, f, drho);
    }
    return dx;
  };

  auto guard_for = [cfg, layout](const State& x, const LoopInput& in, int f) {
    const SensorFrame frame = frame_for(*cfg, layout, x, in, f);
    const ControlQuad quad = realization_outputs(layout.rho(x, f), frame, cfg->gains, cfg->policy);
    return std::make_pair(active_guard(*cfg, layout.mode(x, f), quad, frame), frame);
  };

  sys.flow_set = [cfg, layout](const State& x, const LoopInput& in) {
    for (int f = 1; f <= cfg->followers; ++f) {
      const SensorFrame frame = frame_for(*cfg, layout, x, in, f);
      const ControlQuad quad = realization_outputs(layout.rho(x, f), frame, cfg->gains, cfg->policy);
      if (!in_flow_set(layout.mode(x, f), quad, frame, cfg->tolerance)) return false;
    }
    return true;
  };

  sys.jump_set = [cfg, guard_for](const State& x, const LoopInput& in) {
    for (int f = 1; f <= cfg->followers; ++f) {
      if (guard_for(x, in, f).first) return true;
    }
    return false;
  };

  // One follower jumps per event; simultaneous guards resolve over
  // consecutive jumps at the same t, lowest follower index first.
  sys.jump_map = [cfg, layout, guard_for](const State& x, const LoopInput& in) {
    State next = x;
    for (int f = 1; f <= cfg->followers; ++f) {
      const auto [edge, frame] = guard_for(x, in, f);
      if (!edge) continue;
      const ResetOptions opts{cfg->mutation.flip_variant_sign};
      layout.set_rho(next, f,
                     apply_reset(edge->from, edge->to, layout.rho(x, f), frame, cfg->gains.coupling, opts));
      layout.set_mode(next, f, edge->to);
      break;
    }
    return next;
  };

  State x0 = initial_state(*cfg, layout);
  return ClosedLoop{cfg, layout, std::move(sys), std::move(input), std::move(x0)};
}

ClosedLoop baseline_hybrid_system(ClosedLoopConfig config) {
  config.attack = ValidatedSchedule{};
  config.mutation = {};
  check(config);
  auto cfg = std::make_shared<const ClosedLoopConfig>(std::move(config));
  StateLayout layout(cfg->followers, false);

  hybrid::InputSource<LoopInput> input = [cfg, layout](double t, const State& x) {
    LoopInput in;
    in.leader_command = leader_acceleration(t, cfg->leader);
    in.applied.assign(static_cast<std::size_t>(cfg->followers), 0.0);
    for (int f = 1; f <= cfg->followers; ++f) {
      in.applied[static_cast<std::size_t>(f - 1)] = nominal_output(layout.nominal(x, f));
    }
    return in;
  };

  hybrid::SystemDef<LoopInput> sys;
  sys.dimension = layout.dimension();
  sys.flow_map = [cfg, layout](const State& x, const LoopInput& in, double) {
    State dx(x.size(), 0.0);
    layout.set_vehicle(dx, 0, vehicle_derivative(layout.vehicle(x, 0), in.leader_command, cfg->plant));
    for (int f = 1; f <= cfg->followers; ++f) {
      const double u = in.applied[static_cast<std::size_t>(f - 1)];
      layout.set_vehicle(dx, f, vehicle_derivative(layout.vehicle(x, f), u, cfg->plant));
      const SensorFrame frame = frame_for(*cfg, layout, x, in, f);
      layout.set_nominal(dx, f, nominal_derivative(layout.nominal(x, f), frame, cfg->gains, cfg->policy));
    }
    return dx;
  };
  sys.flow_set = [](const State&, const LoopInput&) { return true; };
  sys.jump_set = [](const State&, const LoopInput&) { return false; };
  sys.jump_map = [](const State& x, const LoopInput&) { return x; };

  State x0 = initial_state(*cfg, layout);
  return ClosedLoop{cfg, layout, std::move(sys), std::move(input), std::move(x0)};
}

}  // namespace caccguard

#pragma once

// Generic flow/jump solver for hybrid systems
//
//     x'  = f(x, u)   while (x, u) in C
//     x+  = g(x, u)   when  (x, u) in D
//
// Solutions are recorded over a hybrid time domain: every sample carries the
// pair (t, j) of continuous time and jump count. Flow uses fixed-step RK4;
// the jump set is checked at step boundaries only, and a jump always wins
// when both predicates hold.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string_view>
#include <utility>
#include <vector>

#include "caccguard/errors.hpp"

namespace caccguard::hybrid {

using State = std::vector<double>;

struct HybridTime {
  double t = 0.0;
  int j = 0;

  friend bool operator==(const HybridTime&, const HybridTime&) = default;
};

template <typename Input>
struct SystemDef {
  std::size_t dimension = 0;
  std::function<State(const State&, const Input&, double)> flow_map;
  std::function<State(const State&, const Input&)> jump_map;
  std::function<bool(const State&, const Input&)> flow_set;
  std::function<bool(const State&, const Input&)> jump_set;
};

// Exogenous input, sampled once per step from the step-start time and state
// and then held over the step.
template <typename Input>
using InputSource = std::function<Input(double, const State&)>;

struct Sample {
  HybridTime time;
  State x;
};

struct JumpRecord {
  double t = 0.0;
  State before;
  State after;
  int j_before = 0;
  int j_after = 0;
};

enum class Termination { HorizonReached, MaxJumpsReached, UncoveredState };

constexpr std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::HorizonReached: return "horizon-reached";
    case Termination::MaxJumpsReached: return "max-jumps-reached";
    case Termination::UncoveredState: return "uncovered-state";
  }
  return "unknown";
}

struct Arc {
  std::vector<Sample> samples;
  std::vector<JumpRecord> jumps;
  Termination termination = Termination::HorizonReached;
};

struct SolverSettings {
  double dt = 1e-3;
  double horizon = 60.0;
  int max_jumps = 10000;
};

namespace detail {

template <typename Input>
State checked_derivative(const SystemDef<Input>& sys, const State& x, const Input& u, double t) {
  State dx = sys.flow_map(x, u, t);
  if (dx.size() != x.size()) {
    throw ContractViolation("flow map returned a derivative of the wrong dimension");
  }
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (!std::isfinite(dx[i])) throw NumericalBlowup(i, dx[i]);
  }
  return dx;
}

inline State axpy(const State& x, const State& k, double h) {
  State out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * k[i];
  return out;
}

}  // namespace detail

// One classical RK4 step of the flow map over [t, t + dt], input held fixed.
template <typename Input>
State integrate_flow_step(const SystemDef<Input>& sys, const State& x, const Input& u, double t,
                          double dt) {
  if (!(dt > 0.0)) throw ContractViolation("integrate_flow_step requires dt > 0");
  const double half = 0.5 * dt;
  const State k1 = detail::checked_derivative(sys, x, u, t);
  const State k2 = detail::checked_derivative(sys, detail::axpy(x, k1, half), u, t + half);
  const State k3 = detail::checked_derivative(sys, detail::axpy(x, k2, half), u, t + half);
  const State k4 = detail::checked_derivative(sys, detail::axpy(x, k3, dt), u, t + dt);

  State next(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    next[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return next;
}

template <typename Input>
Arc solve(const SystemDef<Input>& sys, State x0, const InputSource<Input>& input,
          const SolverSettings& settings) {
  if (!(settings.dt > 0.0)) throw ContractViolation("solve requires dt > 0");
  if (!(settings.horizon > 0.0)) throw ContractViolation("solve requires horizon > 0");
  if (settings.max_jumps < 0) throw ContractViolation("solve requires max_jumps >= 0");
  if (x0.size() != sys.dimension) throw ContractViolation("initial state has the wrong dimension");
  for (double v : x0) {
    if (!std::isfinite(v)) throw ContractViolation("initial state must be finite");
  }

  // Step k ends at k * dt; the final step is clipped onto the horizon.
  const auto steps = static_cast<long>(std::ceil(settings.horizon / settings.dt - 1e-9));

  Arc arc;
  State x = std::move(x0);
  double t = 0.0;
  int j = 0;
  long n = 0;
  arc.samples.push_back({{t, j}, x});

  while (true) {
    const Input u = input(t, x);
    if (sys.jump_set(x, u)) {
      if (j >= settings.max_jumps) {
        arc.termination = Termination::MaxJumpsReached;
        break;
      }
      State after = sys.jump_map(x, u);
      if (after.size() != x.size()) {
        throw ContractViolation("jump map returned a state of the wrong dimension");
      }
      arc.jumps.push_back({t, x, after, j, j + 1});
      ++j;
      x = std::move(after);
      arc.samples.push_back({{t, j}, x});
      continue;
    }
    if (n >= steps) {
      arc.termination = Termination::HorizonReached;
      break;
    }
    if (!sys.flow_set(x, u)) {
      arc.termination = Termination::UncoveredState;
      break;
    }
    const double t_next =
        (n + 1 == steps) ? settings.horizon : static_cast<double>(n + 1) * settings.dt;
    x = integrate_flow_step(sys, x, u, t, t_next - t);
    ++n;
    t = t_next;
    arc.samples.push_back({{t, j}, x});
  }
  return arc;
}

}  // namespace caccguard::hybrid

#include "caccguard/controllers.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "caccguard/errors.hpp"

namespace caccguard {

void validate(const Tolerance& tol) {
  for (const Comparison* c : {&tol.control, &tol.sensor}) {
    if (!(c->abs >= 0.0) || !(c->rel >= 0.0)) {
      throw ConfigError("tolerance components must be >= 0");
    }
    if (c->abs == 0.0 && c->rel == 0.0) {
      throw ConfigError("tolerance must not be all zero");
    }
  }
}

void validate(const ControllerGains& gains) {
  if (!(gains.kp > 0.0) || !std::isfinite(gains.kp)) {
    throw ConfigError(fmt::format("gains.kp must be > 0 (got {})", gains.kp));
  }
  if (!(gains.kd > 0.0) || !std::isfinite(gains.kd)) {
    throw ConfigError(fmt::format("gains.kd must be > 0 (got {})", gains.kd));
  }
  if (!(gains.coupling >= 0.0) || !std::isfinite(gains.coupling)) {
    throw ConfigError(fmt::format("gains.coupling must be >= 0 (got {})", gains.coupling));
  }

  if (!(gains.split >= 0.0) || !(gains.split <= 1.0)) {
    throw ConfigError(fmt::format("gains.split must be in [0, 1] (got {})", gains.split));
  }
}

namespace {

// The realization's own view of the ego acceleration.
double own_acceleration(Realization r, const SensorFrame& frame, const SpacingPolicy& policy) {
  if (r.j == 1) return frame.y5(r.k);
  return (frame.trusted.relative_velocity - frame.y6(r.k)) / policy.headway;
}

}  // namespace

double realization_derivative(Realization r, double rho, const SensorFrame& frame, double u_applied,
                              const ControllerGains& gains, const PlantParams& params,
                              const SpacingPolicy& policy) {
  const auto& in = frame.trusted;
  const double h = policy.headway;
  const double c = gains.offset(r.j);
  const double a = own_acceleration(r, frame, policy);
  const double rate = r.j == 1 ? in.relative_velocity - h * frame.y5(r.k) : frame.y6(r.k);
  const double u = rho - c * a;
  return (-u + gains.kp * in.spacing_error + gains.kd * rate + in.feedforward) / h +
         c * (u_applied - a) / params.tau;
}

double realization_output(Realization r, double rho, const SensorFrame& frame,
                          const ControllerGains& gains, const SpacingPolicy& policy) {
  return rho - gains.offset(r.j) * own_acceleration(r, frame, policy);
}

ControlQuad realization_outputs(const RealizationState& rho, const SensorFrame& frame,
                                const ControllerGains& gains, const SpacingPolicy& policy) {
  ControlQuad quad{};
  for (Realization r : kRealizations) {
    quad[r.index()] = realization_output(r, rho[r.index()], frame, gains, policy);
  }
  return quad;
}

double coupling_forward(double rho_1, double y5, double c) { return rho_1 + c * y5; }

double coupling_backward(double rho_2, double y5, double c) { return rho_2 - c * y5; }

RealizationState consistent_initialization(double u_nominal, double s5, const ControllerGains& gains) {
  const double rho_1 = u_nominal + gains.offset(1) * s5;
  const double rho_2 = coupling_forward(rho_1, s5, gains.coupling);
  return {rho_1, rho_1, rho_2, rho_2};
}

double nominal_derivative(double rho, const SensorFrame& frame, const ControllerGains& gains,
                          const SpacingPolicy& policy) {
  const auto& in = frame.trusted;
  const double h = policy.headway;
  const double a_ego = frame.y5(1);
  return (-rho + gains.kp * in.spacing_error + gains.kd * (in.relative_velocity - h * a_ego) +
          in.feedforward) /
         h;
}

double nominal_output(double rho) { return rho; }

bool check_realization_properties(const SensorFrame& frame, const ControlQuad& quad,
                                  const Tolerance& tol) {
  if (!tol.sensor.close(frame.y5(1), frame.y5(2))) return false;
  if (!tol.sensor.close(frame.y6(1), frame.y6(2))) return false;
  for (std::size_t a = 0; a < quad.size(); ++a) {
    for (std::size_t b = a + 1; b < quad.size(); ++b) {
      if (!tol.control.close(quad[a], quad[b])) return false;
    }
  }
  return true;
}

double output_spread(const ControlQuad& quad) {
  const auto [lo, hi] = std::minmax_element(quad.begin(), quad.end());
  return *hi - *lo;
}

}  // namespace caccguard

#include "caccguard/platoon.hpp"

#include <cmath>

#include <fmt/format.h>

#include "caccguard/errors.hpp"

namespace caccguard {

std::string_view channel_name(Realization r) {
  static constexpr std::array<std::string_view, 4> names{"y5_1", "y5_2", "y6_1", "y6_2"};
  return names[r.index()];
}

void validate(const PlantParams& params) {
  if (!(params.tau > 0.0) || !std::isfinite(params.tau)) {
    throw ConfigError(fmt::format("plant.tau must be > 0 (got {})", params.tau));
  }
  if (!(params.length >= 0.0) || !std::isfinite(params.length)) {
    throw ConfigError(fmt::format("plant.length must be >= 0 (got {})", params.length));
  }
}

void validate(const SpacingPolicy& policy) {
  if (!(policy.headway > 0.0) || !std::isfinite(policy.headway)) {
    throw ConfigError(fmt::format("policy.headway must be > 0 (got {})", policy.headway));
  }
  if (!(policy.standstill >= 0.0) || !std::isfinite(policy.standstill)) {
    throw ConfigError(fmt::format("policy.standstill must be >= 0 (got {})", policy.standstill));
  }
}

void validate(const LeaderProfile& profile) {
  if (!std::isfinite(profile.initial_velocity)) {
    throw ConfigError("leader.initial_velocity must be finite");
  }
  for (std::size_t i = 0; i < profile.segments.size(); ++i) {
    const auto& s = profile.segments[i];
    if (!std::isfinite(s.t_start) || !std::isfinite(s.acceleration)) {
      throw ConfigError(fmt::format("leader segment #{} has non-finite fields", i + 1));
    }
    if (i > 0 && !(s.t_start > profile.segments[i - 1].t_start)) {
      throw ConfigError(
          fmt::format("leader segment start times must be strictly increasing (segment #{})", i + 1));
    }
  }
}

VehicleState vehicle_derivative(const VehicleState& x, double u, const PlantParams& params) {
  return {x.v, x.a, (u - x.a) / params.tau};
}

double spacing_error(const VehicleState& pred, const VehicleState& ego, const PlantParams& params,
                     const SpacingPolicy& policy) {
  return pred.p - ego.p - params.length - (policy.standstill + policy.headway * ego.v);
}

std::array<double, 2> duplicated_truth(const VehicleState& pred, const VehicleState& ego,
                                       const SpacingPolicy& policy) {
  const double dv = pred.v - ego.v;
  return {ego.a, dv - policy.headway * ego.a};
}

SensorFrame measure(const VehicleState& pred, const VehicleState& ego, double u_pred,
                    const PlantParams& params, const SpacingPolicy& policy,
                    const AttackOffsets& offsets) {
  int active = 0;
  for (double d : offsets) active += (d != 0.0) ? 1 : 0;
  if (active > 1) {
    throw AssumptionViolation(
        fmt::format("{} duplicated sensors attacked simultaneously; at most one is allowed", active));
  }

  SensorFrame frame;
  frame.trusted.spacing_error = spacing_error(pred, ego, params, policy);
  frame.trusted.relative_velocity = pred.v - ego.v;
  frame.trusted.ego_velocity = ego.v;
  frame.trusted.feedforward = u_pred;

  const auto truth = duplicated_truth(pred, ego, policy);
  for (Realization r : kRealizations) {
    frame.duplicated[r.index()] = truth[static_cast<std::size_t>(r.j - 1)] + offsets[r.index()];
  }
  return frame;
}

double leader_acceleration(double t, const LeaderProfile& profile) {
  double u = 0.0;
  for (const auto& s : profile.segments) {
    if (t >= s.t_start) {
      u = s.acceleration;
    } else {
      break;
    }
  }
  return u;
}

}  // namespace caccguard

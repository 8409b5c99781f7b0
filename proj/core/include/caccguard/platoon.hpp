#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

namespace caccguard {

// Longitudinal state of one vehicle.
struct VehicleState {
  double p = 0.0;  // position [m]
  double v = 0.0;  // velocity [m/s]
  double a = 0.0;  // acceleration [m/s^2]

  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct PlantParams {
  double tau = 0.1;     // drive-line time constant [s]
  double length = 4.5;  // vehicle length [m]
};

// Constant time-headway policy: desired gap r + h * v.
struct SpacingPolicy {
  double headway = 0.5;     // h [s]
  double standstill = 2.0;  // r [m]
};

// Identifies controller realization F_{j|k} and, equivalently, the duplicated
// sensor y_{4+j|k} it is the only realization to read.
struct Realization {
  int j = 1;
  int k = 1;

  constexpr std::size_t index() const { return static_cast<std::size_t>(2 * (j - 1) + (k - 1)); }
  static constexpr Realization from_index(std::size_t i) {
    return {static_cast<int>(i / 2) + 1, static_cast<int>(i % 2) + 1};
  }
  friend constexpr bool operator==(Realization, Realization) = default;
};

inline constexpr std::array<Realization, 4> kRealizations{
    Realization{1, 1}, Realization{1, 2}, Realization{2, 1}, Realization{2, 2}};

// "y5_1", "y5_2", "y6_1", "y6_2"
std::string_view channel_name(Realization r);

// Additive injections (d5_1, d5_2, d6_1, d6_2), indexed by Realization::index().
using AttackOffsets = std::array<double, 4>;

struct TrustedChannels {
  double spacing_error = 0.0;      // e [m]
  double relative_velocity = 0.0;  // dv = v_pred - v_ego [m/s]
  double ego_velocity = 0.0;       // [m/s]
  double feedforward = 0.0;        // predecessor input u_ff [m/s^2]
};

// One sample of everything the controllers see. The duplicated channels are
// two copies of s5 (ego acceleration) and two of s6 (spacing-error rate
// dv - h * a_ego), each possibly carrying an injection.
struct SensorFrame {
  TrustedChannels trusted;
  std::array<double, 4> duplicated{};

  double y(Realization r) const { return duplicated[r.index()]; }
  double y5(int k) const { return duplicated[Realization{1, k}.index()]; }
  double y6(int k) const { return duplicated[Realization{2, k}.index()]; }
};

struct LeaderSegment {
  double t_start = 0.0;
  double acceleration = 0.0;
};

struct LeaderProfile {
  std::vector<LeaderSegment> segments;
  double initial_velocity = 20.0;
};

// Throws ConfigError when the plant or policy parameters are out of range.
void validate(const PlantParams& params);
void validate(const SpacingPolicy& policy);
void validate(const LeaderProfile& profile);

// (p', v', a') = (v, a, (u - a) / tau)
VehicleState vehicle_derivative(const VehicleState& x, double u, const PlantParams& params);

// e = p_pred - p_ego - L - (r + h * v_ego)
double spacing_error(const VehicleState& pred, const VehicleState& ego, const PlantParams& params,
                     const SpacingPolicy& policy);

// True values of the two duplicated quantities (s5, s6).
std::array<double, 2> duplicated_truth(const VehicleState& pred, const VehicleState& ego,
                                       const SpacingPolicy& policy);

// Builds the sensor frame; throws AssumptionViolation if more than one
// offset is non-zero.
SensorFrame measure(const VehicleState& pred, const VehicleState& ego, double u_pred,
                    const PlantParams& params, const SpacingPolicy& policy,
                    const AttackOffsets& offsets);

// Piecewise-constant leader command. Segment starts are inclusive; zero before
// the first segment.
double leader_acceleration(double t, const LeaderProfile& profile);

}  // namespace caccguard

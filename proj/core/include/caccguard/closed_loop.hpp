#pragma once

// Closed-loop platoon as a single hybrid system.
//
// State layout: [leader p v a | follower_1 p v a | ... | follower_N p v a |
// per follower: rho_1_1 rho_1_2 rho_2_1 rho_2_2 mode]. The mode is a
// discrete tag with zero flow derivative that only the jump map changes.
// The baseline loop replaces each follower's supervisor block with the
// single nominal controller state.
//
// The applied input u* of every follower is sampled once per step from the
// step-start state (after any jumps at that instant) and held over the step;
// attack offsets and the leader command are held the same way.

#include <memory>
#include <optional>
#include <vector>

#include "caccguard/attack.hpp"
#include "caccguard/controllers.hpp"
#include "caccguard/hybrid.hpp"
#include "caccguard/platoon.hpp"
#include "caccguard/supervisor.hpp"
#include "caccguard/tolerance.hpp"

namespace caccguard {

// Deliberate defects used to check that the verification suite notices them.
struct Mutation {
  bool flip_variant_sign = false;
  std::optional<GuardEdge> disabled_guard;

  bool any() const { return flip_variant_sign || disabled_guard.has_value(); }
};

std::string to_string(const Mutation& mutation);

struct ClosedLoopConfig {
  PlantParams plant;
  SpacingPolicy policy;
  ControllerGains gains;
  LeaderProfile leader;
  ValidatedSchedule attack;
  int followers = 1;
  int attacked_vehicle = 1;  // follower index in 1..followers
  Tolerance tolerance;
  Mutation mutation;
};

struct LoopInput {
  double leader_command = 0.0;
  AttackOffsets offsets{};  // applied to the attacked follower only
  std::vector<double> applied;  // held u* per follower
};

class StateLayout {
 public:
  StateLayout(int followers, bool supervised);

  std::size_t dimension() const;
  int followers() const { return followers_; }
  bool supervised() const { return supervised_; }

  // Vehicle 0 is the leader.
  VehicleState vehicle(const hybrid::State& x, int i) const;
  void set_vehicle(hybrid::State& x, int i, const VehicleState& v) const;

  RealizationState rho(const hybrid::State& x, int follower) const;
  void set_rho(hybrid::State& x, int follower, const RealizationState& rho) const;
  Mode mode(const hybrid::State& x, int follower) const;
  void set_mode(hybrid::State& x, int follower, Mode mode) const;

  double nominal(const hybrid::State& x, int follower) const;
  void set_nominal(hybrid::State& x, int follower, double rho) const;

  std::size_t controller_offset(int follower) const;

 private:
  int followers_;
  bool supervised_;
};

// Everything the supervisor sees for one follower at one sample.
struct Observation {
  SensorFrame frame;
  ControlQuad quad{};
  Mode mode = Mode::q0;
  double u_star = 0.0;
};

struct ClosedLoop {
  std::shared_ptr<const ClosedLoopConfig> config;
  StateLayout layout;
  hybrid::SystemDef<LoopInput> system;
  hybrid::InputSource<LoopInput> input;
  hybrid::State initial;

  // Supervised loops: frame, quad, mode and selected input of `follower`.
  // Baseline loops: frame and nominal output (quad filled with it, mode q0).
  Observation observe(double t, const hybrid::State& x, int follower) const;
};

ClosedLoop supervisor_as_hybrid_system(ClosedLoopConfig config);
ClosedLoop baseline_hybrid_system(ClosedLoopConfig config);

// The guard that fires for this follower under the config's mutation, if any.
std::optional<GuardEdge> active_guard(const ClosedLoopConfig& config, Mode mode,
                                      const ControlQuad& quad, const SensorFrame& frame);

}  // namespace caccguard

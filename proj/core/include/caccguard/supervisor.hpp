#pragma once

// Hybrid supervisor over the realization bank.
//
// Mode q0 trusts all four realizations. Mode q_{j|k} declares sensor
// y_{4+j|k} compromised and excludes u_{j|k}. Flow sets, guards and resets
// compare realization outputs and duplicated sensors under a Tolerance; a
// compromised state is overwritten from a healthy one on every jump out of
// an attack mode.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "caccguard/controllers.hpp"
#include "caccguard/platoon.hpp"
#include "caccguard/tolerance.hpp"

namespace caccguard {

enum class Mode { q0 = 0, q_1_1 = 1, q_1_2 = 2, q_2_1 = 3, q_2_2 = 4 };

inline constexpr std::array<Mode, 5> kModes{Mode::q0, Mode::q_1_1, Mode::q_1_2, Mode::q_2_1,
                                            Mode::q_2_2};

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

Mode attack_mode(Realization r);
// The excluded realization of an attack mode; nullopt for q0.
std::optional<Realization> compromised(Mode mode);

enum class GuardKind {
  Detect,    // G(q0, q_{j|k})
  Recover,   // G(q_{j|k}, q0)
  Cross,     // G(q_{j|k}, q_{3-j|l})
  Variant,   // G(q_{j|k}, q_{j|3-k})
};

struct GuardEdge {
  Mode from = Mode::q0;
  Mode to = Mode::q0;

  GuardKind kind() const;
  friend bool operator==(const GuardEdge&, const GuardEdge&) = default;
};

// "G(q0,q_1_1)"
std::string to_string(const GuardEdge& edge);
std::optional<GuardEdge> parse_guard(std::string_view text);

// All twenty edges of the jump structure.
const std::vector<GuardEdge>& all_guard_edges();

struct JumpEvent {
  double t = 0.0;
  int j = 0;  // jump index after the jump
  int follower = 1;
  Mode from = Mode::q0;
  Mode to = Mode::q0;
  GuardEdge guard;
  std::string reset;
};

// Membership in C_q.
bool in_flow_set(Mode mode, const ControlQuad& quad, const SensorFrame& frame, const Tolerance& tol);

// Every guard out of `mode` that holds. Empty means no jump.
std::vector<GuardEdge> matching_guards(Mode mode, const ControlQuad& quad, const SensorFrame& frame,
                                       const Tolerance& tol);

// The unique guard out of `mode` that holds, if any. Throws AmbiguousGuards
// when more than one holds.
std::optional<GuardEdge> evaluate_guards(Mode mode, const ControlQuad& quad,
                                         const SensorFrame& frame, const Tolerance& tol);

struct ResetOptions {
  // Test-only mutation: inverts the (-1)^j factor of the variant reset.
  bool flip_variant_sign = false;
};

// Applies R(from, to). Throws ContractViolation for self-loops.
RealizationState apply_reset(Mode from, Mode to, const RealizationState& rho,
                             const SensorFrame& frame, double coupling,
                             const ResetOptions& options = {});

// "rho_1_1 <- rho_1_2" and friends; "none" for edges out of q0.
std::string describe_reset(Mode from, Mode to);

// Index into the quad of the input applied in `mode`: u_{1|1} in q0,
// otherwise the lowest-index healthy realization.
Realization selected_realization(Mode mode);
double select_control(Mode mode, const ControlQuad& quad);

}  // namespace caccguard

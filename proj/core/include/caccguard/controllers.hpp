#pragma once

// The bank of four equivalent controller realizations F_{j|k}.
//
// All four implement the same dynamic CACC law
//
//     h u' = -u + kp e + kd (dv - h a_ego) + u_ff
//
// but each reads exactly one duplicated sensor, from which it takes its own
// view of the ego acceleration:
//
//   F_{1|k}: a1 = y5_k
//   F_{2|k}: a2 = (dv - y6_k) / h        (y6_k = dv - h a_ego)
//
// Realization j stores rho_j = u + c_j a and evaluates
//
//     u_j    = rho_j - c_j a_j
//     rho_j' = (-u_j + kp e + kd s6_j + u_ff) / h + c_j (u_applied - a_j) / tau
//
// with s6_1 = dv - h y5_k and s6_2 = y6_k. The offsets are c_1 = -split * c
// and c_2 = (1 - split) * c, so rho_2 - rho_1 = c a on healthy data. That
// difference I obeys I' = -I / h, so any linear one-step integrator keeps it
// at zero. With c = 0 both realizations are pure state readouts of the same
// scalar ODE.

#include <array>

#include "caccguard/platoon.hpp"
#include "caccguard/tolerance.hpp"

namespace caccguard {

struct ControllerGains {
  double kp = 0.2;
  double kd = 0.7;
  double coupling = 0.2;  // c, nominally tau / h
  double split = 0.5;     // share of c carried by F_{1|.}, in [0, 1]

  double offset(int j) const { return j == 1 ? -split * coupling : (1.0 - split) * coupling; }
};

void validate(const ControllerGains& gains);

// rho_{1|1}, rho_{1|2}, rho_{2|1}, rho_{2|2}, indexed by Realization::index().
using RealizationState = std::array<double, 4>;

// u_{1|1}, u_{1|2}, u_{2|1}, u_{2|2}, indexed by Realization::index().
using ControlQuad = std::array<double, 4>;

double realization_derivative(Realization r, double rho, const SensorFrame& frame, double u_applied,
                              const ControllerGains& gains, const PlantParams& params,
                              const SpacingPolicy& policy);

double realization_output(Realization r, double rho, const SensorFrame& frame,
                          const ControllerGains& gains, const SpacingPolicy& policy);

ControlQuad realization_outputs(const RealizationState& rho, const SensorFrame& frame,
                                const ControllerGains& gains, const SpacingPolicy& policy);

// rho_2-compatible state from a healthy rho_1 and y5: rho_1 + c * y5.
double coupling_forward(double rho_1, double y5, double c);
// rho_1-compatible state from a healthy rho_2 and y5: rho_2 - c * y5.
double coupling_backward(double rho_2, double y5, double c);

// Quad consistent with a nominal input u: rho_{1|k} = u + c_1 s5 and
// rho_{2|k} = coupling_forward(rho_{1|k}, s5, c).
RealizationState consistent_initialization(double u_nominal, double s5, const ControllerGains& gains);

// The single baseline controller every realization is equivalent to.
double nominal_derivative(double rho, const SensorFrame& frame, const ControllerGains& gains,
                          const SpacingPolicy& policy);
double nominal_output(double rho);

// Healthy-data identities: both duplicate pairs agree and all four outputs
// agree, under the given tolerance.
bool check_realization_properties(const SensorFrame& frame, const ControlQuad& quad,
                                  const Tolerance& tol);

// Largest pairwise |u_a - u_b| over the quad.
double output_spread(const ControlQuad& quad);

}  // namespace caccguard

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "caccguard/platoon.hpp"

namespace caccguard {

struct ConstantSignal {
  double offset = 0.0;
};

struct RampSignal {
  double rate = 0.0;  // offset grows as rate * (t - t_start)
};

struct SinusoidSignal {
  double amplitude = 0.0;
  double frequency = 0.0;  // [Hz]
  double phase = 0.0;      // [rad]
};

using AttackSignal = std::variant<ConstantSignal, RampSignal, SinusoidSignal>;

// FDI on sensor y_{4+j|k}, active on [t_start, t_end).
struct AttackSegment {
  Realization target;
  double t_start = 0.0;
  double t_end = 0.0;
  AttackSignal signal = ConstantSignal{};
};

struct AttackSchedule {
  std::vector<AttackSegment> segments;
};

// A schedule known to respect the single-attack assumption: no two segments
// overlap on an open interval. Abutting segments model instantaneous
// switching. Only validate_schedule produces one.
class ValidatedSchedule {
 public:
  ValidatedSchedule() = default;

  const std::vector<AttackSegment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

 private:
  friend ValidatedSchedule validate_schedule(AttackSchedule schedule);
  explicit ValidatedSchedule(std::vector<AttackSegment> segments) : segments_(std::move(segments)) {}

  std::vector<AttackSegment> segments_;  // sorted by t_start
};

// Throws ScheduleOverlap naming the offending pair (1-based, input order), or
// ConfigError for malformed segments.
ValidatedSchedule validate_schedule(AttackSchedule schedule);

double signal_value(const AttackSignal& signal, double elapsed);

// Offsets (d5_1, d5_2, d6_1, d6_2) at time t; at most one is non-zero.
AttackOffsets evaluate(const ValidatedSchedule& schedule, double t);

// Segment active at t, if any.
const AttackSegment* active_segment(const ValidatedSchedule& schedule, double t);

// Canned schedules: "single-burst-5-1", "switch-5-1-to-6-2",
// "switch-5-1-to-5-2", "round-robin-all-four". Throws ConfigError otherwise.
AttackSchedule preset(std::string_view name);
const std::vector<std::string>& preset_names();

// "y5_1" style names <-> targets. Also accepts "5|1".
std::optional<Realization> parse_target(std::string_view text);

}  // namespace caccguard

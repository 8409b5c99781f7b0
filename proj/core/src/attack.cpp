#include "caccguard/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "caccguard/errors.hpp"

namespace caccguard {

namespace {

bool finite_signal(const AttackSignal& signal) {
  return std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantSignal>) {
          return std::isfinite(s.offset);
        } else if constexpr (std::is_same_v<T, RampSignal>) {
          return std::isfinite(s.rate);
        } else {
          return std::isfinite(s.amplitude) && std::isfinite(s.frequency) && std::isfinite(s.phase);
        }
      },
      signal);
}

std::string describe(const AttackSegment& s) {
  return fmt::format("{} [{}, {})", channel_name(s.target), s.t_start, s.t_end);
}

}  // namespace

ValidatedSchedule validate_schedule(AttackSchedule schedule) {
  auto& segs = schedule.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    if (s.target.j < 1 || s.target.j > 2 || s.target.k < 1 || s.target.k > 2) {
      throw ConfigError(fmt::format("attack segment #{} has an invalid target", i + 1));
    }
    if (!std::isfinite(s.t_start) || !std::isfinite(s.t_end) || !(s.t_start < s.t_end)) {
      throw ConfigError(fmt::format("attack segment #{} needs finite t_start < t_end", i + 1));
    }
    if (!finite_signal(s.signal)) {
      throw ConfigError(fmt::format("attack segment #{} has non-finite signal parameters", i + 1));
    }
    if (const auto* sine = std::get_if<SinusoidSignal>(&s.signal); sine && sine->frequency < 0.0) {
      throw ConfigError(fmt::format("attack segment #{} has a negative frequency", i + 1));
    }
  }

  std::vector<std::size_t> order(segs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return segs[a].t_start < segs[b].t_start; });
  for (std::size_t n = 1; n < order.size(); ++n) {
    const auto& prev = segs[order[n - 1]];
    const auto& next = segs[order[n]];
    if (next.t_start < prev.t_end) {
      const auto a = std::min(order[n - 1], order[n]) + 1;
      const auto b = std::max(order[n - 1], order[n]) + 1;
      throw ScheduleOverlap(a, b, fmt::format("{} and {}", describe(prev), describe(next)));
    }
  }

  std::vector<AttackSegment> sorted;
  sorted.reserve(segs.size());
  for (auto i : order) sorted.push_back(segs[i]);
  return ValidatedSchedule(std::move(sorted));
}

double signal_value(const AttackSignal& signal, double elapsed) {
  return std::visit(
      [elapsed](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantSignal>) {
          return s.offset;
        } else if constexpr (std::is_same_v<T, RampSignal>) {
          return s.rate * elapsed;
        } else {
          return s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency * elapsed + s.phase);
        }
      },
      signal);
}

const AttackSegment* active_segment(const ValidatedSchedule& schedule, double t) {
  for (const auto& s : schedule.segments()) {
    if (t < s.t_start) break;
    if (t < s.t_end) return &s;
  }
  return nullptr;
}

AttackOffsets evaluate(const ValidatedSchedule& schedule, double t) {
  AttackOffsets offsets{};
  if (const auto* s = active_segment(schedule, t)) {
    offsets[s->target.index()] = signal_value(s->signal, t - s->t_start);
  }
  return offsets;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"single-burst-5-1", "switch-5-1-to-6-2",
                                              "switch-5-1-to-5-2", "round-robin-all-four"};
  return names;
}

AttackSchedule preset(std::string_view name) {
  auto constant = [](Realization target, double t0, double t1, double offset) {
    return AttackSegment{target, t0, t1, ConstantSignal{offset}};
  };
  if (name == "single-burst-5-1") {
    return {{constant({1, 1}, 20.0, 30.0, 1.0)}};
  }
  if (name == "switch-5-1-to-6-2") {
    return {{constant({1, 1}, 20.0, 30.0, 1.0), constant({2, 2}, 30.0, 40.0, 0.5)}};
  }
  if (name == "switch-5-1-to-5-2") {
    return {{constant({1, 1}, 20.0, 30.0, 1.0), constant({1, 2}, 30.0, 40.0, 1.5)}};
  }
  if (name == "round-robin-all-four") {
    return {{constant({1, 1}, 10.0, 20.0, 1.0), constant({1, 2}, 20.0, 30.0, 1.5),
             constant({2, 1}, 30.0, 40.0, 0.5), constant({2, 2}, 40.0, 50.0, 2.0)}};
  }
  throw ConfigError(fmt::format("unknown attack preset '{}'", name));
}

std::optional<Realization> parse_target(std::string_view text) {
  for (Realization r : kRealizations) {
    if (text == channel_name(r)) return r;
    if (text == fmt::format("{}|{}", 4 + r.j, r.k)) return r;
  }
  return std::nullopt;
}

}  // namespace caccguard

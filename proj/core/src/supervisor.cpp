#include "caccguard/supervisor.hpp"

#include <fmt/format.h>

#include "caccguard/errors.hpp"

namespace caccguard {

namespace {

double u_of(const ControlQuad& quad, int j, int k) { return quad[Realization{j, k}.index()]; }

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::q0: return "q0";
    case Mode::q_1_1: return "q_1_1";
    case Mode::q_1_2: return "q_1_2";
    case Mode::q_2_1: return "q_2_1";
    case Mode::q_2_2: return "q_2_2";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  for (Mode m : kModes) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

Mode attack_mode(Realization r) { return static_cast<Mode>(1 + r.index()); }

std::optional<Realization> compromised(Mode mode) {
  if (mode == Mode::q0) return std::nullopt;
  return Realization::from_index(static_cast<std::size_t>(mode) - 1);
}

GuardKind GuardEdge::kind() const {
  if (from == Mode::q0) return GuardKind::Detect;
  if (to == Mode::q0) return GuardKind::Recover;
  const auto a = *compromised(from);
  const auto b = *compromised(to);
  return a.j == b.j ? GuardKind::Variant : GuardKind::Cross;
}

std::string to_string(const GuardEdge& edge) {
  return fmt::format("G({},{})", to_string(edge.from), to_string(edge.to));
}

const std::vector<GuardEdge>& all_guard_edges() {
  static const std::vector<GuardEdge> edges = [] {
    std::vector<GuardEdge> out;
    for (Mode from : kModes) {
      for (Mode to : kModes) {
        if (from != to) out.push_back({from, to});
      }
    }
    return out;
  }();
  return edges;
}

std::optional<GuardEdge> parse_guard(std::string_view text) {
  for (const auto& e : all_guard_edges()) {
    if (text == to_string(e)) return e;
  }
  return std::nullopt;
}

bool in_flow_set(Mode mode, const ControlQuad& quad, const SensorFrame& frame, const Tolerance& tol) {
  const auto& cu = tol.control;
  if (mode == Mode::q0) {
    return cu.close(quad[0], quad[1]) && cu.close(quad[0], quad[2]) && cu.close(quad[0], quad[3]) &&
           cu.close(quad[1], quad[2]) && cu.close(quad[1], quad[3]) && cu.close(quad[2], quad[3]);
  }
  const auto [j, k] = *compromised(mode);
  const bool sensors_differ = !tol.sensor.close(frame.y(Realization{j, 1}), frame.y(Realization{j, 2}));
  return sensors_differ && cu.close(u_of(quad, j, 3 - k), u_of(quad, 3 - j, 1), u_of(quad, 3 - j, 2));
}

std::vector<GuardEdge> matching_guards(Mode mode, const ControlQuad& quad, const SensorFrame& frame,
                                       const Tolerance& tol) {
  const auto& cu = tol.control;
  std::vector<GuardEdge> hits;

  if (mode == Mode::q0) {
    // u_{j|k} != u_{3-j|k} = u_{1|3-k} = u_{2|3-k}
    for (Realization r : kRealizations) {
      const auto [j, k] = r;
      const double suspect = u_of(quad, j, k);
      const double ref = u_of(quad, 3 - j, k);
      if (!cu.close(suspect, ref) && cu.close(ref, u_of(quad, 1, 3 - k), u_of(quad, 2, 3 - k))) {
        hits.push_back({mode, attack_mode(r)});
      }
    }
    return hits;
  }

  const auto [j, k] = *compromised(mode);
  const bool sensors_equal = tol.sensor.close(frame.y(Realization{j, 1}), frame.y(Realization{j, 2}));
  const double same_side = u_of(quad, j, 3 - k);

  if (sensors_equal) {
    // Attack stopped: u_{j|3-k} = u_{3-j|1} = u_{3-j|2}
    if (cu.close(same_side, u_of(quad, 3 - j, 1), u_of(quad, 3 - j, 2))) {
      hits.push_back({mode, Mode::q0});
    }
    // Attacker moved to the other realization: u_{j|3-k} = u_{3-j|3-l} != u_{3-j|l}
    for (int l = 1; l <= 2; ++l) {
      const double kept = u_of(quad, 3 - j, 3 - l);
      if (cu.close(same_side, kept) && !cu.close(kept, u_of(quad, 3 - j, l))) {
        hits.push_back({mode, attack_mode(Realization{3 - j, l})});
      }
    }
  } else {
    // Attacker moved to the sibling copy: u_{j|3-k} != u_{3-j|1} = u_{3-j|2}
    const double other_1 = u_of(quad, 3 - j, 1);
    const double other_2 = u_of(quad, 3 - j, 2);
    if (!cu.close(same_side, other_1) && cu.close(other_1, other_2)) {
      hits.push_back({mode, attack_mode(Realization{j, 3 - k})});
    }
  }
  return hits;
}

std::optional<GuardEdge> evaluate_guards(Mode mode, const ControlQuad& quad,
                                         const SensorFrame& frame, const Tolerance& tol) {
  auto hits = matching_guards(mode, quad, frame, tol);
  if (hits.empty()) return std::nullopt;
  if (hits.size() > 1) {
    std::string names;
    for (const auto& h : hits) names += (names.empty() ? "" : ", ") + to_string(h);
    throw AmbiguousGuards(fmt::format("{} guards hold in mode {}: {}", hits.size(),
                                      to_string(mode), names));
  }
  return hits.front();
}

RealizationState apply_reset(Mode from, Mode to, const RealizationState& rho,
                             const SensorFrame& frame, double coupling,
                             const ResetOptions& options) {
  if (from == to) {
    throw ContractViolation(fmt::format("no reset is defined for the self-loop at {}", to_string(from)));
  }
  RealizationState out = rho;
  if (from == Mode::q0) return out;

  const auto [j, k] = *compromised(from);
  const auto target = Realization{j, k}.index();
  const GuardEdge edge{from, to};

  if (edge.kind() == GuardKind::Variant) {
    // rho_{j|k}+ = rho_{3-j|k} + (-1)^j c y5_l, with l = k: the copy the
    // attacker just left is healthy at the jump instant.
    const double y5 = frame.y5(k);
    const double source = rho[Realization{3 - j, k}.index()];
    const bool forward = (j == 2) != options.flip_variant_sign;
    out[target] = forward ? coupling_forward(source, y5, coupling)
                          : coupling_backward(source, y5, coupling);
    return out;
  }
  // Recover and Cross: rho_{j|k}+ = rho_{j|3-k}
  out[target] = rho[Realization{j, 3 - k}.index()];
  return out;
}

std::string describe_reset(Mode from, Mode to) {
  if (from == Mode::q0 || from == to) return "none";
  const auto [j, k] = *compromised(from);
  if (GuardEdge{from, to}.kind() == GuardKind::Variant) {
    return fmt::format("rho_{}_{} <- rho_{}_{} {} c*y5_{}", j, k, 3 - j, k, j == 2 ? "+" : "-", k);
  }
  return fmt::format("rho_{}_{} <- rho_{}_{}", j, k, j, 3 - k);
}

Realization selected_realization(Mode mode) {
  const auto bad = compromised(mode);
  if (!bad) return Realization{1, 1};
  for (Realization r : kRealizations) {
    if (!(r == *bad)) return r;
  }
  return Realization{1, 1};
}

double select_control(Mode mode, const ControlQuad& quad) {
  return quad[selected_realization(mode).index()];
}

}  // namespace caccguard

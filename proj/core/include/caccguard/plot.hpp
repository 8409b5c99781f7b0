#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "caccguard/trace.hpp"

namespace caccguard {

// Panel selectors accepted by plot(): any numeric trace column (t excluded),
// the groups "p", "v", "a" (every vehicle), "rho" and "u" (the four
// realizations), and "mode" (step function over q0..q_2_2).
std::vector<std::string> plot_variables(std::size_t vehicles);

// v, u_star, mode.
std::vector<std::string> default_plot_panels();

// One stacked panel per variable, time on the x-axis, jumps drawn as dashed
// vertical markers. An empty selection means default_plot_panels().
// Throws ConfigError on an unknown variable or an empty trace.
void plot(std::ostream& out, const std::vector<TraceRow>& rows, std::vector<std::string> variables);
void plot(const std::filesystem::path& trace, const std::filesystem::path& output,
          const std::vector<std::string>& variables);

}  // namespace caccguard

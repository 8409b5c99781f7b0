#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "caccguard/platoon.hpp"

namespace caccguard {

// One CSV row: a solver sample or a jump. Vehicle 0 is the leader; the
// controller columns belong to the attacked follower.
struct TraceRow {
  double t = 0.0;
  int j = 0;
  std::string mode;
  std::vector<VehicleState> vehicles;
  double e = 0.0;
  std::array<double, 4> rho{};
  std::array<double, 4> u{};
  double u_star = 0.0;
  std::string attack = "none";
  std::string guard;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

// t,j,mode,p_0,v_0,a_0,...,e,rho_1_1,...,u_2_2,u_star,attack,guard
std::vector<std::string> trace_header(std::size_t vehicles);

// Floats use 17 significant digits so a parse reproduces them exactly.
void write_trace(std::ostream& out, const std::vector<TraceRow>& rows);
void write_trace(const std::filesystem::path& path, const std::vector<TraceRow>& rows);

// Throws ConfigError on a malformed header or row.
std::vector<TraceRow> read_trace(std::istream& in);
std::vector<TraceRow> read_trace(const std::filesystem::path& path);

}  // namespace caccguard

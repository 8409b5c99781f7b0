#include "caccguard/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "caccguard/errors.hpp"

namespace caccguard {

namespace {

constexpr std::array<const char*, 4> kSuffixes{"1_1", "1_2", "2_1", "2_2"};

// Fixed columns besides the per-vehicle block.
constexpr std::size_t kLeadingColumns = 3;   // t, j, mode
constexpr std::size_t kTrailingColumns = 12;  // e, rho x4, u x4, u_star, attack, guard

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ConfigError(fmt::format("trace line {}: unterminated quote", line_no));
  fields.push_back(std::move(cur));
  return fields;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_no, const std::string& column) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(fmt::format("trace line {}: bad value '{}' in column {}", line_no, text, column));
  }
  return value;
}

}  // namespace

std::vector<std::string> trace_header(std::size_t vehicles) {
  std::vector<std::string> h{"t", "j", "mode"};
  for (std::size_t i = 0; i < vehicles; ++i) {
    h.push_back(fmt::format("p_{}", i));
    h.push_back(fmt::format("v_{}", i));
    h.push_back(fmt::format("a_{}", i));
  }
  h.emplace_back("e");
  for (const char* s : kSuffixes) h.push_back(fmt::format("rho_{}", s));
  for (const char* s : kSuffixes) h.push_back(fmt::format("u_{}", s));
  h.emplace_back("u_star");
  h.emplace_back("attack");
  h.emplace_back("guard");
  return h;
}

void write_trace(std::ostream& out, const std::vector<TraceRow>& rows) {
  const std::size_t vehicles = rows.empty() ? 2 : rows.front().vehicles.size();
  out << fmt::format("{}\n", fmt::join(trace_header(vehicles), ","));
  fmt::memory_buffer buf;
  for (const auto& r : rows) {
    buf.clear();
    auto it = std::back_inserter(buf);
    fmt::format_to(it, "{:.17g},{},{}", r.t, r.j, r.mode);
    for (const auto& v : r.vehicles) fmt::format_to(it, ",{:.17g},{:.17g},{:.17g}", v.p, v.v, v.a);
    fmt::format_to(it, ",{:.17g}", r.e);
    for (double x : r.rho) fmt::format_to(it, ",{:.17g}", x);
    for (double x : r.u) fmt::format_to(it, ",{:.17g}", x);
    fmt::format_to(it, ",{:.17g},{},{}\n", r.u_star, quote(r.attack), quote(r.guard));
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

void write_trace(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  write_trace(out, rows);
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

std::vector<TraceRow> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace is empty");
  const auto header = split_csv(line, 1);
  if (header.size() < kLeadingColumns + kTrailingColumns + 3 ||
      (header.size() - kLeadingColumns - kTrailingColumns) % 3 != 0) {
    throw ConfigError("trace header has an unexpected number of columns");
  }
  const std::size_t vehicles = (header.size() - kLeadingColumns - kTrailingColumns) / 3;
  if (header != trace_header(vehicles)) throw ConfigError("trace header does not match the trace schema");

  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line, line_no);
    if (f.size() != header.size()) {
      throw ConfigError(fmt::format("trace line {}: expected {} fields, got {}", line_no,
                                    header.size(), f.size()));
    }
    TraceRow r;
    std::size_t c = 0;
    auto num = [&](std::size_t col) { return parse_number<double>(f[col], line_no, header[col]); };
    r.t = num(c++);
    r.j = parse_number<int>(f[c], line_no, header[c]);
    ++c;
    r.mode = f[c++];
    r.vehicles.resize(vehicles);
    for (auto& v : r.vehicles) {
      v.p = num(c++);
      v.v = num(c++);
      v.a = num(c++);
    }
    r.e = num(c++);
    for (double& x : r.rho) x = num(c++);
    for (double& x : r.u) x = num(c++);
    r.u_star = num(c++);
    r.attack = f[c++];
    r.guard = f[c++];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<TraceRow> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open trace '{}'", path.string()));
  return read_trace(in);
}

}  // namespace caccguard

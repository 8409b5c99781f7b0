#include "caccguard/errors.hpp"

#include <fmt/format.h>

namespace caccguard {

NumericalBlowup::NumericalBlowup(std::size_t index, double value)
    : Error(fmt::format("non-finite derivative at state index {} (value {})", index, value)),
      index_(index) {}

ScheduleOverlap::ScheduleOverlap(std::size_t first, std::size_t second, const std::string& detail)
    : Error(fmt::format("attack segments #{} and #{} overlap: {}", first, second, detail)),
      first_(first),
      second_(second) {}

}  // namespace caccguard

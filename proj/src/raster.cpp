#include "edstereo/raster.hpp"

#include <algorithm>

namespace edstereo {

double coverage_fraction(const RegionMask& mask) {
  const auto in = std::count(mask.values().begin(), mask.values().end(),
                             Membership::InRegion);
  return 100.0 * static_cast<double>(in) / static_cast<double>(mask.size());
}

std::size_t count_flag(const ReliabilityMask& mask, Reliability flag) {
  return static_cast<std::size_t>(
      std::count(mask.values().begin(), mask.values().end(), flag));
}

}  // namespace edstereo

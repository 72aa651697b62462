#include "edstereo/lrc.hpp"

#include <cstdlib>
#include <vector>

namespace edstereo {

ReliabilityMask lrc_check(const DisparityMap& left, const DisparityMap& right,
                          int tolerance) {
  require_same_shape(left, right, "left and right disparity maps differ in size");
  if (tolerance < 0) {
    throw Error(ErrorKind::InvalidArgument, "lrc tolerance must be >= 0");
  }
  const int width = left.width();
  std::vector<Reliability> flags(left.size(), Reliability::Incorrect);
  for (int y = 0; y < left.height(); ++y) {
    for (int x = 0; x < width; ++x) {
      const int d = left.at(x, y);
      const int xr = x - d;
      if (xr < 0) continue;
      if (std::abs(d - right.at(xr, y)) <= tolerance) {
        flags[static_cast<std::size_t>(y) * width + x] = Reliability::Reliable;
      }
    }
  }
  return ReliabilityMask(width, left.height(), std::move(flags));
}

}  // namespace edstereo

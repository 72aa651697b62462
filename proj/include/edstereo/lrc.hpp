#pragma once

#include "edstereo/raster.hpp"

namespace edstereo {

inline constexpr int kDefaultLrcTolerance = 1;

/// Left-right consistency: (x, y) is Reliable iff x - d_L(x, y) >= 0 and
/// |d_L(x, y) - d_R(x - d_L(x, y), y)| <= tolerance. Projections leaving the
/// image are Incorrect.
ReliabilityMask lrc_check(const DisparityMap& left, const DisparityMap& right,
                          int tolerance = kDefaultLrcTolerance);

}  // namespace edstereo

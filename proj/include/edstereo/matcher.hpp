#pragma once

#include "edstereo/dataset.hpp"
#include "edstereo/raster.hpp"

namespace edstereo {

struct MatchConfig {
  /// Odd, >= 3. Side of the square SAD aggregation block.
  int block_size = 5;
  /// Number of disparity levels searched: d in [0, max_disparity - 1].
  int max_disparity = 16;

  void validate() const;
};

/// Block SAD with winner-takes-all over integer disparities, left view as
/// reference. Block borders and right-view columns left of the image
/// (x - d < 0) are mirror-padded; ties go to the smallest disparity.
///
/// Per-pixel cost for level d is C_d(x, y) = |L(x, y) - R(m(x - d), y)| with
/// m the symmetric reflection, and the block cost sums C_d over the
/// reflected block coordinates. Integer arithmetic throughout, so the result
/// is bit-identical to a direct evaluation regardless of worker count.
DisparityMap sad_match_left(const StereoPair& pair, const MatchConfig& cfg);

/// Right view as reference: C_d(x, y) = |R(x, y) - L(m(x + d), y)|.
DisparityMap sad_match_right(const StereoPair& pair, const MatchConfig& cfg);

/// 8-bit depth image with value gt_scale * d. Throws when
/// gt_scale * (max_disparity - 1) exceeds 255.
GrayImage disparity_to_gray(const DisparityMap& disparity, int gt_scale);

}  // namespace edstereo

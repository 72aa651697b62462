#include "edstereo/matcher.hpp"

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <vector>

#include "edstereo/parallel.hpp"

namespace edstereo {

void MatchConfig::validate() const {
  if (block_size < 3 || block_size % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument,
                "block_size must be odd and >= 3, got " + std::to_string(block_size));
  }
  // keeps 255 * block_size^2 well inside uint32
  if (block_size > 255) {
    throw Error(ErrorKind::InvalidArgument, "block_size must be <= 255");
  }
  if (max_disparity < 1) {
    throw Error(ErrorKind::InvalidArgument,
                "max_disparity must be >= 1, got " + std::to_string(max_disparity));
  }
}

namespace {

using Cost = std::uint32_t;

// Shared WTA kernel. `ref` is the reference view, `other` the matched view;
// `direction` is -1 for left reference (other column x - d) and +1 for right
// reference (other column x + d).
DisparityMap match(const GrayImage& ref, const GrayImage& other,
                   const MatchConfig& cfg, int direction) {
  cfg.validate();
  require_same_shape(ref, other, "stereo views differ in size");
  const int width = ref.width();
  const int height = ref.height();
  const int levels = cfg.max_disparity;
  const int radius = cfg.block_size / 2;
  const int padded_width = width + 2 * radius;

  // Column offsets into the unpadded image for each padded column, and the
  // matched column for each (x, d).
  std::vector<int> pad_col(padded_width);
  for (int px = 0; px < padded_width; ++px) pad_col[px] = mirror_index(px - radius, width);
  std::vector<int> match_col(static_cast<std::size_t>(levels) * width);
  for (int d = 0; d < levels; ++d) {
    for (int x = 0; x < width; ++x) {
      match_col[static_cast<std::size_t>(d) * width + x] =
          mirror_index(x + direction * d, width);
    }
  }

  std::vector<int> out(static_cast<std::size_t>(width) * height, 0);

  parallel_for_ranges(height, [&](int row_begin, int row_end) {
    // column_sums[d][px]: sum over the block rows of C_d at padded column px.
    std::vector<Cost> column_sums(static_cast<std::size_t>(levels) * padded_width, 0);
    std::vector<Cost> best_cost(width);

    auto accumulate_row = [&](int image_row, bool add) {
      const auto r = ref.row(image_row);
      const auto o = other.row(image_row);
      for (int d = 0; d < levels; ++d) {
        Cost* sums = column_sums.data() + static_cast<std::size_t>(d) * padded_width;
        const int* cols = match_col.data() + static_cast<std::size_t>(d) * width;
        for (int px = 0; px < padded_width; ++px) {
          const int x = pad_col[px];
          const Cost c = static_cast<Cost>(std::abs(int(r[x]) - int(o[cols[x]])));
          if (add) {
            sums[px] += c;
          } else {
            sums[px] -= c;
          }
        }
      }
    };

    for (int j = -radius; j <= radius; ++j) {
      accumulate_row(mirror_index(row_begin + j, height), true);
    }

    for (int y = row_begin; y < row_end; ++y) {
      if (y > row_begin) {
        accumulate_row(mirror_index(y - 1 - radius, height), false);
        accumulate_row(mirror_index(y + radius, height), true);
      }
      int* dst = out.data() + static_cast<std::size_t>(y) * width;
      std::fill(best_cost.begin(), best_cost.end(), std::numeric_limits<Cost>::max());
      for (int d = 0; d < levels; ++d) {
        const Cost* sums = column_sums.data() + static_cast<std::size_t>(d) * padded_width;
        Cost window = 0;
        for (int px = 0; px < cfg.block_size; ++px) window += sums[px];
        for (int x = 0; x < width; ++x) {
          if (x > 0) window += sums[x + cfg.block_size - 1] - sums[x - 1];
          // strict < keeps the smallest d on ties
          if (window < best_cost[x]) {
            best_cost[x] = window;
            dst[x] = d;
          }
        }
      }
    }
  });

  return DisparityMap(width, height, std::move(out), levels);
}

}  // namespace

DisparityMap sad_match_left(const StereoPair& pair, const MatchConfig& cfg) {
  return match(pair.left, pair.right, cfg, -1);
}

DisparityMap sad_match_right(const StereoPair& pair, const MatchConfig& cfg) {
  return match(pair.right, pair.left, cfg, +1);
}

GrayImage disparity_to_gray(const DisparityMap& disparity, int gt_scale) {
  if (gt_scale < 1) {
    throw Error(ErrorKind::InvalidArgument, "gt_scale must be >= 1");
  }
  if (static_cast<long>(gt_scale) * (disparity.max_disparity() - 1) > 255) {
    throw Error(ErrorKind::InvalidArgument,
                "gt_scale " + std::to_string(gt_scale) + " x " +
                    std::to_string(disparity.max_disparity() - 1) +
                    " overflows an 8-bit depth image");
  }
  std::vector<std::uint8_t> gray(disparity.size());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = static_cast<std::uint8_t>(gt_scale * disparity[i]);
  }
  return GrayImage(disparity.width(), disparity.height(), std::move(gray));
}

}  // namespace edstereo

#include "edstereo/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "edstereo/parallel.hpp"

namespace edstereo {

void EntropyConfig::validate() const {
  if (neighborhood < 3 || neighborhood % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument,
                "neighborhood must be odd and >= 3, got " + std::to_string(neighborhood));
  }
  if (bins != 256) {
    throw Error(ErrorKind::InvalidArgument,
                "bins must be 256, got " + std::to_string(bins));
  }
}

RealMap local_entropy(const GrayImage& image, const EntropyConfig& cfg) {
  cfg.validate();
  const int width = image.width();
  const int height = image.height();
  const int n = cfg.neighborhood;
  const int radius = n / 2;
  const int total = n * n;

  // term[c] = -p log2 p for p = c / N; term[0] = 0 and term[N] = 0 exactly.
  std::vector<double> term(total + 1, 0.0);
  for (int c = 1; c < total; ++c) {
    const double p = static_cast<double>(c) / total;
    term[c] = -p * std::log2(p);
  }

  std::vector<int> pad_row(static_cast<std::size_t>(height) + 2 * radius);
  for (std::size_t i = 0; i < pad_row.size(); ++i) {
    pad_row[i] = mirror_index(static_cast<int>(i) - radius, height);
  }
  std::vector<int> pad_col(static_cast<std::size_t>(width) + 2 * radius);
  for (std::size_t i = 0; i < pad_col.size(); ++i) {
    pad_col[i] = mirror_index(static_cast<int>(i) - radius, width);
  }

  std::vector<double> out(image.size());
  parallel_for_ranges(height, [&](int row_begin, int row_end) {
    // hist[v] counts intensity v in the window; mult[c] counts intensities
    // seen exactly c times. Summing term[c] * mult[c] in c order makes the
    // result independent of intensity labels.
    std::array<int, 256> hist{};
    std::vector<int> mult(total + 1, 0);
    auto add = [&](int v) {
      --mult[hist[v]];
      ++mult[++hist[v]];
    };
    auto remove = [&](int v) {
      --mult[hist[v]];
      ++mult[--hist[v]];
    };
    for (int y = row_begin; y < row_end; ++y) {
      hist.fill(0);
      std::fill(mult.begin(), mult.end(), 0);
      mult[0] = 256;
      // Window for x = 0 covers padded columns [0, n).
      for (int j = 0; j < n; ++j) {
        const auto src = image.row(pad_row[y + j]);
        for (int i = 0; i < n; ++i) add(src[pad_col[i]]);
      }
      for (int x = 0; x < width; ++x) {
        if (x > 0) {
          const int leaving = pad_col[x - 1];
          const int entering = pad_col[x + n - 1];
          for (int j = 0; j < n; ++j) {
            const auto src = image.row(pad_row[y + j]);
            remove(src[leaving]);
            add(src[entering]);
          }
        }
        // Four interleaved partial sums in a fixed order.
        double h[4] = {0.0, 0.0, 0.0, 0.0};
        for (int c = 0; c < total; c += 4) {
          for (int k = 0; k < 4 && c + k < total; ++k) h[k] += term[c + k] * mult[c + k];
        }
        out[static_cast<std::size_t>(y) * width + x] = (h[0] + h[1]) + (h[2] + h[3]);
      }
    }
  });
  return RealMap(width, height, std::move(out));
}

RealMap entropy_difference(const RealMap& image_entropy, const RealMap& depth_entropy) {
  require_same_shape(image_entropy, depth_entropy, "entropy maps differ in size");
  std::vector<double> out(image_entropy.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = image_entropy[i] - depth_entropy[i];
  }
  return RealMap(image_entropy.width(), image_entropy.height(), std::move(out));
}

ConfidenceMaps entropy_difference_confidence(const GrayImage& image,
                                             const GrayImage& depth,
                                             const EntropyConfig& cfg) {
  require_same_shape(image, depth, "image and depth map differ in size");
  RealMap ent_l = local_entropy(image, cfg);
  RealMap ent_d = local_entropy(depth, cfg);
  RealMap ent = entropy_difference(ent_l, ent_d);
  return ConfidenceMaps{std::move(ent_l), std::move(ent_d), std::move(ent)};
}

}  // namespace edstereo

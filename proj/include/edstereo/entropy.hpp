#pragma once

#include "edstereo/raster.hpp"

namespace edstereo {

struct EntropyConfig {
  /// Odd, >= 3. Side of the square neighborhood centred on each pixel.
  int neighborhood = 5;
  /// Histogram bins; identity binning of 8-bit values, so fixed at 256.
  int bins = 256;

  void validate() const;
};

/// Shannon entropy (bits) of the 256-bin histogram of each pixel's n x n
/// neighborhood, borders mirror-padded. Empty bins contribute nothing.
RealMap local_entropy(const GrayImage& image, const EntropyConfig& cfg);

/// Ent_L - Ent_D per pixel. Negative values are kept.
RealMap entropy_difference(const RealMap& image_entropy, const RealMap& depth_entropy);

/// Ent for an image / depth-map pair with the same neighborhood for both.
struct ConfidenceMaps {
  RealMap image_entropy;
  RealMap depth_entropy;
  RealMap difference;
};

ConfidenceMaps entropy_difference_confidence(const GrayImage& image,
                                             const GrayImage& depth,
                                             const EntropyConfig& cfg);

}  // namespace edstereo

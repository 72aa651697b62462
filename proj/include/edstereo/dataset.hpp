#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edstereo/raster.hpp"

namespace edstereo {

/// Rectified pair in lightness form with its disparity search range.
struct StereoPair {
  StereoPair(GrayImage left_view, GrayImage right_view, int max_disparity,
             int gt_scale = 1);

  GrayImage left;
  GrayImage right;
  int max_disparity;
  int gt_scale;
};

/// Ground truth decoded from a gray image storing gt_scale * disparity.
struct GroundTruth {
  DisparityMap disparity;
  /// Excluded where the stored value is 0 (unknown).
  RegionMask known;
  /// Stored values that are not an exact multiple of gt_scale.
  std::size_t off_grid_count = 0;
  /// Known pixels whose disparity is >= the search range of the pair.
  std::size_t out_of_range_count = 0;
};

/// Converts stored values with round(v / gt_scale). `search_range` (the
/// pair's max_disparity) only feeds out_of_range_count; the returned map's
/// own range is widened to hold every decoded value.
GroundTruth decode_ground_truth(const GrayImage& stored, int gt_scale,
                                int search_range);

GroundTruth load_ground_truth(const std::filesystem::path& path, int gt_scale,
                              int search_range);

/// Nonzero (>= threshold) pixels are InRegion.
RegionMask region_from_image(const GrayImage& image, int threshold = 1);
RegionMask load_region_mask(const std::filesystem::path& path, int threshold = 1);

RegionMask intersect(const RegionMask& a, const RegionMask& b);

/// One stereo pair described by a `key = value` manifest file. Paths are
/// resolved relative to the manifest's directory.
struct Manifest {
  std::string name;
  std::filesystem::path left;
  std::filesystem::path right;
  std::filesystem::path ground_truth;
  std::optional<std::filesystem::path> nonocc;
  std::optional<std::filesystem::path> disc;
  int max_disparity = 0;
  int gt_scale = 1;
  int region_threshold = 1;
};

/// Recognized keys: name, left, right, ground_truth (alias gt), nonocc, disc,
/// max_disparity, gt_scale, region_threshold. `#` starts a comment.
Manifest parse_manifest(std::string_view text,
                        const std::filesystem::path& base_dir,
                        std::string_view origin = "manifest");
Manifest load_manifest(const std::filesystem::path& path);

/// All regular files ending in ".manifest" or ".txt", sorted by file name.
std::vector<std::filesystem::path> find_manifests(const std::filesystem::path& dir);

/// Fully loaded evaluation scene.
struct Scene {
  std::string name;
  StereoPair pair;
  GroundTruth truth;
  RegionMask all;
  RegionMask nonocc;
  RegionMask disc;
};

/// Loads images, converts to lightness and derives the three regions:
/// 'all' = known ground truth, 'nonocc'/'disc' = mask files intersected with
/// 'all' (a missing mask file falls back to 'all').
Scene load_scene(const Manifest& manifest);

}  // namespace edstereo

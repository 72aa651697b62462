#include <doctest.h>

#include "edstereo/dataset.hpp"
#include "edstereo/image_io.hpp"
#include "test_support.hpp"

using namespace edstereo;
namespace fs = std::filesystem;

TEST_CASE("ground truth decoding") {
  const GrayImage stored(4, 1, std::vector<std::uint8_t>{160, 0, 242, 8});
  SUBCASE("scale 16") {
    const GroundTruth gt = decode_ground_truth(stored, 16, 16);
    CHECK(gt.disparity[0] == 10);
    CHECK(gt.disparity[1] == 0);
    CHECK(gt.known[0] == Membership::InRegion);
    CHECK(gt.known[1] == Membership::Excluded);
  }
  SUBCASE("scale 4 with an off-grid value beyond the search range") {
    const GroundTruth gt = decode_ground_truth(stored, 4, 60);
    // 242 / 4 = 60.5 rounds to 61
    CHECK(gt.disparity[2] == 61);
    CHECK(gt.off_grid_count == 1);
    CHECK(gt.out_of_range_count == 1);
    CHECK(gt.disparity.max_disparity() >= 62);
    CHECK(gt.disparity[3] == 2);
  }
  SUBCASE("zero is unknown and never out of range") {
    const GroundTruth gt = decode_ground_truth(GrayImage(2, 1, std::uint8_t{0}), 4, 1);
    CHECK(gt.out_of_range_count == 0);
    CHECK(coverage_fraction(gt.known) == 0.0);
  }
  CHECK_THROWS_AS(decode_ground_truth(stored, 0, 16), Error);
}

TEST_CASE("region masks") {
  const GrayImage img(4, 1, std::vector<std::uint8_t>{0, 1, 128, 255});
  const RegionMask nonzero = region_from_image(img);
  CHECK(coverage_fraction(nonzero) == doctest::Approx(75.0));
  const RegionMask white = region_from_image(img, 255);
  CHECK(coverage_fraction(white) == doctest::Approx(25.0));
  CHECK(coverage_fraction(intersect(nonzero, white)) == doctest::Approx(25.0));
}

TEST_CASE("stereo pair invariants") {
  const GrayImage a(3, 2, std::uint8_t{1});
  const GrayImage b(2, 3, std::uint8_t{1});
  CHECK_THROWS_AS(StereoPair(a, b, 4), Error);
  CHECK_THROWS_AS(StereoPair(a, a, 0), Error);
  CHECK_THROWS_AS(StereoPair(a, a, 4, 0), Error);
  CHECK_NOTHROW(StereoPair(a, a, 1, 1));
}

TEST_CASE("manifest parsing") {
  const fs::path base = "/data/tsukuba";
  const Manifest m = parse_manifest(
      "# Tsukuba\nname = tsukuba\nleft = left.ppm\nright=right.ppm\n gt = truedisp.pgm \n"
      "nonocc = nonocc.png\nmax_disparity = 16\ngt_scale = 16\n",
      base);
  CHECK(m.name == "tsukuba");
  CHECK(m.left == base / "left.ppm");
  CHECK(m.ground_truth == base / "truedisp.pgm");
  CHECK(m.nonocc.has_value());
  CHECK_FALSE(m.disc.has_value());
  CHECK(m.max_disparity == 16);
  CHECK(m.gt_scale == 16);
  CHECK(m.region_threshold == 1);

  auto message = [&](const std::string& text) {
    try {
      parse_manifest(text, base, "x.manifest");
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("left = a\nright = b\ngt = c\n").find("max_disparity") != std::string::npos);
  CHECK(message("left = a\nright = b\nmax_disparity = 4\n").find("ground_truth") !=
        std::string::npos);
  CHECK(message("left = a\nright = b\ngt = c\nmax_disparity = 4\ncolour = x\n")
            .find("unknown key 'colour'") != std::string::npos);
  CHECK(message("left = a\nright = b\ngt = c\nmax_disparity = four\n").find("integer") !=
        std::string::npos);
  CHECK(message("left a\n").find("x.manifest:1") != std::string::npos);
}

TEST_CASE("scene loading from files") {
  const auto dir = testing::temp_dir("dataset_scene");
  const auto scene_data = testing::make_scene(40, 30, 2, 5, 17);
  const auto manifest_path = testing::write_scene(scene_data, dir, "toy", 8, 16);
  const Manifest m = load_manifest(manifest_path);
  CHECK(m.name == "toy");
  const Scene scene = load_scene(m);
  CHECK(scene.pair.max_disparity == 8);
  CHECK(scene.truth.disparity.at(20, 15) == 5);
  CHECK(scene.truth.disparity.at(0, 0) == 2);
  CHECK(coverage_fraction(scene.all) == doctest::Approx(100.0));
  CHECK(coverage_fraction(scene.nonocc) < 100.0);
  CHECK(coverage_fraction(scene.disc) < coverage_fraction(scene.nonocc));
  for (std::size_t i = 0; i < scene.disc.size(); ++i) {
    if (scene.disc[i] == Membership::InRegion) REQUIRE(scene.all[i] == Membership::InRegion);
  }

  const auto found = find_manifests(dir);
  REQUIRE(found.size() == 1);
  CHECK(found[0] == manifest_path);
}

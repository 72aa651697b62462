#include <doctest.h>

#include <random>

#include "edstereo/matcher.hpp"
#include "edstereo/parallel.hpp"
#include "test_support.hpp"

using namespace edstereo;
using testing::naive_sad;
using testing::random_gray;

namespace {

std::vector<int> values_of(const DisparityMap& d) {
  return std::vector<int>(d.values().begin(), d.values().end());
}

GrayImage flip_horizontal(const GrayImage& img) {
  std::vector<std::uint8_t> px(img.size());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      px[y * img.width() + x] = img.at(img.width() - 1 - x, y);
    }
  }
  return GrayImage(img.width(), img.height(), std::move(px));
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS((MatchConfig{4, 8}.validate()), Error);
  CHECK_THROWS_AS((MatchConfig{1, 8}.validate()), Error);
  CHECK_THROWS_AS((MatchConfig{5, 0}.validate()), Error);
  CHECK_NOTHROW((MatchConfig{3, 1}.validate()));
}

TEST_CASE("identical views match at disparity 0") {
  const GrayImage img = random_gray(24, 16, 2);
  const StereoPair pair(img, img, 6);
  const MatchConfig cfg{5, 6};
  for (int d : sad_match_left(pair, cfg).values()) REQUIRE(d == 0);
  for (int d : sad_match_right(pair, cfg).values()) REQUIRE(d == 0);
}

TEST_CASE("three pixel shift is recovered on interior pixels") {
  const GrayImage left = random_gray(32, 32, 99);
  // Content moved 3 px leftward: R(x) = L(x + 3), mirror-filled at the edge.
  std::vector<std::uint8_t> r(left.size());
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) r[y * 32 + x] = left.at(testing::reflect(x + 3, 32), y);
  }
  const StereoPair pair(left, GrayImage(32, 32, r), 8);
  const int block = 5;
  const DisparityMap d = sad_match_left(pair, MatchConfig{block, 8});
  const auto oracle = naive_sad(pair.left, pair.right, block, 8, -1);
  CHECK(values_of(d) == oracle);
  for (int y = 0; y < 32; ++y) {
    for (int x = block + 3; x < 32 - block - 3; ++x) {
      CAPTURE(x);
      CAPTURE(y);
      CHECK(d.at(x, y) == 3);
    }
  }
  const DisparityMap dr = sad_match_right(pair, MatchConfig{block, 8});
  CHECK(values_of(dr) == naive_sad(pair.right, pair.left, block, 8, +1));
  for (int y = 0; y < 32; ++y) {
    for (int x = block + 3; x < 32 - block - 3; ++x) CHECK(dr.at(x, y) == 3);
  }
}

TEST_CASE("sliding-window matcher equals the brute-force definition") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const int w = 3 + static_cast<int>(rng() % 62);
    const int h = 3 + static_cast<int>(rng() % 62);
    const int block = 3 + 2 * static_cast<int>(rng() % 4);
    const int levels = 1 + static_cast<int>(rng() % 12);
    // Few gray levels provoke ties.
    const int gray_levels = trial % 2 == 0 ? 256 : 4;
    const StereoPair pair(random_gray(w, h, rng(), gray_levels),
                          random_gray(w, h, rng(), gray_levels), levels);
    const MatchConfig cfg{block, levels};
    CAPTURE(trial);
    REQUIRE(values_of(sad_match_left(pair, cfg)) ==
            naive_sad(pair.left, pair.right, block, levels, -1));
    REQUIRE(values_of(sad_match_right(pair, cfg)) ==
            naive_sad(pair.right, pair.left, block, levels, +1));
  }
}

TEST_CASE("right matching is left matching of the mirrored, swapped pair") {
  const GrayImage left = random_gray(32, 32, 5, 16);
  const GrayImage right = random_gray(32, 32, 6, 16);
  const MatchConfig cfg{5, 7};
  const DisparityMap dr = sad_match_right(StereoPair(left, right, 7), cfg);
  const DisparityMap mirrored =
      sad_match_left(StereoPair(flip_horizontal(right), flip_horizontal(left), 7), cfg);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) REQUIRE(dr.at(x, y) == mirrored.at(31 - x, y));
  }
}

TEST_CASE("output is independent of worker count") {
  const StereoPair pair(random_gray(61, 47, 8), random_gray(61, 47, 9), 10);
  const MatchConfig cfg{7, 10};
  DisparityMap serial = [&] {
    ScopedWorkerCount one(1);
    return sad_match_left(pair, cfg);
  }();
  for (int workers : {2, 3, 7, 16}) {
    ScopedWorkerCount scoped(workers);
    CHECK(sad_match_left(pair, cfg) == serial);
  }
  CHECK(sad_match_left(pair, cfg) == serial);
}

TEST_CASE("disparity_to_gray") {
  const DisparityMap d(3, 1, {10, 0, 15}, 16);
  const GrayImage g = disparity_to_gray(d, 16);
  CHECK(g[0] == 160);
  CHECK(g[1] == 0);
  CHECK(g[2] == 240);
  const DisparityMap teddy(1, 1, {59}, 60);
  CHECK(disparity_to_gray(teddy, 4)[0] == 236);
  const DisparityMap wide(1, 1, {61}, 62);
  CHECK(disparity_to_gray(wide, 4)[0] == 244);
  CHECK_THROWS_AS(disparity_to_gray(DisparityMap(1, 1, {0}, 17), 16), Error);
  CHECK_THROWS_AS(disparity_to_gray(d, 0), Error);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "edstereo/eval.hpp"

using namespace edstereo;

namespace {

ReliabilityMask mask_from(int w, int h, const std::vector<int>& reliable) {
  std::vector<Reliability> f(reliable.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = reliable[i] ? Reliability::Reliable : Reliability::Incorrect;
  }
  return ReliabilityMask(w, h, std::move(f));
}

// n pixels, the first `bad` of them truly incorrect.
ReliabilityMask truth_with_errors(int n, int bad) {
  std::vector<int> r(n, 1);
  std::fill(r.begin(), r.begin() + bad, 0);
  return mask_from(n, 1, r);
}

}  // namespace

TEST_CASE("truth mask") {
  const DisparityMap gt(4, 1, {3, 3, 3, 3}, 8);
  const RegionMask known(4, 1, std::vector<Membership>{Membership::InRegion, Membership::InRegion,
                                                       Membership::InRegion, Membership::Excluded});
  const ReliabilityMask same = truth_mask(gt, gt, known);
  CHECK(same[0] == Reliability::Reliable);
  CHECK(same[3] == Reliability::Incorrect);  // unknown ground truth
  const DisparityMap off(4, 1, {5, 5, 4, 2}, 8);
  const ReliabilityMask t = truth_mask(off, gt, known, 1);
  CHECK(t[0] == Reliability::Incorrect);
  CHECK(t[2] == Reliability::Reliable);
  CHECK(truth_mask(off, gt, known, 0)[2] == Reliability::Incorrect);
  CHECK(truth_mask(off, gt, known, 2)[0] == Reliability::Reliable);
}

TEST_CASE("score_classifier") {
  const RegionMask all(4, 1, Membership::InRegion);
  SUBCASE("perfect prediction") {
    const ReliabilityMask t = mask_from(4, 1, {1, 0, 1, 1});
    const EvalReport r = score_classifier(t, t, all);
    CHECK(*r.precision == 100.0);
    CHECK(*r.recall == 100.0);
    CHECK(*r.accuracy == 100.0);
    CHECK(r.pixel_count == 4);
  }
  SUBCASE("counts") {
    const ReliabilityMask pred = mask_from(4, 1, {1, 1, 0, 0});
    const ReliabilityMask truth = mask_from(4, 1, {1, 0, 1, 0});
    const EvalReport r = score_classifier(pred, truth, all, RegionLabel::Disc);
    CHECK(r.counts.tp == 1);
    CHECK(r.counts.fp == 1);
    CHECK(r.counts.fn == 1);
    CHECK(r.counts.tn == 1);
    CHECK(*r.precision == 50.0);
    CHECK(r.region == RegionLabel::Disc);
    const EvalReport flipped =
        score_classifier(pred, truth, all, RegionLabel::Disc, PositiveClass::Incorrect);
    CHECK(flipped.counts.tp == 1);
    CHECK(flipped.counts.tn == 1);
  }
  SUBCASE("zero denominators are absent, not zero") {
    const ReliabilityMask none = mask_from(4, 1, {0, 0, 0, 0});
    const EvalReport r = score_classifier(none, none, all);
    CHECK_FALSE(r.precision.has_value());
    CHECK_FALSE(r.recall.has_value());
    CHECK(*r.accuracy == 100.0);
  }
  SUBCASE("region restriction and empty region") {
    const RegionMask half(4, 1, std::vector<Membership>{Membership::InRegion, Membership::InRegion,
                                                        Membership::Excluded, Membership::Excluded});
    const ReliabilityMask pred = mask_from(4, 1, {1, 1, 0, 0});
    const EvalReport r = score_classifier(pred, pred, half);
    CHECK(r.pixel_count == 2);
    CHECK_THROWS_AS(score_classifier(pred, pred, RegionMask(4, 1, Membership::Excluded)), Error);
  }
  SUBCASE("percentages agree with raw counts") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> p(400), t(400);
      for (int i = 0; i < 400; ++i) {
        p[i] = rng() % 4 != 0;
        t[i] = rng() % 5 != 0;
      }
      const EvalReport r = score_classifier(mask_from(20, 20, p), mask_from(20, 20, t),
                                            RegionMask(20, 20, Membership::InRegion));
      const auto& c = r.counts;
      REQUIRE(c.total() == 400);
      CHECK(*r.precision == doctest::Approx(100.0 * c.tp / double(c.tp + c.fp)));
      CHECK(*r.recall == doctest::Approx(100.0 * c.tp / double(c.tp + c.fn)));
      CHECK(*r.accuracy == doctest::Approx(100.0 * (c.tp + c.tn) / 400.0));
      for (double v : {*r.precision, *r.recall, *r.accuracy}) {
        CHECK(v >= 0.0);
        CHECK(v <= 100.0);
      }
    }
  }
}

TEST_CASE("optimal AUC") {
  CHECK(optimal_auc(0.0) == 0.0);
  CHECK(optimal_auc(1.0) == 1.0);
  CHECK(optimal_auc(0.25) == doctest::Approx(0.25 + 0.75 * std::log(0.75)));
  CHECK(optimal_auc(0.25) == doctest::Approx(0.0342).epsilon(1e-3));
}

TEST_CASE("sparsification AUC") {
  const int n = 10000;
  const ReliabilityMask truth = truth_with_errors(n, n / 4);
  const RegionMask region(n, 1, Membership::InRegion);

  SUBCASE("perfect ranking converges to the optimal curve") {
    std::vector<double> conf(n);
    for (int i = 0; i < n; ++i) conf[i] = truth[i] == Reliability::Reliable ? 1.0 : 0.0;
    const AucReport r = auc_sparsification(RealMap(n, 1, conf), truth, region, 100);
    CHECK(r.error_rate == doctest::Approx(0.25));
    CHECK(std::abs(r.auc - (0.25 + 0.75 * std::log(0.75))) <= 0.005);
    CHECK(*r.improvement == doctest::Approx(1.0).epsilon(0.2));
    CHECK(r.densities.size() == 100);
    CHECK(r.error_rates.back() == doctest::Approx(0.25));
  }
  SUBCASE("random ordering averages to the error rate") {
    std::mt19937 rng(42);
    double total = 0.0;
    std::vector<int> labels(n, 1);
    std::fill(labels.begin(), labels.begin() + n / 4, 0);
    for (int trial = 0; trial < 20; ++trial) {
      std::shuffle(labels.begin(), labels.end(), rng);
      const AucReport r = auc_sparsification(RealMap(n, 1, 0.0), mask_from(n, 1, labels), region);
      total += r.auc;
      CHECK(r.auc >= r.auc_optimal);
      CHECK(*r.improvement <= 1.0);
    }
    CHECK(std::abs(total / 20 - 0.25) <= 0.01);
  }
  SUBCASE("worst ranking gives negative improvement") {
    std::vector<double> conf(n);
    for (int i = 0; i < n; ++i) conf[i] = truth[i] == Reliability::Reliable ? 0.0 : 1.0;
    const AucReport r = auc_sparsification(RealMap(n, 1, conf), truth, region);
    CHECK(*r.improvement < 0.0);
  }
  SUBCASE("only the ordering matters") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    std::vector<double> conf(n);
    for (auto& c : conf) c = u(rng);
    std::vector<double> affine(conf), cubed(conf);
    for (auto& c : affine) c = 2 * c + 7;
    for (auto& c : cubed) c = c * c * c;
    const double base = auc_sparsification(RealMap(n, 1, conf), truth, region).auc;
    CHECK(auc_sparsification(RealMap(n, 1, affine), truth, region).auc == base);
    CHECK(auc_sparsification(RealMap(n, 1, cubed), truth, region).auc == base);
  }
  SUBCASE("degenerate error rates") {
    const AucReport clean =
        auc_sparsification(RealMap(10, 1, 1.0), truth_with_errors(10, 0), RegionMask(10, 1, Membership::InRegion));
    CHECK(clean.error_rate == 0.0);
    CHECK(clean.auc == 0.0);
    CHECK_FALSE(clean.improvement.has_value());
    const AucReport all_bad =
        auc_sparsification(RealMap(10, 1, 1.0), truth_with_errors(10, 10), RegionMask(10, 1, Membership::InRegion));
    CHECK(all_bad.auc_optimal == 1.0);
    CHECK_FALSE(all_bad.improvement.has_value());
  }
  SUBCASE("ties follow pixel order") {
    // Constant confidence keeps index order: errors first means the top
    // fractions are all errors.
    const AucReport r = auc_sparsification(RealMap(n, 1, 0.0), truth, region, 4);
    CHECK(r.error_rates[0] == 1.0);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(auc_sparsification(RealMap(n, 1, 0.0), truth, region, 1), Error);
    CHECK_THROWS_AS(auc_sparsification(RealMap(n, 1, 0.0), truth, RegionMask(n, 1, Membership::Excluded)),
                    Error);
  }
}

TEST_CASE("auc stays above the optimum for arbitrary confidence maps") {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 500 + static_cast<int>(rng() % 2000);
    std::vector<int> labels(n);
    std::vector<double> conf(n);
    for (int i = 0; i < n; ++i) {
      labels[i] = rng() % 3 != 0;
      conf[i] = labels[i] * ((trial % 4) * 0.3) + std::uniform_real_distribution<double>(0, 1)(rng);
    }
    const AucReport r = auc_sparsification(RealMap(n, 1, conf), mask_from(n, 1, labels),
                                           RegionMask(n, 1, Membership::InRegion), 50);
    CAPTURE(trial);
    // Discrete density grid can undercut the continuous optimum slightly.
    CHECK(r.auc >= r.auc_optimal - 0.01);
    CHECK(r.auc <= 1.0);
    if (r.improvement) CHECK(*r.improvement <= 1.0 + 0.1);
  }
}

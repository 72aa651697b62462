#include <doctest.h>

#include "edstereo/benchmark.hpp"
#include "edstereo/parallel.hpp"
#include "test_support.hpp"

using namespace edstereo;
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> four_scenes(const fs::path& dir) {
  std::vector<fs::path> manifests;
  const int sizes[4][2] = {{48, 40}, {56, 36}, {64, 48}, {50, 50}};
  for (int i = 0; i < 4; ++i) {
    const auto scene = testing::make_scene(sizes[i][0], sizes[i][1], 2 + i % 2, 6 + i, 100 + i);
    manifests.push_back(
        testing::write_scene(scene, dir, "pair" + std::to_string(i), 12, 16));
  }
  return manifests;
}

}  // namespace

TEST_CASE("four pairs produce one row per pair, region, method and window") {
  const auto dir = testing::temp_dir("bench_four");
  const auto manifests = four_scenes(dir);
  BenchmarkConfig cfg;
  const BenchmarkResult result = run_benchmark(manifests, cfg);
  CHECK(result.failures.empty());
  CHECK(result.classifier_rows.size() == 4 * 3 * 2 * 2);
  CHECK(result.auc_rows.size() == 4 * 2 * 2);
  CHECK(result.timing_rows.size() == 4 * 2);

  const auto summary = result.summary();
  CHECK(summary.size() == 4 * 3 * 2);
  std::size_t proposed = 0;
  for (const auto& row : summary) {
    CHECK(row.windows == 2);
    if (row.method == kMethodProposed) ++proposed;
  }
  CHECK(proposed == 12);

  // Summary is the unweighted mean over the two windows.
  const auto& first = result.classifier_rows;
  const ClassifierRow* w5 = nullptr;
  const ClassifierRow* w7 = nullptr;
  for (const auto& r : first) {
    if (r.pair == "pair0" && r.method == kMethodLrc && r.report.region == RegionLabel::NonOcc) {
      (r.window == 5 ? w5 : w7) = &r;
    }
  }
  REQUIRE(w5 != nullptr);
  REQUIRE(w7 != nullptr);
  for (const auto& row : summary) {
    if (row.pair == "pair0" && row.method == kMethodLrc && row.region == RegionLabel::NonOcc) {
      CHECK(*row.accuracy == doctest::Approx((*w5->report.accuracy + *w7->report.accuracy) / 2));
    }
  }
}

TEST_CASE("benchmark reports are deterministic across runs and worker counts") {
  const auto dir = testing::temp_dir("bench_det");
  const auto manifests = four_scenes(dir);
  BenchmarkConfig cfg;
  cfg.windows = {5};
  std::string reference;
  for (int workers : {1, 3}) {
    ScopedWorkerCount scoped(workers);
    const BenchmarkResult r = run_benchmark(manifests, cfg);
    const std::string text = classifier_csv(r.classifier_rows) + summary_csv(r.summary()) +
                             auc_csv(r.auc_rows);
    if (reference.empty()) {
      reference = text;
    } else {
      CHECK(text == reference);
    }
  }
}

TEST_CASE("a broken pair is reported and skipped") {
  const auto dir = testing::temp_dir("bench_broken");
  auto manifests = four_scenes(dir);
  write_text_atomic(dir / "broken.manifest", "left = missing.pgm\nright = missing.pgm\n"
                                             "gt = missing.pgm\nmax_disparity = 4\n");
  manifests.insert(manifests.begin() + 1, dir / "broken.manifest");
  const BenchmarkResult r = run_benchmark(manifests, BenchmarkConfig{});
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].pair == "broken");
  CHECK(r.failures[0].message.find("missing.pgm") != std::string::npos);
  CHECK(r.classifier_rows.size() == 4 * 3 * 2 * 2);
}

TEST_CASE("pipeline on a synthetic scene") {
  const auto dir = testing::temp_dir("bench_scene");
  const auto scene_data = testing::make_scene(96, 72, 3, 9, 5);
  const Scene scene = load_scene(load_manifest(testing::write_scene(scene_data, dir, "s", 14, 16)));
  const PairRun run = run_pair(scene, 5, BenchmarkConfig{});
  // The synthetic texture is easy to match, so most pixels are correct.
  CHECK(*run.proposed[0].report.accuracy > 50.0);
  CHECK(run.proposed[0].report.region == RegionLabel::All);
  CHECK(run.proposed[2].report.region == RegionLabel::Disc);
  CHECK(run.proposed[0].ent_th.has_value());
  CHECK_FALSE(run.lrc[0].ent_th.has_value());
  CHECK(run.auc_ed.report.auc >= run.auc_ed.report.auc_optimal - 0.01);
  CHECK(run.timing.proposed_seconds > 0.0);
  CHECK(run.timing.lrc_seconds > 0.0);

  const std::string csv = classifier_csv({run.proposed[0], run.lrc[0]});
  CHECK(csv.rfind("pair,window,method,region,positive_class,", 0) == 0);
  CHECK(csv.find("s,5,proposed,all,reliable,") != std::string::npos);
  CHECK(csv.find("s,5,lrc,all,reliable,") != std::string::npos);
}

TEST_CASE("depth image for entropy") {
  const DisparityMap d(2, 1, {1, 15}, 16);
  CHECK(depth_image_for_entropy(d, 16)[1] == 240);
  const DisparityMap wide(2, 1, {1, 59}, 60);
  CHECK(depth_image_for_entropy(wide, 16)[1] == 59);
}

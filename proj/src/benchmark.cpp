#include "edstereo/benchmark.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <tuple>

#include "edstereo/entropy.hpp"
#include "edstereo/matcher.hpp"

namespace edstereo {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt(const std::optional<double>& v, int digits) {
  return v ? fmt(*v, digits) : std::string();
}

}  // namespace

GrayImage depth_image_for_entropy(const DisparityMap& disparity, int gt_scale) {
  const long top = static_cast<long>(gt_scale) * (disparity.max_disparity() - 1);
  if (gt_scale >= 1 && top <= 255) return disparity_to_gray(disparity, gt_scale);
  return disparity_to_gray(disparity, 1);
}

PairRun run_pair(const Scene& scene, int window, const BenchmarkConfig& cfg) {
  const MatchConfig match_cfg{window, scene.pair.max_disparity};
  const EntropyConfig entropy_cfg{cfg.neighborhood.value_or(window)};
  match_cfg.validate();
  entropy_cfg.validate();

  // Proposed: one depth map, two entropy maps, threshold.
  auto start = Clock::now();
  const DisparityMap left = sad_match_left(scene.pair, match_cfg);
  const GrayImage depth = depth_image_for_entropy(left, scene.pair.gt_scale);
  ConfidenceMaps maps = entropy_difference_confidence(scene.pair.left, depth, entropy_cfg);
  const ThresholdDiagnostics diag =
      cfg.conditioning == Conditioning::EntropyDifference
          ? detect_threshold(maps.difference, maps.depth_entropy)
          : detect_threshold(maps.difference, maps.depth_entropy, maps.image_entropy,
                             Conditioning::ImageEntropy);
  const ReliabilityMask proposed_mask = classify(maps.difference, diag.ent_th);
  const double proposed_seconds = seconds_since(start);

  // LRC: both depth maps, consistency check.
  start = Clock::now();
  const DisparityMap lrc_left = sad_match_left(scene.pair, match_cfg);
  const DisparityMap lrc_right = sad_match_right(scene.pair, match_cfg);
  const ReliabilityMask lrc_mask = lrc_check(lrc_left, lrc_right, cfg.lrc_tol);
  const double lrc_seconds = seconds_since(start);

  const ReliabilityMask truth =
      truth_mask(left, scene.truth.disparity, scene.truth.known, cfg.err_tol);

  PairRun run;
  const RegionMask* regions[3] = {&scene.all, &scene.nonocc, &scene.disc};
  const RegionLabel labels[3] = {RegionLabel::All, RegionLabel::NonOcc, RegionLabel::Disc};
  for (int r = 0; r < 3; ++r) {
    run.proposed[r] = ClassifierRow{scene.name, window, kMethodProposed,
                                    score_classifier(proposed_mask, truth, *regions[r], labels[r]),
                                    diag.ent_th, diag.fallback_used};
    run.lrc[r] = ClassifierRow{scene.name, window, kMethodLrc,
                               score_classifier(lrc_mask, truth, *regions[r], labels[r]),
                               std::nullopt, false};
  }
  run.auc_ed = AucRow{scene.name, window, kMeasureEd, RegionLabel::NonOcc,
                      auc_sparsification(maps.difference, truth, scene.nonocc, cfg.auc_steps)};
  run.auc_depth_only =
      AucRow{scene.name, window, kMeasureDepthOnly, RegionLabel::NonOcc,
             auc_sparsification(negate(maps.depth_entropy), truth, scene.nonocc,
                                cfg.auc_steps)};
  run.timing = TimingRow{scene.name, window, proposed_seconds, lrc_seconds};
  return run;
}

BenchmarkResult run_benchmark(const std::vector<std::filesystem::path>& manifests,
                              const BenchmarkConfig& cfg) {
  BenchmarkResult result;
  for (const auto& path : manifests) {
    std::string name = path.stem().string();
    try {
      const Manifest manifest = load_manifest(path);
      name = manifest.name;
      const Scene scene = load_scene(manifest);
      std::vector<PairRun> runs;
      for (int window : cfg.windows) runs.push_back(run_pair(scene, window, cfg));
      for (const auto& run : runs) {
        for (const auto& row : run.proposed) result.classifier_rows.push_back(row);
        for (const auto& row : run.lrc) result.classifier_rows.push_back(row);
        result.auc_rows.push_back(run.auc_ed);
        result.auc_rows.push_back(run.auc_depth_only);
        result.timing_rows.push_back(run.timing);
      }
    } catch (const Error& e) {
      result.failures.push_back(PairFailure{name, e.what()});
    }
  }
  return result;
}

std::vector<SummaryRow> BenchmarkResult::summary() const {
  // Keyed by first appearance so rows follow manifest order.
  std::vector<SummaryRow> rows;
  std::map<std::tuple<std::string, std::string, RegionLabel>, std::size_t> index;
  std::vector<std::array<double, 3>> sums;
  std::vector<std::array<int, 3>> counts;
  for (const auto& row : classifier_rows) {
    const auto key = std::make_tuple(row.pair, row.method, row.report.region);
    auto [it, inserted] = index.try_emplace(key, rows.size());
    if (inserted) {
      SummaryRow fresh;
      fresh.pair = row.pair;
      fresh.method = row.method;
      fresh.region = row.report.region;
      rows.push_back(std::move(fresh));
      sums.push_back({0.0, 0.0, 0.0});
      counts.push_back({0, 0, 0});
    }
    const std::size_t i = it->second;
    ++rows[i].windows;
    const std::optional<double>* metrics[3] = {&row.report.precision, &row.report.accuracy,
                                               &row.report.recall};
    for (int m = 0; m < 3; ++m) {
      if (*metrics[m]) {
        sums[i][m] += **metrics[m];
        ++counts[i][m];
      }
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto mean = [&](int m) -> std::optional<double> {
      if (counts[i][m] == 0) return std::nullopt;
      return sums[i][m] / counts[i][m];
    };
    rows[i].precision = mean(0);
    rows[i].accuracy = mean(1);
    rows[i].recall = mean(2);
  }
  return rows;
}

std::string classifier_csv(const std::vector<ClassifierRow>& rows) {
  std::string out =
      "pair,window,method,region,positive_class,pixels,tp,fp,tn,fn,precision,accuracy,"
      "recall,ent_th,fallback\n";
  for (const auto& r : rows) {
    const auto& c = r.report.counts;
    out += r.pair + "," + std::to_string(r.window) + "," + r.method + "," +
           to_string(r.report.region) + "," + to_string(r.report.positive) + "," +
           std::to_string(r.report.pixel_count) + "," + std::to_string(c.tp) + "," +
           std::to_string(c.fp) + "," + std::to_string(c.tn) + "," + std::to_string(c.fn) +
           "," + fmt(r.report.precision, 1) + "," + fmt(r.report.accuracy, 1) + "," +
           fmt(r.report.recall, 1) + "," + (r.ent_th ? fmt(*r.ent_th, 6) : "") + "," +
           (r.ent_th ? (r.fallback_used ? "1" : "0") : "") + "\n";
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "pair,method,region,positive_class,windows,precision,accuracy,recall\n";
  for (const auto& r : rows) {
    out += r.pair + "," + r.method + "," + to_string(r.region) + ",reliable," +
           std::to_string(r.windows) + "," + fmt(r.precision, 1) + "," +
           fmt(r.accuracy, 1) + "," + fmt(r.recall, 1) + "\n";
  }
  return out;
}

std::string auc_csv(const std::vector<AucRow>& rows) {
  std::string out = "pair,window,measure,region,pixels,error_rate,auc,auc_optimal,improvement\n";
  for (const auto& r : rows) {
    out += r.pair + "," + std::to_string(r.window) + "," + r.measure + "," +
           to_string(r.region) + "," + std::to_string(r.report.pixel_count) + "," +
           fmt(r.report.error_rate, 6) + "," + fmt(r.report.auc, 6) + "," +
           fmt(r.report.auc_optimal, 6) + "," + fmt(r.report.improvement, 6) + "\n";
  }
  return out;
}

std::string timing_csv(const std::vector<TimingRow>& rows) {
  std::string out = "pair,window,proposed_seconds,lrc_seconds\n";
  for (const auto& r : rows) {
    out += r.pair + "," + std::to_string(r.window) + "," + fmt(r.proposed_seconds, 6) +
           "," + fmt(r.lrc_seconds, 6) + "\n";
  }
  return out;
}

}  // namespace edstereo

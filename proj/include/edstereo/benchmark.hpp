#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "edstereo/dataset.hpp"
#include "edstereo/eval.hpp"
#include "edstereo/lrc.hpp"
#include "edstereo/threshold.hpp"

namespace edstereo {

struct BenchmarkConfig {
  /// SAD block sizes; each run also uses it as entropy neighborhood unless
  /// `neighborhood` is set.
  std::vector<int> windows{5, 7};
  std::optional<int> neighborhood;
  int lrc_tol = kDefaultLrcTolerance;
  int err_tol = kDefaultErrorTolerance;
  int auc_steps = kDefaultAucSteps;
  Conditioning conditioning = Conditioning::EntropyDifference;
};

inline constexpr const char* kMethodProposed = "proposed";
inline constexpr const char* kMethodLrc = "lrc";
inline constexpr const char* kMeasureEd = "ed";
inline constexpr const char* kMeasureDepthOnly = "depth_only";

struct ClassifierRow {
  std::string pair;
  int window = 0;
  std::string method;
  EvalReport report;
  /// Proposed method only.
  std::optional<double> ent_th;
  bool fallback_used = false;
};

struct AucRow {
  std::string pair;
  int window = 0;
  std::string measure;
  RegionLabel region = RegionLabel::NonOcc;
  AucReport report;
};

struct TimingRow {
  std::string pair;
  int window = 0;
  double proposed_seconds = 0.0;
  double lrc_seconds = 0.0;
};

/// Unweighted mean over windows of one (pair, method, region).
struct SummaryRow {
  std::string pair;
  std::string method;
  RegionLabel region = RegionLabel::All;
  int windows = 0;
  std::optional<double> precision;
  std::optional<double> accuracy;
  std::optional<double> recall;
};

struct PairFailure {
  std::string pair;
  std::string message;
};

struct BenchmarkResult {
  std::vector<ClassifierRow> classifier_rows;
  std::vector<AucRow> auc_rows;
  std::vector<TimingRow> timing_rows;
  std::vector<PairFailure> failures;

  std::vector<SummaryRow> summary() const;
};

/// Everything one (scene, window) run produces.
struct PairRun {
  ClassifierRow proposed[3];
  ClassifierRow lrc[3];
  AucRow auc_ed;
  AucRow auc_depth_only;
  TimingRow timing;
};

/// Proposed pipeline (left SAD map, entropy difference, threshold) and LRC
/// pipeline (left and right SAD maps, consistency check), each timed from
/// the loaded pair, then scored on all/nonocc/disc. AUC rows use nonocc.
PairRun run_pair(const Scene& scene, int window, const BenchmarkConfig& cfg);

/// Loads each manifest and runs every window. A pair that fails to load or
/// run is recorded in `failures` and skipped.
BenchmarkResult run_benchmark(const std::vector<std::filesystem::path>& manifests,
                              const BenchmarkConfig& cfg);

std::string classifier_csv(const std::vector<ClassifierRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string auc_csv(const std::vector<AucRow>& rows);
std::string timing_csv(const std::vector<TimingRow>& rows);

/// Depth image used for entropy: gt_scale * d when that fits in 8 bits,
/// otherwise d itself. Entropy only depends on which pixels share a level.
GrayImage depth_image_for_entropy(const DisparityMap& disparity, int gt_scale);

}  // namespace edstereo

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "edstereo/raster.hpp"

namespace edstereo {

inline constexpr int kDefaultErrorTolerance = 1;
inline constexpr int kDefaultAucSteps = 20;

enum class RegionLabel { All, NonOcc, Disc };
const char* to_string(RegionLabel region);

/// Class treated as positive when counting TP/FP/TN/FN. Reports use
/// Reliable; Incorrect exists to audit the alternative reading.
enum class PositiveClass { Reliable, Incorrect };
const char* to_string(PositiveClass positive);

/// Reliable iff the ground truth is known and |disp - gt| <= err_tol.
ReliabilityMask truth_mask(const DisparityMap& disp, const DisparityMap& gt,
                           const RegionMask& known,
                           int err_tol = kDefaultErrorTolerance);

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

/// Percentages in [0, 100]; a metric is absent when its denominator is 0.
struct EvalReport {
  RegionLabel region = RegionLabel::All;
  PositiveClass positive = PositiveClass::Reliable;
  ConfusionCounts counts;
  std::optional<double> precision;
  std::optional<double> accuracy;
  std::optional<double> recall;
  std::size_t pixel_count = 0;
};

EvalReport report_from_counts(const ConfusionCounts& counts, RegionLabel region,
                              PositiveClass positive = PositiveClass::Reliable);

/// Scores `predicted` against `truth` over InRegion pixels. Throws
/// InvalidArgument for an empty region.
EvalReport score_classifier(const ReliabilityMask& predicted,
                            const ReliabilityMask& truth, const RegionMask& region,
                            RegionLabel label = RegionLabel::All,
                            PositiveClass positive = PositiveClass::Reliable);

/// Area under the optimal sparsification curve for error rate eps:
/// eps + (1 - eps) ln(1 - eps), with the limit 1 at eps = 1.
double optimal_auc(double error_rate);

struct AucReport {
  double auc = 0.0;
  /// Error rate at full density.
  double error_rate = 0.0;
  double auc_optimal = 0.0;
  /// (eps - auc) / (eps - auc_optimal); absent when eps is 0 or 1.
  std::optional<double> improvement;
  std::size_t pixel_count = 0;
  /// Curve samples (k / steps, error rate of the top fraction), k = 1..steps.
  /// The integral also includes the point (0, 0).
  std::vector<double> densities;
  std::vector<double> error_rates;
};

/// Sparsification: region pixels sorted by confidence, highest first (ties
/// by pixel index). For density k / steps the top ceil(k N / steps) pixels
/// are kept and their truly-incorrect share recorded; the curve is
/// integrated with the trapezoid rule starting from (0, 0).
AucReport auc_sparsification(const RealMap& confidence, const ReliabilityMask& truth,
                             const RegionMask& region,
                             int steps = kDefaultAucSteps);

/// Negated map; turns an "error-likeness" score into a confidence.
RealMap negate(const RealMap& map);

}  // namespace edstereo

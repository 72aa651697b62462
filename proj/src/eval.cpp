#include "edstereo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace edstereo {

const char* to_string(RegionLabel region) {
  switch (region) {
    case RegionLabel::All: return "all";
    case RegionLabel::NonOcc: return "nonocc";
    case RegionLabel::Disc: return "disc";
  }
  return "?";
}

const char* to_string(PositiveClass positive) {
  return positive == PositiveClass::Reliable ? "reliable" : "incorrect";
}

ReliabilityMask truth_mask(const DisparityMap& disp, const DisparityMap& gt,
                           const RegionMask& known, int err_tol) {
  require_same_shape(disp, gt, "disparity and ground truth differ in size");
  require_same_shape(disp, known, "disparity and known-mask differ in size");
  if (err_tol < 0) throw Error(ErrorKind::InvalidArgument, "err_tol must be >= 0");
  std::vector<Reliability> flags(disp.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const bool ok = known[i] == Membership::InRegion && std::abs(disp[i] - gt[i]) <= err_tol;
    flags[i] = ok ? Reliability::Reliable : Reliability::Incorrect;
  }
  return ReliabilityMask(disp.width(), disp.height(), std::move(flags));
}

EvalReport report_from_counts(const ConfusionCounts& counts, RegionLabel region,
                              PositiveClass positive) {
  EvalReport r;
  r.region = region;
  r.positive = positive;
  r.counts = counts;
  r.pixel_count = counts.total();
  auto pct = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  r.precision = pct(counts.tp, counts.tp + counts.fp);
  r.recall = pct(counts.tp, counts.tp + counts.fn);
  r.accuracy = pct(counts.tp + counts.tn, counts.total());
  return r;
}

EvalReport score_classifier(const ReliabilityMask& predicted,
                            const ReliabilityMask& truth, const RegionMask& region,
                            RegionLabel label, PositiveClass positive) {
  require_same_shape(predicted, truth, "prediction and truth differ in size");
  require_same_shape(predicted, region, "prediction and region differ in size");
  const Reliability pos = positive == PositiveClass::Reliable ? Reliability::Reliable
                                                              : Reliability::Incorrect;
  ConfusionCounts c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (region[i] != Membership::InRegion) continue;
    const bool p = predicted[i] == pos;
    const bool t = truth[i] == pos;
    if (p && t) {
      ++c.tp;
    } else if (p) {
      ++c.fp;
    } else if (t) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  if (c.total() == 0) {
    throw Error(ErrorKind::InvalidArgument,
                std::string("region '") + to_string(label) + "' is empty");
  }
  return report_from_counts(c, label, positive);
}

double optimal_auc(double error_rate) {
  if (error_rate >= 1.0) return 1.0;
  if (error_rate <= 0.0) return 0.0;
  return error_rate + (1.0 - error_rate) * std::log1p(-error_rate);
}

AucReport auc_sparsification(const RealMap& confidence, const ReliabilityMask& truth,
                             const RegionMask& region, int steps) {
  require_same_shape(confidence, truth, "confidence and truth differ in size");
  require_same_shape(confidence, region, "confidence and region differ in size");
  if (steps < 2) throw Error(ErrorKind::InvalidArgument, "auc steps must be >= 2");

  std::vector<std::uint32_t> order;
  for (std::size_t i = 0; i < confidence.size(); ++i) {
    if (region[i] == Membership::InRegion) order.push_back(static_cast<std::uint32_t>(i));
  }
  if (order.empty()) {
    throw Error(ErrorKind::InvalidArgument, "auc_sparsification: region is empty");
  }
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return confidence[a] > confidence[b];
  });

  // errors_before[k]: truly-incorrect pixels among the first k of `order`.
  const std::size_t n = order.size();
  std::vector<std::uint32_t> errors_before(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    errors_before[k + 1] =
        errors_before[k] + (truth[order[k]] == Reliability::Incorrect ? 1u : 0u);
  }

  AucReport r;
  r.pixel_count = n;
  double prev_t = 0.0;
  double prev_e = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const std::size_t kept = static_cast<std::size_t>(
        (static_cast<std::uint64_t>(k) * n + static_cast<std::uint64_t>(steps) - 1) /
        static_cast<std::uint64_t>(steps));
    const double t = static_cast<double>(k) / steps;
    const double e = kept == 0 ? 0.0
                               : static_cast<double>(errors_before[kept]) /
                                     static_cast<double>(kept);
    r.densities.push_back(t);
    r.error_rates.push_back(e);
    r.auc += 0.5 * (t - prev_t) * (e + prev_e);
    prev_t = t;
    prev_e = e;
  }
  r.error_rate = static_cast<double>(errors_before[n]) / static_cast<double>(n);
  r.auc_optimal = optimal_auc(r.error_rate);
  const double denom = r.error_rate - r.auc_optimal;
  if (r.error_rate > 0.0 && r.error_rate < 1.0 && denom > 0.0) {
    r.improvement = (r.error_rate - r.auc) / denom;
  }
  return r;
}

RealMap negate(const RealMap& map) {
  std::vector<double> out(map.size());
  std::transform(map.values().begin(), map.values().end(), out.begin(),
                 [](double v) { return -v; });
  return RealMap(map.width(), map.height(), std::move(out));
}

}  // namespace edstereo

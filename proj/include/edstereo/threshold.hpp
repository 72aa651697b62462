#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "edstereo/raster.hpp"

namespace edstereo {

inline constexpr int kPercentileCount = 100;

/// Which map selects the pixels whose depth entropies feed each sigma:
/// the entropy difference itself (default) or the image entropy Ent_L.
enum class Conditioning { EntropyDifference, ImageEntropy };

const char* to_string(Conditioning c);

/// f(x) = a x^3 + b x^2 + c x + d
struct Cubic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double operator()(double x) const { return ((a * x + b) * x + c) * x + d; }
};

/// Least-squares cubic. The fit is solved on x mapped to [-1, 1]
/// (u = (x - center) / half_range); `scaled` holds the coefficients in u and
/// `coefficients` the same polynomial expanded back in x.
struct CubicFit {
  Cubic coefficients;
  Cubic scaled;
  double center = 0.0;
  double half_range = 1.0;
};

/// Leading coefficient magnitude at or below which a cubic has no usable
/// inflection point.
inline constexpr double kDegenerateCubic = 1e-12;

/// P_1..P_100 (index 0 holds P_1), linear interpolation between closest
/// ranks: rank = i / 100 * (N - 1) in zero-indexed sorted order.
std::array<double, kPercentileCount> percentiles_over(const RealMap& values);

/// Single percentile q in [0, 100] of an ascending-sorted sequence.
double percentile_sorted(std::span<const double> sorted, double q);

/// Population standard deviation of depth_entropy over pixels with
/// conditioning < p. Absent when fewer than two pixels qualify.
std::optional<double> sigma_below(const RealMap& conditioning,
                                  const RealMap& depth_entropy, double p);

/// sigma_below for every threshold of an ascending sequence in one sorted
/// sweep (running mean and squared deviations).
std::array<std::optional<double>, kPercentileCount> sigmas_below(
    const RealMap& conditioning, const RealMap& depth_entropy,
    const std::array<double, kPercentileCount>& ascending);

/// Absent y values are dropped. Throws ErrorKind::Numeric with fewer than
/// four points or when the design matrix is rank deficient (fewer than four
/// distinct x values).
CubicFit cubic_fit(std::span<const double> xs,
                   std::span<const std::optional<double>> ys);

/// -b / (3a), absent when |a| <= eps.
std::optional<double> inflection_point(const Cubic& cubic,
                                       double eps = kDegenerateCubic);

/// Inflection of a fit; degeneracy is judged on the scaled coefficients.
std::optional<double> inflection_point(const CubicFit& fit);

struct ThresholdDiagnostics {
  std::array<double, kPercentileCount> percentiles{};
  std::array<std::optional<double>, kPercentileCount> sigmas{};
  std::optional<Cubic> cubic;
  std::optional<double> inflection;
  bool fallback_used = false;
  /// Empty unless the P50 fallback fired.
  std::string fallback_reason;
  double ent_th = 0.0;
  Conditioning conditioning = Conditioning::EntropyDifference;
};

/// Threshold selection on the entropy-difference map:
///   1. P_i = percentiles of ent,
///   2. E_i = sigma of ent_d over pixels with ent < P_i,
///   3. least-squares cubic E ~ f(P),
///   4. f_p = inflection of f,
///   5. Ent_Th = f_p if P_20 <= f_p <= P_80, else P_50.
/// A failed or degenerate fit also falls back to P_50.
ThresholdDiagnostics detect_threshold(const RealMap& ent, const RealMap& ent_d);

/// Same, with step 2 conditioned on `conditioning` instead of ent (e.g. the
/// image entropy map). Percentiles and the guard band still come from ent.
ThresholdDiagnostics detect_threshold(const RealMap& ent, const RealMap& ent_d,
                                      const RealMap& conditioning,
                                      Conditioning label);

/// Incorrect where ent < ent_th (strict), Reliable elsewhere.
ReliabilityMask classify(const RealMap& ent, double ent_th);

/// Rows "i,P_i,E_i" with a header; absent sigmas are empty fields.
std::string diagnostics_csv(const ThresholdDiagnostics& diag);

/// One line: coefficients, inflection, fallback flag, Ent_Th, conditioning.
std::string diagnostics_summary(const ThresholdDiagnostics& diag);

}  // namespace edstereo

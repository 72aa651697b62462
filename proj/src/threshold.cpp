#include "edstereo/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace edstereo {

const char* to_string(Conditioning c) {
  return c == Conditioning::EntropyDifference ? "ent" : "ent_l";
}

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) {
    throw Error(ErrorKind::InvalidArgument, "percentile of an empty set");
  }
  const double rank = q * static_cast<double>(sorted.size() - 1) / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

namespace {

// Places the order statistics listed in `ranks` (ascending, unique indices
// into [first, last)) at their sorted positions.
void select_ranks(std::vector<double>& v, std::size_t first, std::size_t last,
                  std::span<const std::size_t> ranks) {
  if (ranks.empty() || last - first < 2) return;
  const std::size_t mid = ranks.size() / 2;
  const std::size_t r = ranks[mid];
  std::nth_element(v.begin() + first, v.begin() + r, v.begin() + last);
  select_ranks(v, first, r, ranks.first(mid));
  select_ranks(v, r + 1, last, ranks.subspan(mid + 1));
}

}  // namespace

std::array<double, kPercentileCount> percentiles_over(const RealMap& values) {
  std::vector<double> v(values.values().begin(), values.values().end());
  const std::size_t n = v.size();
  std::vector<std::size_t> ranks;
  std::array<std::size_t, kPercentileCount> lows{};
  std::array<double, kPercentileCount> fracs{};
  for (int i = 1; i <= kPercentileCount; ++i) {
    const double rank = i * static_cast<double>(n - 1) / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    lows[i - 1] = lo;
    fracs[i - 1] = rank - static_cast<double>(lo);
    ranks.push_back(lo);
    if (lo + 1 < n) ranks.push_back(lo + 1);
  }
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  select_ranks(v, 0, n, ranks);

  std::array<double, kPercentileCount> out{};
  for (int i = 0; i < kPercentileCount; ++i) {
    const std::size_t lo = lows[i];
    out[i] = lo + 1 >= n ? v[lo] : v[lo] + fracs[i] * (v[lo + 1] - v[lo]);
  }
  return out;
}

std::optional<double> sigma_below(const RealMap& conditioning,
                                  const RealMap& depth_entropy, double p) {
  require_same_shape(conditioning, depth_entropy, "sigma_below maps differ in size");
  std::size_t count = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < conditioning.size(); ++i) {
    if (conditioning[i] < p) {
      ++count;
      sum += depth_entropy[i];
    }
  }
  if (count < 2) return std::nullopt;
  const double mean = sum / static_cast<double>(count);
  double squares = 0.0;
  for (std::size_t i = 0; i < conditioning.size(); ++i) {
    if (conditioning[i] < p) {
      const double dev = depth_entropy[i] - mean;
      squares += dev * dev;
    }
  }
  return std::sqrt(squares / static_cast<double>(count));
}

std::array<std::optional<double>, kPercentileCount> sigmas_below(
    const RealMap& conditioning, const RealMap& depth_entropy,
    const std::array<double, kPercentileCount>& ascending) {
  require_same_shape(conditioning, depth_entropy, "sigma_below maps differ in size");
  if (!std::is_sorted(ascending.begin(), ascending.end())) {
    throw Error(ErrorKind::InvalidArgument, "sigma thresholds must be ascending");
  }
  // Bucket k holds pixels whose first threshold above them is ascending[k];
  // they count towards every sigma from k on. Each bucket keeps a running
  // mean and sum of squared deviations, merged in threshold order.
  struct Moments {
    std::size_t count = 0;
    double mean = 0.0;
    double squares = 0.0;
  };
  std::array<Moments, kPercentileCount + 1> buckets{};
  for (std::size_t i = 0; i < conditioning.size(); ++i) {
    // Branch-free upper bound: number of thresholds <= the value.
    const double v = conditioning[i];
    std::size_t k = 0;
    for (std::size_t step = 64; step > 0; step /= 2) {
      if (k + step <= ascending.size() && ascending[k + step - 1] <= v) k += step;
    }
    Moments& m = buckets[k];
    const double x = depth_entropy[i];
    ++m.count;
    const double delta = x - m.mean;
    m.mean += delta / static_cast<double>(m.count);
    m.squares += delta * (x - m.mean);
  }

  std::array<std::optional<double>, kPercentileCount> out{};
  Moments total;
  for (int k = 0; k < kPercentileCount; ++k) {
    const Moments& b = buckets[k];
    if (b.count > 0) {
      const auto n = static_cast<double>(total.count + b.count);
      const double delta = b.mean - total.mean;
      total.squares += b.squares + delta * delta * static_cast<double>(total.count) *
                                       static_cast<double>(b.count) / n;
      total.mean += delta * static_cast<double>(b.count) / n;
      total.count += b.count;
    }
    if (total.count >= 2) out[k] = std::sqrt(total.squares / static_cast<double>(total.count));
  }
  return out;
}

namespace {

// Householder QR least squares for the m x 4 system A beta = y, A stored
// column-major. Returns false when a diagonal of R collapses.
bool solve_least_squares_4(std::vector<double>& a, std::vector<double>& y,
                           std::size_t m, std::array<double, 4>& beta) {
  constexpr std::size_t n = 4;
  auto at = [&](std::size_t row, std::size_t col) -> double& { return a[col * m + row]; };
  std::array<double, n> diag{};
  double largest = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += at(i, k) * at(i, k);
    norm = std::sqrt(norm);
    const double alpha = at(k, k) > 0 ? -norm : norm;
    diag[k] = alpha;
    largest = std::max(largest, std::abs(alpha));
    if (norm == 0.0) return false;

    // v = x - alpha e1, stored in place below (and at) the diagonal.
    at(k, k) -= alpha;
    double v_norm2 = 0.0;
    for (std::size_t i = k; i < m; ++i) v_norm2 += at(i, k) * at(i, k);
    if (v_norm2 == 0.0) continue;

    for (std::size_t j = k + 1; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += at(i, k) * at(i, j);
      const double s = 2.0 * dot / v_norm2;
      for (std::size_t i = k; i < m; ++i) at(i, j) -= s * at(i, k);
    }
    double dot = 0.0;
    for (std::size_t i = k; i < m; ++i) dot += at(i, k) * y[i];
    const double s = 2.0 * dot / v_norm2;
    for (std::size_t i = k; i < m; ++i) y[i] -= s * at(i, k);
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(diag[k]) <= 1e-10 * largest) return false;
  }
  for (std::size_t k = n; k-- > 0;) {
    double acc = y[k];
    for (std::size_t j = k + 1; j < n; ++j) acc -= at(k, j) * beta[j];
    beta[k] = acc / diag[k];
  }
  return true;
}

}  // namespace

CubicFit cubic_fit(std::span<const double> xs,
                   std::span<const std::optional<double>> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorKind::DimensionMismatch, "cubic_fit: xs and ys differ in length");
  }
  std::vector<double> px;
  std::vector<double> py;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i]) {
      px.push_back(xs[i]);
      py.push_back(*ys[i]);
    }
  }
  if (px.size() < 4) {
    throw Error(ErrorKind::Numeric, "cubic_fit needs at least 4 defined points, got " +
                                        std::to_string(px.size()));
  }
  const auto [lo, hi] = std::minmax_element(px.begin(), px.end());
  const double center = 0.5 * (*lo + *hi);
  const double half_range = 0.5 * (*hi - *lo);
  if (!(half_range > 0.0)) {
    throw Error(ErrorKind::Numeric, "cubic_fit: all x values identical");
  }

  const std::size_t m = px.size();
  std::vector<double> design(4 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = (px[i] - center) / half_range;
    design[i] = 1.0;
    design[m + i] = u;
    design[2 * m + i] = u * u;
    design[3 * m + i] = u * u * u;
  }
  std::array<double, 4> beta{};
  if (!solve_least_squares_4(design, py, m, beta)) {
    throw Error(ErrorKind::Numeric,
                "cubic_fit: rank-deficient system (fewer than 4 distinct x values)");
  }

  CubicFit fit;
  fit.center = center;
  fit.half_range = half_range;
  fit.scaled = Cubic{beta[3], beta[2], beta[1], beta[0]};
  // Expand f(k (x - m)) with k = 1 / half_range.
  const double k = 1.0 / half_range;
  const double k2 = k * k;
  const double k3 = k2 * k;
  const double c = center;
  fit.coefficients.a = beta[3] * k3;
  fit.coefficients.b = beta[2] * k2 - 3.0 * c * beta[3] * k3;
  fit.coefficients.c = beta[1] * k - 2.0 * c * beta[2] * k2 + 3.0 * c * c * beta[3] * k3;
  fit.coefficients.d =
      beta[0] - c * beta[1] * k + c * c * beta[2] * k2 - c * c * c * beta[3] * k3;
  return fit;
}

std::optional<double> inflection_point(const Cubic& cubic, double eps) {
  if (!(std::abs(cubic.a) > eps)) return std::nullopt;
  return -cubic.b / (3.0 * cubic.a);
}

std::optional<double> inflection_point(const CubicFit& fit) {
  const auto u = inflection_point(fit.scaled);
  if (!u) return std::nullopt;
  return fit.center + fit.half_range * *u;
}

ThresholdDiagnostics detect_threshold(const RealMap& ent, const RealMap& ent_d) {
  return detect_threshold(ent, ent_d, ent, Conditioning::EntropyDifference);
}

ThresholdDiagnostics detect_threshold(const RealMap& ent, const RealMap& ent_d,
                                      const RealMap& conditioning,
                                      Conditioning label) {
  require_same_shape(ent, ent_d, "entropy difference and depth entropy differ in size");
  require_same_shape(ent, conditioning, "conditioning map differs in size");

  ThresholdDiagnostics diag;
  diag.conditioning = label;
  diag.percentiles = percentiles_over(ent);
  diag.sigmas = sigmas_below(conditioning, ent_d, diag.percentiles);

  const double p20 = diag.percentiles[19];
  const double p50 = diag.percentiles[49];
  const double p80 = diag.percentiles[79];
  auto fall_back = [&](std::string reason) {
    diag.fallback_used = true;
    diag.fallback_reason = std::move(reason);
    diag.ent_th = p50;
    return diag;
  };

  CubicFit fit;
  try {
    fit = cubic_fit(diag.percentiles, diag.sigmas);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Numeric) throw;
    return fall_back(e.what());
  }
  diag.cubic = fit.coefficients;
  diag.inflection = inflection_point(fit);
  if (!diag.inflection) return fall_back("degenerate cubic (no inflection point)");
  if (*diag.inflection < p20 || *diag.inflection > p80) {
    return fall_back("inflection outside [P20, P80]");
  }
  diag.ent_th = *diag.inflection;
  return diag;
}

ReliabilityMask classify(const RealMap& ent, double ent_th) {
  std::vector<Reliability> flags(ent.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    flags[i] = ent[i] < ent_th ? Reliability::Incorrect : Reliability::Reliable;
  }
  return ReliabilityMask(ent.width(), ent.height(), std::move(flags));
}

namespace {

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string diagnostics_csv(const ThresholdDiagnostics& diag) {
  std::string out = "i,P_i,E_i\n";
  for (int i = 0; i < kPercentileCount; ++i) {
    out += std::to_string(i + 1) + "," + fmt_real(diag.percentiles[i]) + ",";
    if (diag.sigmas[i]) out += fmt_real(*diag.sigmas[i]);
    out += "\n";
  }
  return out;
}

std::string diagnostics_summary(const ThresholdDiagnostics& diag) {
  std::ostringstream out;
  out << "conditioning=" << to_string(diag.conditioning);
  if (diag.cubic) {
    out << " a=" << fmt_real(diag.cubic->a) << " b=" << fmt_real(diag.cubic->b)
        << " c=" << fmt_real(diag.cubic->c) << " d=" << fmt_real(diag.cubic->d);
  } else {
    out << " a= b= c= d=";
  }
  out << " inflection=" << (diag.inflection ? fmt_real(*diag.inflection) : std::string());
  out << " fallback=" << (diag.fallback_used ? "1" : "0");
  out << " ent_th=" << fmt_real(diag.ent_th);
  if (diag.fallback_used) out << " reason=\"" << diag.fallback_reason << "\"";
  return out.str();
}

}  // namespace edstereo

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edstereo/error.hpp"

namespace edstereo {

enum class Reliability : std::uint8_t { Incorrect = 0, Reliable = 1 };
enum class Membership : std::uint8_t { Excluded = 0, InRegion = 1 };

/// Row-major W x H grid; pixel (x, y) lives at index y * width + x.
/// Dimensions and payload length are checked at construction and the
/// contents are immutable afterwards.
template <typename T>
class Grid {
public:
  using value_type = T;

  Grid(int width, int height, std::vector<T> values)
      : width_(width), height_(height), values_(std::move(values)) {
    if (width <= 0 || height <= 0) {
      throw Error(ErrorKind::InvalidArgument,
                  "raster dimensions must be positive, got " +
                      std::to_string(width) + "x" + std::to_string(height));
    }
    if (values_.size() != static_cast<std::size_t>(width) * height) {
      throw Error(ErrorKind::DimensionMismatch,
                  "raster payload has " + std::to_string(values_.size()) +
                      " values, expected " + std::to_string(width) + "x" +
                      std::to_string(height));
    }
  }

  Grid(int width, int height, T fill)
      : Grid(width, height,
             std::vector<T>(static_cast<std::size_t>(width > 0 ? width : 0) *
                                (height > 0 ? height : 0),
                            fill)) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  const T& at(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator[](std::size_t i) const { return values_[i]; }
  std::span<const T> values() const& noexcept { return values_; }
  std::vector<T> values() && noexcept { return std::move(values_); }
  std::span<const T> row(int y) const {
    return std::span<const T>(values_).subspan(
        static_cast<std::size_t>(y) * width_, width_);
  }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  int width_;
  int height_;
  std::vector<T> values_;
};

using GrayImage = Grid<std::uint8_t>;
using ReliabilityMask = Grid<Reliability>;
using RegionMask = Grid<Membership>;

/// Real-valued map (entropy, entropy difference). Every value is finite.
class RealMap : public Grid<double> {
public:
  RealMap(int width, int height, std::vector<double> values)
      : Grid<double>(width, height, std::move(values)) {
    for (double v : this->values()) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::Numeric, "real map contains a non-finite value");
      }
    }
  }
  RealMap(int width, int height, double fill)
      : RealMap(width, height, std::vector<double>(checked_area(width, height), fill)) {}

private:
  static std::size_t checked_area(int width, int height) {
    if (width <= 0 || height <= 0) {
      throw Error(ErrorKind::InvalidArgument, "grid dimensions must be positive");
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

/// Integer disparities in [0, max_disparity - 1].
class DisparityMap : public Grid<int> {
public:
  DisparityMap(int width, int height, std::vector<int> disparities,
               int max_disparity)
      : Grid<int>(width, height, std::move(disparities)),
        max_disparity_(max_disparity) {
    if (max_disparity < 1) {
      throw Error(ErrorKind::InvalidArgument, "max_disparity must be >= 1");
    }
    for (int d : values()) {
      if (d < 0 || d >= max_disparity) {
        throw Error(ErrorKind::InvalidArgument,
                    "disparity " + std::to_string(d) + " outside [0, " +
                        std::to_string(max_disparity - 1) + "]");
      }
    }
  }

  int max_disparity() const noexcept { return max_disparity_; }

  friend bool operator==(const DisparityMap&, const DisparityMap&) = default;

private:
  int max_disparity_;
};

/// Percentage of InRegion pixels, 100 * |InRegion| / (W * H).
double coverage_fraction(const RegionMask& mask);

/// Number of pixels carrying `flag`.
std::size_t count_flag(const ReliabilityMask& mask, Reliability flag);

/// Throws DimensionMismatch with `what` in the message when shapes differ.
template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" +
                    std::to_string(b.height()));
  }
}

/// Symmetric (half-sample) reflection of an index into [0, n):
/// -1 -> 0, -2 -> 1, n -> n - 1. Valid for any offset.
inline int mirror_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

}  // namespace edstereo

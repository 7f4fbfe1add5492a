#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pecann {

// Index of a point inside a PointSet.
using PointId = std::uint32_t;

// Dense n x d matrix of float32 coordinates, row-major. Immutable after
// construction, so concurrent readers need no synchronization.
class PointSet {
 public:
  // Throws std::invalid_argument if n or d is zero, if data.size() != n*d,
  // or if any coordinate is NaN/Inf.
  PointSet(std::size_t n, std::size_t d, std::vector<float> data);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }

  std::span<const float> operator[](PointId i) const noexcept {
    return {data_.data() + static_cast<std::size_t>(i) * d_, d_};
  }
  // Bounds-checked row access; throws std::out_of_range.
  std::span<const float> at(PointId i) const;

  const std::vector<float>& data() const noexcept { return data_; }

 private:
  std::size_t n_;
  std::size_t d_;
  std::vector<float> data_;
};

// Squared Euclidean distance between two equal-length rows, accumulated in
// double. The accumulation order depends only on the coordinate index, and
// (a-b)^2 == (b-a)^2 exactly, so the result is symmetric bit-for-bit.
double squared_l2(std::span<const float> a, std::span<const float> b) noexcept;

inline double l2(std::span<const float> a, std::span<const float> b) noexcept {
  return std::sqrt(squared_l2(a, b));
}

// Euclidean distance between rows i and j. Throws std::out_of_range.
double distance(const PointSet& p, PointId i, PointId j);
double squared_distance(const PointSet& p, PointId i, PointId j);

}  // namespace pecann

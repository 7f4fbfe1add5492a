#include "pecann/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pecann {

PointSet::PointSet(std::size_t n, std::size_t d, std::vector<float> data)
    : n_(n), d_(d), data_(std::move(data)) {
  if (n_ == 0) throw std::invalid_argument("PointSet: need at least one point");
  if (d_ == 0) throw std::invalid_argument("PointSet: dimension must be positive");
  if (data_.size() != n_ * d_) {
    throw std::invalid_argument("PointSet: expected " + std::to_string(n_ * d_) +
                                " coordinates, got " + std::to_string(data_.size()));
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!std::isfinite(data_[k])) {
      throw std::invalid_argument("PointSet: non-finite coordinate at point " +
                                  std::to_string(k / d_) + ", dim " + std::to_string(k % d_));
    }
  }
}

std::span<const float> PointSet::at(PointId i) const {
  if (i >= n_) {
    throw std::out_of_range("point id " + std::to_string(i) + " out of range (n=" +
                            std::to_string(n_) + ")");
  }
  return (*this)[i];
}

double squared_l2(std::span<const float> a, std::span<const float> b) noexcept {
  // Eight independent lanes; fixed lane assignment keeps results identical
  // regardless of which thread evaluates the pair.
  constexpr std::size_t kLanes = 8;
  double acc[kLanes] = {};
  const std::size_t d = a.size();
  const std::size_t blocked = d - d % kLanes;
  for (std::size_t k = 0; k < blocked; k += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double diff = static_cast<double>(a[k + l]) - static_cast<double>(b[k + l]);
      acc[l] += diff * diff;
    }
  }
  for (std::size_t k = blocked; k < d; ++k) {
    const double diff = static_cast<double>(a[k]) - static_cast<double>(b[k]);
    acc[k - blocked] += diff * diff;
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

double squared_distance(const PointSet& p, PointId i, PointId j) {
  return squared_l2(p.at(i), p.at(j));
}

double distance(const PointSet& p, PointId i, PointId j) {
  return std::sqrt(squared_distance(p, i, j));
}

}  // namespace pecann

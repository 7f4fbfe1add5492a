#pragma once

#include <cstddef>
#include <vector>

#include "pecann/core.hpp"

namespace pecann {

struct Neighbor {
  PointId id;
  double dist;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Total order on neighbors: by distance, equal distances by smaller id.
inline bool closer(const Neighbor& a, const Neighbor& b) noexcept {
  return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
}

// Sorted by (dist, id), no duplicate ids, never contains the query itself.
using NeighborList = std::vector<Neighbor>;

// A k-nearest-neighbor index over a fixed PointSet. Built once, then queried
// concurrently without synchronization.
class KnnIndex {
 public:
  virtual ~KnnIndex() = default;

  virtual const PointSet& points() const noexcept = 0;

  // The min(k, n-1) nearest other points of `query`. Throws
  // std::invalid_argument for k == 0 and std::out_of_range for a bad id.
  virtual NeighborList find_knn(PointId query, std::size_t k) const = 0;

  // True when find_knn is exact.
  virtual bool exact() const noexcept = 0;
};

// Exhaustive search: no state beyond the point set reference.
class BruteForceIndex final : public KnnIndex {
 public:
  explicit BruteForceIndex(const PointSet& points) noexcept : points_(&points) {}

  const PointSet& points() const noexcept override { return *points_; }
  NeighborList find_knn(PointId query, std::size_t k) const override;
  bool exact() const noexcept override { return true; }

 private:
  const PointSet* points_;
};

BruteForceIndex build_bruteforce(const PointSet& points) noexcept;

// Exact kNN of `query` among all other points. Shared by the brute-force
// backend and by graph-index fallbacks.
NeighborList exact_knn(const PointSet& points, PointId query, std::size_t k);

// find_knn for every point, in parallel over queries.
std::vector<NeighborList> knn_all(const KnnIndex& index, std::size_t k);

}  // namespace pecann

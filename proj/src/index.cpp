#include "pecann/index.hpp"

#include <algorithm>
#include <stdexcept>

#include "pecann/parallel.hpp"

namespace pecann {

NeighborList exact_knn(const PointSet& points, PointId query, std::size_t k) {
  if (k == 0) throw std::invalid_argument("find_knn: k must be positive");
  const auto q = points.at(query);
  const std::size_t n = points.size();

  NeighborList all;
  all.reserve(n - 1);
  for (PointId j = 0; j < n; ++j) {
    if (j == query) continue;
    all.push_back({j, l2(q, points[j])});
  }
  const std::size_t keep = std::min(k, all.size());
  if (keep < all.size()) {
    // select the k-th smallest, then everything before it is the answer
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep - 1), all.end(), closer);
    all.resize(keep);
  }
  std::sort(all.begin(), all.end(), closer);
  return all;
}

NeighborList BruteForceIndex::find_knn(PointId query, std::size_t k) const {
  return exact_knn(*points_, query, k);
}

BruteForceIndex build_bruteforce(const PointSet& points) noexcept { return BruteForceIndex(points); }

std::vector<NeighborList> knn_all(const KnnIndex& index, std::size_t k) {
  if (k == 0) throw std::invalid_argument("knn_all: k must be positive");
  const std::size_t n = index.points().size();
  std::vector<NeighborList> out(n);
  parallel_for(0, n, [&](std::size_t i) { out[i] = index.find_knn(static_cast<PointId>(i), k); });
  return out;
}

}  // namespace pecann

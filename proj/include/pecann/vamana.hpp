#pragma once

// Vamana graph index: greedy beam search, RobustPrune neighbor selection and
// batched parallel construction from a sampled set of start points.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pecann/index.hpp"

namespace pecann {

// Directed graph over a PointSet with out-degree bounded by R.
class GraphIndex {
 public:
  // Throws std::invalid_argument if degree_bound is 0, start_points is empty
  // or contains an invalid id.
  GraphIndex(const PointSet& points, std::uint32_t degree_bound, std::vector<PointId> start_points,
             double alpha = 1.0);

  const PointSet& points() const noexcept { return *points_; }
  std::size_t size() const noexcept { return degree_.size(); }
  std::uint32_t degree_bound() const noexcept { return degree_bound_; }
  double alpha() const noexcept { return alpha_; }
  const std::vector<PointId>& start_points() const noexcept { return start_points_; }

  std::span<const PointId> out_neighbors(PointId v) const noexcept {
    return {edges_.data() + static_cast<std::size_t>(v) * degree_bound_, degree_[v]};
  }

  // Replaces v's out-list. Throws std::invalid_argument when the list is
  // longer than R, contains v, repeats an id or names an invalid id.
  // Concurrent calls on distinct vertices are safe.
  void set_out_neighbors(PointId v, std::span<const PointId> ids);

 private:
  const PointSet* points_;
  std::uint32_t degree_bound_;
  double alpha_;
  std::vector<PointId> start_points_;
  std::vector<PointId> edges_;  // n * R slots
  std::vector<std::uint32_t> degree_;
};

struct BeamSearchResult {
  NeighborList nearest;  // k closest of beam and visited, sorted
  NeighborList visited;  // processing order
};

// Greedy beam search from `starts`. The query point itself is not excluded.
// Throws std::invalid_argument unless beam_width >= k >= 1 and starts is
// non-empty.
BeamSearchResult beam_search(const GraphIndex& graph, std::span<const float> query,
                             std::span<const PointId> starts, std::size_t beam_width, std::size_t k);
BeamSearchResult beam_search(const GraphIndex& graph, PointId query, std::span<const PointId> starts,
                             std::size_t beam_width, std::size_t k);

// RobustPrune over candidates plus `current` out-neighbors of p. Returns the
// selected out-list in selection (nearest-first) order. Candidate distances
// must be distances to p.
std::vector<PointId> robust_prune(const PointSet& points, PointId p, std::span<const Neighbor> candidates,
                                  std::span<const PointId> current, double alpha, std::uint32_t degree_bound);

// Same, merging with p's current out-list in `graph`.
std::vector<PointId> robust_prune(const GraphIndex& graph, PointId p, std::span<const Neighbor> candidates,
                                  double alpha, std::uint32_t degree_bound);

struct VamanaParams {
  std::uint32_t degree_bound = 32;  // R
  std::uint32_t build_beam = 32;    // L used while inserting
  double alpha = 1.1;
  std::uint32_t num_starts = 0;     // 0 selects ceil(sqrt(n))
  bool medoid_start = false;        // single medoid start instead of sampling
  std::uint64_t seed = 42;
  double max_batch_fraction = 0.02; // cap on a doubling batch, as a fraction of n
};

// Throws std::invalid_argument on R < 2, build_beam == 0, alpha < 1 or
// num_starts > n.
GraphIndex build_vamana(const PointSet& points, const VamanaParams& params);

// Beam search with width max(L, k+1), falling back to exact search when fewer
// than min(k, n-1) non-self neighbors come back.
NeighborList find_knn_with_fallback(const GraphIndex& graph, PointId query, std::size_t k, std::size_t beam_width);

// KnnIndex backed by a Vamana graph.
class VamanaIndex final : public KnnIndex {
 public:
  VamanaIndex(GraphIndex graph, std::size_t query_beam);

  const PointSet& points() const noexcept override { return graph_.points(); }
  NeighborList find_knn(PointId query, std::size_t k) const override;
  bool exact() const noexcept override { return false; }

  const GraphIndex& graph() const noexcept { return graph_; }
  std::size_t query_beam() const noexcept { return query_beam_; }

 private:
  GraphIndex graph_;
  std::size_t query_beam_;
};

// Point closest to the coordinate mean.
PointId medoid(const PointSet& points);

// Binary layout: "PECG", u32 n, u32 R, u32 num_starts, start ids, then per
// vertex u32 degree followed by its neighbor ids. All little-endian.
void save_graph(const GraphIndex& graph, const std::filesystem::path& path);
GraphIndex load_graph(const PointSet& points, const std::filesystem::path& path);

}  // namespace pecann

#pragma once

// Center/noise selection, union-find cluster assignment and the end-to-end
// pipeline: index -> kNN -> densities -> dependent points -> clusters.

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "pecann/density.hpp"
#include "pecann/dependent.hpp"
#include "pecann/index.hpp"
#include "pecann/vamana.hpp"

namespace pecann {

struct ThresholdCenter {
  double delta_min = 0.0;  // centers: delta >= delta_min
};
struct ProductCenter {
  std::size_t n_c = 1;     // centers: the n_c largest delta * rho
};
struct LocalCenter {};     // centers: outrank every point in their kNN list

using CenterPolicy = std::variant<ThresholdCenter, ProductCenter, LocalCenter>;

struct NoisePolicy {
  double rho_min = 0.0;    // noise: rho < rho_min
};

struct Clustering {
  std::vector<PointId> labels;   // center id, or own id for noise points
  std::vector<PointId> centers;  // sorted
  std::vector<PointId> noise;    // sorted

  std::size_t num_clusters() const noexcept { return centers.size() + noise.size(); }
  friend bool operator==(const Clustering&, const Clustering&) = default;
};

// Everything steps 5-6 need, so policies can be changed without redoing the
// index, kNN or dependent-point work.
struct DpcState {
  DensityArray rho;
  std::vector<DependentInfo> dependents;
  std::vector<NeighborList> neighbors;

  std::size_t size() const noexcept { return rho.size(); }
};

std::vector<PointId> find_noise(const DensityArray& rho, const NoisePolicy& policy);

// Points of `candidates` (sorted ids) with delta >= delta_min.
std::vector<PointId> find_centers_threshold(const std::vector<DependentInfo>& dep,
                                            const std::vector<PointId>& candidates, double delta_min);

// The n_c candidates with the largest delta * rho. An infinite delta ranks
// above every finite product; ties go by product, then delta, then smaller id.
// Asking for more centers than candidates returns all of them.
std::vector<PointId> find_centers_product(const DensityArray& rho, const std::vector<DependentInfo>& dep,
                                          const std::vector<PointId>& candidates, std::size_t n_c);

// Candidates that outrank every point of their own neighbor list.
std::vector<PointId> find_centers_local(const DensityArray& rho, const std::vector<NeighborList>& neighbors,
                                        const std::vector<PointId>& candidates);

// Unions every point that is neither center nor noise with its dependent
// point, then labels each component by the center or noise id it contains.
// Throws std::logic_error if such a point has no dependent point.
Clustering assign_clusters(const std::vector<DependentInfo>& dep, const std::vector<PointId>& centers,
                           const std::vector<PointId>& noise);

// Steps 5-6 on a precomputed state. A non-noise point without a dependent
// point is promoted to a center.
Clustering reapply_policies(const DpcState& state, const CenterPolicy& center, const NoisePolicy& noise);

enum class IndexKind { bruteforce, vamana };

struct IndexConfig {
  IndexKind kind = IndexKind::vamana;
  VamanaParams vamana;
  std::size_t query_beam = 32;  // L
};

struct PipelineConfig {
  IndexConfig index;
  std::size_t k = 16;
  DensityKind density = DensityKind::kth;
  CenterPolicy center = ThresholdCenter{};
  NoisePolicy noise;
  DoublingParams doubling;
};

struct StageTimings {
  double index = 0;      // seconds
  double knn = 0;
  double density = 0;
  double dependent = 0;
  double cluster = 0;    // noise, centers and union-find

  double total() const noexcept { return index + knn + density + dependent + cluster; }
};

struct PipelineResult {
  Clustering clustering;
  DpcState state;
  StageTimings timings;
  DependentStats dependent_stats;
};

// Throws std::invalid_argument for k == 0, L_d <= k, query beam < k or
// invalid index parameters.
PipelineResult run_pipeline(const PointSet& points, const PipelineConfig& config);

// Index used by run_pipeline for the given configuration.
std::unique_ptr<KnnIndex> build_index(const PointSet& points, const IndexConfig& config);

std::string describe(const CenterPolicy& policy);

}  // namespace pecann

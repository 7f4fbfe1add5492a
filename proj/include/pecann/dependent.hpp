#pragma once

// Dependent points: for every point, the (approximately) nearest point of
// strictly higher density rank. Three phases, each a barrier:
//   1. look inside the point's own kNN list;
//   2. while more than `threshold` points remain, query the index for
//      k_dep neighbors, doubling k_dep every round (capped at n-1);
//   3. scan all points for whatever is left.

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "pecann/density.hpp"
#include "pecann/index.hpp"

namespace pecann {

struct DependentInfo {
  std::optional<PointId> lambda;  // absent only for the top-ranked point
  double delta = std::numeric_limits<double>::infinity();

  friend bool operator==(const DependentInfo&, const DependentInfo&) = default;
};

struct DoublingParams {
  std::size_t initial_k = 32;    // L_d, must exceed the density k
  std::size_t threshold = 300;   // switch to the exhaustive scan at or below this many
};

// Closest candidate that outranks i, ties by id. Candidate distances must be
// distances to i.
std::optional<Neighbor> dp_brute_force(PointId i, std::span<const Neighbor> candidates, const DensityArray& rho);

struct DependentStats {
  std::size_t after_knn = 0;          // unresolved after phase 1
  std::size_t doubling_rounds = 0;
  std::size_t exhaustive = 0;         // resolved by the phase-3 scan
};

// Throws std::invalid_argument when initial_k <= k (k = longest neighbor
// list) or when sizes disagree.
std::vector<DependentInfo> compute_dependent_points(const KnnIndex& index, const DensityArray& rho,
                                                    const std::vector<NeighborList>& neighbors,
                                                    const DoublingParams& params, DependentStats* stats = nullptr);

}  // namespace pecann

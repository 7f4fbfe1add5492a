#pragma once

#include <string_view>
#include <vector>

#include "pecann/index.hpp"

namespace pecann {

enum class DensityKind { kth, kth_normalized, exp_sum, sum_exp, sum };

// Accepts "kth", "normalized" (or "kth_normalized"), "exp-sum", "sum-exp",
// "sum". Throws std::invalid_argument otherwise.
DensityKind parse_density_kind(std::string_view name);
std::string_view to_string(DensityKind kind) noexcept;

// Per-point densities; may hold +inf, never NaN.
using DensityArray = std::vector<double>;

// Strict density ranking: j outranks i when rho_j > rho_i, or the densities
// are equal and j has the smaller id.
inline bool denser(const DensityArray& rho, PointId j, PointId i) noexcept {
  return rho[j] > rho[i] || (rho[j] == rho[i] && j < i);
}

// 1 / distance to the furthest neighbor; +inf when that distance is 0.
// Throws std::invalid_argument on an empty list.
double density_kth(const NeighborList& neighbors);

// rho'_i = rho_i * |N_i| / sum_{j in N_i} rho_j. A zero denominator or an
// infinite rho_i gives +inf; a finite rho_i over an infinite sum gives 0.
DensityArray density_kth_normalized(const DensityArray& rho, const std::vector<NeighborList>& neighbors);

// exp(-mean squared distance to the neighbors).
double density_exp_sum(const PointSet& points, PointId i, const NeighborList& neighbors);

// mean of exp(-squared distance) over the neighbors.
double density_sum_exp(const PointSet& points, PointId i, const NeighborList& neighbors);

// Negative sum of neighbor distances.
double density_sum(const NeighborList& neighbors);

// Parallel map of the chosen kernel over all points. Throws
// std::invalid_argument if any point has no neighbors (e.g. n == 1).
DensityArray compute_densities(DensityKind kind, const PointSet& points, const std::vector<NeighborList>& neighbors);

}  // namespace pecann

#include "pecann/density.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pecann/parallel.hpp"

namespace pecann {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_neighbors(const NeighborList& neighbors) {
  if (neighbors.empty()) throw std::invalid_argument("density: point has no neighbors");
}
}  // namespace

DensityKind parse_density_kind(std::string_view name) {
  if (name == "kth") return DensityKind::kth;
  if (name == "normalized" || name == "kth_normalized" || name == "kth-normalized") return DensityKind::kth_normalized;
  if (name == "exp-sum" || name == "exp_sum") return DensityKind::exp_sum;
  if (name == "sum-exp" || name == "sum_exp") return DensityKind::sum_exp;
  if (name == "sum") return DensityKind::sum;
  throw std::invalid_argument("unknown density kind: " + std::string(name));
}

std::string_view to_string(DensityKind kind) noexcept {
  switch (kind) {
    case DensityKind::kth: return "kth";
    case DensityKind::kth_normalized: return "normalized";
    case DensityKind::exp_sum: return "exp-sum";
    case DensityKind::sum_exp: return "sum-exp";
    case DensityKind::sum: return "sum";
  }
  return "?";
}

double density_kth(const NeighborList& neighbors) {
  require_neighbors(neighbors);
  const double furthest = neighbors.back().dist;
  return furthest == 0.0 ? kInf : 1.0 / furthest;
}

DensityArray density_kth_normalized(const DensityArray& rho, const std::vector<NeighborList>& neighbors) {
  if (rho.size() != neighbors.size()) throw std::invalid_argument("density_kth_normalized: size mismatch");
  DensityArray out(rho.size());
  parallel_for(0, rho.size(), [&](std::size_t i) {
    const NeighborList& nbrs = neighbors[i];
    require_neighbors(nbrs);
    double denom = 0.0;
    for (const Neighbor& nb : nbrs) denom += rho[nb.id];
    if (denom == 0.0 || std::isinf(denom) || std::isinf(rho[i])) {
      // duplicates nearby: finite rho_i against an infinite sum goes to 0
      out[i] = (std::isinf(denom) && !std::isinf(rho[i])) ? 0.0 : kInf;
    } else {
      out[i] = rho[i] * static_cast<double>(nbrs.size()) / denom;
    }
  });
  return out;
}

double density_exp_sum(const PointSet& points, PointId i, const NeighborList& neighbors) {
  require_neighbors(neighbors);
  double total = 0.0;
  for (const Neighbor& nb : neighbors) total += squared_distance(points, i, nb.id);
  return std::exp(-total / static_cast<double>(neighbors.size()));
}

double density_sum_exp(const PointSet& points, PointId i, const NeighborList& neighbors) {
  require_neighbors(neighbors);
  double total = 0.0;
  for (const Neighbor& nb : neighbors) total += std::exp(-squared_distance(points, i, nb.id));
  return total / static_cast<double>(neighbors.size());
}

double density_sum(const NeighborList& neighbors) {
  require_neighbors(neighbors);
  double total = 0.0;
  for (const Neighbor& nb : neighbors) total += nb.dist;
  return -total;
}

DensityArray compute_densities(DensityKind kind, const PointSet& points, const std::vector<NeighborList>& neighbors) {
  const std::size_t n = points.size();
  if (neighbors.size() != n) throw std::invalid_argument("compute_densities: neighbor lists do not match points");
  DensityArray rho(n);
  parallel_for(0, n, [&](std::size_t idx) {
    const auto i = static_cast<PointId>(idx);
    switch (kind) {
      case DensityKind::kth:
      case DensityKind::kth_normalized: rho[i] = density_kth(neighbors[i]); break;
      case DensityKind::exp_sum: rho[i] = density_exp_sum(points, i, neighbors[i]); break;
      case DensityKind::sum_exp: rho[i] = density_sum_exp(points, i, neighbors[i]); break;
      case DensityKind::sum: rho[i] = density_sum(neighbors[i]); break;
    }
  });
  if (kind == DensityKind::kth_normalized) return density_kth_normalized(rho, neighbors);
  return rho;
}

}  // namespace pecann

#include "pecann/dependent.hpp"

#include <algorithm>
#include <stdexcept>

#include "pecann/parallel.hpp"

namespace pecann {

namespace {

void assign(DependentInfo& slot, const std::optional<Neighbor>& found) {
  if (found) {
    slot.lambda = found->id;
    slot.delta = found->dist;
  }
}

std::optional<Neighbor> exhaustive_dependent(const PointSet& points, PointId i, const DensityArray& rho) {
  std::optional<Neighbor> best;
  const auto row = points[i];
  for (PointId j = 0; j < points.size(); ++j) {
    if (!denser(rho, j, i)) continue;
    const Neighbor cand{j, l2(row, points[j])};
    if (!best || closer(cand, *best)) best = cand;
  }
  return best;
}

}  // namespace

std::optional<Neighbor> dp_brute_force(PointId i, std::span<const Neighbor> candidates, const DensityArray& rho) {
  std::optional<Neighbor> best;
  for (const Neighbor& cand : candidates) {
    if (!denser(rho, cand.id, i)) continue;
    if (!best || closer(cand, *best)) best = cand;
  }
  return best;
}

std::vector<DependentInfo> compute_dependent_points(const KnnIndex& index, const DensityArray& rho,
                                                    const std::vector<NeighborList>& neighbors,
                                                    const DoublingParams& params, DependentStats* stats) {
  const PointSet& points = index.points();
  const std::size_t n = points.size();
  if (rho.size() != n || neighbors.size() != n) {
    throw std::invalid_argument("compute_dependent_points: densities/neighbors do not match the point set");
  }
  std::size_t k = 0;
  for (const auto& nbrs : neighbors) k = std::max(k, nbrs.size());
  if (params.initial_k <= k) throw std::invalid_argument("compute_dependent_points: L_d must exceed k");

  std::vector<DependentInfo> dep(n);
  PointId top = 0;
  for (PointId i = 1; i < n; ++i) {
    if (denser(rho, i, top)) top = i;
  }

  parallel_for(0, n, [&](std::size_t i) {
    if (i != top) assign(dep[i], dp_brute_force(static_cast<PointId>(i), neighbors[i], rho));
  });
  auto unresolved = [&](std::size_t i) { return i != top && !dep[i].lambda; };
  std::vector<std::size_t> unfinished = parallel_filter(0, n, unresolved);

  DependentStats local;
  local.after_knn = unfinished.size();

  std::size_t k_dep = params.initial_k;
  while (unfinished.size() > params.threshold) {
    const std::size_t query_k = std::min(k_dep, n - 1);
    parallel_for(0, unfinished.size(), [&](std::size_t t) {
      const auto i = static_cast<PointId>(unfinished[t]);
      const NeighborList cands = index.find_knn(i, query_k);
      assign(dep[i], dp_brute_force(i, cands, rho));
    });
    ++local.doubling_rounds;
    unfinished = parallel_filter_items(unfinished, unresolved);
    if (query_k == n - 1) break;  // nothing larger to ask for
    k_dep *= 2;
  }

  local.exhaustive = unfinished.size();
  parallel_for(0, unfinished.size(), [&](std::size_t t) {
    const auto i = static_cast<PointId>(unfinished[t]);
    assign(dep[i], exhaustive_dependent(points, i, rho));
  });

  if (stats) *stats = local;
  return dep;
}

}  // namespace pecann

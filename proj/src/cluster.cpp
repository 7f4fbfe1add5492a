#include "pecann/cluster.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "pecann/parallel.hpp"
#include "pecann/union_find.hpp"

namespace pecann {

namespace {

std::vector<PointId> to_ids(const std::vector<std::size_t>& idx) {
  return {idx.begin(), idx.end()};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<PointId> find_noise(const DensityArray& rho, const NoisePolicy& policy) {
  return to_ids(parallel_filter(0, rho.size(), [&](std::size_t i) { return rho[i] < policy.rho_min; }));
}

std::vector<PointId> find_centers_threshold(const std::vector<DependentInfo>& dep,
                                            const std::vector<PointId>& candidates, double delta_min) {
  return parallel_filter_items(candidates, [&](PointId i) { return dep[i].delta >= delta_min; });
}

std::vector<PointId> find_centers_product(const DensityArray& rho, const std::vector<DependentInfo>& dep,
                                          const std::vector<PointId>& candidates, std::size_t n_c) {
  if (n_c >= candidates.size()) {
    if (n_c > candidates.size()) {
      std::cerr << "warning: asked for " << n_c << " centers but only " << candidates.size()
                << " non-noise points exist; using all of them\n";
    }
    return candidates;
  }
  struct Key {
    bool infinite;
    double product;
    double delta;
    PointId id;
  };
  std::vector<Key> keys(candidates.size());
  parallel_for(0, candidates.size(), [&](std::size_t t) {
    const PointId i = candidates[t];
    const double delta = dep[i].delta;
    double product = delta * rho[i];
    if (std::isnan(product)) product = 0.0;  // inf density at zero distance
    keys[t] = {std::isinf(delta), product, delta, i};
  });
  auto better = [](const Key& a, const Key& b) {
    if (a.infinite != b.infinite) return a.infinite;
    if (a.product != b.product) return a.product > b.product;
    if (a.delta != b.delta) return a.delta > b.delta;
    return a.id < b.id;
  };
  std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n_c), keys.end(), better);
  std::vector<PointId> out;
  out.reserve(n_c);
  for (std::size_t t = 0; t < n_c; ++t) out.push_back(keys[t].id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PointId> find_centers_local(const DensityArray& rho, const std::vector<NeighborList>& neighbors,
                                        const std::vector<PointId>& candidates) {
  return parallel_filter_items(candidates, [&](PointId i) {
    return std::all_of(neighbors[i].begin(), neighbors[i].end(),
                       [&](const Neighbor& nb) { return denser(rho, i, nb.id); });
  });
}

Clustering assign_clusters(const std::vector<DependentInfo>& dep, const std::vector<PointId>& centers,
                           const std::vector<PointId>& noise) {
  const std::size_t n = dep.size();
  enum Role : char { member = 0, center = 1, noisy = 2 };
  std::vector<char> role(n, member);
  for (PointId c : centers) {
    if (c >= n) throw std::invalid_argument("assign_clusters: center id out of range");
    role[c] = center;
  }
  for (PointId z : noise) {
    if (z >= n) throw std::invalid_argument("assign_clusters: noise id out of range");
    if (role[z] == center) throw std::invalid_argument("assign_clusters: point is both center and noise");
    role[z] = noisy;
  }

  ConcurrentUnionFind uf(n);
  parallel_for(0, n, [&](std::size_t i) {
    if (role[i] != member) return;
    if (!dep[i].lambda) {
      throw std::logic_error("assign_clusters: point " + std::to_string(i) + " has no dependent point");
    }
    uf.unite(static_cast<PointId>(i), *dep[i].lambda);
  });

  constexpr PointId kUnset = std::numeric_limits<PointId>::max();
  std::vector<PointId> root_label(n, kUnset);
  auto claim = [&](PointId owner) {
    PointId& slot = root_label[uf.find(owner)];
    if (slot != kUnset) throw std::logic_error("assign_clusters: two centers share a component");
    slot = owner;
  };
  for (PointId c : centers) claim(c);
  for (PointId z : noise) claim(z);

  Clustering out;
  out.labels.resize(n);
  parallel_for(0, n, [&](std::size_t i) {
    const PointId label = root_label[uf.find(static_cast<PointId>(i))];
    if (label == kUnset) throw std::logic_error("assign_clusters: component without a center");
    out.labels[i] = label;
  });
  out.centers = centers;
  out.noise = noise;
  std::sort(out.centers.begin(), out.centers.end());
  std::sort(out.noise.begin(), out.noise.end());
  return out;
}

Clustering reapply_policies(const DpcState& state, const CenterPolicy& center, const NoisePolicy& noise_policy) {
  const std::size_t n = state.size();
  if (state.dependents.size() != n || state.neighbors.size() != n) {
    throw std::invalid_argument("reapply_policies: inconsistent state");
  }
  const auto noise = find_noise(state.rho, noise_policy);
  std::vector<char> is_noise(n, 0);
  for (PointId z : noise) is_noise[z] = 1;
  const auto candidates = to_ids(parallel_filter(0, n, [&](std::size_t i) { return !is_noise[i]; }));

  std::vector<PointId> centers = std::visit(
      [&](const auto& policy) -> std::vector<PointId> {
        using P = std::decay_t<decltype(policy)>;
        if constexpr (std::is_same_v<P, ThresholdCenter>) {
          return find_centers_threshold(state.dependents, candidates, policy.delta_min);
        } else if constexpr (std::is_same_v<P, ProductCenter>) {
          return find_centers_product(state.rho, state.dependents, candidates, policy.n_c);
        } else {
          return find_centers_local(state.rho, state.neighbors, candidates);
        }
      },
      center);

  // the top-ranked point has nowhere to link
  for (PointId i : candidates) {
    if (!state.dependents[i].lambda && !std::binary_search(centers.begin(), centers.end(), i)) {
      centers.insert(std::lower_bound(centers.begin(), centers.end(), i), i);
    }
  }
  return assign_clusters(state.dependents, centers, noise);
}

std::unique_ptr<KnnIndex> build_index(const PointSet& points, const IndexConfig& config) {
  if (config.kind == IndexKind::bruteforce) return std::make_unique<BruteForceIndex>(points);
  return std::make_unique<VamanaIndex>(build_vamana(points, config.vamana), config.query_beam);
}

PipelineResult run_pipeline(const PointSet& points, const PipelineConfig& config) {
  if (config.k == 0) throw std::invalid_argument("run_pipeline: k must be positive");
  if (config.doubling.initial_k <= config.k) throw std::invalid_argument("run_pipeline: L_d must exceed k");
  if (config.index.kind == IndexKind::vamana && config.index.query_beam < config.k) {
    throw std::invalid_argument("run_pipeline: beam width L must be >= k");
  }

  PipelineResult result;
  auto start = std::chrono::steady_clock::now();
  const auto index = build_index(points, config.index);
  result.timings.index = seconds_since(start);

  start = std::chrono::steady_clock::now();
  result.state.neighbors = knn_all(*index, config.k);
  result.timings.knn = seconds_since(start);

  start = std::chrono::steady_clock::now();
  result.state.rho = compute_densities(config.density, points, result.state.neighbors);
  result.timings.density = seconds_since(start);

  start = std::chrono::steady_clock::now();
  result.state.dependents = compute_dependent_points(*index, result.state.rho, result.state.neighbors,
                                                     config.doubling, &result.dependent_stats);
  result.timings.dependent = seconds_since(start);

  start = std::chrono::steady_clock::now();
  result.clustering = reapply_policies(result.state, config.center, config.noise);
  result.timings.cluster = seconds_since(start);
  return result;
}

std::string describe(const CenterPolicy& policy) {
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ThresholdCenter>) {
          return "threshold(delta_min=" + std::to_string(p.delta_min) + ")";
        } else if constexpr (std::is_same_v<P, ProductCenter>) {
          return "product(n_c=" + std::to_string(p.n_c) + ")";
        } else {
          return "local";
        }
      },
      policy);
}

}  // namespace pecann

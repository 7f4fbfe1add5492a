#pragma once

// One randomized instance of "brute-force pipeline == O(n^2) oracle", shared
// by the unit test and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "pecann/cluster.hpp"

namespace equivalence {

struct Instance {
  pecann::PointSet points;
  pecann::PipelineConfig config;
  oracle::Params params;
  std::string description;
};

inline Instance make_instance(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const std::size_t dims[] = {2, 8, 32};
  const std::size_t d = dims[gen() % 3];
  const std::size_t n = 2 + gen() % 299;
  const bool grid = gen() % 3 == 0;
  pecann::PointSet points =
      grid ? fixtures::grid_points(n, d, gen(), d == 2 ? 6 : 3) : fixtures::blobs(n, d, 1 + gen() % 5, gen(), 0.08);

  oracle::Params prm;
  prm.k = 1 + gen() % std::min<std::size_t>(10, n - 1);
  const int density = static_cast<int>(gen() % 5);
  prm.density = static_cast<oracle::Density>(density);
  const int center = static_cast<int>(gen() % 3);
  prm.center = static_cast<oracle::Center>(center);
  prm.n_c = 1 + gen() % 8;

  pecann::PipelineConfig cfg;
  cfg.index.kind = pecann::IndexKind::bruteforce;
  cfg.k = prm.k;
  const pecann::DensityKind kinds[] = {pecann::DensityKind::kth, pecann::DensityKind::kth_normalized,
                                       pecann::DensityKind::exp_sum, pecann::DensityKind::sum_exp,
                                       pecann::DensityKind::sum};
  cfg.density = kinds[density];
  cfg.doubling.initial_k = prm.k + 1 + gen() % 8;
  cfg.doubling.threshold = gen() % 2 == 0 ? 0 : 300;

  // thresholds sit halfway between distinct values the oracle produced, so
  // last-bit rounding differences cannot move a point across them
  const oracle::Result pre = oracle::run(points, prm);
  std::vector<double> rho = pre.rho, delta;
  for (const auto& x : pre.dep) delta.push_back(x.delta);
  auto cut_points = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::vector<double> cuts;
    for (std::size_t t = 0; t + 1 < v.size(); ++t) {
      if (std::isfinite(v[t + 1])) cuts.push_back(0.5 * (v[t] + v[t + 1]));
    }
    return cuts;
  };
  const auto rho_cuts = cut_points(rho);
  const auto delta_cuts = cut_points(delta);
  prm.rho_min = gen() % 3 == 0 || rho_cuts.empty() ? -std::numeric_limits<double>::infinity()
                                                   : rho_cuts[gen() % rho_cuts.size()];
  prm.delta_min = delta_cuts.empty()
                      ? 0.0
                      : delta_cuts[delta_cuts.size() - 1 - gen() % std::min<std::size_t>(delta_cuts.size(), 10)];

  cfg.noise.rho_min = prm.rho_min;
  switch (prm.center) {
    case oracle::Center::threshold: cfg.center = pecann::ThresholdCenter{prm.delta_min}; break;
    case oracle::Center::product: cfg.center = pecann::ProductCenter{prm.n_c}; break;
    case oracle::Center::local: cfg.center = pecann::LocalCenter{}; break;
  }

  std::ostringstream os;
  os << "seed=" << seed << " n=" << n << " d=" << d << (grid ? " grid" : " blobs") << " k=" << prm.k
     << " density=" << density << " center=" << pecann::describe(cfg.center) << " rho_min=" << prm.rho_min;
  return {std::move(points), cfg, prm, os.str()};
}

// Empty string when the pipeline agrees with the oracle, otherwise a
// description of the first difference.
inline std::string check(std::uint64_t seed) {
  const Instance inst = make_instance(seed);
  const auto got = pecann::run_pipeline(inst.points, inst.config);
  const oracle::Result want = oracle::run(inst.points, inst.params);
  const auto& s = got.state;
  const std::size_t n = inst.points.size();
  auto fail = [&](const std::string& what, std::size_t i) {
    return inst.description + ": " + what + " differs at point " + std::to_string(i);
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (s.neighbors[i].size() != want.knn[i].size()) return fail("neighbor count", i);
    for (std::size_t t = 0; t < want.knn[i].size(); ++t) {
      if (s.neighbors[i][t].id != want.knn[i][t].id) return fail("neighbor", i);
    }
    const double r = s.rho[i], w = want.rho[i];
    if (!(r == w || std::abs(r - w) <= 1e-9 * std::max(1.0, std::abs(w)))) return fail("density", i);
    const auto& dep = s.dependents[i];
    if (dep.lambda.has_value() != (want.dep[i].lambda >= 0)) return fail("dependent presence", i);
    if (dep.lambda && *dep.lambda != static_cast<pecann::PointId>(want.dep[i].lambda)) return fail("dependent", i);
    if (got.clustering.labels[i] != want.labels[i]) return fail("label", i);
  }
  if (got.clustering.centers != want.centers) return inst.description + ": centers differ";
  if (got.clustering.noise != want.noise) return inst.description + ": noise differs";
  return {};
}

}  // namespace equivalence

#include <algorithm>
#include <atomic>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "pecann/dependent.hpp"
#include "pecann/parallel.hpp"
#include "pecann/vamana.hpp"

using namespace pecann;
using namespace fixtures;

namespace {

// Never returns a point denser than the query, so doubling cannot succeed.
class BlindIndex final : public KnnIndex {
 public:
  BlindIndex(const PointSet& p, const DensityArray& rho) : p_(&p), rho_(&rho) {}
  const PointSet& points() const noexcept override { return *p_; }
  bool exact() const noexcept override { return false; }
  NeighborList find_knn(PointId q, std::size_t k) const override {
    std::vector<PointId> order;
    for (PointId j = 0; j < p_->size(); ++j) {
      if (j != q) order.push_back(j);
    }
    std::erase_if(order, [&](PointId j) { return denser(*rho_, j, q); });
    order.resize(std::min(k, order.size()));
    NeighborList out;
    for (PointId j : order) out.push_back({j, distance(*p_, q, j)});
    ++calls;
    return out;
  }
  mutable std::atomic<std::size_t> calls{0};

 private:
  const PointSet* p_;
  const DensityArray* rho_;
};

void check_against_oracle(const PointSet& p, const DensityArray& rho, const std::vector<DependentInfo>& dep) {
  const auto want = oracle::dependents(p, rho);
  for (PointId i = 0; i < p.size(); ++i) {
    if (want[i].lambda < 0) {
      REQUIRE_FALSE(dep[i].lambda.has_value());
      REQUIRE(std::isinf(dep[i].delta));
    } else {
      REQUIRE(dep[i].lambda.has_value());
      REQUIRE(*dep[i].lambda == static_cast<PointId>(want[i].lambda));
      REQUIRE(dep[i].delta == doctest::Approx(want[i].delta).epsilon(1e-12));
    }
  }
}

}  // namespace

TEST_CASE("dp_brute_force on the running example") {
  const PointSet p = fig1();
  const BruteForceIndex index(p);
  const auto nn = knn_all(index, 1);
  const auto rho = compute_densities(DensityKind::kth, p, nn);

  const auto two = index.find_knn(d, 2);
  CHECK_FALSE(dp_brute_force(d, two, rho).has_value());

  const auto four = index.find_knn(d, 4);
  const auto found = dp_brute_force(d, four, rho);
  REQUIRE(found.has_value());
  CHECK(found->id == c);
  CHECK(found->dist == 3.0);

  CHECK_FALSE(dp_brute_force(b, index.find_knn(b, 5), rho).has_value());
}

TEST_CASE("dependent points of the running example via doubling") {
  const PointSet p = fig1();
  const BruteForceIndex index(p);
  const auto nn = knn_all(index, 1);
  const auto rho = compute_densities(DensityKind::kth, p, nn);
  DependentStats stats;
  const auto dep = compute_dependent_points(index, rho, nn, {2, 0}, &stats);

  CHECK_FALSE(dep[b].lambda.has_value());
  CHECK(std::isinf(dep[b].delta));
  const std::vector<std::pair<PointId, PointId>> edges{{a, c}, {c, b}, {d, c}, {e, d}, {f, d}};
  for (auto [from, to] : edges) {
    REQUIRE(dep[from].lambda.has_value());
    CHECK(*dep[from].lambda == to);
  }
  CHECK(dep[d].delta == 3.0);
  CHECK(dep[a].delta == std::sqrt(2.0));
  CHECK(stats.after_knn == 1);        // only d
  CHECK(stats.doubling_rounds == 2);  // k_dep = 2, then 4
  CHECK(stats.exhaustive == 0);
}

TEST_CASE("the same example with the default threshold uses the final scan") {
  const PointSet p = fig1();
  const BruteForceIndex index(p);
  const auto nn = knn_all(index, 1);
  const auto rho = compute_densities(DensityKind::kth, p, nn);
  DependentStats stats;
  const auto dep = compute_dependent_points(index, rho, nn, {}, &stats);
  CHECK(*dep[d].lambda == c);
  CHECK(stats.doubling_rounds == 0);
  CHECK(stats.exhaustive == 1);
}

TEST_CASE("a single point has no dependent point") {
  const PointSet p(1, 2, {3, 4});
  const BruteForceIndex index(p);
  const auto dep = compute_dependent_points(index, {1.0}, {{}}, {});
  REQUIRE(dep.size() == 1);
  CHECK_FALSE(dep[0].lambda.has_value());
  CHECK(std::isinf(dep[0].delta));
}

TEST_CASE("argument checks") {
  const PointSet p = fig1();
  const BruteForceIndex index(p);
  const auto nn = knn_all(index, 2);
  const auto rho = compute_densities(DensityKind::kth, p, nn);
  CHECK_THROWS_AS(compute_dependent_points(index, rho, nn, {2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(compute_dependent_points(index, DensityArray(5, 1.0), nn, {4, 0}), std::invalid_argument);
}

TEST_CASE("exact index reproduces the exhaustive definition") {
  std::uint64_t seed = 0;
  for (auto threshold : {std::size_t{0}, std::size_t{5}, std::size_t{300}}) {
    for (bool grid : {false, true}) {
      const PointSet p = grid ? grid_points(300, 16, ++seed, 2) : random_points(300, 16, ++seed);
      const BruteForceIndex index(p);
      for (std::size_t k : {1, 6}) {
        const auto nn = knn_all(index, k);
        const auto rho = compute_densities(DensityKind::kth, p, nn);
        check_against_oracle(p, rho, compute_dependent_points(index, rho, nn, {k + 1, threshold}));
      }
    }
  }
}

TEST_CASE("doubling stops at n-1 and still resolves every point") {
  const PointSet p = random_points(64, 3, 5);
  const auto nn = knn_all(BruteForceIndex(p), 2);
  const auto rho = compute_densities(DensityKind::kth, p, nn);

  // an exact index finds every dependent by doubling alone
  DependentStats stats;
  check_against_oracle(p, rho, compute_dependent_points(BruteForceIndex(p), rho, nn, {3, 0}, &stats));
  CHECK(stats.after_knn > 0);
  CHECK(stats.doubling_rounds >= 1);
  CHECK(stats.exhaustive == 0);

  // denser points never appear: the cap hands everything to the final scan
  const BlindIndex blind(p, rho);
  check_against_oracle(p, rho, compute_dependent_points(blind, rho, nn, {3, 0}, &stats));
  CHECK(stats.exhaustive == stats.after_knn);
  CHECK(stats.doubling_rounds == 6);  // k_dep 3, 6, 12, 24, 48, then capped at 63
}

TEST_CASE("approximate index: sound dependents forming a forest") {
  const PointSet p = blobs(3000, 16, 6, 4, 0.1);
  VamanaParams prm;
  prm.degree_bound = 16;
  prm.build_beam = 24;
  const VamanaIndex index(build_vamana(p, prm), 16);
  const auto nn = knn_all(index, 8);
  const auto rho = compute_densities(DensityKind::kth, p, nn);
  const auto dep = compute_dependent_points(index, rho, nn, {16, 50});
  const auto exact = oracle::dependents(p, rho);

  std::size_t roots = 0;
  for (PointId i = 0; i < p.size(); ++i) {
    if (!dep[i].lambda) {
      ++roots;
      continue;
    }
    const PointId j = *dep[i].lambda;
    CHECK(denser(rho, j, i));  // strictly up the rank order, so no cycles
    CHECK(dep[i].delta == doctest::Approx(distance(p, i, j)));
    CHECK(dep[i].delta >= exact[i].delta - 1e-12);
  }
  CHECK(roots == 1);
}

TEST_CASE("dependent points do not depend on the worker count") {
  const PointSet p = grid_points(400, 3, 9, 5);
  const BruteForceIndex index(p);
  const auto nn = knn_all(index, 4);
  const auto rho = compute_densities(DensityKind::kth, p, nn);
  std::vector<DependentInfo> ref;
  {
    ScopedWorkers scope(1);
    ref = compute_dependent_points(index, rho, nn, {8, 10});
  }
  for (std::size_t w : {3, 8}) {
    ScopedWorkers scope(w);
    CHECK(compute_dependent_points(index, rho, nn, {8, 10}) == ref);
  }
}

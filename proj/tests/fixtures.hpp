#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pecann/core.hpp"
#include "pecann/vamana.hpp"

namespace fixtures {

using pecann::PointId;
using pecann::PointSet;

// The six-point running example: a(5,1) b(4,3) c(4,2) d(1,2) e(1,0) f(0,3).
enum : PointId { a = 0, b = 1, c = 2, d = 3, e = 4, f = 5 };

inline PointSet fig1() {
  return PointSet(6, 2, {5, 1, 4, 3, 4, 2, 1, 2, 1, 0, 0, 3});
}

// Undirected toy graph: f-d, d-e, f-c, c-b, a-b.
inline pecann::GraphIndex fig1_graph(const PointSet& points, std::vector<PointId> starts) {
  pecann::GraphIndex g(points, 4, std::move(starts));
  g.set_out_neighbors(a, std::vector<PointId>{b});
  g.set_out_neighbors(b, std::vector<PointId>{c, a});
  g.set_out_neighbors(c, std::vector<PointId>{f, b});
  g.set_out_neighbors(d, std::vector<PointId>{f, e});
  g.set_out_neighbors(e, std::vector<PointId>{d});
  g.set_out_neighbors(f, std::vector<PointId>{d, c});
  return g;
}

// Uniform coordinates in [0,1); independent of the library's own generator.
inline PointSet random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> data(n * d);
  for (float& x : data) x = u(gen);
  return PointSet(n, d, std::move(data));
}

// Small integer coordinates, so many distances tie exactly.
inline PointSet grid_points(std::size_t n, std::size_t d, std::uint64_t seed, int side = 4) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> u(0, side - 1);
  std::vector<float> data(n * d);
  for (float& x : data) x = static_cast<float>(u(gen));
  return PointSet(n, d, std::move(data));
}

// A few Gaussian blobs, well separated.
inline PointSet blobs(std::size_t n, std::size_t d, std::size_t c, std::uint64_t seed, double sd = 0.05) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, sd);
  std::vector<double> centers(c * d);
  for (double& x : centers) x = u(gen);
  std::vector<float> data(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) data[i * d + j] = static_cast<float>(centers[(i % c) * d + j] + z(gen));
  }
  return PointSet(n, d, std::move(data));
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("pecann_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures

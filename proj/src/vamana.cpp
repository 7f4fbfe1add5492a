#include "pecann/vamana.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "binary_io.hpp"
#include "pecann/parallel.hpp"
#include "pecann/random.hpp"

namespace pecann {

namespace {

// Per-thread "already seen" marks with O(1) reset between searches.
class SeenMarks {
 public:
  void reset(std::size_t n) {
    if (stamp_.size() < n) {
      stamp_.assign(n, 0);
      epoch_ = 0;
    }
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
  }
  bool insert(PointId v) {
    if (stamp_[v] == epoch_) return false;
    stamp_[v] = epoch_;
    return true;
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

SeenMarks& thread_seen() {
  thread_local SeenMarks marks;
  return marks;
}

struct BeamEntry {
  Neighbor nb;
  bool visited;
};

bool entry_closer(const BeamEntry& a, const BeamEntry& b) { return closer(a.nb, b.nb); }

}  // namespace

GraphIndex::GraphIndex(const PointSet& points, std::uint32_t degree_bound, std::vector<PointId> start_points,
                       double alpha)
    : points_(&points),
      degree_bound_(degree_bound),
      alpha_(alpha),
      start_points_(std::move(start_points)),
      edges_(points.size() * degree_bound, 0),
      degree_(points.size(), 0) {
  if (degree_bound_ == 0) throw std::invalid_argument("GraphIndex: degree bound must be positive");
  if (start_points_.empty()) throw std::invalid_argument("GraphIndex: need at least one start point");
  for (PointId s : start_points_) {
    if (s >= points.size()) throw std::invalid_argument("GraphIndex: start point " + std::to_string(s) + " out of range");
  }
}

void GraphIndex::set_out_neighbors(PointId v, std::span<const PointId> ids) {
  if (v >= size()) throw std::invalid_argument("GraphIndex: vertex out of range");
  if (ids.size() > degree_bound_) {
    throw std::invalid_argument("GraphIndex: out-list of " + std::to_string(ids.size()) + " exceeds R=" +
                                std::to_string(degree_bound_));
  }
  PointId* slot = edges_.data() + static_cast<std::size_t>(v) * degree_bound_;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    if (ids[a] == v) throw std::invalid_argument("GraphIndex: self-loop on " + std::to_string(v));
    if (ids[a] >= size()) throw std::invalid_argument("GraphIndex: neighbor out of range");
    for (std::size_t b = 0; b < a; ++b) {
      if (ids[b] == ids[a]) throw std::invalid_argument("GraphIndex: duplicate out-neighbor");
    }
    slot[a] = ids[a];
  }
  degree_[v] = static_cast<std::uint32_t>(ids.size());
}

BeamSearchResult beam_search(const GraphIndex& graph, std::span<const float> query,
                             std::span<const PointId> starts, std::size_t beam_width, std::size_t k) {
  if (k == 0) throw std::invalid_argument("beam_search: k must be positive");
  if (beam_width < k) throw std::invalid_argument("beam_search: beam width must be >= k");
  if (starts.empty()) throw std::invalid_argument("beam_search: no start points");

  const PointSet& points = graph.points();
  SeenMarks& seen = thread_seen();
  seen.reset(points.size());

  // A point dropped from a full beam can never re-enter it (the beam's worst
  // distance only shrinks), so skipping already-seen ids matches set union.
  std::vector<BeamEntry> beam;
  beam.reserve(std::max(beam_width, starts.size()) + graph.degree_bound());
  for (PointId s : starts) {
    if (seen.insert(s)) beam.push_back({{s, l2(query, points[s])}, false});
  }
  std::sort(beam.begin(), beam.end(), entry_closer);

  BeamSearchResult result;
  std::vector<BeamEntry> fresh;
  std::size_t first_unvisited = 0;
  while (true) {
    while (first_unvisited < beam.size() && beam[first_unvisited].visited) ++first_unvisited;
    if (first_unvisited == beam.size()) break;

    BeamEntry& current = beam[first_unvisited];
    current.visited = true;
    result.visited.push_back(current.nb);

    fresh.clear();
    for (PointId u : graph.out_neighbors(current.nb.id)) {
      if (seen.insert(u)) fresh.push_back({{u, l2(query, points[u])}, false});
    }
    if (!fresh.empty()) {
      std::sort(fresh.begin(), fresh.end(), entry_closer);
      const auto mid = static_cast<std::ptrdiff_t>(beam.size());
      // the closest new entry may land before the scan position
      const auto landing = static_cast<std::size_t>(
          std::lower_bound(beam.begin(), beam.end(), fresh.front(), entry_closer) - beam.begin());
      beam.insert(beam.end(), fresh.begin(), fresh.end());
      std::inplace_merge(beam.begin(), beam.begin() + mid, beam.end(), entry_closer);
      first_unvisited = std::min(first_unvisited, landing);
    }
    if (beam.size() > beam_width) beam.resize(beam_width);
  }

  // Every beam entry is visited now, so beam is a subset of visited.
  result.nearest = result.visited;
  const std::size_t keep = std::min(k, result.nearest.size());
  std::partial_sort(result.nearest.begin(), result.nearest.begin() + static_cast<std::ptrdiff_t>(keep),
                    result.nearest.end(), closer);
  result.nearest.resize(keep);
  return result;
}

BeamSearchResult beam_search(const GraphIndex& graph, PointId query, std::span<const PointId> starts,
                             std::size_t beam_width, std::size_t k) {
  return beam_search(graph, graph.points().at(query), starts, beam_width, k);
}

std::vector<PointId> robust_prune(const PointSet& points, PointId p, std::span<const Neighbor> candidates,
                                  std::span<const PointId> current, double alpha, std::uint32_t degree_bound) {
  if (alpha < 1.0) throw std::invalid_argument("robust_prune: alpha must be >= 1");
  if (degree_bound == 0) throw std::invalid_argument("robust_prune: degree bound must be positive");

  NeighborList pool;
  pool.reserve(candidates.size() + current.size());
  for (const Neighbor& c : candidates) {
    if (c.id != p) pool.push_back(c);
  }
  const auto pp = points[p];
  for (PointId v : current) {
    if (v != p) pool.push_back({v, l2(pp, points[v])});
  }
  std::sort(pool.begin(), pool.end(), closer);
  // drop repeated ids, keeping the nearest copy
  SeenMarks& seen = thread_seen();
  seen.reset(points.size());
  std::erase_if(pool, [&](const Neighbor& nb) { return !seen.insert(nb.id); });

  std::vector<PointId> selected;
  std::vector<char> removed(pool.size(), 0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (removed[i]) continue;
    selected.push_back(pool[i].id);
    if (selected.size() == degree_bound) break;
    const auto star = points[pool[i].id];
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      if (!removed[j] && alpha * l2(star, points[pool[j].id]) <= pool[j].dist) removed[j] = 1;
    }
  }
  return selected;
}

std::vector<PointId> robust_prune(const GraphIndex& graph, PointId p, std::span<const Neighbor> candidates,
                                  double alpha, std::uint32_t degree_bound) {
  return robust_prune(graph.points(), p, candidates, graph.out_neighbors(p), alpha, degree_bound);
}

PointId medoid(const PointSet& points) {
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  std::vector<double> mean(d, 0.0);
  for (PointId i = 0; i < n; ++i) {
    const auto row = points[i];
    for (std::size_t c = 0; c < d; ++c) mean[c] += row[c];
  }
  for (double& m : mean) m /= static_cast<double>(n);

  std::vector<double> dist(n);
  parallel_for(0, n, [&](std::size_t i) {
    const auto row = points[static_cast<PointId>(i)];
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = row[c] - mean[c];
      s += diff * diff;
    }
    dist[i] = s;
  });
  return static_cast<PointId>(std::min_element(dist.begin(), dist.end()) - dist.begin());
}

GraphIndex build_vamana(const PointSet& points, const VamanaParams& params) {
  const std::size_t n = points.size();
  if (params.degree_bound < 2) throw std::invalid_argument("build_vamana: R must be >= 2");
  if (params.build_beam == 0) throw std::invalid_argument("build_vamana: build beam must be positive");
  if (!(params.alpha >= 1.0)) throw std::invalid_argument("build_vamana: alpha must be >= 1");
  if (params.num_starts > n) throw std::invalid_argument("build_vamana: more start points than points");

  Rng rng(params.seed);
  const auto order = rng.permutation<PointId>(n);

  std::vector<PointId> starts;
  if (params.medoid_start) {
    starts.push_back(medoid(points));
  } else {
    const std::size_t count = params.num_starts != 0
                                  ? params.num_starts
                                  : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    starts.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(count, n)));
    std::sort(starts.begin(), starts.end());
  }

  GraphIndex graph(points, params.degree_bound, starts, params.alpha);
  const std::size_t max_batch =
      std::max<std::size_t>(1, static_cast<std::size_t>(params.max_batch_fraction * static_cast<double>(n)));

  std::size_t inserted = 0;
  std::size_t batch = 1;
  std::vector<std::vector<PointId>> new_out;
  while (inserted < n) {
    const std::size_t end = std::min(n, inserted + batch);
    const std::size_t count = end - inserted;

    // searches read the graph as of the start of the batch
    new_out.assign(count, {});
    parallel_for(0, count, [&](std::size_t t) {
      const PointId p = order[inserted + t];
      const auto found = beam_search(graph, p, starts, params.build_beam, 1);
      new_out[t] = robust_prune(points, p, found.visited, {}, params.alpha, params.degree_bound);
    });
    parallel_for(0, count, [&](std::size_t t) { graph.set_out_neighbors(order[inserted + t], new_out[t]); });

    // reverse edges grouped by target; each group owns its target's out-list
    std::vector<std::pair<PointId, PointId>> reverse;
    for (std::size_t t = 0; t < count; ++t) {
      for (PointId q : new_out[t]) reverse.emplace_back(q, order[inserted + t]);
    }
    std::sort(reverse.begin(), reverse.end());
    std::vector<std::size_t> group_start;
    for (std::size_t e = 0; e < reverse.size(); ++e) {
      if (e == 0 || reverse[e].first != reverse[e - 1].first) group_start.push_back(e);
    }
    group_start.push_back(reverse.size());

    parallel_for(0, group_start.size() - 1, [&](std::size_t g) {
      const PointId q = reverse[group_start[g]].first;
      const auto current = graph.out_neighbors(q);
      std::vector<PointId> merged(current.begin(), current.end());
      for (std::size_t e = group_start[g]; e < group_start[g + 1]; ++e) {
        const PointId src = reverse[e].second;
        if (std::find(merged.begin(), merged.end(), src) == merged.end()) merged.push_back(src);
      }
      if (merged.size() <= params.degree_bound) {
        graph.set_out_neighbors(q, merged);
        return;
      }
      NeighborList candidates;
      const auto qp = points[q];
      for (std::size_t e = group_start[g]; e < group_start[g + 1]; ++e) {
        const PointId src = reverse[e].second;
        candidates.push_back({src, l2(qp, points[src])});
      }
      const auto pruned = robust_prune(points, q, candidates, current, params.alpha, params.degree_bound);
      graph.set_out_neighbors(q, pruned);
    });

    inserted = end;
    batch = std::min(batch * 2, max_batch);
  }
  return graph;
}

NeighborList find_knn_with_fallback(const GraphIndex& graph, PointId query, std::size_t k, std::size_t beam_width) {
  if (k == 0) throw std::invalid_argument("find_knn: k must be positive");
  const PointSet& points = graph.points();
  points.at(query);
  const std::size_t want = std::min(k, points.size() - 1);
  if (want == 0) return {};

  // one extra slot since the query itself is usually found
  const std::size_t width = std::max(beam_width, want + 1);
  auto found = beam_search(graph, query, graph.start_points(), width, want + 1);
  NeighborList out;
  out.reserve(want);
  for (const Neighbor& nb : found.nearest) {
    if (nb.id != query && out.size() < want) out.push_back(nb);
  }
  if (out.size() < want) return exact_knn(points, query, want);
  return out;
}

VamanaIndex::VamanaIndex(GraphIndex graph, std::size_t query_beam) : graph_(std::move(graph)), query_beam_(query_beam) {
  if (query_beam_ == 0) throw std::invalid_argument("VamanaIndex: query beam must be positive");
}

NeighborList VamanaIndex::find_knn(PointId query, std::size_t k) const {
  return find_knn_with_fallback(graph_, query, k, query_beam_);
}

void save_graph(const GraphIndex& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write("PECG", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(graph.size()));
  detail::put_u32(out, graph.degree_bound());
  detail::put_u32(out, static_cast<std::uint32_t>(graph.start_points().size()));
  for (PointId s : graph.start_points()) detail::put_u32(out, s);
  for (PointId v = 0; v < graph.size(); ++v) {
    const auto nbrs = graph.out_neighbors(v);
    detail::put_u32(out, static_cast<std::uint32_t>(nbrs.size()));
    for (PointId u : nbrs) detail::put_u32(out, u);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

GraphIndex load_graph(const PointSet& points, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  detail::ByteReader reader(in, path.string());
  reader.expect_magic("PECG");
  const std::uint32_t n = reader.u32();
  if (n != points.size()) {
    reader.fail("graph has " + std::to_string(n) + " vertices, point set has " + std::to_string(points.size()), 4);
  }
  const std::uint32_t degree_bound = reader.u32();
  const std::uint32_t num_starts = reader.u32();
  if (degree_bound == 0 || num_starts == 0 || num_starts > n) reader.fail("invalid header", 8);
  std::vector<PointId> starts(num_starts);
  for (auto& s : starts) {
    s = reader.u32();
    if (s >= n) reader.fail("start id out of range", reader.offset() - 4);
  }
  GraphIndex graph(points, degree_bound, std::move(starts));
  std::vector<PointId> nbrs;
  for (PointId v = 0; v < n; ++v) {
    const std::uint64_t at = reader.offset();
    const std::uint32_t degree = reader.u32();
    if (degree > degree_bound) reader.fail("degree exceeds bound", at);
    nbrs.resize(degree);
    for (auto& u : nbrs) u = reader.u32();
    try {
      graph.set_out_neighbors(v, nbrs);
    } catch (const std::invalid_argument& e) {
      reader.fail(e.what(), at);
    }
  }
  return graph;
}

}  // namespace pecann

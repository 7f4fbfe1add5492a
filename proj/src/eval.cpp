#include "pecann/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace pecann {

namespace {

using u128 = unsigned __int128;

u128 pairs(std::uint64_t x) { return static_cast<u128>(x) * (x == 0 ? 0 : x - 1) / 2; }

struct PairHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& p) const noexcept {
    const auto h1 = std::hash<std::int64_t>{}(p.first);
    const auto h2 = std::hash<std::int64_t>{}(p.second);
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
  }
};

void check_lengths(const LabelVector& a, const LabelVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("label vectors differ in length (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

// sum over counts of c * log(c / total), i.e. -total * entropy
double neg_entropy_sum(const std::map<std::int64_t, std::uint64_t>& counts, double total) {
  double s = 0.0;
  for (const auto& [label, c] : counts) {
    const double x = static_cast<double>(c);
    s += x * std::log(x / total);
  }
  return s;
}

}  // namespace

ContingencyTable contingency(const LabelVector& a, const LabelVector& b) {
  check_lengths(a, b);
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::uint64_t, PairHash> counts;
  for (std::size_t i = 0; i < a.size(); ++i) ++counts[{a[i], b[i]}];

  ContingencyTable t;
  for (const auto& [key, c] : counts) {
    t.cells.emplace(key, c);
    t.row_sums[key.first] += c;
    t.col_sums[key.second] += c;
  }
  t.total = a.size();
  return t;
}

double ari(const LabelVector& a, const LabelVector& b) {
  check_lengths(a, b);
  if (a.size() < 2) throw std::invalid_argument("ari: need at least two points");
  const ContingencyTable t = contingency(a, b);

  u128 index = 0;
  for (const auto& [key, c] : t.cells) index += pairs(c);
  u128 rows = 0;
  for (const auto& [label, c] : t.row_sums) rows += pairs(c);
  u128 cols = 0;
  for (const auto& [label, c] : t.col_sums) cols += pairs(c);
  const u128 all = pairs(t.total);

  const long double expected = static_cast<long double>(rows) * static_cast<long double>(cols) /
                               static_cast<long double>(all);
  const long double max_index = 0.5L * (static_cast<long double>(rows) + static_cast<long double>(cols));
  const long double denom = max_index - expected;
  if (denom == 0.0L) return 1.0;
  return static_cast<double>((static_cast<long double>(index) - expected) / denom);
}

HomogeneityCompleteness homogeneity_completeness(const LabelVector& pred, const LabelVector& truth) {
  check_lengths(pred, truth);
  if (pred.empty()) return {1.0, 1.0};
  const ContingencyTable t = contingency(pred, truth);  // rows: clusters, cols: classes
  const double n = static_cast<double>(t.total);

  const double h_class = -neg_entropy_sum(t.col_sums, n) / n;
  const double h_cluster = -neg_entropy_sum(t.row_sums, n) / n;

  // H(class | cluster) and H(cluster | class)
  double h_class_given_cluster = 0.0;
  double h_cluster_given_class = 0.0;
  for (const auto& [key, c] : t.cells) {
    const double x = static_cast<double>(c);
    h_class_given_cluster -= x / n * std::log(x / static_cast<double>(t.row_sums.at(key.first)));
    h_cluster_given_class -= x / n * std::log(x / static_cast<double>(t.col_sums.at(key.second)));
  }

  HomogeneityCompleteness out;
  out.homogeneity = h_class == 0.0 ? 1.0 : 1.0 - h_class_given_cluster / h_class;
  out.completeness = h_cluster == 0.0 ? 1.0 : 1.0 - h_cluster_given_class / h_cluster;
  // rounding can push a perfect score a hair past the valid range
  out.homogeneity = std::clamp(out.homogeneity, 0.0, 1.0);
  out.completeness = std::clamp(out.completeness, 0.0, 1.0);
  return out;
}

}  // namespace pecann

#pragma once

// Clustering agreement scores: Adjusted Rand Index, homogeneity and
// completeness, all computed from a contingency table.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace pecann {

using LabelVector = std::vector<std::int64_t>;

struct ContingencyTable {
  // (row label, column label) -> count; rows index the first argument.
  std::map<std::pair<std::int64_t, std::int64_t>, std::uint64_t> cells;
  std::map<std::int64_t, std::uint64_t> row_sums;
  std::map<std::int64_t, std::uint64_t> col_sums;
  std::uint64_t total = 0;
};

// Throws std::invalid_argument on length mismatch.
ContingencyTable contingency(const LabelVector& a, const LabelVector& b);

// Throws std::invalid_argument on length mismatch or fewer than 2 points.
// Returns 1.0 when the denominator vanishes (both labelings trivial and equal).
double ari(const LabelVector& a, const LabelVector& b);

struct HomogeneityCompleteness {
  double homogeneity;
  double completeness;
};

// Entropies in nats. Each score is 1 when its normalizing entropy is 0.
HomogeneityCompleteness homogeneity_completeness(const LabelVector& pred, const LabelVector& truth);

}  // namespace pecann

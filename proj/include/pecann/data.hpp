#pragma once

// File formats and the synthetic Gaussian-mixture generator.
//
//   fvecs   repeated records: i32 dimension, then that many f32 values
//   f32bin  u32 n, u32 d, then n*d f32 values
//   labels  one integer per line (UTF-8 text)
//   state   "PECS" binary dump of densities, dependent points and kNN lists
//
// All binary formats are little-endian.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>

#include "pecann/cluster.hpp"
#include "pecann/eval.hpp"

namespace pecann {

// Malformed input, with the byte offset (binary) or line number (text) where
// the problem was found.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& msg, std::uint64_t offset)
      : std::runtime_error(msg + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class VectorFormat { fvecs, f32bin };

// ".fvecs" -> fvecs; ".bin", ".f32bin", ".fbin" -> f32bin. Throws
// std::invalid_argument otherwise.
VectorFormat format_from_path(const std::filesystem::path& path);
VectorFormat parse_vector_format(const std::string& name);

PointSet read_vectors(const std::filesystem::path& path, VectorFormat format);
void write_vectors(const PointSet& points, const std::filesystem::path& path, VectorFormat format);

LabelVector read_labels(const std::filesystem::path& path);
void write_labels(const LabelVector& labels, const std::filesystem::path& path);

// Labels one per line in point order. With a sidecar, also writes
// `<path>.centers` holding a "centers ..." and a "noise ..." line of ids.
void write_clustering(const Clustering& clustering, const std::filesystem::path& path, bool sidecar = false);
LabelVector to_label_vector(const Clustering& clustering);

void write_state(const DpcState& state, const std::filesystem::path& path);
DpcState read_state(const std::filesystem::path& path);

struct GaussianSpec {
  std::size_t n = 10000;
  std::size_t d = 128;
  std::size_t c = 10;
  double variance = 0.05;  // per coordinate
  std::uint64_t seed = 42;
};

// c centers uniform in [0,1]^d; cluster j gets floor(n/c) points, plus one for
// j < n mod c, each coordinate drawn from Normal(center, variance). Points
// are stored cluster by cluster; labels are cluster indices. Bit-identical
// for a given spec on any platform with IEEE doubles and a conforming libm.
// Throws std::invalid_argument when c == 0, c > n, d == 0 or variance < 0.
std::pair<PointSet, LabelVector> generate_gaussian(const GaussianSpec& spec);

}  // namespace pecann

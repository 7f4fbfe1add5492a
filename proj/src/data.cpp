#include "pecann/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "binary_io.hpp"
#include "pecann/parallel.hpp"
#include "pecann/random.hpp"

namespace pecann {

namespace {

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

float decode_coordinate(const std::vector<unsigned char>& buf, std::size_t at, const std::string& what) {
  const float v = std::bit_cast<float>(detail::decode_u32(buf.data() + at));
  if (!std::isfinite(v)) throw FormatError(what + ": non-finite coordinate", at);
  return v;
}

PointSet parse_fvecs(const std::vector<unsigned char>& buf, const std::string& what) {
  if (buf.empty()) throw FormatError(what + ": empty file", 0);
  std::size_t at = 0;
  std::size_t d = 0;
  std::size_t n = 0;
  std::vector<float> data;
  while (at < buf.size()) {
    if (buf.size() - at < 4) throw FormatError(what + ": truncated record header", at);
    const auto dim = static_cast<std::int32_t>(detail::decode_u32(buf.data() + at));
    if (dim <= 0) throw FormatError(what + ": non-positive dimension " + std::to_string(dim), at);
    if (n == 0) {
      d = static_cast<std::size_t>(dim);
      data.reserve(buf.size() / (4 * (d + 1)) * d);
    } else if (static_cast<std::size_t>(dim) != d) {
      throw FormatError(what + ": dimension " + std::to_string(dim) + " differs from " + std::to_string(d), at);
    }
    at += 4;
    if (buf.size() - at < 4 * d) throw FormatError(what + ": truncated record", at);
    for (std::size_t c = 0; c < d; ++c, at += 4) data.push_back(decode_coordinate(buf, at, what));
    ++n;
  }
  return PointSet(n, d, std::move(data));
}

PointSet parse_f32bin(const std::vector<unsigned char>& buf, const std::string& what) {
  if (buf.empty()) throw FormatError(what + ": empty file", 0);
  if (buf.size() < 8) throw FormatError(what + ": truncated header", buf.size());
  const std::size_t n = detail::decode_u32(buf.data());
  const std::size_t d = detail::decode_u32(buf.data() + 4);
  if (n == 0) throw FormatError(what + ": zero points", 0);
  if (d == 0) throw FormatError(what + ": zero dimension", 4);
  const std::size_t need = 8 + 4 * n * d;
  if (buf.size() < need) throw FormatError(what + ": truncated data", buf.size());
  if (buf.size() > need) throw FormatError(what + ": trailing bytes", need);
  std::vector<float> data(n * d);
  for (std::size_t k = 0; k < n * d; ++k) data[k] = decode_coordinate(buf, 8 + 4 * k, what);
  return PointSet(n, d, std::move(data));
}

}  // namespace

VectorFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".fvecs") return VectorFormat::fvecs;
  if (ext == ".bin" || ext == ".f32bin" || ext == ".fbin") return VectorFormat::f32bin;
  throw std::invalid_argument("cannot infer vector format from '" + path.string() + "'; pass --format");
}

VectorFormat parse_vector_format(const std::string& name) {
  if (name == "fvecs") return VectorFormat::fvecs;
  if (name == "f32bin" || name == "bin") return VectorFormat::f32bin;
  throw std::invalid_argument("unknown vector format: " + name);
}

PointSet read_vectors(const std::filesystem::path& path, VectorFormat format) {
  const auto buf = slurp(path);
  return format == VectorFormat::fvecs ? parse_fvecs(buf, path.string()) : parse_f32bin(buf, path.string());
}

void write_vectors(const PointSet& points, const std::filesystem::path& path, VectorFormat format) {
  auto out = open_out(path, std::ios::binary);
  const auto d = static_cast<std::uint32_t>(points.dim());
  if (format == VectorFormat::f32bin) {
    detail::put_u32(out, static_cast<std::uint32_t>(points.size()));
    detail::put_u32(out, d);
  }
  for (PointId i = 0; i < points.size(); ++i) {
    if (format == VectorFormat::fvecs) detail::put_u32(out, d);
    for (float v : points[i]) detail::put_f32(out, v);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

LabelVector read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  LabelVector labels;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> blank_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) {
      blank_lines.push_back(line_no);
      continue;
    }
    if (!blank_lines.empty()) throw ParseError(path.string() + ": blank line inside label file", blank_lines.front());
    const auto last = line.find_last_not_of(" \t");
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
      throw ParseError(path.string() + ": not an integer: '" + std::string(begin, end) + "'", line_no);
    }
    labels.push_back(value);
  }
  return labels;
}

void write_labels(const LabelVector& labels, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (std::int64_t l : labels) out << l << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

LabelVector to_label_vector(const Clustering& clustering) {
  return {clustering.labels.begin(), clustering.labels.end()};
}

void write_clustering(const Clustering& clustering, const std::filesystem::path& path, bool sidecar) {
  write_labels(to_label_vector(clustering), path);
  if (!sidecar) return;
  auto out = open_out(path.string() + ".centers");
  out << "centers";
  for (PointId c : clustering.centers) out << ' ' << c;
  out << "\nnoise";
  for (PointId z : clustering.noise) out << ' ' << z;
  out << '\n';
}

// "PECS", u32 n, then per point: f64 rho, u32 has_lambda, u32 lambda,
// f64 delta, u32 neighbor count, then (u32 id, f64 dist) pairs.
void write_state(const DpcState& state, const std::filesystem::path& path) {
  auto out = open_out(path, std::ios::binary);
  out.write("PECS", 4);
  detail::put_u32(out, static_cast<std::uint32_t>(state.size()));
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto& dep = state.dependents[i];
    detail::put_f64(out, state.rho[i]);
    detail::put_u32(out, dep.lambda ? 1 : 0);
    detail::put_u32(out, dep.lambda.value_or(0));
    detail::put_f64(out, dep.delta);
    detail::put_u32(out, static_cast<std::uint32_t>(state.neighbors[i].size()));
    for (const Neighbor& nb : state.neighbors[i]) {
      detail::put_u32(out, nb.id);
      detail::put_f64(out, nb.dist);
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

DpcState read_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  detail::ByteReader reader(in, path.string());
  reader.expect_magic("PECS");
  const std::uint32_t n = reader.u32();
  if (n == 0) reader.fail("empty state", 4);
  DpcState state;
  state.rho.resize(n);
  state.dependents.resize(n);
  state.neighbors.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    state.rho[i] = reader.f64();
    if (std::isnan(state.rho[i])) reader.fail("NaN density", reader.offset() - 8);
    const std::uint32_t has = reader.u32();
    const std::uint32_t lambda = reader.u32();
    if (has > 1 || (has && lambda >= n)) reader.fail("bad dependent point", reader.offset() - 8);
    if (has) state.dependents[i].lambda = lambda;
    state.dependents[i].delta = reader.f64();
    const std::uint32_t count = reader.u32();
    if (count >= n) reader.fail("neighbor list too long", reader.offset() - 4);
    state.neighbors[i].resize(count);
    for (auto& nb : state.neighbors[i]) {
      nb.id = reader.u32();
      if (nb.id >= n) reader.fail("neighbor id out of range", reader.offset() - 4);
      nb.dist = reader.f64();
    }
  }
  if (!reader.at_end()) reader.fail("trailing bytes");
  return state;
}

std::pair<PointSet, LabelVector> generate_gaussian(const GaussianSpec& spec) {
  if (spec.c == 0) throw std::invalid_argument("generate_gaussian: need at least one cluster");
  if (spec.c > spec.n) throw std::invalid_argument("generate_gaussian: more clusters than points");
  if (spec.d == 0) throw std::invalid_argument("generate_gaussian: dimension must be positive");
  if (!(spec.variance >= 0.0)) throw std::invalid_argument("generate_gaussian: variance must be >= 0");

  Rng center_rng(spec.seed);
  std::vector<double> centers(spec.c * spec.d);
  for (double& x : centers) x = center_rng.uniform01();

  const std::size_t base = spec.n / spec.c;
  const std::size_t extra = spec.n % spec.c;
  std::vector<std::size_t> offset(spec.c + 1, 0);
  for (std::size_t j = 0; j < spec.c; ++j) offset[j + 1] = offset[j] + base + (j < extra ? 1 : 0);

  const double sd = std::sqrt(spec.variance);
  std::vector<float> data(spec.n * spec.d);
  LabelVector labels(spec.n);
  parallel_for(0, spec.c, [&](std::size_t j) {
    Rng rng(mix_seed(spec.seed) + j + 1);
    const double* center = centers.data() + j * spec.d;
    for (std::size_t i = offset[j]; i < offset[j + 1]; ++i) {
      labels[i] = static_cast<std::int64_t>(j);
      for (std::size_t c = 0; c < spec.d; ++c) {
        data[i * spec.d + c] = static_cast<float>(center[c] + sd * rng.normal());
      }
    }
  });
  return {PointSet(spec.n, spec.d, std::move(data)), std::move(labels)};
}

}  // namespace pecann

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pecann/cluster.hpp"
#include "pecann/data.hpp"
#include "pecann/eval.hpp"
#include "pecann/parallel.hpp"

namespace fs = std::filesystem;
using namespace pecann;

namespace {

// Raised for anything the user can fix by changing flags or inputs.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string input;
  std::string format;
  std::string index = "vamana";
  std::size_t k = 16;
  std::size_t L = 32;
  std::uint32_t L_build = 32;
  std::size_t L_d = 32;
  std::uint32_t R = 32;
  double alpha = 1.1;
  std::uint32_t num_starts = 0;
  bool medoid_start = false;
  std::size_t threshold = 300;
  std::string density = "kth";
  std::string center = "threshold";
  double delta_min = 0.0;
  std::size_t n_c = 1;
  double rho_min = 0.0;
  std::size_t threads = 0;
  std::uint64_t seed = 42;
  std::string output;
  bool sidecar = false;
  std::string ground_truth;
  std::string dump_state;
  std::string load_state;
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool exact) {
  cmd->add_option("--input", o.input, "vector file (.fvecs or f32bin)");
  cmd->add_option("--format", o.format, "fvecs or f32bin; inferred from the extension by default");
  if (!exact) {
    cmd->add_option("--index", o.index, "vamana or bruteforce")->capture_default_str();
    cmd->add_option("--L", o.L, "query beam width")->capture_default_str();
    cmd->add_option("--L-build", o.L_build, "beam width while building the graph")->capture_default_str();
    cmd->add_option("--R", o.R, "graph degree bound")->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "RobustPrune slack")->capture_default_str();
    cmd->add_option("--num-starts", o.num_starts, "graph start points, 0 for ceil(sqrt(n))")->capture_default_str();
    cmd->add_flag("--medoid-start", o.medoid_start, "start every search from the medoid");
    cmd->add_option("--threshold", o.threshold, "switch to the exhaustive scan at this many unresolved points")
        ->capture_default_str();
  }
  cmd->add_option("--k", o.k, "neighbors used for the density")->capture_default_str();
  cmd->add_option("--Ld", o.L_d, "initial k of the doubling search")->capture_default_str();
  cmd->add_option("--density", o.density, "kth, normalized, exp-sum, sum-exp or sum")->capture_default_str();
  cmd->add_option("--center", o.center, "threshold, product or local")->capture_default_str();
  cmd->add_option("--delta-min", o.delta_min, "threshold centers: delta >= delta-min")->capture_default_str();
  cmd->add_option("--n-c", o.n_c, "product centers: how many")->capture_default_str();
  cmd->add_option("--rho-min", o.rho_min, "noise: rho < rho-min")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads, 0 for all cores")->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed for every random choice")->capture_default_str();
  cmd->add_option("--output", o.output, "label file to write");
  cmd->add_flag("--sidecar", o.sidecar, "also write <output>.centers");
  cmd->add_option("--ground-truth", o.ground_truth, "label file to score against");
  cmd->add_option("--dump-state", o.dump_state, "save densities, dependent points and kNN lists");
  cmd->add_option("--load-state", o.load_state, "reuse a saved state and only reapply center/noise policies");
}

CenterPolicy make_center_policy(const RunOptions& o) {
  if (o.center == "threshold") return ThresholdCenter{o.delta_min};
  if (o.center == "product") {
    if (o.n_c == 0) throw UsageError("--n-c must be positive");
    return ProductCenter{o.n_c};
  }
  if (o.center == "local") return LocalCenter{};
  throw UsageError("unknown center policy: " + o.center);
}

PipelineConfig make_config(const RunOptions& o, bool exact) {
  PipelineConfig cfg;
  if (o.index == "bruteforce" || exact) {
    cfg.index.kind = IndexKind::bruteforce;
  } else if (o.index == "vamana") {
    cfg.index.kind = IndexKind::vamana;
  } else {
    throw UsageError("unknown index: " + o.index);
  }
  cfg.index.query_beam = o.L;
  cfg.index.vamana.degree_bound = o.R;
  cfg.index.vamana.build_beam = o.L_build;
  cfg.index.vamana.alpha = o.alpha;
  cfg.index.vamana.num_starts = o.num_starts;
  cfg.index.vamana.medoid_start = o.medoid_start;
  cfg.index.vamana.seed = o.seed;
  cfg.k = o.k;
  try {
    cfg.density = parse_density_kind(o.density);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.center = make_center_policy(o);
  cfg.noise.rho_min = o.rho_min;
  cfg.doubling.initial_k = o.L_d;
  // The exact baseline resolves everything left after the kNN phase with one
  // exhaustive scan.
  cfg.doubling.threshold = exact ? std::numeric_limits<std::size_t>::max() : o.threshold;

  if (cfg.k == 0) throw UsageError("--k must be positive");
  if (cfg.doubling.initial_k <= cfg.k) throw UsageError("--Ld must be greater than --k");
  if (cfg.index.kind == IndexKind::vamana) {
    if (o.L < o.k) throw UsageError("--L must be at least --k");
    if (!(o.alpha >= 1.0)) throw UsageError("--alpha must be at least 1");
    if (o.R < 2) throw UsageError("--R must be at least 2");
    if (o.L_build == 0) throw UsageError("--L-build must be positive");
  }
  return cfg;
}

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw UsageError(flag + " is required");
  if (!fs::is_regular_file(path)) throw UsageError(flag + ": no such file: " + path);
}

void print_scores(const LabelVector& pred, const LabelVector& truth) {
  if (pred.size() != truth.size()) {
    throw UsageError("label lengths differ: " + std::to_string(pred.size()) + " vs " +
                     std::to_string(truth.size()));
  }
  const auto hc = homogeneity_completeness(pred, truth);
  std::printf("ari=%.10g\nhomogeneity=%.10g\ncompleteness=%.10g\n", pred.size() < 2 ? 1.0 : ari(pred, truth),
              hc.homogeneity, hc.completeness);
}

void print_timings(const StageTimings& t) {
  const double total = t.total();
  auto line = [&](const char* name, double s) {
    std::printf("time_%s=%.6f\npct_%s=%.2f\n", name, s, name, total > 0 ? 100.0 * s / total : 0.0);
  };
  line("index", t.index);
  line("knn", t.knn);
  line("density", t.density);
  line("dependent", t.dependent);
  line("cluster", t.cluster);
  std::printf("time_total=%.6f\n", total);
}

int cmd_cluster(const RunOptions& o, bool exact) {
  if (o.threads > 0) set_num_workers(o.threads);
  const PipelineConfig cfg = make_config(o, exact);
  if (!o.ground_truth.empty()) require_file(o.ground_truth, "--ground-truth");

  Clustering clustering;
  if (!o.load_state.empty()) {
    require_file(o.load_state, "--load-state");
    const DpcState state = read_state(o.load_state);
    clustering = reapply_policies(state, cfg.center, cfg.noise);
    std::printf("n=%zu\n", state.size());
    if (!o.dump_state.empty()) write_state(state, o.dump_state);
  } else {
    require_file(o.input, "--input");
    VectorFormat format;
    try {
      format = o.format.empty() ? format_from_path(o.input) : parse_vector_format(o.format);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const PointSet points = read_vectors(o.input, format);
    const PipelineResult result = run_pipeline(points, cfg);
    clustering = result.clustering;
    std::printf("n=%zu\nd=%zu\nindex=%s\ndensity=%s\ncenter_policy=%s\n", points.size(), points.dim(),
                cfg.index.kind == IndexKind::vamana ? "vamana" : "bruteforce",
                std::string(to_string(cfg.density)).c_str(), describe(cfg.center).c_str());
    std::printf("unresolved_after_knn=%zu\ndoubling_rounds=%zu\nexhaustive=%zu\n",
                result.dependent_stats.after_knn, result.dependent_stats.doubling_rounds,
                result.dependent_stats.exhaustive);
    print_timings(result.timings);
    if (!o.dump_state.empty()) write_state(result.state, o.dump_state);
  }
  std::printf("clusters=%zu\ncenters=%zu\nnoise=%zu\n", clustering.num_clusters(), clustering.centers.size(),
              clustering.noise.size());
  if (!o.output.empty()) write_clustering(clustering, o.output, o.sidecar);
  if (!o.ground_truth.empty()) print_scores(to_label_vector(clustering), read_labels(o.ground_truth));
  return 0;
}

int cmd_score(const std::string& pred_path, const std::string& truth_path) {
  require_file(pred_path, "--pred");
  require_file(truth_path, "--truth");
  print_scores(read_labels(pred_path), read_labels(truth_path));
  return 0;
}

int cmd_gen(const GaussianSpec& spec, const std::string& output, const std::string& labels, std::size_t threads) {
  if (threads > 0) set_num_workers(threads);
  if (spec.c == 0 || spec.c > spec.n) throw UsageError("--c must be between 1 and --n");
  if (spec.d == 0) throw UsageError("--d must be positive");
  if (!(spec.variance >= 0.0)) throw UsageError("--variance must be non-negative");
  const auto [points, truth] = generate_gaussian(spec);
  VectorFormat format;
  try {
    format = format_from_path(output);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_vectors(points, output, format);
  if (!labels.empty()) write_labels(truth, labels);
  std::printf("n=%zu\nd=%zu\nc=%zu\n", points.size(), points.dim(), spec.c);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density peaks clustering over a kNN graph index"};
  app.require_subcommand(1);

  RunOptions cluster_opts;
  auto* cluster = app.add_subcommand("cluster", "run the clustering pipeline");
  add_run_options(cluster, cluster_opts, false);

  RunOptions exact_opts;
  auto* exact = app.add_subcommand("exact", "exact clustering with brute-force search in every step");
  add_run_options(exact, exact_opts, true);

  std::string pred_path, truth_path;
  auto* score = app.add_subcommand("score", "compare two label files");
  score->add_option("--pred", pred_path, "predicted labels")->required();
  score->add_option("--truth", truth_path, "reference labels")->required();

  GaussianSpec spec;
  std::string gen_output, gen_labels;
  std::size_t gen_threads = 0;
  auto* gen = app.add_subcommand("gen", "write a synthetic Gaussian mixture");
  gen->add_option("--n", spec.n, "points")->capture_default_str();
  gen->add_option("--d", spec.d, "dimension")->capture_default_str();
  gen->add_option("--c", spec.c, "clusters")->capture_default_str();
  gen->add_option("--variance", spec.variance, "per-coordinate variance")->capture_default_str();
  gen->add_option("--seed", spec.seed, "random seed")->capture_default_str();
  gen->add_option("--threads", gen_threads, "worker threads, 0 for all cores")->capture_default_str();
  gen->add_option("--output", gen_output, "vector file (.fvecs or .bin)")->required();
  gen->add_option("--labels", gen_labels, "label file for the planted clusters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cluster) return cmd_cluster(cluster_opts, false);
    if (*exact) return cmd_cluster(exact_opts, true);
    if (*score) return cmd_score(pred_path, truth_path);
    if (*gen) return cmd_gen(spec, gen_output, gen_labels, gen_threads);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

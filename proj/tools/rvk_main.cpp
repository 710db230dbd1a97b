#include <CLI11.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <rvk/baseline.hpp>
#include <rvk/bench.hpp>
#include <rvk/clustering.hpp>
#include <rvk/frame_io.hpp>
#include <rvk/ransac.hpp>
#include <rvk/scene.hpp>
#include <rvk/velocity.hpp>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct EstimateOptions {
  rvk::ClusteringParams clustering;
  rvk::RansacParams ransac;
  std::string mode = "parallel";
  int workers = 0;
};

int run_generate(const std::string& scene_path, const std::string& out_dir) {
  rvk::SceneSpec spec;
  try {
    spec = rvk::load_scene_spec(scene_path);
  } catch (const rvk::InvalidSpec& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    const rvk::GeneratedScene scene = rvk::generate_frame(spec);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    rvk::write_frames({scene.frame}, dir / "frames.csv");
    rvk::write_truth((dir / "truth.csv").string(), scene.frame.frame_id, scene.truth);
    std::cout << "wrote " << (dir / "frames.csv").string() << " ("
              << scene.frame.points.size() << " points, " << scene.truth.size()
              << " objects)\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

// Config values fill in only where the matching flag was not given, so flags
// always win.
int apply_estimate_config(const std::string& path, const CLI::App* cmd, EstimateOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open config: " << path << '\n';
    return kExitUsage;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: config parse error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!j.is_object()) {
    std::cerr << "error: config top level must be an object\n";
    return kExitUsage;
  }
  try {
    for (const auto& item : j.items()) {
      const std::string& key = item.key();
      if (key == "eps") {
        if (cmd->count("--eps") == 0) opts.clustering.eps = item.value().get<double>();
      } else if (key == "min_pts") {
        if (cmd->count("--min-pts") == 0) opts.clustering.min_pts = item.value().get<int>();
      } else if (key == "max_trials") {
        if (cmd->count("--max-trials") == 0) opts.ransac.max_trials = item.value().get<int>();
      } else if (key == "threshold_scale") {
        if (cmd->count("--threshold-scale") == 0) {
          opts.ransac.threshold_scale = item.value().get<double>();
        }
      } else if (key == "rng_seed") {
        if (cmd->count("--seed") == 0) opts.ransac.rng_seed = item.value().get<std::uint64_t>();
      } else if (key == "mode") {
        if (cmd->count("--mode") == 0) opts.mode = item.value().get<std::string>();
      } else {
        std::cerr << "error: unknown config key '" << key << "'\n";
        return kExitUsage;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad config value: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}

int run_estimate(const std::string& frames_path, const std::string& out_path,
                 const EstimateOptions& opts) {
  if (opts.mode != "parallel" && opts.mode != "sequential" && opts.mode != "lsq-only") {
    std::cerr << "error: mode must be parallel, sequential, or lsq-only\n";
    return kExitUsage;
  }
  if (!(opts.clustering.eps > 0.0) || opts.clustering.min_pts < 1 || opts.ransac.max_trials < 1 ||
      !(opts.ransac.threshold_scale > 0.0) || opts.workers < 0) {
    std::cerr << "error: invalid estimation parameters\n";
    return kExitUsage;
  }

  std::vector<rvk::Frame> frames;
  try {
    frames = rvk::read_frames(frames_path);
  } catch (const rvk::FrameIoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::vector<rvk::VelocityEstimate> all;
  for (rvk::Frame& frame : frames) {
    try {
      rvk::dbscan(frame, opts.clustering);
      const std::vector<rvk::Cluster> clusters = rvk::extract_clusters(frame);
      if (clusters.empty()) {
        continue;
      }
      const std::vector<Eigen::ArrayX2d> pts = rvk::gather_cluster_points(frame, clusters);
      std::vector<rvk::VelocityEstimate> estimates;
      if (opts.mode == "parallel") {
        const std::vector<rvk::InlierMask> masks =
            rvk::run_ransac(pts, opts.ransac, opts.workers);
        estimates = rvk::estimate_all(frame, clusters, masks, opts.workers);
      } else if (opts.mode == "sequential") {
        const std::vector<rvk::InlierMask> masks = rvk::sequential_ransac(pts, opts.ransac);
        estimates = rvk::sequential_lsq(frame, clusters, masks);
      } else {
        const std::vector<rvk::InlierMask> masks = rvk::all_true_masks(clusters);
        estimates = rvk::estimate_all(frame, clusters, masks, opts.workers);
      }
      all.insert(all.end(), estimates.begin(), estimates.end());
    } catch (const std::exception& e) {
      std::cerr << "frame " << frame.frame_id << ": " << e.what() << '\n';
    }
  }

  try {
    rvk::write_estimates(all, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

bool parse_int_list(const std::string& text, std::vector<int>& out) {
  out.clear();
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      const int value = std::stoi(token, &used);
      if (used != token.size() || value < 1) {
        return false;
      }
      out.push_back(value);
    } catch (const std::exception&) {
      return false;
    }
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
  }
  return !out.empty();
}

int run_bench_cmd(const std::string& grid, const std::string& out_path, int workers,
                  std::uint64_t seed, int repetitions, int warmups) {
  rvk::BenchConfig config;
  config.workers = workers;
  config.repetitions = repetitions;
  config.warmups = warmups;
  config.ransac.rng_seed = seed;
  if (grid != "default") {
    const std::size_t cross = grid.find('x');
    if (cross == std::string::npos ||
        !parse_int_list(grid.substr(0, cross), config.cluster_counts) ||
        !parse_int_list(grid.substr(cross + 1), config.points_per_cluster)) {
      std::cerr << "error: grid must be 'default' or 'N1,N2,...xP1,P2,...'\n";
      return kExitUsage;
    }
  }

  std::vector<rvk::BenchRow> rows;
  try {
    rows = rvk::run_bench(config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  std::cout << rvk::format_bench_table(rows);
  try {
    rvk::write_bench_csv(out_path, rows);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar point-cloud cluster velocity estimation"};
  app.require_subcommand(1);

  std::string scene_path;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("generate", "Generate a synthetic scene from a config");
  gen->add_option("scene", scene_path, "Scene config file (JSON, schema v1)")->required();
  gen->add_option("-o,--output", gen_out, "Output directory for frames.csv and truth.csv")
      ->required();

  std::string frames_path;
  std::string est_out;
  std::string config_path;
  EstimateOptions opts;
  CLI::App* est = app.add_subcommand("estimate", "Estimate cluster velocities from frames");
  est->add_option("frames", frames_path, "Input frame CSV")->required();
  est->add_option("-o,--output", est_out, "Output estimate CSV")->required();
  est->add_option("--mode", opts.mode, "parallel | sequential | lsq-only");
  est->add_option("--seed", opts.ransac.rng_seed, "RANSAC rng seed");
  est->add_option("--workers", opts.workers, "Worker threads (0 = all hardware threads)");
  est->add_option("--config", config_path, "JSON config (flags override it)");
  est->add_option("--eps", opts.clustering.eps, "Clustering radius, meters");
  est->add_option("--min-pts", opts.clustering.min_pts, "Core-point neighbor minimum");
  est->add_option("--max-trials", opts.ransac.max_trials, "Line hypotheses per cluster");
  est->add_option("--threshold-scale", opts.ransac.threshold_scale,
                  "Multiplier on the inlier corridor");

  std::string grid = "default";
  std::string bench_out;
  int bench_workers = 0;
  std::uint64_t bench_seed = 0;
  int repetitions = 20;
  int warmups = 3;
  CLI::App* bench = app.add_subcommand("bench", "Time parallel vs sequential engines");
  bench->add_option("--grid", grid, "'default' (8,16,32,64 x 100,150) or 'N,...xP,...'");
  bench->add_option("-o,--output", bench_out, "Output CSV")->required();
  bench->add_option("--workers", bench_workers, "Worker threads (0 = all hardware threads)");
  bench->add_option("--seed", bench_seed, "RANSAC rng seed");
  bench->add_option("--reps", repetitions, "Timed repetitions per arm");
  bench->add_option("--warmups", warmups, "Warmup runs per arm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (gen->parsed()) {
    return run_generate(scene_path, gen_out);
  }
  if (est->parsed()) {
    if (!config_path.empty()) {
      const int rc = apply_estimate_config(config_path, est, opts);
      if (rc != 0) {
        return rc;
      }
    }
    return run_estimate(frames_path, est_out, opts);
  }
  if (bench->parsed()) {
    return run_bench_cmd(grid, bench_out, bench_workers, bench_seed, repetitions, warmups);
  }
  return kExitUsage;
}

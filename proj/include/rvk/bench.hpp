#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <rvk/ransac.hpp>

namespace rvk {

struct BenchConfig {
  std::vector<int> cluster_counts{8, 16, 32, 64};
  std::vector<int> points_per_cluster{100, 150};
  int repetitions = 20;  // timed runs per arm; the median is reported
  int warmups = 3;       // discarded runs per arm
  RansacParams ransac;
  int workers = 0;  // parallel arms; 0 = one per hardware thread
  std::uint64_t scene_seed = 7;
};

// One grid cell. Timings are medians in milliseconds; a failed cell carries
// NaN timings instead of aborting the run.
struct BenchRow {
  int n_clusters = 0;
  int points_per_cluster = 0;
  double parallel_ransac_ms = 0.0;
  double sequential_ransac_ms = 0.0;
  double parallel_lsq_ms = 0.0;
  double sequential_lsq_ms = 0.0;
};

inline constexpr std::string_view kBenchCsvHeader =
    "n_clusters,points_per_cluster,parallel_ransac_ms,sequential_ransac_ms,"
    "parallel_lsq_ms,sequential_lsq_ms";

// Times the parallel engine against the sequential baselines over a grid of
// synthetic frames (cluster_counts x points_per_cluster, row order follows
// the config vectors). Each cell generates one frame with that many
// well-separated clusters, 25% doppler outliers and light noise, then times
// each arm for `repetitions` runs after `warmups` discarded ones.
std::vector<BenchRow> run_bench(const BenchConfig& config);

// Fixed-width human-readable table of the rows.
std::string format_bench_table(const std::vector<BenchRow>& rows);

// Machine-readable CSV with kBenchCsvHeader as the header line.
void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows);

}  // namespace rvk

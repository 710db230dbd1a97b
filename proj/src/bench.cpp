#include <rvk/bench.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <rvk/baseline.hpp>
#include <rvk/rng.hpp>
#include <rvk/scene.hpp>
#include <rvk/velocity.hpp>

namespace rvk {
namespace {

struct Workload {
  Frame frame;
  std::vector<Cluster> clusters;
  std::vector<Eigen::ArrayX2d> cluster_points;
};

// A grid of well-separated boxes ahead of the sensor: 8 rows of y, columns
// marching outward in x. Supports up to 64 clusters inside a ~70 degree
// field of view.
Workload make_workload(int n_clusters, int points_per_cluster, std::uint64_t seed) {
  SceneSpec spec;
  spec.rng_seed = seed;
  spec.n_noise_points = 0;

  KeyedRng vel_rng(seed, 999);
  for (int i = 0; i < n_clusters; ++i) {
    const int col = i / 8;
    const int row = i % 8;
    ObjectSpec obj;
    obj.center = Eigen::Vector2d(15.0 + 10.0 * col, -35.0 + 10.0 * row);
    obj.extent = Eigen::Vector2d(2.0, 2.0);
    const double speed = vel_rng.next_range(3.0, 18.0);
    const double direction = vel_rng.next_range(-kPi, kPi);
    obj.v_x = speed * std::cos(direction);
    obj.v_y = speed * std::sin(direction);
    obj.n_points = points_per_cluster;
    obj.outlier_fraction = 0.25;
    obj.doppler_noise_sigma = 0.1;
    spec.objects.push_back(obj);
  }

  Workload w;
  GeneratedScene scene = generate_frame(spec);
  w.frame = std::move(scene.frame);
  for (const ObjectTruth& t : scene.truth) {
    Cluster cluster;
    cluster.cluster_id = t.object_id;
    cluster.point_indices.resize(static_cast<std::size_t>(t.n_points));
    std::iota(cluster.point_indices.begin(), cluster.point_indices.end(), t.first_point);
    w.clusters.push_back(std::move(cluster));
  }
  w.cluster_points = gather_cluster_points(w.frame, w.clusters);
  return w;
}

template <typename Fn>
double median_time_ms(int repetitions, int warmups, Fn&& fn) {
  for (int i = 0; i < warmups; ++i) {
    fn();
  }
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repetitions));
  for (int i = 0; i < repetitions; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t mid = times.size() / 2;
  if (times.size() % 2 == 1) {
    return times[mid];
  }
  return (times[mid - 1] + times[mid]) / 2.0;
}

void append_double(std::string& out, double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

void append_int(std::string& out, std::int64_t value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.repetitions < 1) {
    throw std::invalid_argument("run_bench: repetitions must be at least 1");
  }
  if (config.warmups < 0) {
    throw std::invalid_argument("run_bench: warmups must be non-negative");
  }
  if (config.cluster_counts.empty() || config.points_per_cluster.empty()) {
    throw std::invalid_argument("run_bench: grid must be non-empty");
  }
  for (int n : config.cluster_counts) {
    if (n < 1 || n > 64) {
      throw std::invalid_argument("run_bench: cluster counts must lie in [1, 64]");
    }
  }
  for (int p : config.points_per_cluster) {
    if (p < kMinClusterSize) {
      throw std::invalid_argument("run_bench: points per cluster below the minimum cluster size");
    }
  }

  std::vector<BenchRow> rows;
  for (int n_clusters : config.cluster_counts) {
    for (int pts : config.points_per_cluster) {
      BenchRow row;
      row.n_clusters = n_clusters;
      row.points_per_cluster = pts;
      try {
        const Workload w = make_workload(n_clusters, pts, config.scene_seed);
        const std::vector<InlierMask> masks =
            run_ransac(w.cluster_points, config.ransac, config.workers);

        row.parallel_ransac_ms = median_time_ms(config.repetitions, config.warmups, [&] {
          run_ransac(w.cluster_points, config.ransac, config.workers);
        });
        row.sequential_ransac_ms = median_time_ms(config.repetitions, config.warmups, [&] {
          sequential_ransac(w.cluster_points, config.ransac);
        });
        row.parallel_lsq_ms = median_time_ms(config.repetitions, config.warmups, [&] {
          estimate_all(w.frame, w.clusters, masks, config.workers);
        });
        row.sequential_lsq_ms = median_time_ms(config.repetitions, config.warmups, [&] {
          sequential_lsq(w.frame, w.clusters, masks);
        });
      } catch (const std::exception&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.parallel_ransac_ms = nan;
        row.sequential_ransac_ms = nan;
        row.parallel_lsq_ms = nan;
        row.sequential_lsq_ms = nan;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string format_bench_table(const std::vector<BenchRow>& rows) {
  std::string out;
  char line[200];
  std::snprintf(line, sizeof(line), "%10s %8s %20s %22s %17s %19s\n", "n_clusters", "points",
                "parallel_ransac_ms", "sequential_ransac_ms", "parallel_lsq_ms",
                "sequential_lsq_ms");
  out += line;
  for (const BenchRow& r : rows) {
    std::snprintf(line, sizeof(line), "%10d %8d %20.3f %22.3f %17.3f %19.3f\n", r.n_clusters,
                  r.points_per_cluster, r.parallel_ransac_ms, r.sequential_ransac_ms,
                  r.parallel_lsq_ms, r.sequential_lsq_ms);
    out += line;
  }
  return out;
}

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  std::string text(kBenchCsvHeader);
  text.push_back('\n');
  for (const BenchRow& r : rows) {
    append_int(text, r.n_clusters);
    text.push_back(',');
    append_int(text, r.points_per_cluster);
    for (double v : {r.parallel_ransac_ms, r.sequential_ransac_ms, r.parallel_lsq_ms,
                     r.sequential_lsq_ms}) {
      text.push_back(',');
      append_double(text, v);
    }
    text.push_back('\n');
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace rvk

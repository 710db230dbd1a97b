#include <rvk/ransac.hpp>

#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_map>

#include <rvk/parallel.hpp>
#include <rvk/rng.hpp>

namespace rvk {
namespace {

struct PreparedCluster {
  NormalizedCluster nc;
  double threshold = 0.0;
};

PreparedCluster prepare_cluster(const Eigen::ArrayX2d& raw, double threshold_scale) {
  PreparedCluster prep;
  prep.nc = normalize_cluster(raw);
  prep.threshold = mad_threshold(prep.nc.pts.col(1), threshold_scale);
  return prep;
}

// Core of one trial. Returns the inlier count; when flags is non-null it must
// arrive all-false with one slot per point and is filled with the mask.
// Degenerate seed pairs score 0 and leave flags untouched. The seeds define
// the line, so their geometric distance is exactly zero; evaluating the
// distance formula on them can stray by an ulp, hence they are marked
// directly.
int run_trial(const NormalizedCluster& nc, int seed_a, int seed_b, double threshold,
              BoolArray* flags) {
  const Eigen::Index n = nc.pts.rows();
  const double x1 = nc.pts(seed_a, 0);
  const double y1 = nc.pts(seed_a, 1);
  const double x2 = nc.pts(seed_b, 0);
  const double y2 = nc.pts(seed_b, 1);
  const double dx = x2 - x1;
  if (std::abs(dx) < kSeedEpsilon) {
    return 0;
  }
  const double m = (y2 - y1) / dx;
  const double c = y1 - m * x1;
  const double denom = std::sqrt(m * m + 1.0);

  int count = 2;
  if (flags != nullptr) {
    (*flags)(seed_a) = true;
    (*flags)(seed_b) = true;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k == seed_a || k == seed_b) {
      continue;
    }
    const double dist = std::abs(-m * nc.pts(k, 0) + nc.pts(k, 1) - c) / denom;
    if (dist <= threshold) {
      ++count;
      if (flags != nullptr) {
        (*flags)(k) = true;
      }
    }
  }
  return count;
}

}  // namespace

NormalizedCluster normalize_cluster(const Eigen::ArrayX2d& raw) {
  if (raw.rows() < 1) {
    throw std::invalid_argument("normalize_cluster: empty cluster");
  }
  NormalizedCluster nc;
  nc.pts.resize(raw.rows(), 2);
  for (int axis = 0; axis < 2; ++axis) {
    const double lo = raw.col(axis).minCoeff();
    const double hi = raw.col(axis).maxCoeff();
    nc.offset(axis) = lo;
    nc.scale(axis) = hi - lo;
    if (nc.scale(axis) == 0.0) {
      nc.pts.col(axis).setConstant(0.5);
    } else {
      nc.pts.col(axis) = (raw.col(axis) - lo) / nc.scale(axis);
    }
  }
  return nc;
}

double mad_threshold(const Eigen::ArrayXd& normalized_dopplers, double threshold_scale) {
  if (normalized_dopplers.size() < 1) {
    throw std::invalid_argument("mad_threshold: empty input");
  }
  return threshold_scale * mean_abs_deviation(normalized_dopplers);
}

LineModel line_from_seeds(const Eigen::Array2d& p1, const Eigen::Array2d& p2) {
  const double dx = p2(0) - p1(0);
  if (std::abs(dx) < kSeedEpsilon) {
    throw DegenerateSeeds("line_from_seeds: seed points share the same x");
  }
  LineModel line;
  line.m = (p2(1) - p1(1)) / dx;
  line.c = p1(1) - line.m * p1(0);
  return line;
}

double point_line_distance(const LineModel& line, const Eigen::Array2d& p) {
  return std::abs(-line.m * p(0) + p(1) - line.c) / std::sqrt(line.m * line.m + 1.0);
}

std::pair<int, int> draw_seed_pair(std::uint64_t seed, int cluster_id, int trial, int n) {
  if (n < 2) {
    throw std::invalid_argument("draw_seed_pair: need at least 2 points");
  }
  KeyedRng rng(seed, static_cast<std::uint64_t>(static_cast<std::uint32_t>(cluster_id)),
               static_cast<std::uint64_t>(static_cast<std::uint32_t>(trial)));
  const int i = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n)));
  int j = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n - 1)));
  if (j >= i) {
    ++j;
  }
  return {i, j};
}

int count_trial_inliers(const NormalizedCluster& nc, int seed_a, int seed_b, double threshold) {
  return run_trial(nc, seed_a, seed_b, threshold, nullptr);
}

InlierMask evaluate_trial(const NormalizedCluster& nc, int seed_a, int seed_b, double threshold) {
  InlierMask result;
  result.cluster_id = -1;
  result.winning_trial = -1;
  result.mask = BoolArray::Constant(nc.pts.rows(), false);
  result.inlier_count = run_trial(nc, seed_a, seed_b, threshold, &result.mask);
  return result;
}

std::vector<InlierMask> run_ransac(const std::vector<Eigen::ArrayX2d>& clusters,
                                   const RansacParams& params, int workers) {
  if (params.max_trials < 1) {
    throw std::invalid_argument("run_ransac: max_trials must be at least 1");
  }
  if (!(params.threshold_scale > 0.0)) {
    throw std::invalid_argument("run_ransac: threshold_scale must be positive");
  }
  const int n_clusters = static_cast<int>(clusters.size());
  std::vector<PreparedCluster> prepared(static_cast<std::size_t>(n_clusters));
  for (int c = 0; c < n_clusters; ++c) {
    const auto& raw = clusters[static_cast<std::size_t>(c)];
    if (raw.rows() < kMinClusterSize) {
      throw ClusterTooSmall("run_ransac: cluster " + std::to_string(c) + " has " +
                            std::to_string(raw.rows()) + " points, need " +
                            std::to_string(kMinClusterSize));
    }
    prepared[static_cast<std::size_t>(c)] = prepare_cluster(raw, params.threshold_scale);
  }

  // One task per (cluster, trial): tIdx -> cluster = tIdx / max_trials,
  // trial = tIdx % max_trials. Tasks only write their own count slot, so any
  // partition of the index range yields the same counts.
  const int max_trials = params.max_trials;
  const std::int64_t total = static_cast<std::int64_t>(n_clusters) * max_trials;
  std::vector<int> counts(static_cast<std::size_t>(total), 0);
  parallel_for(total, workers, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t t_idx = begin; t_idx < end; ++t_idx) {
      const int cluster = static_cast<int>(t_idx / max_trials);
      const int trial = static_cast<int>(t_idx % max_trials);
      const auto& prep = prepared[static_cast<std::size_t>(cluster)];
      const auto [a, b] = draw_seed_pair(params.rng_seed, cluster, trial,
                                         static_cast<int>(prep.nc.pts.rows()));
      counts[static_cast<std::size_t>(t_idx)] =
          count_trial_inliers(prep.nc, a, b, prep.threshold);
    }
  });

  // Winner per cluster: maximum count, lowest trial index on ties (ascending
  // scan with strict >). The winning mask is rebuilt from its seed pair.
  std::vector<InlierMask> masks(static_cast<std::size_t>(n_clusters));
  for (int c = 0; c < n_clusters; ++c) {
    const std::int64_t base = static_cast<std::int64_t>(c) * max_trials;
    int best_count = -1;
    int best_trial = -1;
    for (int t = 0; t < max_trials; ++t) {
      const int count = counts[static_cast<std::size_t>(base + t)];
      if (count > best_count) {
        best_count = count;
        best_trial = t;
      }
    }
    const auto& prep = prepared[static_cast<std::size_t>(c)];
    const auto [a, b] = draw_seed_pair(params.rng_seed, c, best_trial,
                                       static_cast<int>(prep.nc.pts.rows()));
    InlierMask mask = evaluate_trial(prep.nc, a, b, prep.threshold);
    mask.cluster_id = c;
    mask.winning_trial = best_trial;
    masks[static_cast<std::size_t>(c)] = std::move(mask);
  }
  return masks;
}

std::vector<Eigen::ArrayX2d> gather_cluster_points(const Frame& frame,
                                                   const std::vector<Cluster>& clusters) {
  std::vector<Eigen::ArrayX2d> out;
  out.reserve(clusters.size());
  for (const Cluster& cluster : clusters) {
    Eigen::ArrayX2d pts(static_cast<Eigen::Index>(cluster.point_indices.size()), 2);
    for (std::size_t k = 0; k < cluster.point_indices.size(); ++k) {
      const RadarPoint& p = frame.points[static_cast<std::size_t>(cluster.point_indices[k])];
      pts(static_cast<Eigen::Index>(k), 0) = p.azimuth;
      pts(static_cast<Eigen::Index>(k), 1) = p.doppler;
    }
    out.push_back(std::move(pts));
  }
  return out;
}

BoolArray combine_masks(const Frame& frame, const std::vector<InlierMask>& masks) {
  const Eigen::Index n = static_cast<Eigen::Index>(frame.points.size());
  BoolArray result = BoolArray::Constant(n, false);
  if (masks.empty() || frame.labels.size() != frame.points.size()) {
    return result;
  }
  std::unordered_map<int, const InlierMask*> by_id;
  for (const InlierMask& mask : masks) {
    by_id.emplace(mask.cluster_id, &mask);
  }
  // Position of a point within its cluster = how many earlier points share
  // its label, matching the ascending gather order.
  std::unordered_map<int, Eigen::Index> seen;
  for (Eigen::Index k = 0; k < n; ++k) {
    const int label = frame.labels[static_cast<std::size_t>(k)];
    if (label < 0) {
      continue;
    }
    const Eigen::Index pos = seen[label]++;
    const auto it = by_id.find(label);
    if (it != by_id.end() && pos < it->second->mask.size()) {
      result(k) = it->second->mask(pos);
    }
  }
  return result;
}

std::vector<InlierMask> all_true_masks(const std::vector<Cluster>& clusters) {
  std::vector<InlierMask> masks;
  masks.reserve(clusters.size());
  for (const Cluster& cluster : clusters) {
    InlierMask mask;
    mask.cluster_id = cluster.cluster_id;
    mask.mask = BoolArray::Constant(static_cast<Eigen::Index>(cluster.point_indices.size()), true);
    mask.inlier_count = static_cast<int>(cluster.point_indices.size());
    mask.winning_trial = -1;
    masks.push_back(std::move(mask));
  }
  return masks;
}

}  // namespace rvk

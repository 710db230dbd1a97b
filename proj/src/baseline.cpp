#include <rvk/baseline.hpp>

#include <cstddef>
#include <string>
#include <utility>

#include <rvk/velocity.hpp>

namespace rvk {

std::vector<InlierMask> sequential_ransac(const std::vector<Eigen::ArrayX2d>& clusters,
                                          const RansacParams& params) {
  if (params.max_trials < 1) {
    throw std::invalid_argument("sequential_ransac: max_trials must be at least 1");
  }
  if (!(params.threshold_scale > 0.0)) {
    throw std::invalid_argument("sequential_ransac: threshold_scale must be positive");
  }

  std::vector<InlierMask> masks;
  masks.reserve(clusters.size());
  for (int c = 0; c < static_cast<int>(clusters.size()); ++c) {
    const auto& raw = clusters[static_cast<std::size_t>(c)];
    if (raw.rows() < kMinClusterSize) {
      throw ClusterTooSmall("sequential_ransac: cluster " + std::to_string(c) + " has " +
                            std::to_string(raw.rows()) + " points, need " +
                            std::to_string(kMinClusterSize));
    }
    const NormalizedCluster nc = normalize_cluster(raw);
    const double threshold = mad_threshold(nc.pts.col(1), params.threshold_scale);
    const int n = static_cast<int>(nc.pts.rows());

    int best_count = -1;
    int best_trial = -1;
    for (int trial = 0; trial < params.max_trials; ++trial) {
      const auto [a, b] = draw_seed_pair(params.rng_seed, c, trial, n);
      const int count = count_trial_inliers(nc, a, b, threshold);
      if (count > best_count) {
        best_count = count;
        best_trial = trial;
      }
    }

    const auto [a, b] = draw_seed_pair(params.rng_seed, c, best_trial, n);
    InlierMask mask = evaluate_trial(nc, a, b, threshold);
    mask.cluster_id = c;
    mask.winning_trial = best_trial;
    masks.push_back(std::move(mask));
  }
  return masks;
}

std::vector<VelocityEstimate> sequential_lsq(const Frame& frame,
                                             const std::vector<Cluster>& clusters,
                                             const std::vector<InlierMask>& masks) {
  if (clusters.size() != masks.size()) {
    throw std::invalid_argument("sequential_lsq: one mask per cluster required");
  }
  std::vector<VelocityEstimate> out;
  out.reserve(clusters.size());
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const Cluster& cluster = clusters[i];
    const InlierMask& im = masks[i];
    if (im.mask.size() != static_cast<Eigen::Index>(cluster.point_indices.size())) {
      throw std::invalid_argument("sequential_lsq: mask size does not match cluster size");
    }
    const Eigen::Index m = im.mask.size();
    Eigen::ArrayXd az(m);
    Eigen::ArrayXd dp(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const RadarPoint& p =
          frame.points[static_cast<std::size_t>(cluster.point_indices[static_cast<std::size_t>(k)])];
      az(k) = p.azimuth;
      dp(k) = p.doppler;
    }
    out.push_back(estimate_cluster_velocity(frame.frame_id, cluster.cluster_id, az, dp, im.mask));
  }
  return out;
}

}  // namespace rvk

#include <rvk/velocity.hpp>

#include <cstddef>

#include <rvk/parallel.hpp>

namespace rvk {

DesignMatrix build_design_matrix(const Eigen::ArrayXd& azimuths) {
  if (azimuths.size() < 2) {
    throw TooFewPoints("build_design_matrix: need at least 2 azimuths");
  }
  DesignMatrix a(azimuths.size(), 2);
  a.col(0) = azimuths.cos().matrix();
  a.col(1) = azimuths.sin().matrix();
  return a;
}

double heading_angle(double v_x, double v_y) {
  if (std::abs(v_x) < kZeroVelocityEpsilon && std::abs(v_y) < kZeroVelocityEpsilon) {
    throw ZeroVelocity("heading_angle: velocity below resolvable magnitude");
  }
  return to_half_open_angle(std::atan2(v_y, v_x));
}

VelocityEstimate estimate_cluster_velocity(std::int64_t frame_id, int cluster_id,
                                           const Eigen::ArrayXd& azimuths,
                                           const Eigen::ArrayXd& dopplers, const BoolArray& mask) {
  if (azimuths.size() != dopplers.size() || mask.size() != azimuths.size()) {
    throw std::invalid_argument("estimate_cluster_velocity: array sizes must match");
  }

  VelocityEstimate est;
  est.frame_id = frame_id;
  est.cluster_id = cluster_id;

  Eigen::Index n_in = 0;
  for (Eigen::Index k = 0; k < mask.size(); ++k) {
    if (mask(k)) {
      ++n_in;
    }
  }
  est.inlier_count = static_cast<int>(n_in);

  Eigen::ArrayXd az(n_in);
  Eigen::ArrayXd dp(n_in);
  Eigen::Index slot = 0;
  for (Eigen::Index k = 0; k < mask.size(); ++k) {
    if (mask(k)) {
      az(slot) = azimuths(k);
      dp(slot) = dopplers(k);
      ++slot;
    }
  }

  if (n_in == 0) {
    est.v_x = 0.0;
    est.v_y = 0.0;
    est.condition_ok = false;
    est.heading = std::nullopt;
    return est;
  }
  if (n_in == 1) {
    // Single bearing: only the radial speed is observable.
    est.v_x = dp(0) * std::cos(az(0));
    est.v_y = dp(0) * std::sin(az(0));
    est.condition_ok = false;
  } else {
    const DesignMatrix a = build_design_matrix(az);
    const Eigen::VectorXd d = dp.matrix();
    try {
      const Eigen::Vector2d v = solve_velocity(a, d);
      est.v_x = v(0);
      est.v_y = v(1);
      est.condition_ok = true;
    } catch (const RankDeficient&) {
      const Eigen::Vector2d v = min_norm_fallback(a, d);
      est.v_x = v(0);
      est.v_y = v(1);
      est.condition_ok = false;
    }
  }

  try {
    est.heading = heading_angle(est.v_x, est.v_y);
  } catch (const ZeroVelocity&) {
    est.heading = std::nullopt;
  }
  return est;
}

std::vector<VelocityEstimate> estimate_all(const Frame& frame,
                                           const std::vector<Cluster>& clusters,
                                           const std::vector<InlierMask>& masks, int workers) {
  if (clusters.size() != masks.size()) {
    throw std::invalid_argument("estimate_all: one mask per cluster required");
  }
  const std::int64_t n = static_cast<std::int64_t>(clusters.size());
  std::vector<VelocityEstimate> out(static_cast<std::size_t>(n));
  parallel_for(n, workers, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      const Cluster& cluster = clusters[static_cast<std::size_t>(i)];
      const InlierMask& im = masks[static_cast<std::size_t>(i)];
      if (im.mask.size() != static_cast<Eigen::Index>(cluster.point_indices.size())) {
        throw std::invalid_argument("estimate_all: mask size does not match cluster size");
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
      out[static_cast<std::size_t>(i)] =
          estimate_cluster_velocity(frame.frame_id, cluster.cluster_id, az, dp, im.mask);
    }
  });
  return out;
}

}  // namespace rvk

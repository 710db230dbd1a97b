#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <rvk/types.hpp>

namespace rvk {

// Minimum azimuth separation (normalized plane) for a usable seed pair.
// Below this the slope overflows; the trial is discarded instead.
inline constexpr double kSeedEpsilon = 1e-12;

struct RansacParams {
  int max_trials = 256;          // line hypotheses evaluated per cluster
  double threshold_scale = 1.0;  // multiplier on the per-cluster deviation corridor
  std::uint64_t rng_seed = 0;
};

// Line y = m*x + c in the normalized (azimuth, doppler) plane.
struct LineModel {
  double m = 0.0;
  double c = 0.0;
};

// Cluster points min-max mapped into [0,1] x [0,1]. Column 0 is normalized
// azimuth, column 1 normalized doppler. The affine maps recover the inputs:
// original = normalized * scale + offset. A degenerate axis (zero spread)
// keeps scale 0 and maps every coordinate to 0.5.
struct NormalizedCluster {
  Eigen::ArrayX2d pts;
  Eigen::Array2d offset = Eigen::Array2d::Zero();
  Eigen::Array2d scale = Eigen::Array2d::Ones();
};

// Seed pair closer than kSeedEpsilon in x; the trial scores zero.
struct DegenerateSeeds : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cluster below the minimum size the engine accepts.
struct ClusterTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Median of a non-empty dense vector/array expression (sorted copy; even
// length averages the middle pair).
template <typename Derived>
typename Derived::Scalar median(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = values.size();
  if (n == 0) {
    throw std::invalid_argument("median: empty input");
  }
  std::vector<Scalar> sorted(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    sorted[static_cast<std::size_t>(i)] = values.derived()(i);
  }
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) {
    return sorted[mid];
  }
  return (sorted[mid - 1] + sorted[mid]) / Scalar(2);
}

// Mean absolute deviation about the median: (1/n) * sum_i |v_i - median(v)|.
// Shift-invariant, scales as |a| under v -> a*v, zero on constant input.
template <typename Derived>
typename Derived::Scalar mean_abs_deviation(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const Scalar med = median(values);
  Scalar acc = Scalar(0);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const Scalar dev = values.derived()(i) - med;
    acc += dev < Scalar(0) ? -dev : dev;
  }
  return acc / Scalar(values.size());
}

// Per-axis min-max normalization of raw (azimuth, doppler) pairs into the
// unit square; at least one point required.
NormalizedCluster normalize_cluster(const Eigen::ArrayX2d& raw);

// Inlier corridor half-width for one cluster: threshold_scale times the mean
// absolute deviation of the normalized doppler values about their median.
// Computed once per cluster, before any trials.
double mad_threshold(const Eigen::ArrayXd& normalized_dopplers, double threshold_scale);

// Line through two seed points. Throws DegenerateSeeds when the points are
// closer than kSeedEpsilon in x.
LineModel line_from_seeds(const Eigen::Array2d& p1, const Eigen::Array2d& p2);

// Perpendicular distance |(-m)*x + y + (-c)| / sqrt(m^2 + 1).
double point_line_distance(const LineModel& line, const Eigen::Array2d& p);

// Ordered pair of distinct indices in [0, n) for one trial. Keyed by
// (seed, cluster_id, trial), so the pair depends only on those values and
// never on scheduling or execution order.
std::pair<int, int> draw_seed_pair(std::uint64_t seed, int cluster_id, int trial, int n);

// Scores one trial without materializing a mask: number of cluster points
// within threshold of the line through seeds (seed_a, seed_b). A degenerate
// seed pair scores 0. Shared by the parallel engine and the sequential
// baseline so their winners agree exactly.
int count_trial_inliers(const NormalizedCluster& nc, int seed_a, int seed_b, double threshold);

// Full mask for one trial: true wherever point_line_distance <= threshold.
// The seeds define the line, so their distance is exactly zero and they are
// marked inliers whenever the trial is non-degenerate and threshold >= 0.
// A degenerate seed pair yields an all-false mask with count 0. cluster_id
// and winning_trial are left at -1 for the caller to fill.
InlierMask evaluate_trial(const NormalizedCluster& nc, int seed_a, int seed_b, double threshold);

// Data-parallel RANSAC over all clusters at once. Each cluster is normalized,
// given a fixed corridor from mad_threshold, and scored over
// params.max_trials seeded line hypotheses; the returned mask per cluster is
// the trial with the maximum inlier count, ties broken by the LOWEST trial
// index. Bit-identical output for a given rng_seed at any worker count
// (workers: 0 = one per hardware thread).
// Throws std::invalid_argument for invalid params and ClusterTooSmall for a
// cluster under kMinClusterSize points.
std::vector<InlierMask> run_ransac(const std::vector<Eigen::ArrayX2d>& clusters,
                                   const RansacParams& params, int workers = 0);

// Gathers per-cluster (azimuth, doppler) point sets from a labeled frame, in
// cluster-id order; within a cluster, points keep ascending frame order.
std::vector<Eigen::ArrayX2d> gather_cluster_points(const Frame& frame,
                                                   const std::vector<Cluster>& clusters);

// Frame-level inlier subset: true at point k iff k belongs to some cluster
// (per frame.labels) and is an inlier of that cluster's mask. Noise points
// are always false. Mask position within a cluster follows ascending frame
// order, matching gather_cluster_points.
BoolArray combine_masks(const Frame& frame, const std::vector<InlierMask>& masks);

// All-true masks in cluster order (winning_trial -1): the no-filtering arm.
std::vector<InlierMask> all_true_masks(const std::vector<Cluster>& clusters);

}  // namespace rvk

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <rvk/types.hpp>

namespace rvk {

// Relative rank gate: the solve refuses systems with
// det(AtA) < kRankEpsilon * (trace(AtA)/2)^2. Bearing spreads that fail it
// make the lateral component unobservable.
inline constexpr double kRankEpsilon = 1e-8;

// Heading is undefined when both velocity components sit below this.
inline constexpr double kZeroVelocityEpsilon = 1e-9;

// Row k = (cos azimuth_k, sin azimuth_k); every row has unit norm.
using DesignMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

struct TooFewPoints : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroVelocity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws TooFewPoints below 2 azimuths.
DesignMatrix build_design_matrix(const Eigen::ArrayXd& azimuths);

// Least-squares minimizer of ||A*v - dopplers|| via the closed-form 2x2
// normal equations (A'A) v = A'd; equals the pseudoinverse solution whenever
// the rank gate passes. Throws RankDeficient when it does not, TooFewPoints
// below 2 rows. Scalar type follows the inputs so callers can run the same
// arithmetic at higher precision.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, 2, 1> solve_velocity(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& dopplers) {
  using Scalar = typename DerivedA::Scalar;
  if (a.cols() != 2) {
    throw std::invalid_argument("solve_velocity: design matrix must have 2 columns");
  }
  if (a.rows() != dopplers.size()) {
    throw std::invalid_argument("solve_velocity: row count must match doppler count");
  }
  if (a.rows() < 2) {
    throw TooFewPoints("solve_velocity: need at least 2 rows");
  }
  const Scalar g00 = a.col(0).squaredNorm();
  const Scalar g01 = a.col(0).dot(a.col(1));
  const Scalar g11 = a.col(1).squaredNorm();
  const Scalar det = g00 * g11 - g01 * g01;
  const Scalar half_trace = (g00 + g11) / Scalar(2);
  if (!(det >= Scalar(kRankEpsilon) * half_trace * half_trace)) {
    throw RankDeficient("solve_velocity: bearing spread too small for a 2D solve");
  }
  const Scalar b0 = a.col(0).dot(dopplers.derived());
  const Scalar b1 = a.col(1).dot(dopplers.derived());
  Eigen::Matrix<Scalar, 2, 1> v;
  v(0) = (g11 * b0 - g01 * b1) / det;
  v(1) = (g00 * b1 - g01 * b0) / det;
  return v;
}

// Fallback for rank-deficient systems: velocity along the one observable
// bearing (dominant eigenvector of A'A), magnitude mean(dopplers), sign
// aligned with the first row so the radial projection keeps the measured
// sign. Minimum-norm in the limit of zero bearing spread.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, 2, 1> min_norm_fallback(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& dopplers) {
  using Scalar = typename DerivedA::Scalar;
  if (a.cols() != 2 || a.rows() < 1 || a.rows() != dopplers.size()) {
    throw std::invalid_argument("min_norm_fallback: bad system shape");
  }
  const Scalar g00 = a.col(0).squaredNorm();
  const Scalar g01 = a.col(0).dot(a.col(1));
  const Scalar g11 = a.col(1).squaredNorm();
  const Scalar half_sum = (g00 + g11) / Scalar(2);
  const Scalar half_diff = (g00 - g11) / Scalar(2);
  const Scalar lambda = half_sum + std::sqrt(half_diff * half_diff + g01 * g01);
  Eigen::Matrix<Scalar, 2, 1> u;
  if (g01 != Scalar(0)) {
    u << g01, lambda - g00;
  } else if (g00 >= g11) {
    u << Scalar(1), Scalar(0);
  } else {
    u << Scalar(0), Scalar(1);
  }
  u.normalize();
  if (u.dot(a.row(0).transpose()) < Scalar(0)) {
    u = -u;
  }
  return dopplers.mean() * u;
}

// Quadrant-aware heading in (-pi, pi]. Throws ZeroVelocity when both
// components are below kZeroVelocityEpsilon.
double heading_angle(double v_x, double v_y);

// One cluster's estimate from its full azimuth/doppler arrays and inlier
// mask. Never throws on degenerate data: rank-deficient and sub-2-point
// systems fall back with condition_ok=false, near-zero velocity yields an
// empty heading.
VelocityEstimate estimate_cluster_velocity(std::int64_t frame_id, int cluster_id,
                                           const Eigen::ArrayXd& azimuths,
                                           const Eigen::ArrayXd& dopplers, const BoolArray& mask);

// Independent per-cluster solves over the inlier points only, run in
// parallel (workers: 0 = one per hardware thread). Output order always
// matches cluster order regardless of scheduling; per-cluster degeneracies
// are recorded in the estimate, never aborting the rest.
std::vector<VelocityEstimate> estimate_all(const Frame& frame,
                                           const std::vector<Cluster>& clusters,
                                           const std::vector<InlierMask>& masks, int workers = 0);

}  // namespace rvk

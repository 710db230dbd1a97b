#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

namespace rvk {

inline constexpr double kPi = std::numbers::pi;

// Label given to points that belong to no cluster.
inline constexpr int kNoiseLabel = -1;

// Smallest cluster the estimation stages accept: two seed points plus one
// test point for the inlier search, and two rows for the velocity solve.
inline constexpr int kMinClusterSize = 3;

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

// One radar detection. Azimuth is measured from the longitudinal X axis
// toward the lateral Y axis and lies in (-pi, pi]. Doppler is the radial
// projected speed, signed, positive = receding from the sensor.
struct RadarPoint {
  double x = 0.0;        // m, longitudinal
  double y = 0.0;        // m, lateral
  double z = 0.0;        // m, carried through but unused by estimation
  double doppler = 0.0;  // m/s
  double azimuth = 0.0;  // rad
};

struct Frame {
  std::int64_t frame_id = 0;
  std::optional<double> timestamp;  // s, in-memory only
  std::vector<RadarPoint> points;
  std::vector<int> labels;  // one per point once clustering has run
};

// Indices into Frame::points for one object, strictly increasing.
struct Cluster {
  int cluster_id = 0;
  std::vector<int> point_indices;
};

// Winning per-cluster inlier selection. mask is aligned with
// Cluster::point_indices.
struct InlierMask {
  int cluster_id = 0;
  BoolArray mask;
  int inlier_count = 0;
  int winning_trial = 0;  // -1 when the mask was not produced by a trial
};

struct VelocityEstimate {
  std::int64_t frame_id = 0;
  int cluster_id = 0;
  double v_x = 0.0;               // m/s, longitudinal
  double v_y = 0.0;               // m/s, lateral
  std::optional<double> heading;  // rad in (-pi, pi]; empty when speed ~ 0
  int inlier_count = 0;
  bool condition_ok = true;  // false when the bearing spread was too small
};

// Radial speed seen at a given bearing from an object moving with (v_x, v_y).
template <typename Scalar>
inline Scalar radial_projection(Scalar v_x, Scalar v_y, Scalar azimuth) {
  return v_x * std::cos(azimuth) + v_y * std::sin(azimuth);
}

// Maps the closed atan2 range [-pi, pi] onto (-pi, pi].
template <typename Scalar>
inline Scalar to_half_open_angle(Scalar angle) {
  return angle == -Scalar(kPi) ? Scalar(kPi) : angle;
}

}  // namespace rvk

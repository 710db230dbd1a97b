#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <rvk/types.hpp>

namespace rvk {

// One synthetic object: a box of detections moving rigidly at (v_x, v_y).
// A fraction of its points carries an extra doppler offset, standing in for
// micro-doppler returns (wheels, limbs) that are position-consistent but
// doppler-inconsistent with the body.
struct ObjectSpec {
  Eigen::Vector2d center{20.0, 0.0};              // m
  Eigen::Vector2d extent{2.0, 2.0};               // m, full box size
  double v_x = 0.0;                               // m/s ground truth
  double v_y = 0.0;                               // m/s ground truth
  int n_points = 50;
  double outlier_fraction = 0.0;                  // in [0, 0.5)
  double doppler_noise_sigma = 0.0;               // m/s
  Eigen::Vector2d outlier_offset_range{2.0, 5.0}; // m/s, |offset| drawn here
};

struct SceneSpec {
  std::vector<ObjectSpec> objects;
  int n_noise_points = 0;
  Eigen::Vector2d field_of_view{-70.0 * kPi / 180.0, 70.0 * kPi / 180.0};  // rad
  double noise_range_min = 5.0;    // m, radial band for scattered noise
  double noise_range_max = 80.0;   // m
  Eigen::Vector2d noise_doppler{-30.0, 30.0};  // m/s
  double min_separation = 4.0;     // m, required axis gap between object boxes
  std::uint64_t rng_seed = 0;
  std::int64_t frame_id = 0;
};

// Ground truth for one generated object. outlier_indices are frame-level
// point indices, ascending.
struct ObjectTruth {
  int object_id = 0;
  double v_x = 0.0;
  double v_y = 0.0;
  std::optional<double> heading;  // rad, empty for a static object
  int first_point = 0;            // frame-level index of the object's first point
  int n_points = 0;
  std::vector<int> outlier_indices;
};

struct GeneratedScene {
  Frame frame;
  std::vector<ObjectTruth> truth;
};

struct InvalidSpec : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Validates a spec; throws InvalidSpec with the offending field named.
void validate_scene_spec(const SceneSpec& spec);

// Deterministic synthesis: object points uniform in the object's box, azimuth
// = atan2(y, x), doppler = the radial projection of the true velocity plus
// Gaussian noise; floor(outlier_fraction * n_points) points per object get an
// extra signed offset with magnitude from outlier_offset_range; noise points
// scatter uniformly over the field of view with uniform doppler. Object
// points come first (objects in order), then noise points. Identical spec
// gives a bit-identical frame. Throws InvalidSpec.
GeneratedScene generate_frame(const SceneSpec& spec);

// Reads a scene config (JSON, schema v1; see README). Throws InvalidSpec on
// parse errors, unknown keys, or invalid values; FrameIoError-style file
// problems surface as InvalidSpec too.
SceneSpec load_scene_spec(const std::string& path);

// Truth table CSV:
// frame_id,object_id,v_x,v_y,heading_deg,first_point,n_points,outlier_indices
// outlier_indices is ';'-joined (empty when none), heading_deg is nan for
// static objects. Throws std::runtime_error on write failure.
void write_truth(const std::string& path, std::int64_t frame_id,
                 const std::vector<ObjectTruth>& truth);

}  // namespace rvk

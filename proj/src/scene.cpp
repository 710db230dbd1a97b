#include <rvk/scene.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <numeric>
#include <utility>

#include <rvk/rng.hpp>
#include <rvk/velocity.hpp>

namespace rvk {
namespace {

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

[[noreturn]] void bad_field(const std::string& what) { throw InvalidSpec("scene spec: " + what); }

void validate_object(const ObjectSpec& obj, int index) {
  const std::string tag = "objects[" + std::to_string(index) + "]";
  if (obj.n_points < kMinClusterSize) {
    bad_field(tag + ".n_points must be at least " + std::to_string(kMinClusterSize));
  }
  if (!(obj.outlier_fraction >= 0.0 && obj.outlier_fraction < 0.5)) {
    bad_field(tag + ".outlier_fraction must lie in [0, 0.5)");
  }
  if (!(obj.doppler_noise_sigma >= 0.0)) {
    bad_field(tag + ".doppler_noise_sigma must be non-negative");
  }
  if (!(obj.extent(0) > 0.0 && obj.extent(1) > 0.0)) {
    bad_field(tag + ".extent must be positive");
  }
  if (!(obj.outlier_offset_range(0) >= 0.0 &&
        obj.outlier_offset_range(1) >= obj.outlier_offset_range(0))) {
    bad_field(tag + ".outlier_offset range must satisfy 0 <= min <= max");
  }
  for (double v : {obj.center(0), obj.center(1), obj.extent(0), obj.extent(1), obj.v_x, obj.v_y,
                   obj.outlier_offset_range(0), obj.outlier_offset_range(1),
                   obj.doppler_noise_sigma}) {
    if (!std::isfinite(v)) {
      bad_field(tag + " has a non-finite value");
    }
  }
  // A box containing the sensor origin has no defined bearing.
  if (std::abs(obj.center(0)) <= obj.extent(0) / 2.0 &&
      std::abs(obj.center(1)) <= obj.extent(1) / 2.0) {
    bad_field(tag + " box contains the origin");
  }
}

}  // namespace

void validate_scene_spec(const SceneSpec& spec) {
  for (int i = 0; i < static_cast<int>(spec.objects.size()); ++i) {
    validate_object(spec.objects[static_cast<std::size_t>(i)], i);
  }
  if (spec.n_noise_points < 0) {
    bad_field("n_noise_points must be non-negative");
  }
  if (!(spec.field_of_view(0) >= -kPi && spec.field_of_view(0) < spec.field_of_view(1) &&
        spec.field_of_view(1) <= kPi)) {
    bad_field("field_of_view must satisfy -pi <= lo < hi <= pi");
  }
  if (!(spec.noise_range_min > 0.0 && spec.noise_range_max >= spec.noise_range_min)) {
    bad_field("noise range must satisfy 0 < min <= max");
  }
  if (!(spec.noise_doppler(0) <= spec.noise_doppler(1))) {
    bad_field("noise_doppler must satisfy lo <= hi");
  }
  if (!(spec.min_separation > 0.0)) {
    bad_field("min_separation must be positive");
  }
  // Pairwise axis gap keeps ground-truth cluster identity unambiguous.
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.objects.size(); ++j) {
      const ObjectSpec& a = spec.objects[i];
      const ObjectSpec& b = spec.objects[j];
      const double gap_x =
          std::abs(a.center(0) - b.center(0)) - (a.extent(0) + b.extent(0)) / 2.0;
      const double gap_y =
          std::abs(a.center(1) - b.center(1)) - (a.extent(1) + b.extent(1)) / 2.0;
      if (std::max(gap_x, gap_y) <= spec.min_separation) {
        bad_field("objects " + std::to_string(i) + " and " + std::to_string(j) +
                  " are closer than min_separation");
      }
    }
  }
}

GeneratedScene generate_frame(const SceneSpec& spec) {
  validate_scene_spec(spec);

  GeneratedScene out;
  out.frame.frame_id = spec.frame_id;

  std::int64_t total = spec.n_noise_points;
  for (const ObjectSpec& obj : spec.objects) {
    total += obj.n_points;
  }
  out.frame.points.reserve(static_cast<std::size_t>(total));

  for (int i = 0; i < static_cast<int>(spec.objects.size()); ++i) {
    const ObjectSpec& obj = spec.objects[static_cast<std::size_t>(i)];
    // Stream i+1 belongs to object i; stream 0 is reserved for noise points.
    KeyedRng rng(spec.rng_seed, static_cast<std::uint64_t>(i) + 1);
    const int first = static_cast<int>(out.frame.points.size());
    const int n = obj.n_points;

    for (int k = 0; k < n; ++k) {
      RadarPoint p;
      p.x = obj.center(0) + obj.extent(0) * (rng.next_unit() - 0.5);
      p.y = obj.center(1) + obj.extent(1) * (rng.next_unit() - 0.5);
      p.z = 0.0;
      p.azimuth = to_half_open_angle(std::atan2(p.y, p.x));
      p.doppler = radial_projection(obj.v_x, obj.v_y, p.azimuth);
      out.frame.points.push_back(p);
    }

    // Gaussian doppler noise. Drawn even at sigma 0 so the stream layout --
    // and with it the positions and outlier subset -- does not move when
    // noise is switched on or off.
    for (int k = 0; k < n; ++k) {
      out.frame.points[static_cast<std::size_t>(first + k)].doppler +=
          obj.doppler_noise_sigma * rng.next_gaussian();
    }

    // Outlier subset: partial Fisher-Yates prefix, recorded ascending.
    const int m = static_cast<int>(std::floor(obj.outlier_fraction * n));
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int t = 0; t < m; ++t) {
      const int pick = t + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(n - t)));
      std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(pick)]);
    }
    std::vector<int> chosen(idx.begin(), idx.begin() + m);
    std::sort(chosen.begin(), chosen.end());

    ObjectTruth truth;
    truth.object_id = i;
    truth.v_x = obj.v_x;
    truth.v_y = obj.v_y;
    try {
      truth.heading = heading_angle(obj.v_x, obj.v_y);
    } catch (const ZeroVelocity&) {
      truth.heading = std::nullopt;
    }
    truth.first_point = first;
    truth.n_points = n;

    for (int local : chosen) {
      const double sign = rng.next_unit() < 0.5 ? -1.0 : 1.0;
      const double magnitude =
          rng.next_range(obj.outlier_offset_range(0), obj.outlier_offset_range(1));
      out.frame.points[static_cast<std::size_t>(first + local)].doppler += sign * magnitude;
      truth.outlier_indices.push_back(first + local);
    }
    out.truth.push_back(std::move(truth));
  }

  KeyedRng noise_rng(spec.rng_seed, 0);
  for (int k = 0; k < spec.n_noise_points; ++k) {
    const double theta = noise_rng.next_range(spec.field_of_view(0), spec.field_of_view(1));
    const double range = noise_rng.next_range(spec.noise_range_min, spec.noise_range_max);
    RadarPoint p;
    p.x = range * std::cos(theta);
    p.y = range * std::sin(theta);
    p.z = 0.0;
    p.azimuth = to_half_open_angle(std::atan2(p.y, p.x));
    p.doppler = noise_rng.next_range(spec.noise_doppler(0), spec.noise_doppler(1));
    out.frame.points.push_back(p);
  }

  return out;
}

namespace {

using nlohmann::json;

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* key) { return item.key() == key; })) {
      bad_field("unknown key '" + item.key() + "' in " + where);
    }
  }
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) {
    return fallback;
  }
  if (!j.at(key).is_number()) {
    bad_field(std::string(key) + " must be a number");
  }
  return j.at(key).get<double>();
}

Eigen::Vector2d get_pair(const json& j, const char* key, const Eigen::Vector2d& fallback) {
  if (!j.contains(key)) {
    return fallback;
  }
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    bad_field(std::string(key) + " must be an array of 2 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

SceneSpec load_scene_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidSpec("cannot open scene config: " + path);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidSpec("scene config parse error: " + std::string(e.what()));
  }
  if (!j.is_object()) {
    bad_field("top level must be an object");
  }
  expect_keys(j,
              {"version", "rng_seed", "frame_id", "n_noise_points", "fov_deg", "noise_range_m",
               "noise_doppler_mps", "min_separation_m", "objects"},
              "top level");
  if (!j.contains("version") || !j.at("version").is_number_integer() ||
      j.at("version").get<int>() != 1) {
    bad_field("version must be present and equal to 1");
  }

  SceneSpec spec;
  if (j.contains("rng_seed")) {
    if (!j.at("rng_seed").is_number_unsigned() && !j.at("rng_seed").is_number_integer()) {
      bad_field("rng_seed must be an integer");
    }
    spec.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  }
  spec.frame_id = static_cast<std::int64_t>(get_number(j, "frame_id", 0.0));
  spec.n_noise_points = static_cast<int>(get_number(j, "n_noise_points", 0.0));
  const Eigen::Vector2d fov_deg = get_pair(j, "fov_deg", {-70.0, 70.0});
  spec.field_of_view = fov_deg * (kPi / 180.0);
  const Eigen::Vector2d noise_range = get_pair(j, "noise_range_m", {5.0, 80.0});
  spec.noise_range_min = noise_range(0);
  spec.noise_range_max = noise_range(1);
  spec.noise_doppler = get_pair(j, "noise_doppler_mps", {-30.0, 30.0});
  spec.min_separation = get_number(j, "min_separation_m", 4.0);

  if (j.contains("objects")) {
    if (!j.at("objects").is_array()) {
      bad_field("objects must be an array");
    }
    int index = 0;
    for (const json& jo : j.at("objects")) {
      const std::string tag = "objects[" + std::to_string(index) + "]";
      if (!jo.is_object()) {
        bad_field(tag + " must be an object");
      }
      expect_keys(jo,
                  {"center_m", "extent_m", "velocity_mps", "n_points", "outlier_fraction",
                   "doppler_noise_sigma_mps", "outlier_offset_mps"},
                  tag);
      for (const char* required : {"center_m", "velocity_mps", "n_points"}) {
        if (!jo.contains(required)) {
          bad_field(tag + " is missing required key '" + required + "'");
        }
      }
      ObjectSpec obj;
      obj.center = get_pair(jo, "center_m", obj.center);
      obj.extent = get_pair(jo, "extent_m", obj.extent);
      const Eigen::Vector2d v = get_pair(jo, "velocity_mps", {0.0, 0.0});
      obj.v_x = v(0);
      obj.v_y = v(1);
      if (!jo.at("n_points").is_number_integer()) {
        bad_field(tag + ".n_points must be an integer");
      }
      obj.n_points = jo.at("n_points").get<int>();
      obj.outlier_fraction = get_number(jo, "outlier_fraction", 0.0);
      obj.doppler_noise_sigma = get_number(jo, "doppler_noise_sigma_mps", 0.0);
      obj.outlier_offset_range = get_pair(jo, "outlier_offset_mps", obj.outlier_offset_range);
      spec.objects.push_back(obj);
      ++index;
    }
  }

  validate_scene_spec(spec);
  return spec;
}

void write_truth(const std::string& path, std::int64_t frame_id,
                 const std::vector<ObjectTruth>& truth) {
  std::string text = "frame_id,object_id,v_x,v_y,heading_deg,first_point,n_points,outlier_indices\n";
  for (const ObjectTruth& t : truth) {
    append_int(text, frame_id);
    text.push_back(',');
    append_int(text, t.object_id);
    text.push_back(',');
    append_double(text, t.v_x);
    text.push_back(',');
    append_double(text, t.v_y);
    text.push_back(',');
    append_double(text, t.heading ? *t.heading * (180.0 / kPi)
                                  : std::numeric_limits<double>::quiet_NaN());
    text.push_back(',');
    append_int(text, t.first_point);
    text.push_back(',');
    append_int(text, t.n_points);
    text.push_back(',');
    for (std::size_t k = 0; k < t.outlier_indices.size(); ++k) {
      if (k > 0) {
        text.push_back(';');
      }
      append_int(text, t.outlier_indices[k]);
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

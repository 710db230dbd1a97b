#include "rvk/frame_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>
#include <system_error>
#include <unordered_map>

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

bool parse_double(std::string_view token, double& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_int(std::string_view token, std::int64_t& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void malformed_row(std::size_t line_no, const std::string& what) {
  std::ostringstream msg;
  msg << "malformed row at line " << line_no << ": " << what;
  throw FrameIoError(FrameIoErrorKind::MalformedRow, msg.str(), line_no);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FrameIoError(FrameIoErrorKind::Io,
                       "cannot open for writing: " + path.string());
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw FrameIoError(FrameIoErrorKind::Io, "write failed: " + path.string());
  }
}

std::ifstream open_for_reading(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FrameIoError(FrameIoErrorKind::Io,
                       "cannot open for reading: " + path.string());
  }
  return in;
}

}  // namespace

std::vector<Frame> read_frames(const std::filesystem::path& path) {
  std::ifstream in = open_for_reading(path);

  std::string line;
  if (!std::getline(in, line)) {
    throw FrameIoError(FrameIoErrorKind::EmptyFile,
                       "empty frame file: " + path.string());
  }
  if (line != kFrameCsvHeader) {
    throw FrameIoError(FrameIoErrorKind::MalformedHeader,
                       "expected header '" + std::string(kFrameCsvHeader) +
                           "', got '" + line + "'",
                       1);
  }

  std::vector<Frame> frames;
  std::unordered_map<std::int64_t, std::size_t> frame_slot;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.size() != 6) malformed_row(line_no, "expected 6 fields");

    std::int64_t frame_id = 0;
    if (!parse_int(fields[0], frame_id)) {
      malformed_row(line_no, "bad frame_id '" + std::string(fields[0]) + "'");
    }

    RadarPoint p;
    double* const slots[5] = {&p.x, &p.y, &p.z, &p.doppler, &p.azimuth};
    static constexpr const char* kNames[5] = {"x", "y", "z", "doppler",
                                              "azimuth"};
    for (int k = 0; k < 5; ++k) {
      if (!parse_double(fields[k + 1], *slots[k]) ||
          !std::isfinite(*slots[k])) {
        malformed_row(line_no, std::string("bad ") + kNames[k] + " '" +
                                   std::string(fields[k + 1]) + "'");
      }
    }
    if (!(p.azimuth > -kPi && p.azimuth <= kPi)) {
      malformed_row(line_no, "azimuth outside (-pi, pi]");
    }

    auto [it, inserted] = frame_slot.try_emplace(frame_id, frames.size());
    if (inserted) {
      Frame f;
      f.frame_id = frame_id;
      frames.push_back(std::move(f));
    }
    frames[it->second].points.push_back(p);
  }
  return frames;
}

void write_frames(const std::vector<Frame>& frames,
                  const std::filesystem::path& path) {
  std::string text(kFrameCsvHeader);
  text.push_back('\n');
  for (const Frame& frame : frames) {
    for (const RadarPoint& p : frame.points) {
      append_int(text, frame.frame_id);
      for (double value : {p.x, p.y, p.z, p.doppler, p.azimuth}) {
        text.push_back(',');
        append_double(text, value);
      }
      text.push_back('\n');
    }
  }
  write_text(path, text);
}

void write_estimates(const std::vector<VelocityEstimate>& estimates,
                     const std::filesystem::path& path) {
  std::string text(kEstimateCsvHeader);
  text.push_back('\n');
  for (const VelocityEstimate& e : estimates) {
    append_int(text, e.frame_id);
    text.push_back(',');
    append_int(text, e.cluster_id);
    text.push_back(',');
    append_double(text, e.v_x);
    text.push_back(',');
    append_double(text, e.v_y);
    text.push_back(',');
    const double heading_deg = e.heading
                                   ? *e.heading * (180.0 / kPi)
                                   : std::numeric_limits<double>::quiet_NaN();
    append_double(text, heading_deg);
    text.push_back(',');
    append_int(text, e.inlier_count);
    text.push_back('\n');
  }
  write_text(path, text);
}

std::vector<VelocityEstimate> read_estimates(
    const std::filesystem::path& path) {
  std::ifstream in = open_for_reading(path);

  std::string line;
  if (!std::getline(in, line)) {
    throw FrameIoError(FrameIoErrorKind::EmptyFile,
                       "empty estimate file: " + path.string());
  }
  if (line != kEstimateCsvHeader) {
    throw FrameIoError(FrameIoErrorKind::MalformedHeader,
                       "expected header '" + std::string(kEstimateCsvHeader) +
                           "', got '" + line + "'",
                       1);
  }

  std::vector<VelocityEstimate> estimates;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.size() != 6) malformed_row(line_no, "expected 6 fields");

    VelocityEstimate e;
    std::int64_t cluster_id = 0;
    std::int64_t inlier_count = 0;
    double heading_deg = 0.0;
    if (!parse_int(fields[0], e.frame_id) ||
        !parse_int(fields[1], cluster_id) || !parse_double(fields[2], e.v_x) ||
        !parse_double(fields[3], e.v_y) ||
        !parse_double(fields[4], heading_deg) ||
        !parse_int(fields[5], inlier_count)) {
      malformed_row(line_no, "unparseable field");
    }
    e.cluster_id = static_cast<int>(cluster_id);
    e.inlier_count = static_cast<int>(inlier_count);
    if (std::isnan(heading_deg)) {
      e.heading.reset();
    } else {
      e.heading = heading_deg * (kPi / 180.0);
    }
    estimates.push_back(e);
  }
  return estimates;
}

}  // namespace rvk

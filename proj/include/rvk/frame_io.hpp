#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvk/types.hpp"

namespace rvk {

// Frame CSV, format version 1.
//
//   frame_id,x,y,z,doppler,azimuth
//   0,12.5,-3.2,0,4.75,-0.2505
//
// UTF-8, '\n' line endings, '.' decimal separator, no quoting. Doubles are
// written with the shortest representation that round-trips exactly. Azimuth
// must lie in (-pi, pi], measured from the longitudinal X axis toward the
// lateral Y axis; doppler is signed, positive = receding. Rows sharing a
// frame_id form one frame; frames are returned in order of first appearance.
// Timestamps and cluster labels are in-memory attributes and never written.
inline constexpr int kFrameFormatVersion = 1;
inline constexpr const char* kFrameCsvHeader = "frame_id,x,y,z,doppler,azimuth";

// Estimate CSV written by the pipeline. heading_deg is the heading converted
// to degrees, or "nan" when the heading is undefined.
inline constexpr const char* kEstimateCsvHeader =
    "frame_id,cluster_id,v_x,v_y,heading_deg,inlier_count";

enum class FrameIoErrorKind { MalformedHeader, MalformedRow, EmptyFile, Io };

class FrameIoError : public std::runtime_error {
 public:
  FrameIoError(FrameIoErrorKind kind, const std::string& message,
               std::size_t line = 0)
      : std::runtime_error(message), kind_(kind), line_(line) {}

  FrameIoErrorKind kind() const { return kind_; }
  // 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  FrameIoErrorKind kind_;
  std::size_t line_;
};

std::vector<Frame> read_frames(const std::filesystem::path& path);
void write_frames(const std::vector<Frame>& frames,
                  const std::filesystem::path& path);

void write_estimates(const std::vector<VelocityEstimate>& estimates,
                     const std::filesystem::path& path);
// Reads an estimate CSV back. condition_ok is not serialized and comes back
// defaulted.
std::vector<VelocityEstimate> read_estimates(const std::filesystem::path& path);

}  // namespace rvk

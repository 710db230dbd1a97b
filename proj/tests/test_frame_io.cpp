#include <rvk/frame_io.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <string>
#include <vector>

#include "temp_dir.hpp"

namespace {

using rvk::Frame;
using rvk::FrameIoError;
using rvk::FrameIoErrorKind;
using rvk::RadarPoint;
using rvk_test::TempDir;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

Frame make_frame(std::int64_t id, std::vector<RadarPoint> pts) {
  Frame f;
  f.frame_id = id;
  f.points = std::move(pts);
  return f;
}

TEST(FrameIo, RoundTripIsExact) {
  TempDir dir;
  const std::string path = dir.file("frames.csv");

  std::vector<Frame> frames;
  frames.push_back(make_frame(0, {{1.5, -2.25, 0.125, 10.0, 0.5},
                                  {0.1, 1.0 / 3.0, -1e-300, -17.25, rvk::kPi}}));
  frames.push_back(make_frame(42, {{100.0, -0.0, 5e300, 1e-12, -3.14159}}));

  rvk::write_frames(frames, path);
  const std::vector<Frame> back = rvk::read_frames(path);

  ASSERT_EQ(back.size(), frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_EQ(back[i].frame_id, frames[i].frame_id);
    ASSERT_EQ(back[i].points.size(), frames[i].points.size());
    for (std::size_t k = 0; k < frames[i].points.size(); ++k) {
      const RadarPoint& a = frames[i].points[k];
      const RadarPoint& b = back[i].points[k];
      EXPECT_EQ(a.x, b.x);
      EXPECT_EQ(a.y, b.y);
      EXPECT_EQ(a.z, b.z);
      EXPECT_EQ(a.doppler, b.doppler);
      EXPECT_EQ(a.azimuth, b.azimuth);
    }
  }
}

TEST(FrameIo, GroupsRowsByFirstAppearance) {
  TempDir dir;
  const std::string path = dir.file("frames.csv");
  write_file(path,
             "frame_id,x,y,z,doppler,azimuth\n"
             "5,1,0,0,2,0.1\n"
             "7,2,0,0,3,0.2\n"
             "5,3,0,0,4,0.3\n");
  const auto frames = rvk::read_frames(path);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0].frame_id, 5);
  EXPECT_EQ(frames[0].points.size(), 2u);
  EXPECT_EQ(frames[1].frame_id, 7);
  EXPECT_EQ(frames[1].points.size(), 1u);
  EXPECT_DOUBLE_EQ(frames[0].points[1].x, 3.0);
}

TEST(FrameIo, MissingFileIsIoError) {
  try {
    rvk::read_frames("/no/such/file.csv");
    FAIL() << "expected FrameIoError";
  } catch (const FrameIoError& e) {
    EXPECT_EQ(e.kind(), FrameIoErrorKind::Io);
  }
}

TEST(FrameIo, EmptyFileIsDetected) {
  TempDir dir;
  const std::string path = dir.file("empty.csv");
  write_file(path, "");
  try {
    rvk::read_frames(path);
    FAIL() << "expected FrameIoError";
  } catch (const FrameIoError& e) {
    EXPECT_EQ(e.kind(), FrameIoErrorKind::EmptyFile);
  }
}

TEST(FrameIo, WrongHeaderIsRejected) {
  TempDir dir;
  const std::string path = dir.file("bad.csv");
  write_file(path, "frame,x,y,z,doppler,azimuth\n1,0,0,0,0,0\n");
  try {
    rvk::read_frames(path);
    FAIL() << "expected FrameIoError";
  } catch (const FrameIoError& e) {
    EXPECT_EQ(e.kind(), FrameIoErrorKind::MalformedHeader);
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(FrameIo, MalformedRowsCarryLineNumbers) {
  const std::string header = "frame_id,x,y,z,doppler,azimuth\n";
  const std::vector<std::string> bad_rows = {
      "1,2,3,4,5",           // five fields
      "1,2,3,4,5,6,7",       // seven fields
      "x,2,3,4,5,0.5",       // bad frame id
      "1,abc,3,4,5,0.5",     // bad double
      "1,nan,3,4,5,0.5",     // non-finite
      "1,2,3,4,inf,0.5",     // non-finite
      "1,2,3,4,5,4.0",       // azimuth beyond pi
      "1,2,3,4,5,-3.1415926535897932",  // azimuth at -pi, outside (-pi, pi]
      "1,2,3,4,5,",          // empty azimuth
  };
  for (const std::string& row : bad_rows) {
    TempDir dir;
    const std::string path = dir.file("bad.csv");
    write_file(path, header + "1,2,3,4,5,0.5\n" + row + "\n");
    try {
      rvk::read_frames(path);
      FAIL() << "expected FrameIoError for row: " << row;
    } catch (const FrameIoError& e) {
      EXPECT_EQ(e.kind(), FrameIoErrorKind::MalformedRow) << row;
      EXPECT_EQ(e.line(), 3u) << row;
      EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
  }
}

TEST(FrameIo, AzimuthAtPiIsAccepted) {
  TempDir dir;
  const std::string path = dir.file("pi.csv");
  write_file(path, "frame_id,x,y,z,doppler,azimuth\n1,-5,0,0,2,3.141592653589793\n");
  const auto frames = rvk::read_frames(path);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_DOUBLE_EQ(frames[0].points[0].azimuth, rvk::kPi);
}

TEST(EstimateIo, RoundTripWithAndWithoutHeading) {
  TempDir dir;
  const std::string path = dir.file("est.csv");

  std::vector<rvk::VelocityEstimate> estimates(2);
  estimates[0].frame_id = 3;
  estimates[0].cluster_id = 0;
  estimates[0].v_x = 10.125;
  estimates[0].v_y = -2.5;
  estimates[0].heading = -0.2449786631268641;
  estimates[0].inlier_count = 56;
  estimates[1].frame_id = 3;
  estimates[1].cluster_id = 1;
  estimates[1].v_x = 0.0;
  estimates[1].v_y = 0.0;
  estimates[1].heading = std::nullopt;  // serialized as nan
  estimates[1].inlier_count = 4;

  rvk::write_estimates(estimates, path);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, std::string(rvk::kEstimateCsvHeader));

  const auto back = rvk::read_estimates(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].frame_id, 3);
  EXPECT_EQ(back[0].cluster_id, 0);
  EXPECT_EQ(back[0].v_x, 10.125);
  EXPECT_EQ(back[0].v_y, -2.5);
  ASSERT_TRUE(back[0].heading.has_value());
  EXPECT_NEAR(*back[0].heading, *estimates[0].heading, 1e-12);
  EXPECT_EQ(back[0].inlier_count, 56);
  EXPECT_FALSE(back[1].heading.has_value());
  EXPECT_EQ(back[1].inlier_count, 4);
}

TEST(FrameIo, HeaderConstantsMatchFormat) {
  EXPECT_EQ(std::string(rvk::kFrameCsvHeader), "frame_id,x,y,z,doppler,azimuth");
  EXPECT_EQ(std::string(rvk::kEstimateCsvHeader),
            "frame_id,cluster_id,v_x,v_y,heading_deg,inlier_count");
}

}  // namespace

// Copyright 2026 The CalliSense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "callisense/ingest.h"

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "callisense/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace callisense {
namespace {

// Independent solve of the 8-unknown system by Gaussian elimination with
// partial pivoting in extended precision.
std::array<long double, 9> OracleHomography(const Quad& src, const Quad& dst) {
  long double a[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    const long double x = src[i].x, y = src[i].y, u = dst[i].x, v = dst[i].y;
    long double r0[9] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    long double r1[9] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
    for (int k = 0; k < 9; ++k) {
      a[2 * i][k] = r0[k];
      a[2 * i + 1][k] = r1[k];
    }
  }
  for (int col = 0; col < 8; ++col) {
    int piv = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    for (int k = 0; k < 9; ++k) std::swap(a[col][k], a[piv][k]);
    for (int r = 0; r < 8; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (int k = col; k < 9; ++k) a[r][k] -= f * a[col][k];
    }
  }
  std::array<long double, 9> h{};
  for (int i = 0; i < 8; ++i) h[i] = a[i][8] / a[i][i];
  h[8] = 1;
  return h;
}

Quad Rect(double w, double h) {
  return {Vec2{0, 0}, Vec2{w, 0}, Vec2{w, h}, Vec2{0, h}};
}

TEST(HomographyTest, UnitSquareToItselfIsIdentity) {
  const Homography h = ComputeHomography(Rect(1, 1), Rect(1, 1));
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      EXPECT_NEAR(h.m[r][c], r == c ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(HomographyTest, ShiftedSquareIsTranslation) {
  Quad dst = Rect(50, 50);
  for (Vec2& p : dst) p = p + Vec2{10, 5};
  const Homography h = ComputeHomography(Rect(50, 50), dst);
  EXPECT_NEAR(h.m[0][2], 10, 1e-9);
  EXPECT_NEAR(h.m[1][2], 5, 1e-9);
  EXPECT_NEAR(h.m[0][0], 1, 1e-12);
  EXPECT_NEAR(h.m[2][0], 0, 1e-12);
  EXPECT_EQ(h.m[2][2], 1.0);
}

TEST(HomographyTest, GeneralQuadMatchesIndependentSolve) {
  const Quad src{Vec2{0, 0}, Vec2{100, 0}, Vec2{120, 80}, Vec2{-10, 90}};
  const Quad dst = Rect(100, 100);
  const Homography h = ComputeHomography(src, dst);
  const auto oracle = OracleHomography(src, dst);
  for (int i = 0; i < 9; ++i) {
    EXPECT_NEAR(h.m[i / 3][i % 3], static_cast<double>(oracle[i]), 1e-12);
  }
  for (int k = 0; k < 4; ++k) {
    EXPECT_LT(Distance(h.Apply(src[k]), dst[k]), 1e-9);
  }
}

TEST(HomographyTest, RandomQuadsMapCornersAndMatchOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> size(50, 800);
  int tested = 0;
  while (tested < 300) {
    const Quad dst = Rect(size(rng), size(rng));
    std::uniform_real_distribution<double> jitter(-0.3 * dst[2].x,
                                                  0.3 * dst[2].x);
    Quad src = dst;
    for (Vec2& p : src) p = p + Vec2{jitter(rng), jitter(rng)};
    try {
      CheckQuad(src, "src");
    } catch (const Error&) {
      continue;
    }
    const Homography h = ComputeHomography(src, dst);
    const auto oracle = OracleHomography(src, dst);
    for (int k = 0; k < 4; ++k) {
      EXPECT_LT(Distance(h.Apply(src[k]), dst[k]), 1e-9);
    }
    for (int i = 0; i < 9; ++i) {
      EXPECT_NEAR(h.m[i / 3][i % 3], static_cast<double>(oracle[i]),
                  1e-9 * (1 + std::fabs(static_cast<double>(oracle[i]))));
    }
    const Homography inv = h.Inverse();
    for (int k = 0; k < 4; ++k) {
      EXPECT_LT(Distance(inv.Apply(dst[k]), src[k]), 1e-8);
    }
    ++tested;
  }
}

TEST(HomographyTest, DegenerateQuadsAreRejected) {
  const Quad dup{Vec2{0, 0}, Vec2{0, 0}, Vec2{10, 10}, Vec2{0, 10}};
  const Quad collinear{Vec2{0, 0}, Vec2{5, 0}, Vec2{10, 0}, Vec2{0, 10}};
  for (const Quad& q : {dup, collinear}) {
    try {
      ComputeHomography(q, Rect(10, 10));
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kDegenerateQuad);
    }
  }
}

TEST(CorrectPerspectiveTest, IdentityReproducesInput) {
  GrayImage img(31, 17);
  std::mt19937 rng(5);
  for (int y = 0; y < 17; ++y) {
    for (int x = 0; x < 31; ++x) img.at(x, y) = static_cast<uint8_t>(rng() % 256);
  }
  EXPECT_EQ(CorrectPerspective(img, Homography::Identity(), 31, 17), img);
}

TEST(CorrectPerspectiveTest, TranslationShiftsContent) {
  GrayImage img(40, 30);
  img.at(20, 15) = 0;
  img.at(25, 12) = 7;
  Homography h = Homography::Identity();
  h.m[0][2] = -6;
  h.m[1][2] = -4;
  const GrayImage out = CorrectPerspective(img, h, 40, 30);
  EXPECT_EQ(out.at(14, 11), 0);
  EXPECT_EQ(out.at(19, 8), 7);
  EXPECT_EQ(out.at(20, 15), 255);
  // Destination pixels whose source lies off the frame read white.
  EXPECT_EQ(out.at(39, 29), 255);
}

TEST(CorrectPerspectiveTest, WarpThenCorrectRecoversDiscCentroid) {
  const Quad src{Vec2{30, 20}, Vec2{250, 45}, Vec2{270, 240}, Vec2{15, 230}};
  const Homography h = ComputeHomography(src, Rect(200, 200));
  const Vec2 c{83.3, 121.7};
  GrayImage cam(300, 300);
  for (int y = 0; y < 300; ++y) {
    for (int x = 0; x < 300; ++x) {
      if (Distance(h.Apply({x + 0.5, y + 0.5}), c) <= 15) cam.at(x, y) = 0;
    }
  }
  const InkMask ink = Binarize(CorrectPerspective(cam, h, 200, 200), 100);
  double sx = 0, sy = 0, n = 0;
  for (int y = 0; y < 200; ++y) {
    for (int x = 0; x < 200; ++x) {
      if (ink.at(x, y)) {
        sx += x + 0.5;
        sy += y + 0.5;
        ++n;
      }
    }
  }
  ASSERT_GT(n, 0);
  EXPECT_LT(Distance({sx / n, sy / n}, c), 0.5);
}

TEST(BinarizeTest, ThresholdRule) {
  GrayImage white(4, 4, 255);
  EXPECT_EQ(Binarize(white, 100).CountInk(), 0u);
  GrayImage black(4, 4, 0);
  EXPECT_EQ(Binarize(black, 100).CountInk(), 16u);
  GrayImage checker(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) checker.at(x, y) = (x + y) % 2 ? 255 : 0;
  }
  const InkMask m = Binarize(checker, 100, 42);
  EXPECT_EQ(m.t_ms(), 42);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) EXPECT_EQ(m.at(x, y), (x + y) % 2 == 0);
  }
  GrayImage edge(2, 1);
  edge.at(0, 0) = 99;
  edge.at(1, 0) = 100;
  const InkMask e = Binarize(edge, 100);
  EXPECT_TRUE(e.at(0, 0));
  EXPECT_FALSE(e.at(1, 0));
}

TEST(CsvTest, SensorRoundTrip) {
  const std::string text =
      "t_ms,yaw_deg,pitch_deg,roll_deg,pressure_raw\n"
      "0,10.5000,-3.2500,1.0000,100\n"
      "10,-170.0000,0.0000,0.0000,1023\n";
  const SensorStream s = ParseSensorCsv(text, "sensor.csv");
  ASSERT_EQ(s.samples.size(), 2u);
  EXPECT_EQ(s.samples[1].orientation.yaw_deg, -170);
  EXPECT_EQ(s.samples[1].pressure_raw, 1023);
  EXPECT_EQ(SensorCsv(s), text);
}

TEST(CsvTest, AcceptsCrlfAndTrailingBlankLines) {
  const TipTrace t = ParseTipCsv("t_ms,gap_px\r\n0,1.5\r\n5,2\r\n\r\n", "tip");
  ASSERT_EQ(t.samples.size(), 2u);
  EXPECT_EQ(t.samples[1].gap_px, 2.0);
  EXPECT_EQ(TipCsv(t), "t_ms,gap_px\n0,1.500\n5,2.000\n");
}

TEST(CsvTest, PressureOutOfRangeIsBadRowWithLineNumber) {
  try {
    ParseSensorCsv(
        "t_ms,yaw_deg,pitch_deg,roll_deg,pressure_raw\n0,0,0,0,1\n"
        "10,0,0,0,2000\n",
        "sensor.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBadCsvRow);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(CsvTest, OtherRowErrors) {
  const char* bad_sensor[] = {
      "t_ms,yaw,pitch,roll,pressure\n0,0,0,0,0\n",            // header
      "t_ms,yaw_deg,pitch_deg,roll_deg,pressure_raw\n0,0,0,0\n",  // fields
      "t_ms,yaw_deg,pitch_deg,roll_deg,pressure_raw\n0,x,0,0,0\n",
      "t_ms,yaw_deg,pitch_deg,roll_deg,pressure_raw\n0,0,95,0,0\n",
  };
  for (const char* text : bad_sensor) {
    EXPECT_THROW(ParseSensorCsv(text, "s"), Error) << text;
  }
  try {
    ParseTipCsv("t_ms,gap_px\n0,-1\n", "tip");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBadCsvRow);
  }
  try {
    ParseTipCsv("t_ms,gap_px\n5,1\n5,1\n", "tip");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonMonotoneTime);
  }
}

TEST(ClockTest, ShiftIsAPureTranslation) {
  std::mt19937_64 rng(8);
  SensorStream s;
  int64_t t = 0;
  for (int i = 0; i < 50; ++i) {
    t += 1 + static_cast<int64_t>(rng() % 20);
    s.samples.push_back({t, Orientation::FromDegrees(double(rng() % 360), 0, 0),
                         static_cast<int>(rng() % 1024)});
  }
  const SensorStream moved = ShiftClock(s, 1234);
  for (size_t i = 0; i < s.samples.size(); ++i) {
    EXPECT_EQ(moved.samples[i].t_ms, s.samples[i].t_ms + 1234);
  }
  const SensorStream back = ShiftClock(moved, -1234);
  for (size_t i = 0; i < s.samples.size(); ++i) {
    EXPECT_EQ(back.samples[i], s.samples[i]);
  }
}

class LoadInputsTest : public ::testing::Test {
 protected:
  void Write(int64_t sensor_offset, const std::string& sensor_rows) {
    GrayImage frame(8, 6);
    WritePgm(dir_ / "f0.pgm", frame);
    WritePgm(dir_ / "f1.pgm", frame);
    FrameManifest m;
    m.frames = {{"f0.pgm", 1000}, {"f1.pgm", 1033}};
    m.dst_w = 8;
    m.dst_h = 6;
    m.paper_quad = m.DstRect();
    m.sensor_log = "sensor.csv";
    m.tip_trace = "tip.csv";
    m.sensor_clock_offset_ms = sensor_offset;
    WriteFileBytes(dir_ / "manifest.json", ManifestToJson(m).dump(2));
    WriteFileBytes(dir_ / "sensor.csv",
                   "t_ms,yaw_deg,pitch_deg,roll_deg,pressure_raw\n" + sensor_rows);
    WriteFileBytes(dir_ / "tip.csv", "t_ms,gap_px\n1000,30\n1010,2\n");
  }

  testing::ScratchDir dir_;
};

TEST_F(LoadInputsTest, ZeroOffsetsKeepRelativeTimes) {
  Write(0, "1000,0,0,0,1\n1020,0,0,0,2\n");
  const LoadedInputs in = LoadInputs(dir_ / "manifest.json");
  ASSERT_EQ(in.frames.size(), 2u);
  EXPECT_EQ(in.frames[0].t_ms, 0);
  EXPECT_EQ(in.frames[1].t_ms, 33);
  EXPECT_EQ(in.sensor.samples[1].t_ms, 20);
  EXPECT_EQ(in.tip.samples[1].t_ms, 10);
  EXPECT_EQ(in.sensor_dropped, 0);
}

TEST_F(LoadInputsTest, NegativeOffsetMovesSensorEarlier) {
  Write(-120, "1200,0,0,0,1\n1300,0,0,0,2\n");
  const LoadedInputs in = LoadInputs(dir_ / "manifest.json");
  EXPECT_EQ(in.sensor.samples[0].t_ms, 80);
  EXPECT_EQ(in.sensor.samples[1].t_ms, 180);
}

TEST_F(LoadInputsTest, SamplesFarOutsideTheFramesAreDropped) {
  Write(0, "900,0,0,0,1\n1010,0,0,0,1\n1533,0,0,0,2\n1534,0,0,0,3\n");
  const LoadedInputs in = LoadInputs(dir_ / "manifest.json");
  ASSERT_EQ(in.sensor.samples.size(), 2u);
  EXPECT_EQ(in.sensor.samples[1].t_ms, 533);
  EXPECT_EQ(in.sensor_dropped, 2);
}

TEST_F(LoadInputsTest, MissingSensorFileIsNamed) {
  Write(0, "");
  std::filesystem::remove(dir_ / "sensor.csv");
  try {
    LoadInputs(dir_ / "manifest.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingFile);
    EXPECT_NE(std::string(e.what()).find("sensor.csv"), std::string::npos);
  }
}

TEST(ManifestTest, RejectsUnknownKeysAndUnorderedFrames) {
  FrameManifest m;
  m.frames = {{"a.pgm", 0}, {"b.pgm", 10}};
  m.dst_w = 4;
  m.dst_h = 4;
  m.paper_quad = m.DstRect();
  m.sensor_log = "s.csv";
  m.tip_trace = "t.csv";
  Json doc = ManifestToJson(m);
  EXPECT_NO_THROW(ParseManifest(doc));
  Json extra = doc;
  extra["camera"] = "B";
  EXPECT_THROW(ParseManifest(extra), Error);
  Json unordered = doc;
  unordered["frames"][1]["t_ms"] = 0;
  try {
    ParseManifest(unordered);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonMonotoneTime);
  }
  Json flat = doc;
  flat["paper_quad"] = Json::array({Json::array({0, 0}), Json::array({1, 0}),
                                    Json::array({2, 0}), Json::array({0, 1})});
  try {
    ParseManifest(flat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateQuad);
  }
}

}  // namespace
}  // namespace callisense

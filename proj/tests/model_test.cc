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

#include "callisense/model.h"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "callisense/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace callisense {
namespace {

using ::callisense::testing::MinimalSession;
using ::callisense::testing::Point;

ErrorKind KindOf(const Json& doc) {
  try {
    ValidateSession(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "document validated";
  return ErrorKind::kIo;
}

std::string MessageOf(const Json& doc) {
  try {
    ValidateSession(doc);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(Vec2Test, Arithmetic) {
  const Vec2 a{1, 2};
  const Vec2 b{4, 6};
  EXPECT_EQ(a + b, (Vec2{5, 8}));
  EXPECT_EQ(b - a, (Vec2{3, 4}));
  EXPECT_EQ(2.0 * a, (Vec2{2, 4}));
  EXPECT_DOUBLE_EQ(Distance(a, b), 5.0);
  EXPECT_DOUBLE_EQ(Norm(Vec2{3, 4}), 5.0);
  EXPECT_EQ(Lerp(a, b, 0.5), (Vec2{2.5, 4}));
  EXPECT_EQ(PixelCenter({3, 7}), (Vec2{3.5, 7.5}));
}

TEST(OrientationTest, YawIsNormalizedIntoHalfOpenRange) {
  EXPECT_DOUBLE_EQ(NormalizeYawDeg(180), 180);
  EXPECT_DOUBLE_EQ(NormalizeYawDeg(-180), 180);
  EXPECT_DOUBLE_EQ(NormalizeYawDeg(190), -170);
  EXPECT_DOUBLE_EQ(NormalizeYawDeg(540), 180);
  EXPECT_DOUBLE_EQ(NormalizeYawDeg(-721), -1);
  EXPECT_DOUBLE_EQ(Orientation::FromDegrees(370, 5, 6).yaw_deg, 10);
}

TEST(OrientationTest, NormalizedYawStaysInRangeForRandomInput) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5000, 5000);
  for (int i = 0; i < 10000; ++i) {
    const double in = u(rng);
    const double out = NormalizeYawDeg(in);
    EXPECT_GT(out, -180);
    EXPECT_LE(out, 180);
    const double turns = (in - out) / 360;
    EXPECT_NEAR(turns, std::round(turns), 1e-9);
  }
}

TEST(OrientationTest, RejectsBadPitchAndNonFinite) {
  EXPECT_THROW(Orientation::FromDegrees(0, 90.5, 0), Error);
  EXPECT_THROW(Orientation::FromDegrees(0, -91, 0), Error);
  EXPECT_THROW(
      Orientation::FromDegrees(std::numeric_limits<double>::quiet_NaN(), 0, 0),
      Error);
  EXPECT_NO_THROW(Orientation::FromDegrees(0, 90, 0));
}

TEST(ValidateSessionTest, MinimalDocumentYieldsOneStroke) {
  const Session s = ValidateSession(SerializeSession(MinimalSession()));
  ASSERT_EQ(s.strokes.size(), 1u);
  EXPECT_EQ(s.strokes[0].skeleton.size(), 2u);
  EXPECT_EQ(s, MinimalSession());
}

TEST(ValidateSessionTest, StrokeIndexGapIsInvariantError) {
  Session s = MinimalSession();
  Stroke second = s.strokes[0];
  second.index = 1;
  second.contact = {200, 300, 1};
  for (EnrichedPoint& p : second.skeleton) p.t_ms += 200;
  s.strokes.push_back(second);
  Json doc = SerializeSession(s);
  ASSERT_NO_THROW(ValidateSession(doc));
  doc["strokes"][1]["index"] = 2;
  EXPECT_EQ(KindOf(doc), ErrorKind::kInvariant);
  EXPECT_NE(MessageOf(doc).find("stroke index gap"), std::string::npos);
}

TEST(ValidateSessionTest, DecreasingArcPosIsInvariantError) {
  Session s = MinimalSession();
  s.strokes[0].skeleton = {Point(0, 0, 0, 0), Point(1, 0, 10, 0.5),
                           Point(2, 0, 20, 0.4), Point(3, 0, 30, 1)};
  const Json doc = SerializeSession(s);
  EXPECT_EQ(KindOf(doc), ErrorKind::kInvariant);
  EXPECT_NE(MessageOf(doc).find("strokes[0].skeleton[2].arc_pos"),
            std::string::npos);
}

TEST(ValidateSessionTest, EmptyStrokeListIsRejected) {
  Session s = MinimalSession();
  s.strokes.clear();
  EXPECT_EQ(KindOf(SerializeSession(s)), ErrorKind::kInvariant);
}

TEST(ValidateSessionTest, SchemaIsClosed) {
  Json doc = SerializeSession(MinimalSession());
  doc["extra"] = 1;
  EXPECT_EQ(KindOf(doc), ErrorKind::kSchema);

  doc = SerializeSession(MinimalSession());
  doc["strokes"][0]["skeleton"][0]["bogus"] = true;
  EXPECT_EQ(KindOf(doc), ErrorKind::kSchema);
  EXPECT_NE(MessageOf(doc).find("strokes[0].skeleton[0]"), std::string::npos);

  doc = SerializeSession(MinimalSession());
  doc.erase("canvas");
  EXPECT_EQ(KindOf(doc), ErrorKind::kSchema);

  doc = SerializeSession(MinimalSession());
  doc["schema_version"] = "2";
  EXPECT_EQ(KindOf(doc), ErrorKind::kSchema);
}

TEST(ValidateSessionTest, SingleFieldMutationsAreCaught) {
  struct Mutation {
    const char* name;
    void (*apply)(Json&);
    ErrorKind kind;
  };
  const Mutation mutations[] = {
      {"role", [](Json& d) { d["role"] = "parent"; }, ErrorKind::kSchema},
      {"canvas", [](Json& d) { d["canvas"]["w"] = 0; }, ErrorKind::kInvariant},
      {"n_tiers", [](Json& d) { d["n_tiers"] = 1; }, ErrorKind::kInvariant},
      {"contact", [](Json& d) { d["strokes"][0]["contact"]["end_ms"] = 0; },
       ErrorKind::kInvariant},
      {"slack",
       [](Json& d) { d["strokes"][0]["contact"]["slack_ms"] = -1; },
       ErrorKind::kInvariant},
      {"time order",
       [](Json& d) { d["strokes"][0]["skeleton"][1]["t_ms"] = 0; },
       ErrorKind::kInvariant},
      {"time past contact",
       [](Json& d) { d["strokes"][0]["skeleton"][1]["t_ms"] = 101; },
       ErrorKind::kInvariant},
      {"first arc",
       [](Json& d) { d["strokes"][0]["skeleton"][0]["arc_pos"] = 0.1; },
       ErrorKind::kInvariant},
      {"last arc",
       [](Json& d) { d["strokes"][0]["skeleton"][1]["arc_pos"] = 0.9; },
       ErrorKind::kInvariant},
      {"pressure",
       [](Json& d) { d["strokes"][0]["skeleton"][0]["pressure_raw"] = 1024; },
       ErrorKind::kInvariant},
      {"tier",
       [](Json& d) { d["strokes"][0]["skeleton"][0]["speed_tier"] = 5; },
       ErrorKind::kInvariant},
      {"tilt",
       [](Json& d) { d["strokes"][0]["skeleton"][0]["tilt"]["dx"] = 1.1; },
       ErrorKind::kInvariant},
      {"speed",
       [](Json& d) { d["strokes"][0]["skeleton"][0]["speed_px_s"] = -1; },
       ErrorKind::kInvariant},
      {"type", [](Json& d) { d["frame_count"] = "3"; }, ErrorKind::kSchema},
  };
  for (const Mutation& m : mutations) {
    Json doc = SerializeSession(MinimalSession());
    m.apply(doc);
    EXPECT_EQ(KindOf(doc), m.kind) << m.name;
  }
}

TEST(ValidateSessionTest, SlackExtendsTheAllowedSkeletonSpan) {
  Session s = MinimalSession();
  s.strokes[0].slack_ms = 30;
  s.strokes[0].skeleton[1].t_ms = 130;
  EXPECT_NO_THROW(ValidateSession(SerializeSession(s)));
  s.strokes[0].skeleton[1].t_ms = 131;
  EXPECT_THROW(ValidateSession(SerializeSession(s)), Error);
}

TEST(ValidateSessionTest, AllZeroArcPositionsAreAccepted) {
  Session s = MinimalSession();
  s.strokes[0].skeleton[1].arc_pos = 0;
  EXPECT_NO_THROW(ValidateSession(SerializeSession(s)));
}

TEST(SerializeSessionTest, RoundTripAndByteFixpoint) {
  Session s = MinimalSession();
  s.frames_dir = "s1.frames";
  s.role = Role::kStudent;
  s.character_label = "永";
  s.arrow_zero_deg = -33.25;
  s.strokes[0].skeleton[0].tilt = {0.25, -0.5};
  s.strokes[0].skeleton[0].rotation_deg = 0;
  s.strokes[0].skeleton[1].rotation_deg = 12.5;
  const std::string once = SessionToString(s);
  const Session back = ParseSession(once);
  EXPECT_EQ(back, s);
  EXPECT_EQ(SessionToString(back), once);
  EXPECT_EQ(SessionToString(s), once);
  EXPECT_EQ(once.back(), '\n');
}

TEST(SerializeSessionTest, KeysAppearInDocumentedOrder) {
  const std::string text = SessionToString(MinimalSession());
  const char* keys[] = {"\"schema_version\"", "\"id\"",        "\"role\"",
                        "\"character_label\"", "\"canvas\"",  "\"frame_count\"",
                        "\"config_fingerprint\"", "\"strokes\""};
  size_t last = 0;
  for (const char* k : keys) {
    const size_t pos = text.find(k);
    ASSERT_NE(pos, std::string::npos) << k;
    EXPECT_GT(pos, last) << k;
    last = pos;
  }
}

TEST(ParseSessionTest, MalformedJsonIsSchemaError) {
  try {
    ParseSession("{not json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSchema);
  }
}

}  // namespace
}  // namespace callisense

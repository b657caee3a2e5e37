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

// Core domain types shared by every stage of the pipeline, and the versioned
// session document they persist to.
//
// All coordinates live in the corrected top-down canvas (pixels, y grows
// downward). All times are integer milliseconds on the unified session clock,
// whose origin is the first overhead frame.

#ifndef CALLISENSE_MODEL_H_
#define CALLISENSE_MODEL_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace callisense {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1";
inline constexpr int kPressureRawMax = 1023;

struct Vec2 {
  double x = 0;
  double y = 0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
};

double Norm(Vec2 v);
double Distance(Vec2 a, Vec2 b);
Vec2 Lerp(Vec2 a, Vec2 b, double t);

// Integer pixel grid coordinate. Pixel (x, y) covers [x, x+1) x [y, y+1), so
// its center is (x + 0.5, y + 0.5) in canvas space.
struct PixelPos {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const PixelPos&, const PixelPos&) = default;
};

inline Vec2 PixelCenter(PixelPos p) { return {p.x + 0.5, p.y + 0.5}; }

// Maps any finite angle into (-180, 180].
double NormalizeYawDeg(double deg);

struct Orientation {
  double yaw_deg = 0;
  double pitch_deg = 0;
  double roll_deg = 0;

  // Normalizes yaw into (-180, 180]; throws InvariantError on non-finite
  // input or pitch outside [-90, 90].
  static Orientation FromDegrees(double yaw, double pitch, double roll);

  friend bool operator==(const Orientation&, const Orientation&) = default;
};

struct SensorSample {
  int64_t t_ms = 0;
  Orientation orientation;
  int pressure_raw = 0;

  friend bool operator==(const SensorSample&, const SensorSample&) = default;
};

struct SensorStream {
  std::vector<SensorSample> samples;
};

struct ContactInterval {
  int64_t start_ms = 0;
  int64_t end_ms = 0;
  int index = 0;

  int64_t duration_ms() const { return end_ms - start_ms; }
  friend bool operator==(const ContactInterval&,
                         const ContactInterval&) = default;
};

struct TimedPixel {
  PixelPos pos;
  int64_t t_ms = 0;

  friend bool operator==(const TimedPixel&, const TimedPixel&) = default;
};

// One skeleton point with every per-point measurement attached.
struct EnrichedPoint {
  Vec2 pos;
  int64_t t_ms = 0;
  double speed_px_s = 0;
  int pressure_raw = 0;
  int pressure_tier = 0;
  int speed_tier = 0;
  // Brush axis projected on the paper; |tilt| = sin(tilt from vertical).
  Vec2 tilt;
  // Yaw relative to the stroke's first point.
  double rotation_deg = 0;
  double arc_pos = 0;

  friend bool operator==(const EnrichedPoint&, const EnrichedPoint&) = default;
};

struct Stroke {
  int index = 0;
  ContactInterval contact;
  // Pen-up tolerance used when assigning late ink to this stroke. Skeleton
  // times must lie in [contact.start_ms, contact.end_ms + slack_ms].
  int64_t slack_ms = 0;
  std::vector<EnrichedPoint> skeleton;
  int64_t pixel_count = 0;

  friend bool operator==(const Stroke&, const Stroke&) = default;
};

enum class Role { kTeacher, kStudent };

std::string_view RoleName(Role role);

struct Session {
  std::string schema_version{kSchemaVersion};
  std::string id;
  Role role = Role::kTeacher;
  std::string character_label;
  int canvas_w = 0;
  int canvas_h = 0;
  int frame_count = 0;
  std::string config_fingerprint;
  int n_tiers = 5;
  // Display-only zero direction for rotation arrows, in degrees measured in
  // canvas space (atan2(dy, dx)).
  double arrow_zero_deg = 0;
  // Sidecar glyph mask image, relative to the session file.
  std::string glyph_mask;
  // Directory of retained corrected frames, relative to the session file.
  std::optional<std::string> frames_dir;
  std::vector<Stroke> strokes;

  friend bool operator==(const Session&, const Session&) = default;
};

struct Rect {
  double x0 = 0;
  double y0 = 0;
  double x1 = 0;
  double y1 = 0;

  Vec2 Center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

// The glyph's topmost, bottommost, leftmost and rightmost ink pixels plus the
// axis-aligned rectangle they span.
struct ExtremityBox {
  Vec2 top;
  Vec2 bottom;
  Vec2 left;
  Vec2 right;
  Rect rect;

  friend bool operator==(const ExtremityBox&, const ExtremityBox&) = default;
};

// Parses and checks a session document. Throws SchemaError for structural
// problems and InvariantError for rule violations; both name the JSON path.
Session ValidateSession(const Json& doc);
Session ParseSession(std::string_view text);

Json SerializeSession(const Session& session);
// Byte-stable text form (two-space indent, trailing LF).
std::string SessionToString(const Session& session);

Json ToJson(Vec2 v);
Json ToJson(const ExtremityBox& box);

}  // namespace callisense

#endif  // CALLISENSE_MODEL_H_

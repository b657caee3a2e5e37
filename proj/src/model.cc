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
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

#include "callisense/error.h"

namespace callisense {

double Norm(Vec2 v) { return std::hypot(v.x, v.y); }

double Distance(Vec2 a, Vec2 b) { return Norm(a - b); }

Vec2 Lerp(Vec2 a, Vec2 b, double t) {
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

double NormalizeYawDeg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r > 180.0) r -= 360.0;
  if (r <= -180.0) r += 360.0;
  return r;
}

Orientation Orientation::FromDegrees(double yaw, double pitch, double roll) {
  if (!std::isfinite(yaw) || !std::isfinite(pitch) || !std::isfinite(roll)) {
    throw Error(ErrorKind::kInvariant, "orientation must be finite");
  }
  if (pitch < -90.0 || pitch > 90.0) {
    throw Error(ErrorKind::kInvariant, "pitch outside [-90, 90]");
  }
  return Orientation{NormalizeYawDeg(yaw), pitch, roll};
}

std::string_view RoleName(Role role) {
  return role == Role::kTeacher ? "teacher" : "student";
}

namespace {

[[noreturn]] void SchemaFail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::kSchema, path + ": " + msg);
}

[[noreturn]] void InvariantFail(const std::string& path,
                                const std::string& msg) {
  throw Error(ErrorKind::kInvariant, path + ": " + msg);
}

// Checks that `obj` is an object with exactly `keys`.
const Json& ClosedObject(const Json& obj, const std::string& path,
                         std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) SchemaFail(path, "expected object");
  for (std::string_view key : keys) {
    if (!obj.contains(key)) {
      SchemaFail(path, "missing required field '" + std::string(key) + "'");
    }
  }
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (std::string_view k : keys) known = known || key == k;
    if (!known) SchemaFail(path, "unknown field '" + key + "'");
  }
  return obj;
}

std::string Join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

int64_t GetInt(const Json& obj, const std::string& path, std::string_view key) {
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) SchemaFail(Join(path, key), "expected integer");
  return v.get<int64_t>();
}

double GetReal(const Json& obj, const std::string& path, std::string_view key) {
  const Json& v = obj.at(key);
  if (!v.is_number()) SchemaFail(Join(path, key), "expected number");
  double d = v.get<double>();
  if (!std::isfinite(d)) InvariantFail(Join(path, key), "must be finite");
  return d;
}

std::string GetString(const Json& obj, const std::string& path,
                      std::string_view key) {
  const Json& v = obj.at(key);
  if (!v.is_string()) SchemaFail(Join(path, key), "expected string");
  return v.get<std::string>();
}

int CheckedInt(int64_t v, const std::string& path) {
  if (v < INT32_MIN || v > INT32_MAX) InvariantFail(path, "out of range");
  return static_cast<int>(v);
}

EnrichedPoint ReadPoint(const Json& j, const std::string& path) {
  ClosedObject(j, path,
               {"x", "y", "t_ms", "speed_px_s", "pressure_raw",
                "pressure_tier", "speed_tier", "tilt", "rotation_deg",
                "arc_pos"});
  EnrichedPoint p;
  p.pos = {GetReal(j, path, "x"), GetReal(j, path, "y")};
  p.t_ms = GetInt(j, path, "t_ms");
  p.speed_px_s = GetReal(j, path, "speed_px_s");
  p.pressure_raw = CheckedInt(GetInt(j, path, "pressure_raw"),
                              Join(path, "pressure_raw"));
  p.pressure_tier = CheckedInt(GetInt(j, path, "pressure_tier"),
                               Join(path, "pressure_tier"));
  p.speed_tier =
      CheckedInt(GetInt(j, path, "speed_tier"), Join(path, "speed_tier"));
  const std::string tilt_path = Join(path, "tilt");
  const Json& tilt = ClosedObject(j.at("tilt"), tilt_path, {"dx", "dy"});
  p.tilt = {GetReal(tilt, tilt_path, "dx"), GetReal(tilt, tilt_path, "dy")};
  p.rotation_deg = GetReal(j, path, "rotation_deg");
  p.arc_pos = GetReal(j, path, "arc_pos");
  return p;
}

void CheckPoint(const EnrichedPoint& p, const std::string& path, int n_tiers) {
  if (p.speed_px_s < 0) InvariantFail(Join(path, "speed_px_s"), "negative");
  if (p.pressure_raw < 0 || p.pressure_raw > kPressureRawMax) {
    InvariantFail(Join(path, "pressure_raw"), "outside [0, 1023]");
  }
  if (p.pressure_tier < 0 || p.pressure_tier >= n_tiers) {
    InvariantFail(Join(path, "pressure_tier"), "outside [0, n_tiers-1]");
  }
  if (p.speed_tier < 0 || p.speed_tier >= n_tiers) {
    InvariantFail(Join(path, "speed_tier"), "outside [0, n_tiers-1]");
  }
  if (Norm(p.tilt) > 1.0 + 1e-9) {
    InvariantFail(Join(path, "tilt"), "projection magnitude exceeds 1");
  }
  if (p.arc_pos < 0 || p.arc_pos > 1) {
    InvariantFail(Join(path, "arc_pos"), "outside [0, 1]");
  }
}

Stroke ReadStroke(const Json& j, const std::string& path, int n_tiers) {
  ClosedObject(j, path, {"index", "contact", "skeleton", "pixel_count"});
  Stroke s;
  s.index = CheckedInt(GetInt(j, path, "index"), Join(path, "index"));
  const std::string cpath = Join(path, "contact");
  const Json& c =
      ClosedObject(j.at("contact"), cpath, {"start_ms", "end_ms", "slack_ms"});
  s.contact.start_ms = GetInt(c, cpath, "start_ms");
  s.contact.end_ms = GetInt(c, cpath, "end_ms");
  s.contact.index = s.index;
  s.slack_ms = GetInt(c, cpath, "slack_ms");
  if (s.contact.start_ms >= s.contact.end_ms) {
    InvariantFail(cpath, "start_ms must be < end_ms");
  }
  if (s.slack_ms < 0) InvariantFail(Join(cpath, "slack_ms"), "negative");
  s.pixel_count = GetInt(j, path, "pixel_count");
  if (s.pixel_count < 0) InvariantFail(Join(path, "pixel_count"), "negative");

  const std::string skpath = Join(path, "skeleton");
  const Json& sk = j.at("skeleton");
  if (!sk.is_array()) SchemaFail(skpath, "expected array");
  if (sk.empty()) InvariantFail(skpath, "at least one point required");
  for (size_t i = 0; i < sk.size(); ++i) {
    const std::string ppath = skpath + "[" + std::to_string(i) + "]";
    EnrichedPoint p = ReadPoint(sk[i], ppath);
    CheckPoint(p, ppath, n_tiers);
    if (p.t_ms < s.contact.start_ms ||
        p.t_ms > s.contact.end_ms + s.slack_ms) {
      InvariantFail(Join(ppath, "t_ms"), "outside contact interval");
    }
    if (!s.skeleton.empty()) {
      const EnrichedPoint& prev = s.skeleton.back();
      if (p.t_ms <= prev.t_ms) {
        InvariantFail(Join(ppath, "t_ms"), "skeleton times not increasing");
      }
      if (p.arc_pos < prev.arc_pos) {
        InvariantFail(Join(ppath, "arc_pos"), "arc_pos decreasing");
      }
    }
    s.skeleton.push_back(p);
  }
  if (s.skeleton.front().arc_pos != 0) {
    InvariantFail(skpath + "[0].arc_pos", "first arc_pos must be 0");
  }
  // A stroke whose points all coincide is degenerate: every arc_pos is 0.
  const double last_arc = s.skeleton.back().arc_pos;
  if (s.skeleton.size() > 1 && last_arc != 1 && last_arc != 0) {
    InvariantFail(skpath + "[" + std::to_string(s.skeleton.size() - 1) +
                      "].arc_pos",
                  "last arc_pos must be 1");
  }
  return s;
}

Json PointToJson(const EnrichedPoint& p) {
  Json j;
  j["x"] = p.pos.x;
  j["y"] = p.pos.y;
  j["t_ms"] = p.t_ms;
  j["speed_px_s"] = p.speed_px_s;
  j["pressure_raw"] = p.pressure_raw;
  j["pressure_tier"] = p.pressure_tier;
  j["speed_tier"] = p.speed_tier;
  j["tilt"] = Json{{"dx", p.tilt.x}, {"dy", p.tilt.y}};
  j["rotation_deg"] = p.rotation_deg;
  j["arc_pos"] = p.arc_pos;
  return j;
}

}  // namespace

Session ValidateSession(const Json& doc) {
  ClosedObject(doc, "$",
               {"schema_version", "id", "role", "character_label", "canvas",
                "frame_count", "config_fingerprint", "n_tiers",
                "arrow_zero_deg", "glyph_mask", "frames_dir", "strokes"});
  const std::string root;
  Session s;
  s.schema_version = GetString(doc, root, "schema_version");
  if (s.schema_version != kSchemaVersion) {
    SchemaFail("schema_version", "unsupported version '" +
                                     s.schema_version + "'");
  }
  s.id = GetString(doc, root, "id");
  if (s.id.empty()) InvariantFail("id", "must not be empty");
  const std::string role = GetString(doc, root, "role");
  if (role == "teacher") {
    s.role = Role::kTeacher;
  } else if (role == "student") {
    s.role = Role::kStudent;
  } else {
    SchemaFail("role", "expected 'teacher' or 'student'");
  }
  s.character_label = GetString(doc, root, "character_label");
  const Json& canvas = ClosedObject(doc.at("canvas"), "canvas", {"w", "h"});
  s.canvas_w = CheckedInt(GetInt(canvas, "canvas", "w"), "canvas.w");
  s.canvas_h = CheckedInt(GetInt(canvas, "canvas", "h"), "canvas.h");
  if (s.canvas_w <= 0 || s.canvas_h <= 0) {
    InvariantFail("canvas", "dimensions must be > 0");
  }
  s.frame_count =
      CheckedInt(GetInt(doc, root, "frame_count"), "frame_count");
  if (s.frame_count < 0) InvariantFail("frame_count", "negative");
  s.config_fingerprint = GetString(doc, root, "config_fingerprint");
  s.n_tiers = CheckedInt(GetInt(doc, root, "n_tiers"), "n_tiers");
  if (s.n_tiers < 2) InvariantFail("n_tiers", "must be >= 2");
  s.arrow_zero_deg = GetReal(doc, root, "arrow_zero_deg");
  s.glyph_mask = GetString(doc, root, "glyph_mask");
  const Json& frames_dir = doc.at("frames_dir");
  if (frames_dir.is_string()) {
    s.frames_dir = frames_dir.get<std::string>();
  } else if (!frames_dir.is_null()) {
    SchemaFail("frames_dir", "expected string or null");
  }

  const Json& strokes = doc.at("strokes");
  if (!strokes.is_array()) SchemaFail("strokes", "expected array");
  if (strokes.empty()) InvariantFail("strokes", "at least one stroke required");
  for (size_t i = 0; i < strokes.size(); ++i) {
    const std::string path = "strokes[" + std::to_string(i) + "]";
    Stroke stroke = ReadStroke(strokes[i], path, s.n_tiers);
    if (stroke.index != static_cast<int>(i)) {
      InvariantFail(path, "stroke index gap");
    }
    if (!s.strokes.empty() &&
        s.strokes.back().contact.end_ms > stroke.contact.start_ms) {
      InvariantFail(path + ".contact", "overlaps previous contact interval");
    }
    s.strokes.push_back(std::move(stroke));
  }
  return s;
}

Session ParseSession(std::string_view text) {
  Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) SchemaFail("$", "document is not valid JSON");
  return ValidateSession(doc);
}

Json SerializeSession(const Session& s) {
  Json doc;
  doc["schema_version"] = s.schema_version;
  doc["id"] = s.id;
  doc["role"] = RoleName(s.role);
  doc["character_label"] = s.character_label;
  doc["canvas"] = Json{{"w", s.canvas_w}, {"h", s.canvas_h}};
  doc["frame_count"] = s.frame_count;
  doc["config_fingerprint"] = s.config_fingerprint;
  doc["n_tiers"] = s.n_tiers;
  doc["arrow_zero_deg"] = s.arrow_zero_deg;
  doc["glyph_mask"] = s.glyph_mask;
  doc["frames_dir"] = s.frames_dir ? Json(*s.frames_dir) : Json(nullptr);
  Json strokes = Json::array();
  for (const Stroke& stroke : s.strokes) {
    Json js;
    js["index"] = stroke.index;
    js["contact"] = Json{{"start_ms", stroke.contact.start_ms},
                         {"end_ms", stroke.contact.end_ms},
                         {"slack_ms", stroke.slack_ms}};
    Json sk = Json::array();
    for (const EnrichedPoint& p : stroke.skeleton) sk.push_back(PointToJson(p));
    js["skeleton"] = std::move(sk);
    js["pixel_count"] = stroke.pixel_count;
    strokes.push_back(std::move(js));
  }
  doc["strokes"] = std::move(strokes);
  return doc;
}

std::string SessionToString(const Session& session) {
  return SerializeSession(session).dump(2) + "\n";
}

Json ToJson(Vec2 v) { return Json{{"x", v.x}, {"y", v.y}}; }

Json ToJson(const ExtremityBox& box) {
  Json j;
  j["top"] = ToJson(box.top);
  j["bottom"] = ToJson(box.bottom);
  j["left"] = ToJson(box.left);
  j["right"] = ToJson(box.right);
  j["rect"] = Json{{"x0", box.rect.x0},
                   {"y0", box.rect.y0},
                   {"x1", box.rect.x1},
                   {"y1", box.rect.y1}};
  j["center"] = ToJson(box.rect.Center());
  return j;
}

}  // namespace callisense

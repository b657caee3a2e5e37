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

#include "callisense/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "callisense/error.h"
#include "callisense/fusion.h"
#include "callisense/image.h"
#include "callisense/skeleton.h"

namespace callisense {

namespace {

constexpr int kMinCanvas = 64;
constexpr double kCanvasMargin = 16;
constexpr double kStampStepPx = 0.25;
constexpr double kGapDown = 2;
constexpr double kGapUp = 30;

[[noreturn]] void BadProfile(const std::string& where, const std::string& msg) {
  throw Error(ErrorKind::kBadProfile, where + ": " + msg);
}

[[noreturn]] void ScriptSchema(const std::string& msg) {
  throw Error(ErrorKind::kSchema, "script: " + msg);
}

void CheckProfile(const std::vector<Breakpoint>& profile, const std::string& where,
                  double lo, double hi) {
  if (profile.empty()) BadProfile(where, "needs at least one breakpoint");
  double prev = 0;
  for (size_t i = 0; i < profile.size(); ++i) {
    const Breakpoint& b = profile[i];
    if (!(b.arc_pos >= 0 && b.arc_pos <= 1)) {
      BadProfile(where, "arc_pos outside [0, 1]");
    }
    if (i > 0 && b.arc_pos < prev) BadProfile(where, "arc_pos decreases");
    if (!std::isfinite(b.value) || b.value < lo || b.value > hi) {
      BadProfile(where, "value out of range");
    }
    prev = b.arc_pos;
  }
}

double PathLength(const std::vector<Vec2>& path) {
  double total = 0;
  for (size_t i = 1; i < path.size(); ++i) total += Distance(path[i - 1], path[i]);
  return total;
}

void CheckStroke(const StrokeScript& s, size_t i) {
  const std::string where = "strokes[" + std::to_string(i) + "]";
  if (s.path.size() < 2) BadProfile(where, "path needs at least 2 points");
  for (const Vec2& p : s.path) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      BadProfile(where, "path point is not finite");
    }
  }
  if (!(PathLength(s.path) > 0)) BadProfile(where, "path has zero length");
  if (s.duration_ms <= 0) BadProfile(where, "duration_ms must be > 0");
  if (!(s.brush_radius_px > 0)) BadProfile(where, "brush_radius_px must be > 0");
  if (s.inter_stroke_pause_ms < 0) {
    BadProfile(where, "inter_stroke_pause_ms must be >= 0");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  CheckProfile(s.pressure_profile, where + ".pressure_profile", 0,
               kPressureRawMax);
  CheckProfile(s.yaw_profile, where + ".yaw_profile", -kInf, kInf);
  CheckProfile(s.pitch_profile, where + ".pitch_profile", -90, 90);
  CheckProfile(s.roll_profile, where + ".roll_profile", -kInf, kInf);
}

void CheckScript(const SynthScript& script) {
  if (script.strokes.empty()) {
    throw Error(ErrorKind::kEmptyScript, "script has no strokes");
  }
  for (size_t i = 0; i < script.strokes.size(); ++i) {
    CheckStroke(script.strokes[i], i);
  }
  if ((script.canvas_w && *script.canvas_w <= 0) ||
      (script.canvas_h && *script.canvas_h <= 0)) {
    BadProfile("canvas", "size must be positive");
  }
}

std::vector<Breakpoint> ParseProfile(const Json& j, const std::string& where) {
  if (!j.is_array()) ScriptSchema(where + " must be a list of [arc_pos, value]");
  std::vector<Breakpoint> out;
  for (const Json& b : j) {
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() ||
        !b[1].is_number()) {
      ScriptSchema(where + " entries must be [arc_pos, value]");
    }
    out.push_back({b[0].get<double>(), b[1].get<double>()});
  }
  return out;
}

StrokeScript ParseStroke(const Json& j, size_t i) {
  static const std::set<std::string> kKeys = {
      "path",          "duration_ms",   "speed_profile",
      "pressure_profile", "yaw_profile", "pitch_profile",
      "roll_profile",  "brush_radius_px", "inter_stroke_pause_ms"};
  const std::string where = "strokes[" + std::to_string(i) + "]";
  if (!j.is_object()) ScriptSchema(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.contains(key)) ScriptSchema(where + ": unknown key '" + key + "'");
  }
  StrokeScript s;
  if (!j.contains("path") || !j.at("path").is_array()) {
    ScriptSchema(where + ".path must be a list of [x, y]");
  }
  for (const Json& p : j.at("path")) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number()) {
      ScriptSchema(where + ".path entries must be [x, y]");
    }
    s.path.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  if (!j.contains("duration_ms") || !j.at("duration_ms").is_number_integer()) {
    ScriptSchema(where + ".duration_ms must be an integer");
  }
  s.duration_ms = j.at("duration_ms").get<int64_t>();
  if (j.contains("speed_profile")) {
    const Json& sp = j.at("speed_profile");
    if (!sp.is_string()) ScriptSchema(where + ".speed_profile must be a string");
    const std::string name = sp.get<std::string>();
    if (name == "uniform") {
      s.speed_profile = SpeedProfile::kUniform;
    } else if (name == "ease-in-out") {
      s.speed_profile = SpeedProfile::kEaseInOut;
    } else {
      BadProfile(where, "unknown speed_profile '" + name + "'");
    }
  }
  if (j.contains("pressure_profile")) {
    s.pressure_profile =
        ParseProfile(j.at("pressure_profile"), where + ".pressure_profile");
  }
  if (j.contains("yaw_profile")) {
    s.yaw_profile = ParseProfile(j.at("yaw_profile"), where + ".yaw_profile");
  }
  if (j.contains("pitch_profile")) {
    s.pitch_profile =
        ParseProfile(j.at("pitch_profile"), where + ".pitch_profile");
  }
  if (j.contains("roll_profile")) {
    s.roll_profile = ParseProfile(j.at("roll_profile"), where + ".roll_profile");
  }
  if (j.contains("brush_radius_px")) {
    if (!j.at("brush_radius_px").is_number()) {
      ScriptSchema(where + ".brush_radius_px must be a number");
    }
    s.brush_radius_px = j.at("brush_radius_px").get<double>();
  }
  if (j.contains("inter_stroke_pause_ms")) {
    if (!j.at("inter_stroke_pause_ms").is_number_integer()) {
      ScriptSchema(where + ".inter_stroke_pause_ms must be an integer");
    }
    s.inter_stroke_pause_ms = j.at("inter_stroke_pause_ms").get<int64_t>();
  }
  return s;
}

// Polyline parameterized by normalized arc length.
class PathGeometry {
 public:
  explicit PathGeometry(const std::vector<Vec2>& path) : path_(path) {
    cum_.push_back(0);
    for (size_t i = 1; i < path.size(); ++i) {
      cum_.push_back(cum_.back() + Distance(path[i - 1], path[i]));
    }
  }

  double length() const { return cum_.back(); }

  Vec2 At(double s) const {
    const double target = std::clamp(s, 0.0, 1.0) * length();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
    if (it == cum_.end()) return path_.back();
    const size_t j = static_cast<size_t>(it - cum_.begin()) - 1;
    const double seg = cum_[j + 1] - cum_[j];
    return Lerp(path_[j], path_[j + 1], (target - cum_[j]) / seg);
  }

 private:
  std::vector<Vec2> path_;
  std::vector<double> cum_;
};

struct Timeline {
  std::vector<int64_t> start;
  std::vector<int64_t> end;
  int64_t total = 0;
};

Timeline MakeTimeline(const SynthScript& script) {
  Timeline tl;
  int64_t t = 0;
  for (const StrokeScript& s : script.strokes) {
    t += s.inter_stroke_pause_ms;
    tl.start.push_back(t);
    t += s.duration_ms;
    tl.end.push_back(t);
  }
  tl.total = t + script.strokes.back().inter_stroke_pause_ms;
  return tl;
}

struct Pose {
  double yaw = 0;
  double pitch = 0;
  double roll = 0;
  double pressure = 0;
};

Pose PoseAt(const StrokeScript& s, double arc) {
  return {ProfileValue(s.yaw_profile, arc), ProfileValue(s.pitch_profile, arc),
          ProfileValue(s.roll_profile, arc),
          ProfileValue(s.pressure_profile, arc)};
}

Pose Blend(const Pose& a, const Pose& b, double w) {
  return {a.yaw + w * (b.yaw - a.yaw), a.pitch + w * (b.pitch - a.pitch),
          a.roll + w * (b.roll - a.roll),
          a.pressure + w * (b.pressure - a.pressure)};
}

// Scripted pose at any time, blending linearly across pen-up pauses.
Pose PoseAtTime(const SynthScript& script, const Timeline& tl, int64_t t) {
  const auto& strokes = script.strokes;
  for (size_t i = 0; i < strokes.size(); ++i) {
    if (t < tl.start[i]) {
      if (i == 0) return PoseAt(strokes[0], 0);
      const double w = static_cast<double>(t - tl.end[i - 1]) /
                       static_cast<double>(tl.start[i] - tl.end[i - 1]);
      return Blend(PoseAt(strokes[i - 1], 1), PoseAt(strokes[i], 0), w);
    }
    if (t <= tl.end[i]) {
      const double u = static_cast<double>(t - tl.start[i]) /
                       static_cast<double>(strokes[i].duration_ms);
      return PoseAt(strokes[i], ArcAtTime(strokes[i].speed_profile, u));
    }
  }
  return PoseAt(strokes.back(), 1);
}

struct Stamp {
  Vec2 c;
  double r = 0;
};

struct PixelBox {
  int x0 = std::numeric_limits<int>::max();
  int y0 = std::numeric_limits<int>::max();
  int x1 = std::numeric_limits<int>::min();
  int y1 = std::numeric_limits<int>::min();

  bool empty() const { return x0 > x1; }
  void Add(const Stamp& s) {
    x0 = std::min(x0, static_cast<int>(std::floor(s.c.x - s.r)));
    y0 = std::min(y0, static_cast<int>(std::floor(s.c.y - s.r)));
    x1 = std::max(x1, static_cast<int>(std::ceil(s.c.x + s.r)));
    y1 = std::max(y1, static_cast<int>(std::ceil(s.c.y + s.r)));
  }
  bool Contains(int x, int y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
};

void StampDisc(std::vector<uint8_t>& ink, int w, int h, const Stamp& s) {
  const int x0 = std::max(0, static_cast<int>(std::floor(s.c.x - s.r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(s.c.y - s.r)));
  const int x1 = std::min(w - 1, static_cast<int>(std::ceil(s.c.x + s.r)));
  const int y1 = std::min(h - 1, static_cast<int>(std::ceil(s.c.y + s.r)));
  const double r2 = s.r * s.r;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - s.c.x;
      const double dy = y + 0.5 - s.c.y;
      if (dx * dx + dy * dy <= r2) ink[static_cast<size_t>(y) * w + x] = 1;
    }
  }
}

std::pair<int, int> CanvasSize(const SynthScript& script) {
  double max_x = 0;
  double max_y = 0;
  for (const StrokeScript& s : script.strokes) {
    for (const Vec2& p : s.path) {
      max_x = std::max(max_x, p.x + s.brush_radius_px);
      max_y = std::max(max_y, p.y + s.brush_radius_px);
    }
  }
  const int w = std::max(kMinCanvas, static_cast<int>(std::ceil(max_x + kCanvasMargin)));
  const int h = std::max(kMinCanvas, static_cast<int>(std::ceil(max_y + kCanvasMargin)));
  return {script.canvas_w.value_or(w), script.canvas_h.value_or(h)};
}

std::string FrameName(size_t k) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "frames/frame_%05zu.pgm", k);
  return buf;
}

}  // namespace

SynthScript ParseScript(const Json& doc) {
  SynthScript script;
  const Json* strokes = &doc;
  if (doc.is_object()) {
    for (const auto& [key, value] : doc.items()) {
      if (key != "canvas" && key != "strokes") {
        ScriptSchema("unknown key '" + key + "'");
      }
    }
    if (doc.contains("canvas")) {
      const Json& c = doc.at("canvas");
      if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() ||
          !c[1].is_number_integer()) {
        ScriptSchema("canvas must be [w, h]");
      }
      script.canvas_w = c[0].get<int>();
      script.canvas_h = c[1].get<int>();
    }
    if (!doc.contains("strokes")) ScriptSchema("missing 'strokes'");
    strokes = &doc.at("strokes");
  }
  if (!strokes->is_array()) ScriptSchema("strokes must be a list");
  for (size_t i = 0; i < strokes->size(); ++i) {
    script.strokes.push_back(ParseStroke((*strokes)[i], i));
  }
  CheckScript(script);
  return script;
}

double ProfileValue(const std::vector<Breakpoint>& profile, double arc_pos) {
  auto it = std::upper_bound(
      profile.begin(), profile.end(), arc_pos,
      [](double v, const Breakpoint& b) { return v < b.arc_pos; });
  if (it == profile.begin()) return profile.front().value;
  const size_t j = static_cast<size_t>(it - profile.begin()) - 1;
  if (j + 1 == profile.size()) return profile[j].value;
  const double u = (arc_pos - profile[j].arc_pos) /
                   (profile[j + 1].arc_pos - profile[j].arc_pos);
  return profile[j].value + u * (profile[j + 1].value - profile[j].value);
}

double ArcAtTime(SpeedProfile profile, double u) {
  u = std::clamp(u, 0.0, 1.0);
  if (profile == SpeedProfile::kUniform) return u;
  return (1 - std::cos(std::numbers::pi * u)) / 2;
}

Json TruthToJson(const GroundTruth& truth) {
  Json doc;
  doc["fps"] = truth.fps;
  doc["sensor_hz"] = truth.sensor_hz;
  doc["canvas"] = Json{{"w", truth.canvas_w}, {"h", truth.canvas_h}};
  Json strokes = Json::array();
  for (const TruthStroke& s : truth.strokes) {
    Json samples = Json::array();
    for (const TruthSample& p : s.samples) {
      samples.push_back(Json{{"t_ms", p.t_ms},
                             {"x", p.pos.x},
                             {"y", p.pos.y},
                             {"speed_px_s", p.speed_px_s},
                             {"yaw_deg", p.yaw_deg},
                             {"pitch_deg", p.pitch_deg},
                             {"roll_deg", p.roll_deg},
                             {"pressure_raw", p.pressure_raw}});
    }
    strokes.push_back(Json{
        {"contact",
         Json{{"start_ms", s.contact.start_ms}, {"end_ms", s.contact.end_ms}}},
        {"samples", std::move(samples)}});
  }
  doc["strokes"] = std::move(strokes);
  return doc;
}

GroundTruth TruthFromJson(const Json& doc) {
  try {
    GroundTruth t;
    t.fps = doc.at("fps").get<int>();
    t.sensor_hz = doc.at("sensor_hz").get<int>();
    t.canvas_w = doc.at("canvas").at("w").get<int>();
    t.canvas_h = doc.at("canvas").at("h").get<int>();
    int index = 0;
    for (const Json& s : doc.at("strokes")) {
      TruthStroke ts;
      ts.contact = {s.at("contact").at("start_ms").get<int64_t>(),
                    s.at("contact").at("end_ms").get<int64_t>(), index++};
      for (const Json& p : s.at("samples")) {
        ts.samples.push_back({p.at("t_ms").get<int64_t>(),
                              {p.at("x").get<double>(), p.at("y").get<double>()},
                              p.at("speed_px_s").get<double>(),
                              p.at("yaw_deg").get<double>(),
                              p.at("pitch_deg").get<double>(),
                              p.at("roll_deg").get<double>(),
                              p.at("pressure_raw").get<double>()});
      }
      t.strokes.push_back(std::move(ts));
    }
    return t;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("truth: ") + e.what());
  }
}

SynthResult GenerateSession(const SynthScript& script,
                            const SynthOptions& options,
                            const std::filesystem::path& out_dir) {
  CheckScript(script);
  if (options.fps <= 0 || options.sensor_hz <= 0) {
    throw Error(ErrorKind::kBadConfig, "synth: fps and sensor_hz must be > 0");
  }
  if (options.occlusion.enabled &&
      (options.occlusion.k_frames < 1 || options.occlusion.period_frames < 1)) {
    throw Error(ErrorKind::kBadConfig, "synth: occlusion needs k, period >= 1");
  }
  const Timeline tl = MakeTimeline(script);
  const auto [w, h] = CanvasSize(script);

  std::vector<int64_t> frame_t;
  for (int64_t k = 0;; ++k) {
    frame_t.push_back(k * 1000 / options.fps);
    if (frame_t.back() >= tl.total) break;
  }
  auto frame_of = [&](int64_t t) {
    return static_cast<size_t>(
        std::lower_bound(frame_t.begin(), frame_t.end(), t) - frame_t.begin());
  };

  GroundTruth truth;
  truth.fps = options.fps;
  truth.sensor_hz = options.sensor_hz;
  truth.canvas_w = w;
  truth.canvas_h = h;

  std::vector<std::vector<Stamp>> stamps(frame_t.size());
  for (size_t i = 0; i < script.strokes.size(); ++i) {
    const StrokeScript& s = script.strokes[i];
    const PathGeometry geom(s.path);
    const double dur = static_cast<double>(s.duration_ms);
    auto pos_at = [&](double t) {
      return geom.At(ArcAtTime(s.speed_profile, (t - tl.start[i]) / dur));
    };
    TruthStroke ts;
    ts.contact = {tl.start[i], tl.end[i], static_cast<int>(i)};
    for (int64_t t = tl.start[i]; t <= tl.end[i]; ++t) {
      const size_t k = frame_of(t);
      const Vec2 p1 = pos_at(static_cast<double>(t));
      if (t == tl.start[i]) {
        stamps[k].push_back({p1, s.brush_radius_px});
      } else {
        const Vec2 p0 = pos_at(static_cast<double>(t - 1));
        const int n = std::max(
            1, static_cast<int>(std::ceil(Distance(p0, p1) / kStampStepPx)));
        for (int j = 1; j <= n; ++j) {
          stamps[k].push_back(
              {pos_at(static_cast<double>(t - 1) + static_cast<double>(j) / n),
               s.brush_radius_px});
        }
      }
      const double u = static_cast<double>(t - tl.start[i]) / dur;
      const double arc = ArcAtTime(s.speed_profile, u);
      const double rate = s.speed_profile == SpeedProfile::kUniform
                              ? 1.0
                              : std::numbers::pi / 2 * std::sin(std::numbers::pi * u);
      const Pose pose = PoseAt(s, arc);
      ts.samples.push_back({t, p1, geom.length() * rate / dur * 1000.0, pose.yaw,
                            pose.pitch, pose.roll, pose.pressure});
    }
    truth.strokes.push_back(std::move(ts));
  }

  std::vector<PixelBox> hidden(frame_t.size());
  if (options.occlusion.enabled) {
    const size_t k = static_cast<size_t>(options.occlusion.k_frames);
    const size_t period = static_cast<size_t>(options.occlusion.period_frames);
    for (size_t f0 = period; f0 < frame_t.size(); f0 += period) {
      PixelBox box;
      const size_t stop = std::min(frame_t.size(), f0 + k);
      for (size_t f = f0; f < stop; ++f) {
        for (const Stamp& s : stamps[f]) box.Add(s);
      }
      for (size_t f = f0; f < stop; ++f) hidden[f] = box;
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "frames", ec);
  if (ec) {
    throw Error(ErrorKind::kIo, "cannot create " + (out_dir / "frames").string() +
                                    ": " + ec.message());
  }

  FrameManifest manifest;
  manifest.dst_w = w;
  manifest.dst_h = h;
  manifest.paper_quad = manifest.DstRect();
  manifest.sensor_log = "sensor.csv";
  manifest.tip_trace = "tip.csv";

  std::vector<uint8_t> ink(static_cast<size_t>(w) * h, 0);
  for (size_t k = 0; k < frame_t.size(); ++k) {
    for (const Stamp& s : stamps[k]) StampDisc(ink, w, h, s);
    GrayImage img(w, h, 255);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (ink[static_cast<size_t>(y) * w + x] && !hidden[k].Contains(x, y)) {
          img.at(x, y) = 0;
        }
      }
    }
    const std::string name = FrameName(k);
    WritePgm(out_dir / name, img);
    manifest.frames.push_back({name, frame_t[k]});
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  TipTrace tip;
  SensorStream sensor;
  std::vector<int64_t> sample_t;
  for (int64_t j = 0;; ++j) {
    const int64_t t = j * 1000 / options.sensor_hz;
    if (t > tl.total) break;
    sample_t.push_back(t);
  }
  for (int64_t t : sample_t) {
    bool down = false;
    for (size_t i = 0; i < tl.start.size(); ++i) {
      down = down || (t >= tl.start[i] && t <= tl.end[i]);
    }
    const double gap =
        (down ? kGapDown : kGapUp) + options.noise.gap_px_sd * normal(rng);
    tip.samples.push_back({t, std::max(0.0, gap)});
  }
  for (int64_t t : sample_t) {
    const Pose pose = PoseAtTime(script, tl, t);
    const double yaw = pose.yaw + options.noise.angle_sd_deg * normal(rng);
    const double pitch = pose.pitch + options.noise.angle_sd_deg * normal(rng);
    const double roll = pose.roll + options.noise.angle_sd_deg * normal(rng);
    const double pressure =
        pose.pressure + options.noise.pressure_sd * normal(rng);
    SensorSample s;
    s.t_ms = t;
    s.orientation =
        Orientation::FromDegrees(yaw, std::clamp(pitch, -90.0, 90.0), roll);
    s.pressure_raw = static_cast<int>(
        std::clamp<long>(std::lround(pressure), 0L, kPressureRawMax));
    sensor.samples.push_back(s);
  }

  WriteFileBytes(out_dir / "sensor.csv", SensorCsv(sensor));
  WriteFileBytes(out_dir / "tip.csv", TipCsv(tip));
  WriteFileBytes(out_dir / "manifest.json", ManifestToJson(manifest).dump(2) + "\n");
  WriteFileBytes(out_dir / "truth.json", TruthToJson(truth).dump(2) + "\n");
  return {std::move(manifest), std::move(truth)};
}

namespace {

double Pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double ma = 0;
  double mb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0;
  double saa = 0;
  double sbb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

double TemporalIou(const ContactInterval& a, const ContactInterval& b) {
  const double inter = static_cast<double>(
      std::max<int64_t>(0, std::min(a.end_ms, b.end_ms) -
                               std::max(a.start_ms, b.start_ms)));
  const double uni =
      static_cast<double>(a.duration_ms() + b.duration_ms()) - inter;
  return uni > 0 ? inter / uni : 0.0;
}

}  // namespace

TruthMetrics ScoreAgainstTruth(const Session& session,
                               const GroundTruth& truth) {
  TruthMetrics m;
  m.stroke_count_match = session.strokes.size() == truth.strokes.size();
  const size_t n = std::min(session.strokes.size(), truth.strokes.size());
  double sq = 0;
  double rot = 0;
  double iou = 0;
  size_t points = 0;
  std::vector<double> got_speed;
  std::vector<double> want_speed;
  for (size_t i = 0; i < n; ++i) {
    const Stroke& s = session.strokes[i];
    const TruthStroke& t = truth.strokes[i];
    iou += TemporalIou(s.contact, t.contact);
    if (t.samples.empty()) continue;
    const double yaw0 = t.samples.front().yaw_deg;
    for (const EnrichedPoint& p : s.skeleton) {
      const auto it = std::lower_bound(
          t.samples.begin(), t.samples.end(), p.t_ms,
          [](const TruthSample& a, int64_t v) { return a.t_ms < v; });
      auto best = it == t.samples.end() ? std::prev(it) : it;
      if (it != t.samples.begin() && it != t.samples.end() &&
          p.t_ms - std::prev(it)->t_ms <= it->t_ms - p.t_ms) {
        best = std::prev(it);
      }
      const double d = Distance(p.pos, best->pos);
      sq += d * d;
      rot += std::abs(p.rotation_deg - (best->yaw_deg - yaw0));
      got_speed.push_back(p.speed_px_s);
      want_speed.push_back(best->speed_px_s);
      ++points;
    }
  }
  if (points == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    m.skeleton_rmse_px = nan;
    m.rotation_mae_deg = nan;
    m.speed_corr = nan;
  } else {
    m.skeleton_rmse_px = std::sqrt(sq / static_cast<double>(points));
    m.rotation_mae_deg = rot / static_cast<double>(points);
    m.speed_corr = Pearson(got_speed, want_speed);
  }
  m.contact_iou = n > 0 ? iou / static_cast<double>(n) : 0.0;
  return m;
}

Session SessionFromTruth(const GroundTruth& truth) {
  Session s;
  s.id = "truth";
  s.canvas_w = truth.canvas_w;
  s.canvas_h = truth.canvas_h;
  std::vector<double> all_pressure;
  std::vector<double> all_speed;
  for (size_t i = 0; i < truth.strokes.size(); ++i) {
    const TruthStroke& ts = truth.strokes[i];
    RawSkeleton raw;
    for (const TruthSample& p : ts.samples) {
      raw.points.push_back({p.pos, p.t_ms, 0, false});
    }
    const ArcPositions arc = ArcLengthPositions(raw);
    Stroke st;
    st.index = static_cast<int>(i);
    st.contact = ts.contact;
    st.contact.index = st.index;
    const double yaw0 = ts.samples.empty() ? 0 : ts.samples.front().yaw_deg;
    for (size_t k = 0; k < ts.samples.size(); ++k) {
      const TruthSample& p = ts.samples[k];
      EnrichedPoint e;
      e.pos = p.pos;
      e.t_ms = p.t_ms;
      e.speed_px_s = p.speed_px_s;
      e.pressure_raw = static_cast<int>(
          std::clamp<long>(std::lround(p.pressure_raw), 0L, kPressureRawMax));
      e.tilt = TiltProjection(
          Orientation::FromDegrees(p.yaw_deg, p.pitch_deg, p.roll_deg));
      e.rotation_deg = p.yaw_deg - yaw0;
      e.arc_pos = arc.positions[k];
      all_pressure.push_back(e.pressure_raw);
      all_speed.push_back(e.speed_px_s);
      st.skeleton.push_back(e);
    }
    s.strokes.push_back(std::move(st));
  }
  if (!all_pressure.empty()) {
    const TierScale ps =
        MakeTierScale(all_pressure, TierScope::kCharacter, s.n_tiers);
    const TierScale ss = MakeTierScale(all_speed, TierScope::kCharacter, s.n_tiers);
    for (Stroke& st : s.strokes) {
      for (EnrichedPoint& e : st.skeleton) {
        e.pressure_tier = Tier(e.pressure_raw, ps);
        e.speed_tier = Tier(e.speed_px_s, ss);
      }
    }
  }
  return s;
}

}  // namespace callisense

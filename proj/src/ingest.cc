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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "callisense/error.h"

namespace callisense {

Homography Homography::Identity() {
  Homography h;
  h.m = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  return h;
}

Vec2 Homography::Apply(Vec2 p) const {
  const double w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
  return {(m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w,
          (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w};
}

double Homography::Determinant() const {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Homography Homography::Inverse() const {
  const double det = Determinant();
  if (std::abs(det) <= 1e-12) {
    throw Error(ErrorKind::kDegenerateQuad, "homography is not invertible");
  }
  Homography inv;
  auto& a = m;
  auto& r = inv.m;
  r[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  r[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  r[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  r[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
  r[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  r[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  r[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
  r[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  r[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  const double s = r[2][2];
  if (std::abs(s) > 1e-300) {
    for (auto& row : r) {
      for (double& v : row) v /= s;
    }
  }
  return inv;
}

bool Homography::IsIdentity() const { return m == Identity().m; }

void CheckQuad(const Quad& quad, std::string_view what) {
  double scale = 0;
  for (const Vec2& p : quad) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::kDegenerateQuad,
                  std::string(what) + ": non-finite corner");
    }
    scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  }
  scale = std::max(scale, 1.0);
  for (size_t i = 0; i < 4; ++i) {
    for (size_t j = i + 1; j < 4; ++j) {
      if (Distance(quad[i], quad[j]) <= 1e-9 * scale) {
        throw Error(ErrorKind::kDegenerateQuad,
                    std::string(what) + ": duplicate corners");
      }
    }
  }
  for (size_t i = 0; i < 4; ++i) {
    for (size_t j = i + 1; j < 4; ++j) {
      for (size_t k = j + 1; k < 4; ++k) {
        const Vec2 u = quad[j] - quad[i];
        const Vec2 v = quad[k] - quad[i];
        if (std::abs(u.x * v.y - u.y * v.x) <= 1e-9 * scale * scale) {
          throw Error(ErrorKind::kDegenerateQuad,
                      std::string(what) + ": three collinear corners");
        }
      }
    }
  }
}

namespace {

// Similarity taking the quad's centroid to the origin with mean corner
// distance sqrt(2).
Eigen::Matrix3d Conditioner(const Quad& q) {
  Vec2 c;
  for (const Vec2& p : q) c = c + 0.25 * p;
  double mean = 0;
  for (const Vec2& p : q) mean += 0.25 * Distance(p, c);
  const double s = std::sqrt(2.0) / mean;
  Eigen::Matrix3d t;
  t << s, 0, -s * c.x, 0, s, -s * c.y, 0, 0, 1;
  return t;
}

Eigen::Vector2d Transform(const Eigen::Matrix3d& t, Vec2 p) {
  Eigen::Vector3d v = t * Eigen::Vector3d(p.x, p.y, 1.0);
  return {v.x() / v.z(), v.y() / v.z()};
}

Eigen::Matrix3d SolveDlt(const Quad& src, const Quad& dst,
                         const Eigen::Matrix3d& ts, const Eigen::Matrix3d& td) {
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector2d s = Transform(ts, src[i]);
    const Eigen::Vector2d d = Transform(td, dst[i]);
    a.row(2 * i) << s.x(), s.y(), 1, 0, 0, 0, -s.x() * d.x(), -s.y() * d.x();
    a.row(2 * i + 1) << 0, 0, 0, s.x(), s.y(), 1, -s.x() * d.y(),
        -s.y() * d.y();
    b(2 * i) = d.x();
    b(2 * i + 1) = d.y();
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::kDegenerateQuad, "corner system is singular");
  }
  Eigen::Matrix<double, 8, 1> x = lu.solve(b);
  // One step of iterative refinement.
  x += lu.solve(b - a * x);
  Eigen::Matrix3d hn;
  hn << x(0), x(1), x(2), x(3), x(4), x(5), x(6), x(7), 1.0;
  return hn;
}

}  // namespace

Homography ComputeHomography(const Quad& src, const Quad& dst) {
  CheckQuad(src, "source quad");
  CheckQuad(dst, "destination quad");
  const Eigen::Matrix3d ts = Conditioner(src);
  const Eigen::Matrix3d td = Conditioner(dst);
  Eigen::Matrix3d h = td.inverse() * SolveDlt(src, dst, ts, td) * ts;
  if (std::abs(h(2, 2)) < 1e-300) {
    throw Error(ErrorKind::kDegenerateQuad, "homography has m[2][2] == 0");
  }
  h /= h(2, 2);
  Homography out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.m[r][c] = h(r, c);
  }
  out.m[2][2] = 1.0;
  if (std::abs(out.Determinant()) <= 1e-12) {
    throw Error(ErrorKind::kDegenerateQuad, "homography is not invertible");
  }
  return out;
}

GrayImage CorrectPerspective(const GrayImage& frame, const Homography& h,
                             int dst_w, int dst_h) {
  const Homography inv = h.Inverse();
  GrayImage out(dst_w, dst_h, 255);
  auto sample = [&frame](int x, int y) -> double {
    return frame.Contains(x, y) ? frame.at(x, y) : 255.0;
  };
  for (int y = 0; y < dst_h; ++y) {
    for (int x = 0; x < dst_w; ++x) {
      const Vec2 s = inv.Apply({x + 0.5, y + 0.5});
      if (!std::isfinite(s.x) || !std::isfinite(s.y)) continue;
      // Continuous coordinates with pixel centers on the integer lattice.
      const double u = s.x - 0.5;
      const double v = s.y - 0.5;
      if (u < -1.0 || v < -1.0 || u > frame.width() || v > frame.height()) {
        continue;
      }
      const int x0 = static_cast<int>(std::floor(u));
      const int y0 = static_cast<int>(std::floor(v));
      const double fx = u - x0;
      const double fy = v - y0;
      const double top = (1 - fx) * sample(x0, y0) + fx * sample(x0 + 1, y0);
      const double bot =
          (1 - fx) * sample(x0, y0 + 1) + fx * sample(x0 + 1, y0 + 1);
      const double value = (1 - fy) * top + fy * bot;
      out.at(x, y) =
          static_cast<uint8_t>(std::clamp(std::lround(value), 0L, 255L));
    }
  }
  return out;
}

InkMask Binarize(const GrayImage& frame, int ink_threshold, int64_t t_ms) {
  InkMask mask(frame.width(), frame.height(), t_ms);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      if (frame.at(x, y) < ink_threshold) mask.set(x, y, true);
    }
  }
  return mask;
}

Quad FrameManifest::DstRect() const {
  const double w = dst_w;
  const double h = dst_h;
  return {Vec2{0, 0}, Vec2{w, 0}, Vec2{w, h}, Vec2{0, h}};
}

namespace {

[[noreturn]] void ManifestFail(const std::string& msg) {
  throw Error(ErrorKind::kSchema, "manifest: " + msg);
}

int64_t ManifestInt(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    ManifestFail(std::string("'") + key + "' must be an integer");
  }
  return j.at(key).get<int64_t>();
}

std::string ManifestString(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    ManifestFail(std::string("'") + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

std::optional<std::string> OptionalString(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return ManifestString(j, key);
}

}  // namespace

FrameManifest ParseManifest(const Json& doc) {
  if (!doc.is_object()) ManifestFail("expected object");
  static constexpr std::array<std::string_view, 10> kKeys = {
      "frames",          "paper_quad",          "dst_size",
      "sensor_log",      "tip_trace",           "sensor_clock_offset_ms",
      "tip_clock_offset_ms", "id",              "role",
      "character_label"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      ManifestFail("unknown field '" + key + "'");
    }
  }
  FrameManifest m;
  if (!doc.contains("frames") || !doc.at("frames").is_array() ||
      doc.at("frames").empty()) {
    ManifestFail("'frames' must be a non-empty array");
  }
  for (const Json& f : doc.at("frames")) {
    m.frames.push_back({ManifestString(f, "file"), ManifestInt(f, "t_ms")});
  }
  for (size_t i = 1; i < m.frames.size(); ++i) {
    if (m.frames[i].t_ms <= m.frames[i - 1].t_ms) {
      throw Error(ErrorKind::kNonMonotoneTime,
                  "manifest frame " + std::to_string(i) +
                      ": t_ms not strictly increasing");
    }
  }
  if (!doc.contains("paper_quad") || !doc.at("paper_quad").is_array() ||
      doc.at("paper_quad").size() != 4) {
    ManifestFail("'paper_quad' must hold 4 corners");
  }
  for (size_t i = 0; i < 4; ++i) {
    const Json& c = doc.at("paper_quad")[i];
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() ||
        !c[1].is_number()) {
      ManifestFail("'paper_quad' corners must be [x, y]");
    }
    m.paper_quad[i] = {c[0].get<double>(), c[1].get<double>()};
  }
  if (!doc.contains("dst_size")) ManifestFail("missing 'dst_size'");
  m.dst_w = static_cast<int>(ManifestInt(doc.at("dst_size"), "w"));
  m.dst_h = static_cast<int>(ManifestInt(doc.at("dst_size"), "h"));
  if (m.dst_w <= 0 || m.dst_h <= 0) ManifestFail("'dst_size' must be > 0");
  m.sensor_log = ManifestString(doc, "sensor_log");
  m.tip_trace = ManifestString(doc, "tip_trace");
  m.sensor_clock_offset_ms = ManifestInt(doc, "sensor_clock_offset_ms");
  m.tip_clock_offset_ms = ManifestInt(doc, "tip_clock_offset_ms");
  m.id = OptionalString(doc, "id");
  m.role = OptionalString(doc, "role");
  m.character_label = OptionalString(doc, "character_label");
  CheckQuad(m.paper_quad, "paper_quad");
  return m;
}

Json ManifestToJson(const FrameManifest& m) {
  Json doc;
  Json frames = Json::array();
  for (const ManifestFrame& f : m.frames) {
    frames.push_back(Json{{"file", f.file}, {"t_ms", f.t_ms}});
  }
  doc["frames"] = std::move(frames);
  Json quad = Json::array();
  for (const Vec2& p : m.paper_quad) quad.push_back(Json::array({p.x, p.y}));
  doc["paper_quad"] = std::move(quad);
  doc["dst_size"] = Json{{"w", m.dst_w}, {"h", m.dst_h}};
  doc["sensor_log"] = m.sensor_log;
  doc["tip_trace"] = m.tip_trace;
  doc["sensor_clock_offset_ms"] = m.sensor_clock_offset_ms;
  doc["tip_clock_offset_ms"] = m.tip_clock_offset_ms;
  if (m.id) doc["id"] = *m.id;
  if (m.role) doc["role"] = *m.role;
  if (m.character_label) doc["character_label"] = *m.character_label;
  return doc;
}

namespace {

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

class CsvRowError {
 public:
  CsvRowError(std::string_view name, size_t line)
      : prefix_(std::string(name.empty() ? "csv" : name) + " line " +
                std::to_string(line) + ": ") {}

  [[noreturn]] void Fail(const std::string& msg) const {
    throw Error(ErrorKind::kBadCsvRow, prefix_ + msg);
  }

  template <typename T>
  T Parse(std::string_view field, const char* column) const {
    T value{};
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() ||
        ptr != field.data() + field.size()) {
      Fail(std::string("cannot parse ") + column);
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(value)) Fail(std::string(column) + " not finite");
    }
    return value;
  }

 private:
  std::string prefix_;
};

std::vector<std::string_view> CsvBody(std::string_view text,
                                      std::string_view header,
                                      std::string_view name) {
  std::vector<std::string_view> lines = SplitLines(text);
  if (lines.empty() || lines.front() != header) {
    CsvRowError(name, 1).Fail("expected header '" + std::string(header) + "'");
  }
  return lines;
}

void CheckMonotone(int64_t prev, int64_t cur, std::string_view name,
                   size_t line) {
  if (cur <= prev) {
    throw Error(ErrorKind::kNonMonotoneTime,
                std::string(name.empty() ? "csv" : name) + " line " +
                    std::to_string(line) + ": t_ms not strictly increasing");
  }
}

std::string FormatFixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

}  // namespace

SensorStream ParseSensorCsv(std::string_view text, std::string_view name) {
  const auto lines =
      CsvBody(text, "t_ms,yaw_deg,pitch_deg,roll_deg,pressure_raw", name);
  SensorStream stream;
  for (size_t i = 1; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    CsvRowError row(name, line_no);
    const auto f = SplitFields(lines[i]);
    if (f.size() != 5) row.Fail("expected 5 fields");
    SensorSample s;
    s.t_ms = row.Parse<int64_t>(f[0], "t_ms");
    const double yaw = row.Parse<double>(f[1], "yaw_deg");
    const double pitch = row.Parse<double>(f[2], "pitch_deg");
    const double roll = row.Parse<double>(f[3], "roll_deg");
    if (pitch < -90.0 || pitch > 90.0) row.Fail("pitch_deg outside [-90, 90]");
    s.orientation = Orientation::FromDegrees(yaw, pitch, roll);
    s.pressure_raw = row.Parse<int>(f[4], "pressure_raw");
    if (s.pressure_raw < 0 || s.pressure_raw > kPressureRawMax) {
      row.Fail("pressure_raw outside [0, 1023]");
    }
    if (!stream.samples.empty()) {
      CheckMonotone(stream.samples.back().t_ms, s.t_ms, name, line_no);
    }
    stream.samples.push_back(s);
  }
  return stream;
}

TipTrace ParseTipCsv(std::string_view text, std::string_view name) {
  const auto lines = CsvBody(text, "t_ms,gap_px", name);
  TipTrace trace;
  for (size_t i = 1; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    CsvRowError row(name, line_no);
    const auto f = SplitFields(lines[i]);
    if (f.size() != 2) row.Fail("expected 2 fields");
    TipSample s;
    s.t_ms = row.Parse<int64_t>(f[0], "t_ms");
    s.gap_px = row.Parse<double>(f[1], "gap_px");
    if (s.gap_px < 0) row.Fail("gap_px negative");
    if (!trace.samples.empty()) {
      CheckMonotone(trace.samples.back().t_ms, s.t_ms, name, line_no);
    }
    trace.samples.push_back(s);
  }
  return trace;
}

std::string SensorCsv(const SensorStream& stream) {
  std::string out = "t_ms,yaw_deg,pitch_deg,roll_deg,pressure_raw\n";
  for (const SensorSample& s : stream.samples) {
    out += std::to_string(s.t_ms) + "," +
           FormatFixed(s.orientation.yaw_deg, 4) + "," +
           FormatFixed(s.orientation.pitch_deg, 4) + "," +
           FormatFixed(s.orientation.roll_deg, 4) + "," +
           std::to_string(s.pressure_raw) + "\n";
  }
  return out;
}

std::string TipCsv(const TipTrace& trace) {
  std::string out = "t_ms,gap_px\n";
  for (const TipSample& s : trace.samples) {
    out += std::to_string(s.t_ms) + "," + FormatFixed(s.gap_px, 3) + "\n";
  }
  return out;
}

SensorStream ShiftClock(SensorStream stream, int64_t offset_ms) {
  for (SensorSample& s : stream.samples) s.t_ms += offset_ms;
  return stream;
}

TipTrace ShiftClock(TipTrace trace, int64_t offset_ms) {
  for (TipSample& s : trace.samples) s.t_ms += offset_ms;
  return trace;
}

namespace {

template <typename Samples>
int DropOutside(Samples& samples, int64_t lo, int64_t hi) {
  const auto before = samples.size();
  std::erase_if(samples,
                [&](const auto& s) { return s.t_ms < lo || s.t_ms > hi; });
  return static_cast<int>(before - samples.size());
}

}  // namespace

LoadedInputs LoadInputs(const std::filesystem::path& manifest_path) {
  const std::string text = ReadFileBytes(manifest_path);
  Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) ManifestFail("not valid JSON");
  LoadedInputs in;
  in.manifest = ParseManifest(doc);
  const std::filesystem::path dir = manifest_path.parent_path();
  const int64_t origin = in.manifest.frames.front().t_ms;

  for (const ManifestFrame& f : in.manifest.frames) {
    in.frames.push_back({ReadPgm(dir / f.file), f.t_ms - origin});
  }
  const std::filesystem::path sensor_path = dir / in.manifest.sensor_log;
  in.sensor = ShiftClock(
      ParseSensorCsv(ReadFileBytes(sensor_path), in.manifest.sensor_log),
      in.manifest.sensor_clock_offset_ms - origin);
  const std::filesystem::path tip_path = dir / in.manifest.tip_trace;
  in.tip = ShiftClock(
      ParseTipCsv(ReadFileBytes(tip_path), in.manifest.tip_trace),
      in.manifest.tip_clock_offset_ms - origin);

  // Clamped at 0: sensor samples live on the non-negative session clock.
  const int64_t lo = std::max<int64_t>(0, -kStreamMarginMs);
  const int64_t hi = in.frames.back().t_ms + kStreamMarginMs;
  in.sensor_dropped = DropOutside(in.sensor.samples, lo, hi);
  in.tip_dropped = DropOutside(in.tip.samples, lo, hi);
  return in;
}

}  // namespace callisense

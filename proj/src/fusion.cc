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

#include "callisense/fusion.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "callisense/error.h"

namespace callisense {

void FusionConfig::Validate() const {
  if (n_tiers < 2) {
    throw Error(ErrorKind::kBadConfig, "fusion: n_tiers must be >= 2");
  }
  if (ref_window_points < 2) {
    throw Error(ErrorKind::kBadConfig, "fusion: ref_window_points must be >= 2");
  }
}

int64_t ToMicroDeg(double deg) {
  return std::llround(deg * static_cast<double>(kMicroDegPerDeg));
}

int64_t WrapMicroDeg(int64_t delta) {
  constexpr int64_t kFull = 360 * kMicroDegPerDeg;
  constexpr int64_t kHalf = 180 * kMicroDegPerDeg;
  int64_t r = delta % kFull;
  if (r > kHalf) r -= kFull;
  if (r <= -kHalf) r += kFull;
  return r;
}

namespace {

double FromMicroDeg(int64_t v) {
  return static_cast<double>(v) / static_cast<double>(kMicroDegPerDeg);
}

// Unwrapped micro-degree track for one angle channel.
template <typename Get>
std::vector<int64_t> UnwrappedTrack(const SensorStream& stream, Get get) {
  std::vector<int64_t> track;
  track.reserve(stream.samples.size());
  int64_t prev_raw = 0;
  for (const SensorSample& s : stream.samples) {
    const int64_t raw = ToMicroDeg(get(s.orientation));
    track.push_back(track.empty() ? raw
                                  : track.back() + WrapMicroDeg(raw - prev_raw));
    prev_raw = raw;
  }
  return track;
}

int64_t InterpolateTrack(const std::vector<int64_t>& track, size_t j,
                         double w) {
  const double delta = static_cast<double>(track[j + 1] - track[j]);
  return track[j] + std::llround(w * delta);
}

}  // namespace

std::vector<AttachedSample> AttachSensor(std::span<const int64_t> times,
                                         const SensorStream& stream) {
  const auto& s = stream.samples;
  if (s.empty()) throw Error(ErrorKind::kEmptyStream, "sensor stream is empty");
  const auto yaw =
      UnwrappedTrack(stream, [](const Orientation& o) { return o.yaw_deg; });
  const auto pitch =
      UnwrappedTrack(stream, [](const Orientation& o) { return o.pitch_deg; });
  const auto roll =
      UnwrappedTrack(stream, [](const Orientation& o) { return o.roll_deg; });

  std::vector<AttachedSample> out;
  out.reserve(times.size());
  for (int64_t t : times) {
    if (t <= s.front().t_ms || t >= s.back().t_ms) {
      const SensorSample& edge = t <= s.front().t_ms ? s.front() : s.back();
      out.push_back({edge.orientation, static_cast<double>(edge.pressure_raw),
                     t != edge.t_ms});
      continue;
    }
    auto it = std::upper_bound(
        s.begin(), s.end(), t,
        [](int64_t v, const SensorSample& x) { return v < x.t_ms; });
    const size_t j = static_cast<size_t>(it - s.begin()) - 1;
    if (s[j].t_ms == t) {
      out.push_back(
          {s[j].orientation, static_cast<double>(s[j].pressure_raw), false});
      continue;
    }
    const double w = static_cast<double>(t - s[j].t_ms) /
                     static_cast<double>(s[j + 1].t_ms - s[j].t_ms);
    AttachedSample a;
    a.orientation = Orientation::FromDegrees(
        FromMicroDeg(WrapMicroDeg(InterpolateTrack(yaw, j, w))),
        FromMicroDeg(InterpolateTrack(pitch, j, w)),
        FromMicroDeg(InterpolateTrack(roll, j, w)));
    a.pressure_raw = s[j].pressure_raw +
                     w * static_cast<double>(s[j + 1].pressure_raw -
                                             s[j].pressure_raw);
    out.push_back(a);
  }
  return out;
}

std::vector<AttachedSample> AttachSensor(const RawSkeleton& skeleton,
                                         const SensorStream& stream) {
  std::vector<int64_t> times;
  times.reserve(skeleton.points.size());
  for (const SkeletonPoint& p : skeleton.points) times.push_back(p.t_ms);
  return AttachSensor(times, stream);
}

Vec2 TiltProjection(const Orientation& o) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double cy = std::cos(o.yaw_deg * kRad);
  const double sy = std::sin(o.yaw_deg * kRad);
  const double sp = std::sin(o.pitch_deg * kRad);
  const double cr = std::cos(o.roll_deg * kRad);
  const double sr = std::sin(o.roll_deg * kRad);
  // Third column of Rz(yaw) * Ry(pitch) * Rx(roll).
  return {cy * sp * cr + sy * sr, sy * sp * cr - cy * sr};
}

RotationResult RelativeRotation(std::span<const double> yaws_deg,
                                const RawSkeleton& skeleton,
                                bool is_first_stroke, const FusionConfig& cfg) {
  const auto& pts = skeleton.points;
  if (yaws_deg.size() != pts.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                "rotation: " + std::to_string(yaws_deg.size()) + " yaws for " +
                    std::to_string(pts.size()) + " skeleton points");
  }
  RotationResult r;
  r.rotation_deg.reserve(yaws_deg.size());
  int64_t acc = 0;
  int64_t prev = 0;
  for (size_t i = 0; i < yaws_deg.size(); ++i) {
    const int64_t q = ToMicroDeg(yaws_deg[i]);
    if (i > 0) acc += WrapMicroDeg(q - prev);
    prev = q;
    r.rotation_deg.push_back(FromMicroDeg(acc));
  }
  if (is_first_stroke && !pts.empty()) {
    const size_t k = std::min(pts.size(),
                              static_cast<size_t>(cfg.ref_window_points));
    const Vec2 advance = pts[k - 1].centroid - pts.front().centroid;
    r.arrow_zero_deg =
        Norm(advance) > 0
            ? NormalizeYawDeg(std::atan2(-advance.y, -advance.x) * 180.0 /
                              std::numbers::pi)
            : 0.0;
  }
  return r;
}

TierScale MakeTierScale(std::span<const double> values, TierScope scope,
                        int n) {
  if (values.empty()) {
    throw Error(ErrorKind::kEmptyValues, "tier scale needs at least one value");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi, n, scope};
}

int Tier(double v, const TierScale& scale) {
  if (scale.hi == scale.lo) return 0;
  const double f = std::floor((v - scale.lo) / (scale.hi - scale.lo) * scale.n);
  return static_cast<int>(std::clamp(f, 0.0, static_cast<double>(scale.n - 1)));
}

Session Enrich(const SessionHeader& header,
               std::span<const SkeletonStroke> strokes,
               const SensorStream& stream, const FusionConfig& cfg) {
  cfg.Validate();
  Session s;
  s.id = header.id;
  s.role = header.role;
  s.character_label = header.character_label;
  s.canvas_w = header.canvas_w;
  s.canvas_h = header.canvas_h;
  s.frame_count = header.frame_count;
  s.config_fingerprint = header.config_fingerprint;
  s.n_tiers = cfg.n_tiers;
  s.glyph_mask = header.glyph_mask;
  s.frames_dir = header.frames_dir;

  std::vector<double> all_pressure;
  std::vector<double> all_speed;
  for (size_t i = 0; i < strokes.size(); ++i) {
    const SkeletonStroke& in = strokes[i];
    const auto attached = AttachSensor(in.skeleton, stream);
    const auto speed = ComputeSpeed(in.skeleton);
    const auto arc = ArcLengthPositions(in.skeleton);
    std::vector<double> yaws;
    yaws.reserve(attached.size());
    for (const AttachedSample& a : attached) {
      yaws.push_back(a.orientation.yaw_deg);
    }
    const RotationResult rot = RelativeRotation(yaws, in.skeleton, i == 0, cfg);
    if (rot.arrow_zero_deg) s.arrow_zero_deg = *rot.arrow_zero_deg;

    Stroke out;
    out.index = static_cast<int>(i);
    out.contact = in.contact;
    out.contact.index = out.index;
    out.slack_ms = in.slack_ms;
    out.pixel_count = in.pixel_count;
    for (size_t k = 0; k < in.skeleton.points.size(); ++k) {
      EnrichedPoint p;
      p.pos = in.skeleton.points[k].centroid;
      p.t_ms = in.skeleton.points[k].t_ms;
      p.speed_px_s = speed[k];
      p.pressure_raw = static_cast<int>(std::clamp<long>(
          std::lround(attached[k].pressure_raw), 0L, kPressureRawMax));
      p.tilt = TiltProjection(attached[k].orientation);
      p.rotation_deg = rot.rotation_deg[k];
      p.arc_pos = arc.positions[k];
      all_pressure.push_back(p.pressure_raw);
      all_speed.push_back(p.speed_px_s);
      out.skeleton.push_back(p);
    }
    s.strokes.push_back(std::move(out));
  }
  if (all_pressure.empty()) {
    throw Error(ErrorKind::kEmptySession, "no skeleton points to enrich");
  }
  const TierScale pressure_scale =
      MakeTierScale(all_pressure, TierScope::kCharacter, cfg.n_tiers);
  const TierScale speed_scale =
      MakeTierScale(all_speed, TierScope::kCharacter, cfg.n_tiers);
  for (Stroke& stroke : s.strokes) {
    for (EnrichedPoint& p : stroke.skeleton) {
      p.pressure_tier = Tier(p.pressure_raw, pressure_scale);
      p.speed_tier = Tier(p.speed_px_s, speed_scale);
    }
  }
  return s;
}

}  // namespace callisense

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

#include "callisense/skeleton.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "callisense/error.h"

namespace callisense {

void SkeletonConfig::Validate() const {
  if (min_increment_px < 1) {
    throw Error(ErrorKind::kBadConfig, "skeleton: min_increment_px must be >= 1");
  }
  if (!(max_jump_px > 0) || !std::isfinite(max_jump_px)) {
    throw Error(ErrorKind::kBadConfig, "skeleton: max_jump_px must be > 0");
  }
  if (smooth_window < 1 || smooth_window % 2 == 0) {
    throw Error(ErrorKind::kBadConfig,
                "skeleton: smooth_window must be odd and >= 1");
  }
}

Vec2 Centroid(std::span<const PixelPos> pixels) {
  double sx = 0;
  double sy = 0;
  for (PixelPos p : pixels) {
    sx += p.x;
    sy += p.y;
  }
  const double n = static_cast<double>(pixels.size());
  return {sx / n + 0.5, sy / n + 0.5};
}

std::vector<FrameIncrement> StrokeIncrements(
    std::span<const TimedPixel> pixels, std::span<const int64_t> frame_times) {
  std::vector<FrameIncrement> out;
  if (pixels.empty()) return out;
  int64_t first = pixels.front().t_ms;
  int64_t last = first;
  for (const TimedPixel& p : pixels) {
    first = std::min(first, p.t_ms);
    last = std::max(last, p.t_ms);
  }
  for (int64_t t : frame_times) {
    if (t >= first && t <= last) out.push_back({t, {}});
  }
  for (const TimedPixel& p : pixels) {
    auto it = std::lower_bound(
        out.begin(), out.end(), p.t_ms,
        [](const FrameIncrement& f, int64_t t) { return f.t_ms < t; });
    if (it == out.end() || it->t_ms != p.t_ms) {
      // Pixel time is not a listed frame time; give it its own slot.
      it = out.insert(it, FrameIncrement{p.t_ms, {}});
    }
    it->pixels.push_back(p.pos);
  }
  return out;
}

std::vector<Vec2> SmoothPositions(std::span<const Vec2> points, int window) {
  std::vector<Vec2> out(points.begin(), points.end());
  const int n = static_cast<int>(points.size());
  const int half = window / 2;
  for (int i = 0; i < n; ++i) {
    const int h = std::min({half, i, n - 1 - i});
    if (h == 0) continue;
    Vec2 sum;
    for (int k = i - h; k <= i + h; ++k) sum = sum + points[k];
    out[i] = (1.0 / (2 * h + 1)) * sum;
  }
  return out;
}

RawSkeleton ExtractSkeleton(std::span<const FrameIncrement> frames,
                            const SkeletonConfig& cfg) {
  cfg.Validate();
  // Accepted centroid per frame, or nullopt for a dropped frame.
  std::vector<std::optional<Vec2>> accepted(frames.size());
  std::optional<Vec2> last;
  for (size_t i = 0; i < frames.size(); ++i) {
    const auto& px = frames[i].pixels;
    if (static_cast<int>(px.size()) < cfg.min_increment_px) continue;
    const Vec2 c = Centroid(px);
    if (last && Distance(c, *last) > cfg.max_jump_px) continue;
    accepted[i] = c;
    last = c;
  }
  const auto first_it =
      std::find_if(accepted.begin(), accepted.end(),
                   [](const auto& c) { return c.has_value(); });
  if (first_it == accepted.end()) {
    throw Error(ErrorKind::kEmptyStroke,
                "no frame with at least " +
                    std::to_string(cfg.min_increment_px) + " new pixels");
  }
  const size_t first = static_cast<size_t>(first_it - accepted.begin());
  size_t end = accepted.size();
  while (!accepted[end - 1]) --end;

  RawSkeleton sk;
  size_t prev = first;
  for (size_t i = first; i < end; ++i) {
    const auto& f = frames[i];
    const int n = static_cast<int>(f.pixels.size());
    if (accepted[i]) {
      sk.points.push_back({*accepted[i], f.t_ms, n, false});
      prev = i;
      continue;
    }
    size_t next = i + 1;
    while (!accepted[next]) ++next;
    const double span =
        static_cast<double>(frames[next].t_ms - frames[prev].t_ms);
    const double u = static_cast<double>(f.t_ms - frames[prev].t_ms) / span;
    sk.points.push_back(
        {Lerp(*accepted[prev], *accepted[next], u), f.t_ms, n, true});
  }

  std::vector<Vec2> pos;
  pos.reserve(sk.points.size());
  for (const SkeletonPoint& p : sk.points) pos.push_back(p.centroid);
  const std::vector<Vec2> smoothed = SmoothPositions(pos, cfg.smooth_window);
  for (size_t i = 0; i < sk.points.size(); ++i) {
    sk.points[i].centroid = smoothed[i];
  }
  return sk;
}

std::vector<double> ComputeSpeed(const RawSkeleton& skeleton) {
  const auto& p = skeleton.points;
  std::vector<double> speed(p.size(), 0.0);
  for (size_t i = 1; i < p.size(); ++i) {
    const double dt_s = static_cast<double>(p[i].t_ms - p[i - 1].t_ms) / 1000.0;
    speed[i] = Distance(p[i].centroid, p[i - 1].centroid) / dt_s;
  }
  if (p.size() > 1) speed[0] = speed[1];
  return speed;
}

ArcPositions ArcLengthPositions(const RawSkeleton& skeleton) {
  const auto& p = skeleton.points;
  ArcPositions out;
  out.positions.assign(p.size(), 0.0);
  if (p.size() < 2) return out;
  for (size_t i = 1; i < p.size(); ++i) {
    out.positions[i] =
        out.positions[i - 1] + Distance(p[i].centroid, p[i - 1].centroid);
  }
  const double total = out.positions.back();
  if (total <= 0) {
    std::fill(out.positions.begin(), out.positions.end(), 0.0);
    out.degenerate = true;
    return out;
  }
  for (double& v : out.positions) v /= total;
  out.positions.back() = 1.0;
  return out;
}

}  // namespace callisense

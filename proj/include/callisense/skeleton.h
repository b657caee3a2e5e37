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

// Central-axis extraction from per-frame ink increments.
//
// Each frame's newly deposited ink is reduced to its centroid; connecting the
// centroids in time order yields the stroke skeleton. Frames whose increment
// is too small, or whose centroid jumps implausibly far (an occlusion
// artifact), are dropped and refilled by linear interpolation at their
// original frame times before a short moving-average smoothing pass.

#ifndef CALLISENSE_SKELETON_H_
#define CALLISENSE_SKELETON_H_

#include <cstdint>
#include <span>
#include <vector>

#include "callisense/model.h"

namespace callisense {

struct SkeletonConfig {
  int min_increment_px = 4;
  double max_jump_px = 40;
  // Odd moving-average width; 1 disables smoothing.
  int smooth_window = 3;

  void Validate() const;
};

struct FrameIncrement {
  int64_t t_ms = 0;
  std::vector<PixelPos> pixels;
};

struct SkeletonPoint {
  Vec2 centroid;
  int64_t t_ms = 0;
  int n_pixels = 0;
  // True when the position was filled in across a dropped frame.
  bool interpolated = false;
};

struct RawSkeleton {
  std::vector<SkeletonPoint> points;
};

// Mean of pixel centers. `pixels` must be non-empty.
Vec2 Centroid(std::span<const PixelPos> pixels);

// Splits a stroke's timed pixels into one increment per frame time, covering
// every frame from the stroke's first to its last pixel time (possibly empty).
std::vector<FrameIncrement> StrokeIncrements(
    std::span<const TimedPixel> pixels, std::span<const int64_t> frame_times);

// Throws EmptyStroke when no frame has at least min_increment_px pixels.
RawSkeleton ExtractSkeleton(std::span<const FrameIncrement> frames,
                            const SkeletonConfig& cfg);

// Centered moving average with windows shrunk symmetrically at the ends.
std::vector<Vec2> SmoothPositions(std::span<const Vec2> points, int window);

// speed[i] = |c[i] - c[i-1]| / dt in px/s; speed[0] copies speed[1], or is 0
// for a single point.
std::vector<double> ComputeSpeed(const RawSkeleton& skeleton);

struct ArcPositions {
  std::vector<double> positions;
  // All points coincide; every position is 0.
  bool degenerate = false;
};

// Cumulative chord length normalized to [0, 1].
ArcPositions ArcLengthPositions(const RawSkeleton& skeleton);

}  // namespace callisense

#endif  // CALLISENSE_SKELETON_H_

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

// Pen-down detection from the tip-gap trace, first-appearance timestamps for
// ink pixels, and the partition of timed pixels into strokes.

#ifndef CALLISENSE_SEGMENT_H_
#define CALLISENSE_SEGMENT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "callisense/image.h"
#include "callisense/ingest.h"
#include "callisense/model.h"

namespace callisense {

struct ContactConfig {
  // Enter contact below t_low_px, leave above t_high_px.
  double t_low_px = 4;
  double t_high_px = 9;
  int64_t min_down_ms = 60;
  int64_t min_up_ms = 60;

  // Throws BadConfig unless 0 <= t_low_px < t_high_px and durations >= 0.
  void Validate() const;
};

inline constexpr int64_t kDefaultSlackMs = 80;

// Hysteresis state machine over the trace. A contact starts at the first
// sample of a run of gap < t_low_px lasting at least min_down_ms, and ends at
// the last sample before a run of gap > t_high_px lasting at least min_up_ms.
// Intervals shorter than min_down_ms are dropped. Throws EmptyTrace.
std::vector<ContactInterval> DetectContacts(const TipTrace& trace,
                                            const ContactConfig& cfg);

// Pixel position -> time of the first mask in which it was ink.
class TimedPixelMap {
 public:
  TimedPixelMap() = default;
  TimedPixelMap(int w, int h);

  int width() const { return w_; }
  int height() const { return h_; }
  size_t size() const { return count_; }

  std::optional<int64_t> Get(PixelPos p) const;
  // Records `t_ms` unless the pixel already has a timestamp.
  void Mark(PixelPos p, int64_t t_ms);

  // All timed pixels ordered by (t_ms, y, x).
  std::vector<TimedPixel> Pixels() const;
  // Every pixel ever observed as ink.
  InkMask ToMask() const;

 private:
  size_t Index(PixelPos p) const {
    return static_cast<size_t>(p.y) * static_cast<size_t>(w_) +
           static_cast<size_t>(p.x);
  }

  int w_ = 0;
  int h_ = 0;
  size_t count_ = 0;
  std::vector<int64_t> t_;  // -1 when never ink
};

// Pixels that are ink in `cur` but not in `prev`. Removals are never reported.
// Throws DimensionMismatch.
std::vector<PixelPos> InkIncrement(const InkMask& prev, const InkMask& cur);

// Folds ink increments over the ordered masks. A pixel that vanishes and
// reappears keeps its first timestamp. Throws DimensionMismatch, and
// NonMonotoneTime if mask times are not strictly increasing.
TimedPixelMap TimestampPixels(std::span<const InkMask> masks);

struct StrokeGrouping {
  // strokes[i] holds the pixels of contact interval i, ordered by
  // (t_ms, y, x).
  std::vector<std::vector<TimedPixel>> strokes;
  int64_t discarded = 0;
  int64_t total = 0;
};

// Assigns each pixel to the interval containing its time; failing that, to the
// latest interval that ended at most slack_ms earlier; otherwise the pixel is
// discarded and counted. Throws NoContacts.
StrokeGrouping GroupStrokes(const TimedPixelMap& pixels,
                            std::span<const ContactInterval> contacts,
                            int64_t slack_ms);

}  // namespace callisense

#endif  // CALLISENSE_SEGMENT_H_

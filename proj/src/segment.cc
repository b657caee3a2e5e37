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

#include "callisense/segment.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "callisense/error.h"

namespace callisense {

void ContactConfig::Validate() const {
  if (!(std::isfinite(t_low_px) && std::isfinite(t_high_px) &&
        t_low_px >= 0 && t_low_px < t_high_px)) {
    throw Error(ErrorKind::kBadConfig,
                "contact: require 0 <= t_low_px < t_high_px");
  }
  if (min_down_ms < 0 || min_up_ms < 0) {
    throw Error(ErrorKind::kBadConfig, "contact: durations must be >= 0");
  }
}

std::vector<ContactInterval> DetectContacts(const TipTrace& trace,
                                            const ContactConfig& cfg) {
  cfg.Validate();
  const auto& s = trace.samples;
  if (s.empty()) throw Error(ErrorKind::kEmptyTrace, "tip trace is empty");

  std::vector<ContactInterval> out;
  auto emit = [&](int64_t start, int64_t end) {
    if (end > start && end - start >= cfg.min_down_ms) {
      out.push_back({start, end, static_cast<int>(out.size())});
    }
  };

  bool down = false;
  int64_t contact_start = 0;
  std::optional<size_t> low_run;   // first index of the current low run
  std::optional<size_t> high_run;  // first index of the current high run
  for (size_t i = 0; i < s.size(); ++i) {
    const double gap = s[i].gap_px;
    if (!down) {
      if (gap < cfg.t_low_px) {
        if (!low_run) low_run = i;
        if (s[i].t_ms - s[*low_run].t_ms >= cfg.min_down_ms) {
          down = true;
          contact_start = s[*low_run].t_ms;
          low_run.reset();
          high_run.reset();
        }
      } else {
        low_run.reset();
      }
      continue;
    }
    if (gap > cfg.t_high_px) {
      if (!high_run) high_run = i;
      if (s[i].t_ms - s[*high_run].t_ms >= cfg.min_up_ms) {
        // high_run > 0 here: the contact began at an earlier sample.
        emit(contact_start, s[*high_run - 1].t_ms);
        down = false;
        high_run.reset();
      }
    } else {
      high_run.reset();
    }
  }
  if (down) {
    const size_t last = high_run ? *high_run - 1 : s.size() - 1;
    emit(contact_start, s[last].t_ms);
  }
  return out;
}

TimedPixelMap::TimedPixelMap(int w, int h)
    : w_(w), h_(h), t_(static_cast<size_t>(w) * static_cast<size_t>(h), -1) {}

std::optional<int64_t> TimedPixelMap::Get(PixelPos p) const {
  const int64_t t = t_[Index(p)];
  if (t < 0) return std::nullopt;
  return t;
}

void TimedPixelMap::Mark(PixelPos p, int64_t t_ms) {
  int64_t& slot = t_[Index(p)];
  if (slot >= 0) return;
  slot = t_ms;
  ++count_;
}

std::vector<TimedPixel> TimedPixelMap::Pixels() const {
  std::vector<TimedPixel> out;
  out.reserve(count_);
  for (int y = 0; y < h_; ++y) {
    for (int x = 0; x < w_; ++x) {
      const int64_t t = t_[Index({x, y})];
      if (t >= 0) out.push_back({{x, y}, t});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TimedPixel& a, const TimedPixel& b) {
                     return a.t_ms < b.t_ms;
                   });
  return out;
}

InkMask TimedPixelMap::ToMask() const {
  InkMask mask(w_, h_);
  for (int y = 0; y < h_; ++y) {
    for (int x = 0; x < w_; ++x) {
      if (t_[Index({x, y})] >= 0) mask.set(x, y, true);
    }
  }
  return mask;
}

std::vector<PixelPos> InkIncrement(const InkMask& prev, const InkMask& cur) {
  if (!prev.SameShape(cur)) {
    throw Error(ErrorKind::kDimensionMismatch,
                "mask " + std::to_string(cur.width()) + "x" +
                    std::to_string(cur.height()) + " vs " +
                    std::to_string(prev.width()) + "x" +
                    std::to_string(prev.height()));
  }
  std::vector<PixelPos> out;
  for (int y = 0; y < cur.height(); ++y) {
    for (int x = 0; x < cur.width(); ++x) {
      if (cur.at(x, y) && !prev.at(x, y)) out.push_back({x, y});
    }
  }
  return out;
}

TimedPixelMap TimestampPixels(std::span<const InkMask> masks) {
  if (masks.empty()) return {};
  const InkMask& first = masks.front();
  TimedPixelMap map(first.width(), first.height());
  const InkMask empty(first.width(), first.height());
  for (size_t i = 0; i < masks.size(); ++i) {
    const InkMask& prev = i == 0 ? empty : masks[i - 1];
    if (i > 0 && masks[i].t_ms() <= prev.t_ms()) {
      throw Error(ErrorKind::kNonMonotoneTime,
                  "mask " + std::to_string(i) + " time not increasing");
    }
    try {
      for (PixelPos p : InkIncrement(prev, masks[i])) {
        map.Mark(p, masks[i].t_ms());
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDimensionMismatch) throw;
      throw Error(ErrorKind::kDimensionMismatch,
                  "frame " + std::to_string(i) + ": " + e.detail());
    }
  }
  return map;
}

StrokeGrouping GroupStrokes(const TimedPixelMap& pixels,
                            std::span<const ContactInterval> contacts,
                            int64_t slack_ms) {
  if (contacts.empty()) {
    throw Error(ErrorKind::kNoContacts, "no contact intervals detected");
  }
  StrokeGrouping g;
  g.strokes.resize(contacts.size());
  for (const TimedPixel& px : pixels.Pixels()) {
    ++g.total;
    // Last interval starting at or before t.
    auto it = std::upper_bound(
        contacts.begin(), contacts.end(), px.t_ms,
        [](int64_t t, const ContactInterval& c) { return t < c.start_ms; });
    if (it == contacts.begin()) {
      ++g.discarded;
      continue;
    }
    const ContactInterval& c = *std::prev(it);
    if (px.t_ms <= c.end_ms + slack_ms) {
      g.strokes[static_cast<size_t>(std::prev(it) - contacts.begin())]
          .push_back(px);
    } else {
      ++g.discarded;
    }
  }
  return g;
}

}  // namespace callisense

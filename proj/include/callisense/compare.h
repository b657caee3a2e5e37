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

// Teacher/student analytics: glyph extremity boxes, drag-overlay transforms,
// stroke pairing, arc-position resampling, pressure-difference profiles and
// time-progress rows.

#ifndef CALLISENSE_COMPARE_H_
#define CALLISENSE_COMPARE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "callisense/fusion.h"
#include "callisense/image.h"
#include "callisense/model.h"

namespace callisense {

inline constexpr int kDefaultCurveSamples = 100;
inline constexpr int64_t kDefaultGridMs = 50;

// Top: min y (tie: min x). Bottom: max y (tie: min x). Left: min x (tie: min
// y). Right: max x (tie: min y). Points are pixel grid coordinates. Throws
// EmptyGlyph.
ExtremityBox ComputeExtremityBox(const InkMask& glyph);

// Pure translation of the student glyph for composited display.
struct OverlayTransform {
  double dx = 0;
  double dy = 0;

  bool IsIdentity() const { return dx == 0 && dy == 0; }
  OverlayTransform Then(const OverlayTransform& next) const {
    return {dx + next.dx, dy + next.dy};
  }
  Vec2 Apply(Vec2 p) const { return {p.x + dx, p.y + dy}; }
  ExtremityBox Apply(const ExtremityBox& box) const;

  friend bool operator==(const OverlayTransform&,
                         const OverlayTransform&) = default;
};

OverlayTransform MakeOverlayTransform(double dx, double dy);

struct StrokePairing {
  std::vector<std::pair<int, int>> pairs;
  // Indices of strokes present in only one of the sessions.
  std::vector<int> extra_teacher;
  std::vector<int> extra_student;
};

// Pairs strokes strictly by order.
StrokePairing PairStrokes(const Session& teacher, const Session& student);

// Values sampled at N uniform positions over [0, 1].
struct Curve {
  std::vector<double> positions;
  std::vector<double> values;
  // Input arc positions were all 0; values hold their mean.
  bool degenerate = false;
};

// Piecewise-linear interpolation of (arc_pos, value). Where several inputs
// share a position the last one wins. Throws LengthMismatch (also for N < 2
// or empty input).
Curve ResampleCurve(std::span<const double> arc_pos,
                    std::span<const double> values, int n);

struct DiffProfile {
  Curve diff;  // student - teacher
  double max_abs_diff = 0;
  double argmax_pos = 0;  // ties resolve to the smallest position
};

// Throws LengthMismatch.
DiffProfile PressureDiffProfile(const Curve& teacher, const Curve& student);

struct ProgressRow {
  int64_t grid_ms = 0;
  std::vector<int64_t> times;
  std::vector<double> arc_positions;
};

// Samples arc position against time on a grid anchored at the stroke's first
// point, through ceil(duration / grid_ms) steps so the row ends at 1. Throws
// DegenerateStroke for a zero-duration stroke.
ProgressRow MakeProgressRow(const Stroke& stroke, int64_t grid_ms);
std::pair<ProgressRow, ProgressRow> ProgressRows(const Stroke& teacher,
                                                 const Stroke& student,
                                                 int64_t grid_ms);

struct CurvePair {
  Curve teacher;
  Curve student;
};

struct PairReport {
  int index = 0;
  CurvePair pressure;
  DiffProfile pressure_diff;
  CurvePair speed;
  DiffProfile speed_diff;
  ProgressRow teacher_progress;
  ProgressRow student_progress;
  TierScale pressure_scale;
  TierScale speed_scale;
};

struct ComparisonReport {
  std::string teacher_id;
  std::string student_id;
  int stroke_count = 0;
  StrokePairing pairing;
  std::vector<PairReport> pairs;
  ExtremityBox teacher_box;
  ExtremityBox student_box;
  int mizige_size = 0;
};

struct ReportOptions {
  int samples = kDefaultCurveSamples;
  int64_t grid_ms = kDefaultGridMs;
};

// Stroke-scope tier scales span the teacher and student values of each pair
// and use the teacher's tier count. Throws EmptySession if either session has
// no strokes.
ComparisonReport BuildReport(const Session& teacher, const InkMask& teacher_glyph,
                             const Session& student, const InkMask& student_glyph,
                             const ReportOptions& options);

Json ReportToJson(const ComparisonReport& report);
// Byte-stable text form (two-space indent, trailing LF).
std::string ReportToString(const ComparisonReport& report);

}  // namespace callisense

#endif  // CALLISENSE_COMPARE_H_

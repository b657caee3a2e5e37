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

#include "callisense/compare.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "callisense/error.h"

namespace callisense {

ExtremityBox ComputeExtremityBox(const InkMask& glyph) {
  std::optional<PixelPos> top, bottom, left, right;
  // Row-major scan visits pixels in (y, x) order, which settles every
  // tie-break with strict comparisons.
  for (int y = 0; y < glyph.height(); ++y) {
    for (int x = 0; x < glyph.width(); ++x) {
      if (!glyph.at(x, y)) continue;
      const PixelPos p{x, y};
      if (!top) top = p;
      if (!bottom || y > bottom->y) bottom = p;
      if (!left || x < left->x) left = p;
      if (!right || x > right->x) right = p;
    }
  }
  if (!top) throw Error(ErrorKind::kEmptyGlyph, "glyph mask has no ink");
  auto v = [](PixelPos p) { return Vec2{double(p.x), double(p.y)}; };
  ExtremityBox box{v(*top), v(*bottom), v(*left), v(*right), {}};
  box.rect = {box.left.x, box.top.y, box.right.x, box.bottom.y};
  return box;
}

ExtremityBox OverlayTransform::Apply(const ExtremityBox& box) const {
  ExtremityBox out{Apply(box.top), Apply(box.bottom), Apply(box.left),
                   Apply(box.right), box.rect};
  out.rect = {box.rect.x0 + dx, box.rect.y0 + dy, box.rect.x1 + dx,
              box.rect.y1 + dy};
  return out;
}

OverlayTransform MakeOverlayTransform(double dx, double dy) {
  return {dx, dy};
}

StrokePairing PairStrokes(const Session& teacher, const Session& student) {
  StrokePairing p;
  const int nt = static_cast<int>(teacher.strokes.size());
  const int ns = static_cast<int>(student.strokes.size());
  for (int i = 0; i < std::min(nt, ns); ++i) p.pairs.emplace_back(i, i);
  for (int i = ns; i < nt; ++i) p.extra_teacher.push_back(i);
  for (int i = nt; i < ns; ++i) p.extra_student.push_back(i);
  return p;
}

Curve ResampleCurve(std::span<const double> arc_pos,
                    std::span<const double> values, int n) {
  if (arc_pos.size() != values.size() || values.empty() || n < 2) {
    throw Error(ErrorKind::kLengthMismatch,
                "resample: " + std::to_string(arc_pos.size()) +
                    " positions, " + std::to_string(values.size()) +
                    " values, N=" + std::to_string(n));
  }
  Curve c;
  c.positions.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    c.positions[static_cast<size_t>(i)] =
        i == n - 1 ? 1.0 : static_cast<double>(i) / (n - 1);
  }
  const bool all_zero = std::all_of(arc_pos.begin(), arc_pos.end(),
                                    [](double a) { return a == 0; });
  if (all_zero) {
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    c.values.assign(static_cast<size_t>(n), mean);
    c.degenerate = true;
    return c;
  }
  c.values.reserve(static_cast<size_t>(n));
  for (double q : c.positions) {
    // Last input at or before q.
    const auto it = std::upper_bound(arc_pos.begin(), arc_pos.end(), q);
    if (it == arc_pos.begin()) {
      c.values.push_back(values.front());
      continue;
    }
    const size_t j = static_cast<size_t>(it - arc_pos.begin()) - 1;
    if (j + 1 == arc_pos.size() || arc_pos[j] == q) {
      c.values.push_back(values[j]);
      continue;
    }
    const double u = (q - arc_pos[j]) / (arc_pos[j + 1] - arc_pos[j]);
    c.values.push_back(values[j] + u * (values[j + 1] - values[j]));
  }
  return c;
}

DiffProfile PressureDiffProfile(const Curve& teacher, const Curve& student) {
  if (teacher.values.size() != student.values.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                "diff: curves have " + std::to_string(teacher.values.size()) +
                    " and " + std::to_string(student.values.size()) +
                    " samples");
  }
  DiffProfile d;
  d.diff.positions = teacher.positions;
  d.diff.values.reserve(teacher.values.size());
  for (size_t i = 0; i < teacher.values.size(); ++i) {
    const double v = student.values[i] - teacher.values[i];
    d.diff.values.push_back(v);
    if (std::abs(v) > d.max_abs_diff) {
      d.max_abs_diff = std::abs(v);
      d.argmax_pos = teacher.positions[i];
    }
  }
  if (d.max_abs_diff == 0 && !teacher.positions.empty()) {
    d.argmax_pos = teacher.positions.front();
  }
  return d;
}

ProgressRow MakeProgressRow(const Stroke& stroke, int64_t grid_ms) {
  const auto& pts = stroke.skeleton;
  if (grid_ms <= 0) {
    throw Error(ErrorKind::kBadConfig, "progress: grid_ms must be > 0");
  }
  if (pts.size() < 2 || pts.back().t_ms == pts.front().t_ms) {
    throw Error(ErrorKind::kDegenerateStroke,
                "stroke " + std::to_string(stroke.index) + " has no duration");
  }
  const int64_t t0 = pts.front().t_ms;
  const int64_t duration = pts.back().t_ms - t0;
  const int64_t steps = (duration + grid_ms - 1) / grid_ms;
  ProgressRow row;
  row.grid_ms = grid_ms;
  size_t j = 0;
  for (int64_t k = 0; k <= steps; ++k) {
    const int64_t t = k * grid_ms;
    row.times.push_back(t);
    const int64_t abs_t = t0 + t;
    if (abs_t >= pts.back().t_ms) {
      row.arc_positions.push_back(pts.back().arc_pos);
      continue;
    }
    while (pts[j + 1].t_ms <= abs_t) ++j;
    const double u = static_cast<double>(abs_t - pts[j].t_ms) /
                     static_cast<double>(pts[j + 1].t_ms - pts[j].t_ms);
    row.arc_positions.push_back(pts[j].arc_pos +
                                u * (pts[j + 1].arc_pos - pts[j].arc_pos));
  }
  return row;
}

std::pair<ProgressRow, ProgressRow> ProgressRows(const Stroke& teacher,
                                                 const Stroke& student,
                                                 int64_t grid_ms) {
  return {MakeProgressRow(teacher, grid_ms), MakeProgressRow(student, grid_ms)};
}

namespace {

struct StrokeSeries {
  std::vector<double> arc;
  std::vector<double> pressure;
  std::vector<double> speed;
};

StrokeSeries Series(const Stroke& s) {
  StrokeSeries out;
  for (const EnrichedPoint& p : s.skeleton) {
    out.arc.push_back(p.arc_pos);
    out.pressure.push_back(p.pressure_raw);
    out.speed.push_back(p.speed_px_s);
  }
  return out;
}

// A zero-duration stroke still gets a one-sample row so the report stays
// complete.
ProgressRow ProgressOrStub(const Stroke& s, int64_t grid_ms) {
  try {
    return MakeProgressRow(s, grid_ms);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerateStroke) throw;
    return ProgressRow{grid_ms, {0}, {0.0}};
  }
}

TierScale StrokeScale(std::span<const double> a, std::span<const double> b,
                      int n) {
  std::vector<double> both(a.begin(), a.end());
  both.insert(both.end(), b.begin(), b.end());
  return MakeTierScale(both, TierScope::kStroke, n);
}

Json ScaleToJson(const TierScale& s) {
  return Json{{"lo", s.lo}, {"hi", s.hi}, {"n", s.n}};
}

Json RowToJson(const ProgressRow& row) {
  return Json{{"grid_ms", row.grid_ms}, {"arc", row.arc_positions}};
}

}  // namespace

ComparisonReport BuildReport(const Session& teacher,
                             const InkMask& teacher_glyph,
                             const Session& student,
                             const InkMask& student_glyph,
                             const ReportOptions& options) {
  if (teacher.strokes.empty() || student.strokes.empty()) {
    throw Error(ErrorKind::kEmptySession,
                "session '" +
                    (teacher.strokes.empty() ? teacher.id : student.id) +
                    "' has no strokes");
  }
  ComparisonReport r;
  r.teacher_id = teacher.id;
  r.student_id = student.id;
  r.pairing = PairStrokes(teacher, student);
  r.stroke_count = static_cast<int>(r.pairing.pairs.size());
  for (const auto& [ti, si] : r.pairing.pairs) {
    const Stroke& ts = teacher.strokes[static_cast<size_t>(ti)];
    const Stroke& ss = student.strokes[static_cast<size_t>(si)];
    const StrokeSeries tv = Series(ts);
    const StrokeSeries sv = Series(ss);
    PairReport p;
    p.index = ti;
    p.pressure = {ResampleCurve(tv.arc, tv.pressure, options.samples),
                  ResampleCurve(sv.arc, sv.pressure, options.samples)};
    p.pressure_diff = PressureDiffProfile(p.pressure.teacher, p.pressure.student);
    p.speed = {ResampleCurve(tv.arc, tv.speed, options.samples),
               ResampleCurve(sv.arc, sv.speed, options.samples)};
    p.speed_diff = PressureDiffProfile(p.speed.teacher, p.speed.student);
    p.teacher_progress = ProgressOrStub(ts, options.grid_ms);
    p.student_progress = ProgressOrStub(ss, options.grid_ms);
    p.pressure_scale = StrokeScale(tv.pressure, sv.pressure, teacher.n_tiers);
    p.speed_scale = StrokeScale(tv.speed, sv.speed, teacher.n_tiers);
    r.pairs.push_back(std::move(p));
  }
  r.teacher_box = ComputeExtremityBox(teacher_glyph);
  r.student_box = ComputeExtremityBox(student_glyph);
  r.mizige_size = std::max(teacher.canvas_w, teacher.canvas_h);
  return r;
}

Json ReportToJson(const ComparisonReport& r) {
  Json doc;
  doc["teacher_id"] = r.teacher_id;
  doc["student_id"] = r.student_id;
  doc["stroke_count"] = r.stroke_count;
  Json mismatch = Json::array();
  for (int i : r.pairing.extra_teacher) {
    mismatch.push_back(Json{{"side", "teacher"}, {"index", i}});
  }
  for (int i : r.pairing.extra_student) {
    mismatch.push_back(Json{{"side", "student"}, {"index", i}});
  }
  doc["mismatch"] = std::move(mismatch);
  Json pairs = Json::array();
  for (const PairReport& p : r.pairs) {
    Json jp;
    jp["index"] = p.index;
    jp["pressure"] = Json{{"teacher", p.pressure.teacher.values},
                          {"student", p.pressure.student.values},
                          {"diff", p.pressure_diff.diff.values},
                          {"max_abs_diff", p.pressure_diff.max_abs_diff},
                          {"argmax_pos", p.pressure_diff.argmax_pos}};
    jp["speed"] = Json{{"teacher", p.speed.teacher.values},
                       {"student", p.speed.student.values}};
    jp["progress"] = Json{{"teacher", RowToJson(p.teacher_progress)},
                          {"student", RowToJson(p.student_progress)}};
    jp["tiers"] = Json{{"pressure_scale", ScaleToJson(p.pressure_scale)},
                       {"speed_scale", ScaleToJson(p.speed_scale)}};
    pairs.push_back(std::move(jp));
  }
  doc["pairs"] = std::move(pairs);
  doc["glyph"] = Json{{"teacher_box", ToJson(r.teacher_box)},
                      {"student_box", ToJson(r.student_box)},
                      {"mizige", Json{{"size", r.mizige_size}}}};
  return doc;
}

std::string ReportToString(const ComparisonReport& report) {
  return ReportToJson(report).dump(2) + "\n";
}

}  // namespace callisense

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

// Reading recorded inputs (overhead frames, sensor log, tip-gap trace),
// rectifying frames to the top-down canvas, and placing every stream on the
// unified session clock.

#ifndef CALLISENSE_INGEST_H_
#define CALLISENSE_INGEST_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "callisense/image.h"
#include "callisense/model.h"

namespace callisense {

using Quad = std::array<Vec2, 4>;

// Projective map from source (camera) space to destination (canvas) space.
struct Homography {
  std::array<std::array<double, 3>, 3> m{};

  static Homography Identity();
  Vec2 Apply(Vec2 p) const;
  Homography Inverse() const;
  double Determinant() const;
  bool IsIdentity() const;
};

// Solves the 8-unknown direct linear system mapping each `src` corner onto the
// matching `dst` corner. The result is normalized so m[2][2] == 1. Throws
// DegenerateQuad when either quad has duplicate or collinear corners.
Homography ComputeHomography(const Quad& src, const Quad& dst);

// Throws DegenerateQuad if any two corners coincide or any three are collinear.
void CheckQuad(const Quad& quad, std::string_view what);

// Samples each destination pixel center from the source through H^-1 with
// bilinear interpolation; samples outside the source read as white.
GrayImage CorrectPerspective(const GrayImage& frame, const Homography& h,
                             int dst_w, int dst_h);

inline constexpr int kDefaultInkThreshold = 100;

// Ink is dark on light paper: a pixel is ink iff value < ink_threshold.
InkMask Binarize(const GrayImage& frame, int ink_threshold, int64_t t_ms = 0);

struct TipSample {
  int64_t t_ms = 0;
  double gap_px = 0;

  friend bool operator==(const TipSample&, const TipSample&) = default;
};

struct TipTrace {
  std::vector<TipSample> samples;
};

struct ManifestFrame {
  std::string file;
  int64_t t_ms = 0;
};

struct FrameManifest {
  std::vector<ManifestFrame> frames;
  Quad paper_quad{};
  int dst_w = 0;
  int dst_h = 0;
  std::string sensor_log;
  std::string tip_trace;
  int64_t sensor_clock_offset_ms = 0;
  int64_t tip_clock_offset_ms = 0;
  // Optional session metadata.
  std::optional<std::string> id;
  std::optional<std::string> role;
  std::optional<std::string> character_label;

  // Destination rectangle corners, clockwise from top-left.
  Quad DstRect() const;
};

FrameManifest ParseManifest(const Json& doc);
Json ManifestToJson(const FrameManifest& manifest);

// Both parsers require the exact header row and strictly increasing times.
// Errors: BadCsvRow (with 1-based line number), NonMonotoneTime.
SensorStream ParseSensorCsv(std::string_view text, std::string_view name = "");
TipTrace ParseTipCsv(std::string_view text, std::string_view name = "");
std::string SensorCsv(const SensorStream& stream);
std::string TipCsv(const TipTrace& trace);

// Pure translation of every timestamp by `offset_ms`.
SensorStream ShiftClock(SensorStream stream, int64_t offset_ms);
TipTrace ShiftClock(TipTrace trace, int64_t offset_ms);

struct TimedFrame {
  GrayImage image;
  int64_t t_ms = 0;
};

struct LoadedInputs {
  FrameManifest manifest;
  std::vector<TimedFrame> frames;
  SensorStream sensor;
  TipTrace tip;
  int sensor_dropped = 0;
  int tip_dropped = 0;
};

// Samples farther than this from the frame span are dropped on load.
inline constexpr int64_t kStreamMarginMs = 500;

// Reads the manifest and every file it names (relative to the manifest's
// directory) and shifts all streams onto the unified clock, whose origin is
// the first frame. Errors: MissingFile, BadCsvRow, NonMonotoneTime,
// SchemaError (manifest), BadImage, DegenerateQuad.
LoadedInputs LoadInputs(const std::filesystem::path& manifest_path);

}  // namespace callisense

#endif  // CALLISENSE_INGEST_H_

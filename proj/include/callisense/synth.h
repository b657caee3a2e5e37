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

// Scripted synthetic writing sessions: overhead frames, tip-gap trace, sensor
// log and the ground truth they were rendered from. The ground truth doubles
// as the scoring oracle for pipeline output.

#ifndef CALLISENSE_SYNTH_H_
#define CALLISENSE_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "callisense/ingest.h"
#include "callisense/model.h"

namespace callisense {

enum class SpeedProfile { kUniform, kEaseInOut };

struct Breakpoint {
  double arc_pos = 0;
  double value = 0;
};

struct StrokeScript {
  std::vector<Vec2> path;
  int64_t duration_ms = 0;
  SpeedProfile speed_profile = SpeedProfile::kUniform;
  std::vector<Breakpoint> pressure_profile{{0, 500}, {1, 500}};
  std::vector<Breakpoint> yaw_profile{{0, 0}, {1, 0}};
  std::vector<Breakpoint> pitch_profile{{0, 0}, {1, 0}};
  std::vector<Breakpoint> roll_profile{{0, 0}, {1, 0}};
  double brush_radius_px = 6;
  // Pen-up time before this stroke. The last stroke's pause is also appended
  // after it.
  int64_t inter_stroke_pause_ms = 300;
};

struct SynthScript {
  // Derived from the path bounds when absent.
  std::optional<int> canvas_w;
  std::optional<int> canvas_h;
  std::vector<StrokeScript> strokes;
};

// Accepts either a list of strokes or {"canvas": [w, h], "strokes": [...]}.
// Errors: EmptyScript, BadProfile, SchemaError.
SynthScript ParseScript(const Json& doc);

// Piecewise-linear breakpoint profile, held constant outside its range.
double ProfileValue(const std::vector<Breakpoint>& profile, double arc_pos);

// Normalized arc position reached at normalized time u in [0, 1].
double ArcAtTime(SpeedProfile profile, double u);

struct SynthNoise {
  double gap_px_sd = 0;
  double pressure_sd = 0;
  double angle_sd_deg = 0;
};

// Brush shadow: every `period_frames` frames, the ink laid down during the
// next `k_frames` frames stays hidden (inside its bounding box) until the
// frame after.
struct OcclusionOptions {
  bool enabled = false;
  int k_frames = 3;
  int period_frames = 10;
};

struct SynthOptions {
  int fps = 30;
  int sensor_hz = 100;
  SynthNoise noise;
  uint64_t seed = 0;
  OcclusionOptions occlusion;
};

struct TruthSample {
  int64_t t_ms = 0;
  Vec2 pos;
  double speed_px_s = 0;
  // Profile angles as scripted (yaw is not wrapped).
  double yaw_deg = 0;
  double pitch_deg = 0;
  double roll_deg = 0;
  double pressure_raw = 0;
};

struct TruthStroke {
  ContactInterval contact;
  // One sample per millisecond over the contact interval.
  std::vector<TruthSample> samples;
};

struct GroundTruth {
  int fps = 0;
  int sensor_hz = 0;
  int canvas_w = 0;
  int canvas_h = 0;
  std::vector<TruthStroke> strokes;
};

Json TruthToJson(const GroundTruth& truth);
GroundTruth TruthFromJson(const Json& doc);

struct SynthResult {
  FrameManifest manifest;
  GroundTruth truth;
};

// Renders the script into `out_dir`: manifest.json, frames/frame_NNNNN.pgm,
// sensor.csv, tip.csv and truth.json. Output is byte-identical for a fixed
// seed. Errors: EmptyScript, BadProfile, BadConfig (fps or sensor_hz <= 0).
SynthResult GenerateSession(const SynthScript& script,
                            const SynthOptions& options,
                            const std::filesystem::path& out_dir);

struct TruthMetrics {
  bool stroke_count_match = false;
  double skeleton_rmse_px = 0;
  double speed_corr = 0;
  double rotation_mae_deg = 0;
  double contact_iou = 0;
};

// Strokes are paired by order. Each skeleton point is matched to the truth
// sample nearest in time; truth rotation is measured from the contact start.
TruthMetrics ScoreAgainstTruth(const Session& session, const GroundTruth& truth);

// A session whose skeletons are the truth samples themselves.
Session SessionFromTruth(const GroundTruth& truth);

}  // namespace callisense

#endif  // CALLISENSE_SYNTH_H_

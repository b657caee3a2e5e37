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

// Sensor-to-skeleton alignment and the derived per-point encodings: brush
// tilt projection, per-stroke relative rotation, and tiered pressure/speed.
//
// Angles are interpolated on an integer micro-degree lattice. Sensor logs are
// recorded at far coarser resolution, so this loses nothing, and it makes
// relative rotation exactly invariant to a constant yaw offset.

#ifndef CALLISENSE_FUSION_H_
#define CALLISENSE_FUSION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "callisense/model.h"
#include "callisense/skeleton.h"

namespace callisense {

struct FusionConfig {
  int n_tiers = 5;
  // Skeleton points of the first stroke used for the arrow zero direction.
  int ref_window_points = 3;

  void Validate() const;
};

inline constexpr int64_t kMicroDegPerDeg = 1'000'000;

// Quantizes to micro-degrees.
int64_t ToMicroDeg(double deg);
// Maps a micro-degree difference into (-180e6, 180e6].
int64_t WrapMicroDeg(int64_t delta);

struct AttachedSample {
  Orientation orientation;
  double pressure_raw = 0;
  // True when the time fell outside the stream and was clamped.
  bool extrapolated = false;
};

// Linear interpolation of the stream at each time. Angles interpolate on
// unwrapped degrees, so a 170 -> -170 yaw step passes through 180, not 0.
// Throws EmptyStream.
std::vector<AttachedSample> AttachSensor(std::span<const int64_t> times,
                                         const SensorStream& stream);
std::vector<AttachedSample> AttachSensor(const RawSkeleton& skeleton,
                                         const SensorStream& stream);

// Brush axis R * e_z with R = Rz(yaw) * Ry(pitch) * Rx(roll), projected onto
// the paper plane. Its magnitude is the sine of the tilt from vertical.
Vec2 TiltProjection(const Orientation& o);

struct RotationResult {
  // Unwrapped yaw relative to the stroke's first point; rotation_deg[0] == 0.
  std::vector<double> rotation_deg;
  // First stroke only: the reverse of the initial advance direction, used to
  // anchor arrow glyphs. Does not affect rotation_deg.
  std::optional<double> arrow_zero_deg;
};

// Throws LengthMismatch when yaws and skeleton points differ in count.
RotationResult RelativeRotation(std::span<const double> yaws_deg,
                                const RawSkeleton& skeleton,
                                bool is_first_stroke, const FusionConfig& cfg);

enum class TierScope { kCharacter, kStroke };

struct TierScale {
  double lo = 0;
  double hi = 0;
  int n = 2;
  TierScope scope = TierScope::kCharacter;

  friend bool operator==(const TierScale&, const TierScale&) = default;
};

// lo/hi = min/max of values. Throws EmptyValues.
TierScale MakeTierScale(std::span<const double> values, TierScope scope, int n);

// floor((v - lo) / (hi - lo) * n) clamped to [0, n-1]; 0 for a degenerate
// scale.
int Tier(double v, const TierScale& scale);

// A stroke after skeleton extraction, ready for enrichment.
struct SkeletonStroke {
  ContactInterval contact;
  int64_t slack_ms = 0;
  RawSkeleton skeleton;
  int64_t pixel_count = 0;
};

struct SessionHeader {
  std::string id;
  Role role = Role::kTeacher;
  std::string character_label;
  int canvas_w = 0;
  int canvas_h = 0;
  int frame_count = 0;
  std::string config_fingerprint;
  std::string glyph_mask;
  std::optional<std::string> frames_dir;
};

// Assembles enriched points for every stroke. Tiers stored on the points use
// character-scope scales spanning all strokes.
Session Enrich(const SessionHeader& header,
               std::span<const SkeletonStroke> strokes,
               const SensorStream& stream, const FusionConfig& cfg);

}  // namespace callisense

#endif  // CALLISENSE_FUSION_H_

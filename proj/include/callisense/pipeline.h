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

// End-to-end processing of one recorded session, plus the file-level
// comparison shared by the command line and the HTTP server.

#ifndef CALLISENSE_PIPELINE_H_
#define CALLISENSE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "callisense/compare.h"
#include "callisense/error.h"
#include "callisense/fusion.h"
#include "callisense/image.h"
#include "callisense/model.h"
#include "callisense/segment.h"
#include "callisense/skeleton.h"

namespace callisense {

struct PipelineConfig {
  int ink_threshold = kDefaultInkThreshold;
  ContactConfig contact;
  int64_t slack_ms = kDefaultSlackMs;
  SkeletonConfig skeleton;
  FusionConfig fusion;

  // Throws BadConfig.
  void Validate() const;
};

// Nested by module: {"ingest": {"ink_threshold"}, "contact": {...},
// "segment": {"slack_ms"}, "skeleton": {...}, "fusion": {...}}. Missing keys
// keep their defaults; unknown keys are rejected. Throws BadConfig.
PipelineConfig ConfigFromJson(const Json& doc);
Json ConfigToJson(const PipelineConfig& config);
PipelineConfig LoadConfig(const std::filesystem::path& path);
// "fnv1a64:<16 hex digits>" over the compact canonical JSON.
std::string ConfigFingerprint(const PipelineConfig& config);

// An Error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);
  const std::string& stage() const { return stage_; }
  // 2 for input problems (ingest), 3 for processing failures.
  int exit_code() const { return stage_ == "ingest" ? 2 : 3; }

 private:
  std::string stage_;
};

struct ProcessOptions {
  // Each falls back to the manifest, then to a default (output stem, teacher,
  // empty label).
  std::optional<std::string> id;
  std::optional<std::string> role;
  std::optional<std::string> character_label;
  // Writes corrected frames as PNG next to the session.
  bool keep_frames = false;
};

struct ProcessResult {
  Session session;
  int64_t skeleton_points = 0;
  int64_t discarded_pixels = 0;

  std::string Summary() const;
};

// Runs ingest, segment, skeleton, fusion and output. Writes the session to
// `out_path`, the glyph mask to <stem>.glyph.pgm and, if requested, frames to
// <stem>.frames/. Throws StageError.
ProcessResult ProcessSession(const std::filesystem::path& manifest_path,
                             const PipelineConfig& config,
                             const std::filesystem::path& out_path,
                             const ProcessOptions& options = {});

Session LoadSession(const std::filesystem::path& path);
// The glyph sidecar of a session file; a pixel is ink when darker than 128.
InkMask LoadGlyphMask(const std::filesystem::path& session_path,
                      const Session& session);

ComparisonReport CompareSessionFiles(const std::filesystem::path& teacher,
                                     const std::filesystem::path& student,
                                     const ReportOptions& options);

}  // namespace callisense

#endif  // CALLISENSE_PIPELINE_H_

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

#include "callisense/pipeline.h"

#include <cstdio>
#include <set>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "callisense/ingest.h"
#include "spdlog/spdlog.h"

namespace callisense {

namespace fs = std::filesystem;

void PipelineConfig::Validate() const {
  if (ink_threshold < 1 || ink_threshold > 255) {
    throw Error(ErrorKind::kBadConfig, "ingest: ink_threshold must be in [1, 255]");
  }
  if (slack_ms < 0) {
    throw Error(ErrorKind::kBadConfig, "segment: slack_ms must be >= 0");
  }
  contact.Validate();
  skeleton.Validate();
  fusion.Validate();
}

namespace {

[[noreturn]] void ConfigFail(const std::string& msg) {
  throw Error(ErrorKind::kBadConfig, msg);
}

const Json* Section(const Json& doc, const char* name,
                    const std::set<std::string>& keys) {
  if (!doc.contains(name)) return nullptr;
  const Json& s = doc.at(name);
  if (!s.is_object()) ConfigFail(std::string(name) + " must be an object");
  for (const auto& [key, value] : s.items()) {
    if (!keys.contains(key)) {
      ConfigFail(std::string(name) + ": unknown key '" + key + "'");
    }
  }
  return &s;
}

template <typename T>
void Read(const Json* section, const char* section_name, const char* key,
          T& out) {
  if (section == nullptr || !section->contains(key)) return;
  const Json& v = section->at(key);
  const std::string where = std::string(section_name) + "." + key;
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) ConfigFail(where + " must be an integer");
  } else {
    if (!v.is_number()) ConfigFail(where + " must be a number");
  }
  out = v.get<T>();
}

}  // namespace

PipelineConfig ConfigFromJson(const Json& doc) {
  if (!doc.is_object()) ConfigFail("config must be a JSON object");
  static const std::set<std::string> kSections = {"ingest", "contact", "segment",
                                                  "skeleton", "fusion"};
  for (const auto& [key, value] : doc.items()) {
    if (!kSections.contains(key)) ConfigFail("unknown section '" + key + "'");
  }
  PipelineConfig c;
  const Json* ingest = Section(doc, "ingest", {"ink_threshold"});
  Read(ingest, "ingest", "ink_threshold", c.ink_threshold);
  const Json* contact = Section(
      doc, "contact", {"t_low_px", "t_high_px", "min_down_ms", "min_up_ms"});
  Read(contact, "contact", "t_low_px", c.contact.t_low_px);
  Read(contact, "contact", "t_high_px", c.contact.t_high_px);
  Read(contact, "contact", "min_down_ms", c.contact.min_down_ms);
  Read(contact, "contact", "min_up_ms", c.contact.min_up_ms);
  const Json* segment = Section(doc, "segment", {"slack_ms"});
  Read(segment, "segment", "slack_ms", c.slack_ms);
  const Json* skeleton = Section(
      doc, "skeleton", {"min_increment_px", "max_jump_px", "smooth_window"});
  Read(skeleton, "skeleton", "min_increment_px", c.skeleton.min_increment_px);
  Read(skeleton, "skeleton", "max_jump_px", c.skeleton.max_jump_px);
  Read(skeleton, "skeleton", "smooth_window", c.skeleton.smooth_window);
  const Json* fusion = Section(doc, "fusion", {"n_tiers", "ref_window_points"});
  Read(fusion, "fusion", "n_tiers", c.fusion.n_tiers);
  Read(fusion, "fusion", "ref_window_points", c.fusion.ref_window_points);
  c.Validate();
  return c;
}

Json ConfigToJson(const PipelineConfig& c) {
  return Json{
      {"ingest", Json{{"ink_threshold", c.ink_threshold}}},
      {"contact", Json{{"t_low_px", c.contact.t_low_px},
                       {"t_high_px", c.contact.t_high_px},
                       {"min_down_ms", c.contact.min_down_ms},
                       {"min_up_ms", c.contact.min_up_ms}}},
      {"segment", Json{{"slack_ms", c.slack_ms}}},
      {"skeleton", Json{{"min_increment_px", c.skeleton.min_increment_px},
                        {"max_jump_px", c.skeleton.max_jump_px},
                        {"smooth_window", c.skeleton.smooth_window}}},
      {"fusion", Json{{"n_tiers", c.fusion.n_tiers},
                      {"ref_window_points", c.fusion.ref_window_points}}}};
}

PipelineConfig LoadConfig(const fs::path& path) {
  const std::string text = ReadFileBytes(path);
  const Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) ConfigFail(path.string() + ": not valid JSON");
  return ConfigFromJson(doc);
}

std::string ConfigFingerprint(const PipelineConfig& config) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : ConfigToJson(config).dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.kind(), stage + ": " + cause.detail()),
      stage_(std::move(stage)) {}

std::string ProcessResult::Summary() const {
  return "strokes=" + std::to_string(session.strokes.size()) +
         " points=" + std::to_string(skeleton_points) +
         " discarded_pixels=" + std::to_string(discarded_pixels);
}

namespace {

template <typename F>
auto RunStage(const char* stage, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

Role ParseRole(const std::string& name) {
  if (name == "teacher") return Role::kTeacher;
  if (name == "student") return Role::kStudent;
  throw Error(ErrorKind::kSchema, "role must be teacher or student, got '" +
                                      name + "'");
}

std::string FramePngName(size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%05zu.png", k);
  return buf;
}

struct Segmented {
  std::vector<GrayImage> corrected;
  TimedPixelMap timed;
  std::vector<ContactInterval> contacts;
  StrokeGrouping groups;
};

}  // namespace

ProcessResult ProcessSession(const fs::path& manifest_path,
                             const PipelineConfig& config,
                             const fs::path& out_path,
                             const ProcessOptions& options) {
  RunStage("ingest", [&] {
    config.Validate();
    return 0;
  });
  struct Ingested {
    LoadedInputs in;
    Homography h;
    Role role;
  };
  Ingested ing = RunStage("ingest", [&] {
    Ingested r;
    r.in = LoadInputs(manifest_path);
    const FrameManifest& m = r.in.manifest;
    r.h = m.paper_quad == m.DstRect()
              ? Homography::Identity()
              : ComputeHomography(m.paper_quad, m.DstRect());
    r.role = ParseRole(options.role.value_or(m.role.value_or("teacher")));
    return r;
  });
  const LoadedInputs& in = ing.in;
  if (in.sensor_dropped > 0 || in.tip_dropped > 0) {
    spdlog::info("dropped {} sensor and {} tip samples outside the frame span",
                 in.sensor_dropped, in.tip_dropped);
  }
  const int dst_w = in.manifest.dst_w;
  const int dst_h = in.manifest.dst_h;

  Segmented seg = RunStage("segment", [&] {
    Segmented r;
    std::vector<InkMask> masks;
    for (const TimedFrame& f : in.frames) {
      // An identity mapping means the frames are already top-down.
      if (ing.h.IsIdentity() &&
          (f.image.width() != dst_w || f.image.height() != dst_h)) {
        throw Error(ErrorKind::kDimensionMismatch,
                    "frame at " + std::to_string(f.t_ms) + " ms is " +
                        std::to_string(f.image.width()) + "x" +
                        std::to_string(f.image.height()) + ", canvas is " +
                        std::to_string(dst_w) + "x" + std::to_string(dst_h));
      }
      GrayImage img = ing.h.IsIdentity()
                          ? f.image
                          : CorrectPerspective(f.image, ing.h, dst_w, dst_h);
      masks.push_back(Binarize(img, config.ink_threshold, f.t_ms));
      if (options.keep_frames) r.corrected.push_back(std::move(img));
    }
    r.timed = TimestampPixels(masks);
    r.contacts = DetectContacts(in.tip, config.contact);
    r.groups = GroupStrokes(r.timed, r.contacts, config.slack_ms);
    return r;
  });

  std::vector<int64_t> frame_times;
  for (const TimedFrame& f : in.frames) frame_times.push_back(f.t_ms);

  std::vector<SkeletonStroke> strokes = RunStage("skeleton", [&] {
    std::vector<SkeletonStroke> r;
    for (size_t i = 0; i < seg.groups.strokes.size(); ++i) {
      const auto& pixels = seg.groups.strokes[i];
      const ContactInterval& contact = seg.contacts[i];
      if (pixels.empty()) {
        spdlog::warn("contact {} [{}, {}] ms left no ink; skipped", i,
                     contact.start_ms, contact.end_ms);
        continue;
      }
      const auto increments = StrokeIncrements(pixels, frame_times);
      try {
        r.push_back({contact, config.slack_ms,
                     ExtractSkeleton(increments, config.skeleton),
                     static_cast<int64_t>(pixels.size())});
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kEmptyStroke) throw;
        spdlog::warn("contact {} skipped: {}", i, e.what());
      }
    }
    if (r.empty()) {
      throw Error(ErrorKind::kEmptySession, "no contact produced a skeleton");
    }
    return r;
  });

  const std::string stem = out_path.stem().string();
  SessionHeader header;
  header.id = options.id.value_or(in.manifest.id.value_or(stem));
  header.role = ing.role;
  header.character_label =
      options.character_label.value_or(in.manifest.character_label.value_or(""));
  header.canvas_w = dst_w;
  header.canvas_h = dst_h;
  header.frame_count = static_cast<int>(in.frames.size());
  header.config_fingerprint = ConfigFingerprint(config);
  header.glyph_mask = stem + ".glyph.pgm";
  if (options.keep_frames) header.frames_dir = stem + ".frames";

  ProcessResult result;
  result.session = RunStage("fusion", [&] {
    return Enrich(header, strokes, in.sensor, config.fusion);
  });
  for (const Stroke& s : result.session.strokes) {
    result.skeleton_points += static_cast<int64_t>(s.skeleton.size());
  }
  result.discarded_pixels = seg.groups.discarded;

  RunStage("output", [&] {
    const std::string text = SessionToString(result.session);
    ValidateSession(Json::parse(text));
    const fs::path dir = out_path.parent_path();
    if (!dir.empty()) {
      std::error_code ec;
      fs::create_directories(dir, ec);
    }
    WritePgm(dir / header.glyph_mask, MaskToImage(seg.timed.ToMask()));
    if (options.keep_frames) {
      const fs::path frames = dir / *header.frames_dir;
      std::error_code ec;
      fs::create_directories(frames, ec);
      if (ec) {
        throw Error(ErrorKind::kIo, "cannot create " + frames.string());
      }
      for (size_t k = 0; k < seg.corrected.size(); ++k) {
        WriteFileBytes(frames / FramePngName(k), EncodePng(seg.corrected[k]));
      }
    }
    WriteFileBytes(out_path, text);
    return 0;
  });
  return result;
}

Session LoadSession(const fs::path& path) {
  return ParseSession(ReadFileBytes(path));
}

InkMask LoadGlyphMask(const fs::path& session_path, const Session& session) {
  const GrayImage img = ReadPgm(session_path.parent_path() / session.glyph_mask);
  return Binarize(img, 128);
}

ComparisonReport CompareSessionFiles(const fs::path& teacher,
                                     const fs::path& student,
                                     const ReportOptions& options) {
  const Session t = LoadSession(teacher);
  const Session s = LoadSession(student);
  return BuildReport(t, LoadGlyphMask(teacher, t), s, LoadGlyphMask(student, s),
                     options);
}

}  // namespace callisense

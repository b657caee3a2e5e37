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

#include "cli.h"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "callisense/error.h"
#include "callisense/image.h"
#include "callisense/pipeline.h"
#include "callisense/server.h"
#include "spdlog/sinks/stdout_sinks.h"
#include "spdlog/spdlog.h"

namespace callisense::cli {

namespace fs = std::filesystem;

namespace {

// Problems with what the user handed us, as opposed to failures while
// processing valid input.
bool IsInputError(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSchema:
    case ErrorKind::kInvariant:
    case ErrorKind::kMissingFile:
    case ErrorKind::kBadCsvRow:
    case ErrorKind::kNonMonotoneTime:
    case ErrorKind::kBadImage:
    case ErrorKind::kBadConfig:
    case ErrorKind::kDegenerateQuad:
    case ErrorKind::kEmptyScript:
    case ErrorKind::kBadProfile:
      return true;
    default:
      return false;
  }
}

int Fail(std::ostream& err, const std::string& stage, const Error& e) {
  err << "error [" << stage << "]: " << e.what() << "\n";
  return IsInputError(e.kind()) ? kExitInput : kExitProcessing;
}

Json ParseOverrideValue(const std::string& text) {
  Json v = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  return v.is_discarded() ? Json(text) : v;
}

PipelineConfig ResolveConfig(const ProcessArgs& args) {
  Json doc = args.config ? ConfigToJson(LoadConfig(*args.config))
                         : ConfigToJson(PipelineConfig{});
  for (const std::string& s : args.set) {
    const auto eq = s.find('=');
    const auto dot = s.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw Error(ErrorKind::kBadConfig,
                  "--set expects section.key=value, got '" + s + "'");
    }
    const std::string section = s.substr(0, dot);
    const std::string key = s.substr(dot + 1, eq - dot - 1);
    if (!doc.contains(section)) {
      throw Error(ErrorKind::kBadConfig, "unknown section '" + section + "'");
    }
    doc[section][key] = ParseOverrideValue(s.substr(eq + 1));
  }
  return ConfigFromJson(doc);
}

}  // namespace

int CmdProcess(const ProcessArgs& args, std::ostream& out, std::ostream& err) {
  PipelineConfig config;
  try {
    config = ResolveConfig(args);
  } catch (const Error& e) {
    return Fail(err, "config", e);
  }
  ProcessOptions options;
  options.id = args.id;
  options.role = args.role;
  options.character_label = args.label;
  options.keep_frames = args.keep_frames;
  try {
    const ProcessResult r =
        ProcessSession(args.manifest, config, args.out, options);
    out << r.Summary() << "\n";
    return kExitOk;
  } catch (const StageError& e) {
    err << "error [" << e.stage() << "]: " << e.what() << "\n";
    return e.exit_code();
  }
}

int CmdSynth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  SynthScript script;
  try {
    const std::string text = ReadFileBytes(args.script);
    const Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) {
      throw Error(ErrorKind::kSchema, args.script + ": not valid JSON");
    }
    script = ParseScript(doc);
  } catch (const Error& e) {
    return Fail(err, "script", e);
  }
  SynthOptions options;
  options.fps = args.fps;
  options.sensor_hz = args.hz;
  options.noise = args.noise;
  options.seed = args.seed;
  options.occlusion = args.occlusion;
  try {
    const SynthResult r = GenerateSession(script, options, args.out);
    out << "frames=" << r.manifest.frames.size()
        << " strokes=" << r.truth.strokes.size() << " canvas="
        << r.manifest.dst_w << "x" << r.manifest.dst_h << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return Fail(err, "synth", e);
  }
}

int CmdCompare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  if (args.samples < 2 || args.grid_ms < 1) {
    return Fail(err, "compare",
                Error(ErrorKind::kBadConfig,
                      "--samples must be >= 2 and --grid-ms >= 1"));
  }
  try {
    const ComparisonReport r = CompareSessionFiles(
        args.teacher, args.student, ReportOptions{args.samples, args.grid_ms});
    WriteFileBytes(args.out, ReportToString(r));
    out << "pairs=" << r.pairs.size()
        << " mismatched=" << r.pairing.extra_teacher.size() +
                                 r.pairing.extra_student.size()
        << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return Fail(err, "compare", e);
  }
}

int CmdServe(const ServeArgs& args, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(args.data)) {
    err << "error [serve]: data directory '" << args.data
        << "' does not exist\n";
    return kExitInput;
  }
  std::optional<fs::path> static_dir;
  if (args.static_dir) static_dir = *args.static_dir;
  SessionServer server(args.data, static_dir);
  out << "serving " << server.index()->entries().size() << " sessions on http://"
      << args.host << ":" << args.port << "\n"
      << std::flush;
  if (!server.Listen(args.host, args.port)) {
    err << "error [serve]: cannot listen on " << args.host << ":" << args.port
        << "\n";
    return kExitProcessing;
  }
  return kExitOk;
}

void ConfigureLogging() {
  auto logger = spdlog::stderr_logger_st("callisense");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("CALLISENSE_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::warn);
  }
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Brush calligraphy process capture and comparison",
               "callisense"};
  app.require_subcommand(1);

  ProcessArgs process;
  auto* p = app.add_subcommand("process", "Process one recorded session");
  p->add_option("--manifest", process.manifest, "Frame manifest")->required();
  p->add_option("--config", process.config, "Pipeline config JSON");
  p->add_option("--out", process.out, "Output session JSON")->required();
  p->add_option("--id", process.id, "Session id");
  p->add_option("--role", process.role, "teacher or student");
  p->add_option("--label", process.label, "Character label");
  p->add_flag("--keep-frames", process.keep_frames,
              "Retain corrected frames for the viewer");
  p->add_option("--set", process.set, "Config override section.key=value");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Render a scripted synthetic session");
  s->add_option("--script", synth.script, "Stroke script JSON")->required();
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--seed", synth.seed, "Noise seed");
  s->add_option("--fps", synth.fps, "Frame rate");
  s->add_option("--hz", synth.hz, "Sensor and tip sample rate");
  s->add_option("--gap-sd", synth.noise.gap_px_sd, "Tip gap noise (px)");
  s->add_option("--pressure-sd", synth.noise.pressure_sd, "Pressure noise");
  s->add_option("--angle-sd", synth.noise.angle_sd_deg, "Angle noise (deg)");
  s->add_flag("--occlusion", synth.occlusion.enabled, "Simulate brush shadow");
  s->add_option("--occlusion-k", synth.occlusion.k_frames,
                "Frames each shadow lasts");
  s->add_option("--occlusion-period", synth.occlusion.period_frames,
                "Frames between shadows");

  CompareArgs compare;
  auto* c = app.add_subcommand("compare", "Compare a student with a teacher");
  c->add_option("--teacher", compare.teacher, "Teacher session")->required();
  c->add_option("--student", compare.student, "Student session")->required();
  c->add_option("--out", compare.out, "Output report JSON")->required();
  c->add_option("--samples", compare.samples, "Resample count");
  c->add_option("--grid-ms", compare.grid_ms, "Progress grid (ms)");

  ServeArgs serve;
  auto* v = app.add_subcommand("serve", "Serve the session API");
  v->add_option("--data", serve.data, "Directory of sessions")->required();
  v->add_option("--port", serve.port, "TCP port");
  v->add_option("--host", serve.host, "Bind address");
  v->add_option("--static", serve.static_dir, "Static UI assets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  if (p->parsed()) return CmdProcess(process, out, err);
  if (s->parsed()) return CmdSynth(synth, out, err);
  if (c->parsed()) return CmdCompare(compare, out, err);
  return CmdServe(serve, out, err);
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("callisense");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace callisense::cli

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

#ifndef CALLISENSE_TOOLS_CLI_H_
#define CALLISENSE_TOOLS_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "callisense/synth.h"

namespace callisense::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitProcessing = 3;

struct ProcessArgs {
  std::string manifest;
  std::optional<std::string> config;
  std::string out;
  std::optional<std::string> id;
  std::optional<std::string> role;
  std::optional<std::string> label;
  bool keep_frames = false;
  // "section.key=value" overrides applied on top of the config file.
  std::vector<std::string> set;
};

struct SynthArgs {
  std::string script;
  std::string out;
  uint64_t seed = 0;
  int fps = 30;
  int hz = 100;
  SynthNoise noise;
  OcclusionOptions occlusion;
};

struct CompareArgs {
  std::string teacher;
  std::string student;
  std::string out;
  int samples = 100;
  int64_t grid_ms = 50;
};

struct ServeArgs {
  std::string data;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::optional<std::string> static_dir;
};

int CmdProcess(const ProcessArgs& args, std::ostream& out, std::ostream& err);
int CmdSynth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int CmdCompare(const CompareArgs& args, std::ostream& out, std::ostream& err);
int CmdServe(const ServeArgs& args, std::ostream& out, std::ostream& err);

// Reads CALLISENSE_LOG (error|warn|info|debug) and routes logs to stderr.
void ConfigureLogging();

// Parses argv and dispatches to a subcommand. Returns the exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace callisense::cli

#endif  // CALLISENSE_TOOLS_CLI_H_

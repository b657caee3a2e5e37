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

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "callisense/compare.h"
#include "callisense/image.h"
#include "callisense/pipeline.h"
#include "callisense/synth.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace callisense {
namespace {

namespace fs = std::filesystem;
using testing::DataPath;
using testing::ScratchDir;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new ScratchDir;
    const CliRun r = Cli({"synth", "--script", DataPath("three_strokes.json").string(),
                       "--out", (*dir_ / "synth").string(), "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  // A private copy of the synth session that a test may damage.
  fs::path CopySynth(const std::string& name) {
    const fs::path to = *dir_ / name;
    fs::copy(*dir_ / "synth", to, fs::copy_options::recursive);
    return to;
  }

  static ScratchDir* dir_;
};

ScratchDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, SynthPrintsSummary) {
  const CliRun r = Cli({"synth", "--script", DataPath("three_strokes.json").string(),
                     "--out", (*dir_ / "again").string(), "--seed", "3"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("frames=", 0), 0u);
  EXPECT_NE(r.out.find("strokes=3 canvas=256x256"), std::string::npos);
  EXPECT_EQ(ReadFileBytes(*dir_ / "again" / "sensor.csv"),
            ReadFileBytes(*dir_ / "synth" / "sensor.csv"));
}

TEST_F(CliTest, SynthRejectsEmptyScript) {
  WriteFileBytes(*dir_ / "empty.json", "[]");
  const CliRun r = Cli({"synth", "--script", (*dir_ / "empty.json").string(),
                     "--out", (*dir_ / "nothing").string()});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("EmptyScript"), std::string::npos);
}

TEST_F(CliTest, ProcessWritesValidSessionAndGlyph) {
  const fs::path out = *dir_ / "teacher.json";
  const CliRun r = Cli({"process", "--manifest", (*dir_ / "synth/manifest.json").string(),
                     "--out", out.string(), "--id", "t", "--role", "teacher",
                     "--label", "zi"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("strokes=3 points=", 0), 0u) << r.out;
  const Session s = LoadSession(out);
  EXPECT_EQ(s.id, "t");
  EXPECT_EQ(s.character_label, "zi");
  EXPECT_EQ(s.strokes.size(), 3u);
  EXPECT_EQ(s.config_fingerprint, ConfigFingerprint(PipelineConfig{}));
  EXPECT_TRUE(LoadGlyphMask(out, s).AnyInk());
  EXPECT_FALSE(s.frames_dir.has_value());
}

TEST_F(CliTest, ProcessIsDeterministic) {
  const fs::path m = *dir_ / "synth/manifest.json";
  for (const char* sub : {"d1", "d2"}) {
    fs::create_directories(*dir_ / sub);
    ASSERT_EQ(Cli({"process", "--manifest", m.string(), "--out",
                   (*dir_ / sub / "s.json").string()}).code, 0);
  }
  for (const char* name : {"s.json", "s.glyph.pgm"}) {
    EXPECT_EQ(ReadFileBytes(*dir_ / "d1" / name),
              ReadFileBytes(*dir_ / "d2" / name));
  }
}

TEST_F(CliTest, MissingSensorCsvIsAnInputError) {
  const fs::path d = CopySynth("no_sensor");
  fs::remove(d / "sensor.csv");
  const CliRun r = Cli({"process", "--manifest", (d / "manifest.json").string(),
                     "--out", (d / "s.json").string()});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("sensor.csv"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("[ingest]"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(d / "s.json"));
}

TEST_F(CliTest, MismatchedFrameSizeFailsInSegment) {
  const fs::path d = CopySynth("bad_frame");
  const Json m = Json::parse(ReadFileBytes(d / "manifest.json"));
  const std::string victim = m["frames"][5]["file"];
  WritePgm(d / victim, GrayImage(17, 11));
  const CliRun r = Cli({"process", "--manifest", (d / "manifest.json").string(),
                     "--out", (d / "s.json").string()});
  EXPECT_EQ(r.code, cli::kExitProcessing);
  EXPECT_NE(r.err.find("[segment]"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigFileAndSetOverrides) {
  WriteFileBytes(*dir_ / "cfg.json", R"({"fusion": {"n_tiers": 7}})");
  const fs::path out = *dir_ / "cfg_session.json";
  CliRun r = Cli({"process", "--manifest", (*dir_ / "synth/manifest.json").string(),
               "--config", (*dir_ / "cfg.json").string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(LoadSession(out).n_tiers, 7);
  r = Cli({"process", "--manifest", (*dir_ / "synth/manifest.json").string(),
           "--config", (*dir_ / "cfg.json").string(), "--set", "fusion.n_tiers=4",
           "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Session s = LoadSession(out);
  EXPECT_EQ(s.n_tiers, 4);
  PipelineConfig want;
  want.fusion.n_tiers = 4;
  EXPECT_EQ(s.config_fingerprint, ConfigFingerprint(want));

  WriteFileBytes(*dir_ / "bad_cfg.json", R"({"fusion": {"tiers": 3}})");
  r = Cli({"process", "--manifest", (*dir_ / "synth/manifest.json").string(),
           "--config", (*dir_ / "bad_cfg.json").string(), "--out", out.string()});
  EXPECT_EQ(r.code, cli::kExitInput);
  r = Cli({"process", "--manifest", (*dir_ / "synth/manifest.json").string(),
           "--set", "contact.t_low_px=20", "--out", out.string()});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("[config]"), std::string::npos);
}

TEST_F(CliTest, SelfCompareHasZeroDiffs) {
  const fs::path s = *dir_ / "self.json";
  ASSERT_EQ(Cli({"process", "--manifest", (*dir_ / "synth/manifest.json").string(),
                 "--out", s.string()}).code, 0);
  const CliRun r = Cli({"compare", "--teacher", s.string(), "--student", s.string(),
                     "--out", (*dir_ / "report.json").string(), "--samples", "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "pairs=3 mismatched=0\n");
  const Json j = Json::parse(ReadFileBytes(*dir_ / "report.json"));
  for (const Json& p : j["pairs"]) {
    EXPECT_EQ(p["pressure"]["diff"].size(), 40u);
    for (const Json& v : p["pressure"]["diff"]) EXPECT_EQ(v.get<double>(), 0.0);
    EXPECT_EQ(p["pressure"]["max_abs_diff"].get<double>(), 0.0);
  }
  EXPECT_EQ(Cli({"compare", "--teacher", s.string(), "--student", s.string(),
                 "--out", (*dir_ / "r2.json").string(), "--samples", "1"}).code,
            cli::kExitInput);
}

Json PressureBumpScript(bool bump) {
  Json pressure = Json::array({Json::array({0, 500}), Json::array({1, 500})});
  if (bump) {
    pressure = Json::array({Json::array({0, 500}), Json::array({0.3, 500}),
                            Json::array({0.4, 800}), Json::array({0.5, 500}),
                            Json::array({1, 500})});
  }
  return Json{{"canvas", {240, 120}},
              {"strokes", Json::array({Json{{"path", {{20, 60}, {220, 60}}},
                                            {"duration_ms", 1500},
                                            {"pressure_profile", pressure}}})}};
}

// The student presses harder around 40% of the stroke; the report should
// locate the peak difference there.
TEST_F(CliTest, ScriptedPressureOffsetIsLocated) {
  std::vector<fs::path> sessions;
  for (bool bump : {false, true}) {
    const std::string name = bump ? "bump" : "flat";
    WriteFileBytes(*dir_ / (name + "_script.json"), PressureBumpScript(bump).dump());
    ASSERT_EQ(Cli({"synth", "--script", (*dir_ / (name + "_script.json")).string(),
                   "--out", (*dir_ / (name + "_dir")).string()}).code, 0);
    sessions.push_back(*dir_ / (name + ".json"));
    ASSERT_EQ(Cli({"process", "--manifest",
                   (*dir_ / (name + "_dir") / "manifest.json").string(), "--out",
                   sessions.back().string(), "--id", name}).code, 0);
  }
  const ComparisonReport r =
      CompareSessionFiles(sessions[0], sessions[1], ReportOptions{});
  ASSERT_EQ(r.pairs.size(), 1u);
  const DiffProfile& d = r.pairs[0].pressure_diff;
  const double cell = 1.0 / (kDefaultCurveSamples - 1);
  EXPECT_NEAR(d.argmax_pos, 0.4, cell) << "max diff " << d.max_abs_diff;
  EXPECT_GT(d.max_abs_diff, 250);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({}).code, cli::kExitInput);
  EXPECT_EQ(Cli({"process"}).code, cli::kExitInput);
  EXPECT_EQ(Cli({"bogus"}).code, cli::kExitInput);
  const CliRun help = Cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("process"), std::string::npos);
  const CliRun serve = Cli({"serve", "--data", (*dir_ / "absent").string()});
  EXPECT_EQ(serve.code, cli::kExitInput);
}

TEST(PipelineConfigTest, JsonRoundTripAndFingerprint) {
  const PipelineConfig def;
  EXPECT_EQ(ConfigToJson(ConfigFromJson(Json::object())), ConfigToJson(def));
  PipelineConfig c;
  c.slack_ms = 120;
  c.contact.t_high_px = 12;
  EXPECT_EQ(ConfigToJson(ConfigFromJson(ConfigToJson(c))), ConfigToJson(c));
  EXPECT_NE(ConfigFingerprint(c), ConfigFingerprint(def));
  EXPECT_EQ(ConfigFingerprint(def), ConfigFingerprint(PipelineConfig{}));
  EXPECT_EQ(ConfigFingerprint(def).rfind("fnv1a64:", 0), 0u);
  EXPECT_EQ(ConfigFingerprint(def).size(), 8u + 16u);
  for (const char* bad : {R"({"extra": {}})", R"({"segment": {"slack": 1}})",
                          R"({"segment": {"slack_ms": "x"}})", R"({"fusion": {"n_tiers": 1}})",
                          "[]"}) {
    try {
      ConfigFromJson(Json::parse(bad));
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kBadConfig) << bad;
    }
  }
}

TEST(PipelineConfigTest, FingerprintIsFnv1aOfCompactDump) {
  const std::string text = ConfigToJson(PipelineConfig{}).dump();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) h = (h ^ c) * 0x100000001b3ull;
  std::ostringstream want;
  want << "fnv1a64:" << std::hex;
  want.width(16);
  want.fill('0');
  want << h;
  EXPECT_EQ(ConfigFingerprint(PipelineConfig{}), want.str());
}

}  // namespace
}  // namespace callisense

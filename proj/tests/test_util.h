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

#ifndef CALLISENSE_TESTS_TEST_UTIL_H_
#define CALLISENSE_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include "callisense/model.h"

namespace callisense::testing {

// A fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  ScratchDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("callisense_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::filesystem::path DataPath(const std::string& name) {
  return std::filesystem::path(CALLISENSE_TEST_DATA_DIR) / name;
}

inline EnrichedPoint Point(double x, double y, int64_t t, double arc) {
  EnrichedPoint p;
  p.pos = {x, y};
  p.t_ms = t;
  p.speed_px_s = 10;
  p.pressure_raw = 500;
  p.arc_pos = arc;
  return p;
}

// One stroke, two skeleton points.
inline Session MinimalSession() {
  Session s;
  s.id = "s1";
  s.canvas_w = 64;
  s.canvas_h = 48;
  s.frame_count = 3;
  s.config_fingerprint = "fnv1a64:0000000000000000";
  s.glyph_mask = "s1.glyph.pgm";
  Stroke st;
  st.contact = {0, 100, 0};
  st.skeleton = {Point(10, 10, 0, 0), Point(20, 10, 50, 1)};
  st.pixel_count = 12;
  s.strokes.push_back(st);
  return s;
}

}  // namespace callisense::testing

#endif  // CALLISENSE_TESTS_TEST_UTIL_H_

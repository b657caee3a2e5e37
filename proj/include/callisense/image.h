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

#ifndef CALLISENSE_IMAGE_H_
#define CALLISENSE_IMAGE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "callisense/model.h"

namespace callisense {

// 8-bit grayscale raster, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int w, int h, uint8_t fill = 255);

  int width() const { return w_; }
  int height() const { return h_; }
  bool empty() const { return w_ == 0 || h_ == 0; }
  bool Contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < w_ && y < h_;
  }

  uint8_t at(int x, int y) const { return px_[Index(x, y)]; }
  uint8_t& at(int x, int y) { return px_[Index(x, y)]; }
  const std::vector<uint8_t>& pixels() const { return px_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  size_t Index(int x, int y) const {
    return static_cast<size_t>(y) * static_cast<size_t>(w_) +
           static_cast<size_t>(x);
  }

  int w_ = 0;
  int h_ = 0;
  std::vector<uint8_t> px_;
};

// Binary ink raster (true = ink) stamped with the time it was observed.
class InkMask {
 public:
  InkMask() = default;
  InkMask(int w, int h, int64_t t_ms = 0);

  int width() const { return w_; }
  int height() const { return h_; }
  int64_t t_ms() const { return t_ms_; }
  void set_t_ms(int64_t t) { t_ms_ = t; }
  bool SameShape(const InkMask& other) const {
    return w_ == other.w_ && h_ == other.h_;
  }
  bool Contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < w_ && y < h_;
  }

  bool at(int x, int y) const { return bits_[Index(x, y)] != 0; }
  void set(int x, int y, bool ink) { bits_[Index(x, y)] = ink ? 1 : 0; }
  size_t CountInk() const;
  bool AnyInk() const { return CountInk() > 0; }

  friend bool operator==(const InkMask&, const InkMask&) = default;

 private:
  size_t Index(int x, int y) const {
    return static_cast<size_t>(y) * static_cast<size_t>(w_) +
           static_cast<size_t>(x);
  }

  int w_ = 0;
  int h_ = 0;
  int64_t t_ms_ = 0;
  std::vector<uint8_t> bits_;
};

// Binary "P5" PGM with maxval 255. Comments in the header are accepted.
GrayImage DecodePgm(std::string_view bytes);
std::string EncodePgm(const GrayImage& image);
GrayImage ReadPgm(const std::filesystem::path& path);
void WritePgm(const std::filesystem::path& path, const GrayImage& image);

// 8-bit grayscale PNG.
std::string EncodePng(const GrayImage& image);

// Ink renders black on white paper.
GrayImage MaskToImage(const InkMask& mask);

std::string ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace callisense

#endif  // CALLISENSE_IMAGE_H_

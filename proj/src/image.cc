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

#include "callisense/image.h"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "callisense/error.h"

namespace callisense {

GrayImage::GrayImage(int w, int h, uint8_t fill)
    : w_(w), h_(h), px_(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {
}

InkMask::InkMask(int w, int h, int64_t t_ms)
    : w_(w),
      h_(h),
      t_ms_(t_ms),
      bits_(static_cast<size_t>(w) * static_cast<size_t>(h), 0) {}

size_t InkMask::CountInk() const {
  return static_cast<size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string_view NextToken(std::string_view bytes, size_t& pos) {
  while (pos < bytes.size()) {
    unsigned char c = static_cast<unsigned char>(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(c)) {
      ++pos;
    } else {
      break;
    }
  }
  size_t start = pos;
  while (pos < bytes.size() &&
         !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    ++pos;
  }
  return bytes.substr(start, pos - start);
}

int HeaderInt(std::string_view bytes, size_t& pos) {
  std::string_view tok = NextToken(bytes, pos);
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v <= 0) {
    throw Error(ErrorKind::kBadImage, "malformed PGM header");
  }
  return v;
}

void AppendBe32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

void AppendChunk(std::string& out, std::string_view type,
                 std::string_view data) {
  AppendBe32(out, static_cast<uint32_t>(data.size()));
  std::string body(type);
  body.append(data);
  out.append(body);
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(body.data()),
              static_cast<uInt>(body.size()));
  AppendBe32(out, static_cast<uint32_t>(crc));
}

}  // namespace

GrayImage DecodePgm(std::string_view bytes) {
  size_t pos = 0;
  if (NextToken(bytes, pos) != "P5") {
    throw Error(ErrorKind::kBadImage, "not a binary PGM (P5)");
  }
  const int w = HeaderInt(bytes, pos);
  const int h = HeaderInt(bytes, pos);
  const int maxval = HeaderInt(bytes, pos);
  if (maxval != 255) {
    throw Error(ErrorKind::kBadImage, "only 8-bit PGM is supported");
  }
  ++pos;  // single whitespace byte before the raster
  const size_t n = static_cast<size_t>(w) * static_cast<size_t>(h);
  if (bytes.size() < pos + n) {
    throw Error(ErrorKind::kBadImage, "truncated PGM raster");
  }
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y) = static_cast<uint8_t>(
          bytes[pos + static_cast<size_t>(y) * w + static_cast<size_t>(x)]);
    }
  }
  return img;
}

std::string EncodePgm(const GrayImage& image) {
  std::ostringstream header;
  header << "P5\n" << image.width() << " " << image.height() << "\n255\n";
  std::string out = header.str();
  out.append(image.pixels().begin(), image.pixels().end());
  return out;
}

GrayImage ReadPgm(const std::filesystem::path& path) {
  try {
    return DecodePgm(ReadFileBytes(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kBadImage) {
      throw Error(ErrorKind::kBadImage, path.string() + ": " + e.detail());
    }
    throw;
  }
}

void WritePgm(const std::filesystem::path& path, const GrayImage& image) {
  WriteFileBytes(path, EncodePgm(image));
}

std::string EncodePng(const GrayImage& image) {
  static constexpr std::array<unsigned char, 8> kSignature = {
      0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::string out(kSignature.begin(), kSignature.end());

  std::string ihdr;
  AppendBe32(ihdr, static_cast<uint32_t>(image.width()));
  AppendBe32(ihdr, static_cast<uint32_t>(image.height()));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  AppendChunk(out, "IHDR", ihdr);

  std::string raw;
  raw.reserve(static_cast<size_t>(image.height()) * (image.width() + 1));
  const auto& px = image.pixels();
  for (int y = 0; y < image.height(); ++y) {
    raw.push_back(0);  // filter: none
    auto row = px.begin() + static_cast<ptrdiff_t>(y) * image.width();
    raw.append(row, row + image.width());
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::string z(zlen, '\0');
  if (compress2(reinterpret_cast<Bytef*>(z.data()), &zlen,
                reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), Z_BEST_SPEED) != Z_OK) {
    throw Error(ErrorKind::kIo, "PNG compression failed");
  }
  z.resize(zlen);
  AppendChunk(out, "IDAT", z);
  AppendChunk(out, "IEND", "");
  return out;
}

GrayImage MaskToImage(const InkMask& mask) {
  GrayImage img(mask.width(), mask.height(), 255);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) img.at(x, y) = 0;
    }
  }
  return img;
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingFile, path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

}  // namespace callisense

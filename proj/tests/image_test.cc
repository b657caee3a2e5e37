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

#include <cstdint>
#include <string>

#include "callisense/error.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace callisense {
namespace {

uint32_t BigEndian(const std::string& s, size_t at) {
  return (uint32_t(uint8_t(s[at])) << 24) | (uint32_t(uint8_t(s[at + 1])) << 16) |
         (uint32_t(uint8_t(s[at + 2])) << 8) | uint32_t(uint8_t(s[at + 3]));
}

GrayImage Gradient(int w, int h) {
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<uint8_t>((x * 7 + y * 13) % 256);
  }
  return img;
}

TEST(PgmTest, EncodeDecodeRoundTrip) {
  const GrayImage img = Gradient(17, 9);
  const std::string bytes = EncodePgm(img);
  EXPECT_EQ(bytes.substr(0, 3), "P5\n");
  EXPECT_EQ(DecodePgm(bytes), img);
}

TEST(PgmTest, AcceptsHeaderComments) {
  const std::string bytes = std::string("P5\n# made by hand\n2 1\n# max\n255\n") +
                            char(0) + char(200);
  const GrayImage img = DecodePgm(bytes);
  ASSERT_EQ(img.width(), 2);
  EXPECT_EQ(img.at(0, 0), 0);
  EXPECT_EQ(img.at(1, 0), 200);
}

TEST(PgmTest, RejectsMalformedInput) {
  const std::string bad[] = {
      "P2\n1 1\n255\n0",                    // ascii variant
      "P5\n2 2\n255\n" + std::string(3, 'x'),  // truncated
      "P5\n1 1\n65535\n" + std::string(2, 'x'),
      "P5\n0 1\n255\n",
      "",
  };
  for (const std::string& b : bad) {
    try {
      DecodePgm(b);
      ADD_FAILURE() << "accepted: " << b.substr(0, 12);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kBadImage);
    }
  }
}

TEST(PgmTest, MissingFileIsReported) {
  try {
    ReadPgm("/nonexistent/frame.pgm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingFile);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/frame.pgm"),
              std::string::npos);
  }
}

TEST(PngTest, DecodesBackToThePixels) {
  const GrayImage img = Gradient(23, 11);
  const std::string png = EncodePng(img);
  ASSERT_EQ(png.substr(0, 8), std::string("\x89PNG\r\n\x1a\n", 8));
  std::string idat;
  size_t at = 8;
  bool saw_end = false;
  while (at + 8 <= png.size()) {
    const uint32_t len = BigEndian(png, at);
    const std::string type = png.substr(at + 4, 4);
    const std::string data = png.substr(at + 8, len);
    const uint32_t crc = BigEndian(png, at + 8 + len);
    uLong want = crc32(0, reinterpret_cast<const Bytef*>(png.data() + at + 4),
                       len + 4);
    EXPECT_EQ(crc, want) << type;
    if (type == "IHDR") {
      EXPECT_EQ(BigEndian(data, 0), 23u);
      EXPECT_EQ(BigEndian(data, 4), 11u);
      EXPECT_EQ(uint8_t(data[8]), 8);  // bit depth
      EXPECT_EQ(uint8_t(data[9]), 0);  // grayscale
    }
    if (type == "IDAT") idat += data;
    if (type == "IEND") saw_end = true;
    at += 12 + len;
  }
  EXPECT_TRUE(saw_end);
  std::string raw(size_t(11) * (23 + 1), '\0');
  uLongf raw_len = raw.size();
  ASSERT_EQ(uncompress(reinterpret_cast<Bytef*>(raw.data()), &raw_len,
                       reinterpret_cast<const Bytef*>(idat.data()), idat.size()),
            Z_OK);
  ASSERT_EQ(raw_len, raw.size());
  for (int y = 0; y < 11; ++y) {
    const size_t row = size_t(y) * 24;
    EXPECT_EQ(raw[row], 0);  // no filter
    for (int x = 0; x < 23; ++x) {
      EXPECT_EQ(uint8_t(raw[row + 1 + x]), img.at(x, y));
    }
  }
}

TEST(InkMaskTest, MaskToImageRendersInkBlack) {
  InkMask m(3, 2);
  m.set(1, 0, true);
  m.set(2, 1, true);
  EXPECT_EQ(m.CountInk(), 2u);
  const GrayImage img = MaskToImage(m);
  EXPECT_EQ(img.at(1, 0), 0);
  EXPECT_EQ(img.at(2, 1), 0);
  EXPECT_EQ(img.at(0, 0), 255);
}

TEST(FileBytesTest, WriteThenRead) {
  testing::ScratchDir dir;
  WriteFileBytes(dir / "a.bin", std::string("a\0b", 3));
  EXPECT_EQ(ReadFileBytes(dir / "a.bin"), std::string("a\0b", 3));
}

}  // namespace
}  // namespace callisense

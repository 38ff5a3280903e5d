#include "eagers/imaging.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "eagers/codec.hpp"
#include "eagers/error.hpp"
#include "eagers/geometry.hpp"

namespace eagers {
namespace {

const std::filesystem::path kData = EAGERS_TEST_DATA_DIR;

ImageBuffer noise_image(std::mt19937_64& rng, int w, int h) {
  ImageBuffer img(w, h);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(byte(rng));
  return img;
}

// Visible iff inside at least one rect.
bool covered(const std::vector<Rect>& rects, int x, int y) {
  for (const auto& r : rects)
    if (r.contains(x, y)) return true;
  return false;
}

TEST(ImageBuffer, ConstructorValidatesShape) {
  EXPECT_THROW(ImageBuffer(0, 3), Error);
  EXPECT_THROW(ImageBuffer(2, 2, std::vector<std::uint8_t>(11)), Error);
  ImageBuffer img(2, 2);
  for (auto p : img.pixels()) EXPECT_EQ(p, 0);
}

TEST(Resize, NoopWithinLimit) {
  std::mt19937_64 rng(1);
  const auto img = noise_image(rng, 40, 30);
  EXPECT_EQ(resize_longest_side(img, 40), img);
  EXPECT_EQ(resize_longest_side(img, 1000), img);
}

TEST(Resize, LongestSideHitsLimitAndKeepsAspect) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> side(2, 400);
  for (int t = 0; t < 40; ++t) {
    const int w = side(rng), h = side(rng);
    const auto img = noise_image(rng, w, h);
    const int limit = std::uniform_int_distribution<int>(1, std::max(w, h))(rng);
    const auto out = resize_longest_side(img, limit);
    ASSERT_EQ(std::max(out.width(), out.height()), limit);
    // Short side is the aspect-preserving length, rounded half up.
    const int longest = std::max(w, h), shortest = std::min(w, h);
    const long expected = std::max(1L, std::lround(static_cast<double>(shortest) * limit / longest));
    EXPECT_EQ(std::min(out.width(), out.height()), expected) << w << "x" << h << " limit " << limit;
    EXPECT_EQ(out.width() >= out.height(), w >= h);
  }
}

TEST(Resize, ThousandsToDefaultLimit) {
  const ImageBuffer img(2000, 1000);
  const auto out = resize_longest_side(img, kDefaultMaxSide);
  EXPECT_EQ(out.width(), 1536);
  EXPECT_EQ(out.height(), 768);
  EXPECT_THROW(resize_longest_side(img, 0), Error);
}

TEST(Resize, ReferenceShapes) {
  auto shape = [](int w, int h) {
    const auto out = resize_longest_side(ImageBuffer(w, h), 1000);
    return std::pair{out.width(), out.height()};
  };
  EXPECT_EQ(shape(2000, 1000), (std::pair{1000, 500}));
  EXPECT_EQ(shape(800, 600), (std::pair{800, 600}));
  EXPECT_EQ(shape(1333, 1000), (std::pair{1000, 750}));
  EXPECT_EQ(shape(1000, 1333), (std::pair{750, 1000}));
}

TEST(Resize, UniformColourStaysUniform) {
  ImageBuffer img(300, 120);
  img.fill({0, 0, 300, 120}, 12, 200, 99);
  const auto out = resize_longest_side(img, 97);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) {
      const auto* p = out.at(x, y);
      ASSERT_EQ(p[0], 12);
      ASSERT_EQ(p[1], 200);
      ASSERT_EQ(p[2], 99);
    }
}

TEST(Crop, CopiesExactPixels) {
  std::mt19937_64 rng(3);
  const auto img = noise_image(rng, 20, 10);
  const Rect r{3, 2, 9, 7};
  const auto c = crop(img, r);
  ASSERT_EQ(c.width(), 6);
  ASSERT_EQ(c.height(), 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 6; ++x)
      for (int ch = 0; ch < 3; ++ch) ASSERT_EQ(c.at(x, y)[ch], img.at(x + 3, y + 2)[ch]);
  EXPECT_THROW(crop(img, {0, 0, 21, 10}), Error);
  EXPECT_THROW(crop(img, {5, 5, 5, 6}), Error);
}

TEST(Crop, FullRectAndSinglePixel) {
  std::mt19937_64 rng(13);
  const auto img = noise_image(rng, 9, 7);
  EXPECT_EQ(crop(img, {0, 0, 9, 7}), img);
  const auto px = crop(img, {0, 0, 1, 1});
  for (int ch = 0; ch < 3; ++ch) EXPECT_EQ(px.at(0, 0)[ch], img.at(0, 0)[ch]);
  ImageBuffer flat(20, 20);
  flat.fill({0, 0, 20, 20}, 9, 8, 7);
  EXPECT_EQ(crop(flat, {0, 0, 5, 5}), crop(flat, {10, 12, 15, 17}));
}

TEST(Mask, HalfWhiteImage) {
  ImageBuffer white(10, 10);
  white.fill({0, 0, 10, 10}, 255, 255, 255);
  const std::vector<Rect> left = {{0, 0, 5, 10}};
  const auto out = apply_mask(white, left);
  int black = 0;
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) {
      const auto* p = out.at(x, y);
      if (x < 5) {
        EXPECT_EQ(p[0] & p[1] & p[2], 255);
      } else {
        black += (p[0] | p[1] | p[2]) == 0 ? 1 : 0;
      }
    }
  EXPECT_EQ(black * 3, 150);
  const std::vector<Rect> full = {{0, 0, 10, 10}};
  EXPECT_EQ(apply_mask(white, full), white);
}

TEST(Mask, BlackOutsidePreservedInside) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 30; ++t) {
    const int w = std::uniform_int_distribution<int>(5, 80)(rng);
    const int h = std::uniform_int_distribution<int>(5, 80)(rng);
    const auto img = noise_image(rng, w, h);
    const GridSpec g{std::uniform_int_distribution<int>(1, 5)(rng), std::uniform_int_distribution<int>(1, 5)(rng)};
    const auto cells = partition(w, h, g);
    std::vector<CellIndex> sel;
    for (const auto& c : cells)
      if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) sel.push_back(c.index);
    if (sel.empty()) sel.push_back(cells.front().index);
    const double margin = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
    const auto rects = visible_region(sel, g, margin, w, h);
    const auto masked = apply_mask(img, rects);
    std::int64_t black = 0, kept = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const auto* m = masked.at(x, y);
        if (covered(rects, x, y)) {
          for (int ch = 0; ch < 3; ++ch) ASSERT_EQ(m[ch], img.at(x, y)[ch]);
          ++kept;
        } else {
          ASSERT_EQ(m[0] | m[1] | m[2], 0);
          ++black;
        }
      }
    EXPECT_EQ(black + kept, static_cast<std::int64_t>(w) * h);
    // Idempotent.
    EXPECT_EQ(apply_mask(masked, rects), masked);
  }
}

TEST(Mask, CommutesWithCrop) {
  std::mt19937_64 rng(9);
  const auto img = noise_image(rng, 60, 40);
  const std::vector<Rect> rects = {{5, 5, 25, 20}, {20, 10, 50, 35}};
  const auto masked = apply_mask(img, rects);
  for (const auto& r : rects) EXPECT_EQ(crop(masked, r), crop(img, r));
}

TEST(Mask, RejectsEmptyAndOutOfBounds) {
  const ImageBuffer img(10, 10);
  try {
    apply_mask(img, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidSelection);
  }
  const std::vector<Rect> bad = {{0, 0, 11, 5}};
  EXPECT_THROW(apply_mask(img, bad), Error);
}

TEST(Codec, PngRoundTrip) {
  std::mt19937_64 rng(6);
  const auto img = noise_image(rng, 33, 17);
  const auto bytes = encode_png(img);
  EXPECT_TRUE(looks_like_image(bytes));
  EXPECT_EQ(decode_image(bytes), img);
}

TEST(Codec, PngIsDeterministic) {
  std::mt19937_64 rng(7);
  const auto img = noise_image(rng, 12, 12);
  EXPECT_EQ(encode_png(img), encode_png(img));
}

TEST(Codec, DecodesJpegAndNonRgbPng) {
  const auto jpg = load_image(kData / "solid_16x8.jpg");
  EXPECT_EQ(jpg.width(), 16);
  EXPECT_EQ(jpg.height(), 8);
  const auto* p = jpg.at(8, 4);
  EXPECT_NEAR(p[0], 200, 4);
  EXPECT_NEAR(p[1], 40, 4);
  EXPECT_NEAR(p[2], 40, 4);

  const auto gray = load_image(kData / "gray_4x4.png");
  EXPECT_EQ(gray.width(), 4);
  EXPECT_EQ(gray.at(1, 1)[0], 77);
  EXPECT_EQ(gray.at(1, 1)[2], 77);

  const auto rgba = load_image(kData / "rgba_3x2.png");
  EXPECT_EQ(rgba.width(), 3);
  EXPECT_EQ(rgba.height(), 2);
}

TEST(Codec, RejectsGarbage) {
  const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_FALSE(looks_like_image(junk));
  try {
    decode_image(junk);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
  }
  std::vector<std::uint8_t> truncated = encode_png(ImageBuffer(8, 8));
  truncated.resize(truncated.size() / 2);
  EXPECT_THROW(decode_image(truncated), Error);
  EXPECT_THROW(load_image(kData / "does_not_exist.png"), Error);
}

TEST(Codec, Base64AndDigest) {
  EXPECT_EQ(base64_encode(as_bytes("hello")), "aGVsbG8=");
  const auto back = base64_decode("aGVsbG8=");
  EXPECT_EQ(std::string(back.begin(), back.end()), "hello");
  EXPECT_EQ(base64_encode({}), "");
  EXPECT_EQ(sha256_hex(std::string_view("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace eagers

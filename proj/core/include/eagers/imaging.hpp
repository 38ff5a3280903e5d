#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eagers/geometry.hpp"

namespace eagers {

inline constexpr int kDefaultMaxSide = 1536;

// Row-major packed RGB8 image.
class ImageBuffer {
 public:
  ImageBuffer(int width, int height);  // black
  ImageBuffer(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  const std::uint8_t* at(int x, int y) const noexcept {
    return pixels_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
  }
  std::uint8_t* at(int x, int y) noexcept {
    return pixels_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
  }
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    auto* p = at(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }
  void fill(const Rect& r, std::uint8_t red, std::uint8_t green, std::uint8_t blue);

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// Downscales (bilinear) so the longest side equals max_side. Images already
/// within the limit are returned unchanged; nothing is ever upscaled.
ImageBuffer resize_longest_side(const ImageBuffer& img, int max_side);

ImageBuffer crop(const ImageBuffer& img, const Rect& r);

/// Keeps pixels inside the union of `visible` and paints everything else
/// RGB(0,0,0). An empty visible set is rejected.
ImageBuffer apply_mask(const ImageBuffer& img, std::span<const Rect> visible);

// PNG / JPEG decoding to RGB (alpha dropped) and PNG encoding.
ImageBuffer decode_image(std::span<const std::uint8_t> bytes);
ImageBuffer load_image(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const ImageBuffer& img);
void write_png(const std::filesystem::path& path, const ImageBuffer& img);

/// True when the bytes start with a PNG or JPEG signature.
bool looks_like_image(std::span<const std::uint8_t> header);

}  // namespace eagers

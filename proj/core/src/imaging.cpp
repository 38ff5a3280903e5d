#include "eagers/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <string>

// jpeglib.h needs FILE and size_t declared first.
#include <jpeglib.h>

#include "eagers/codec.hpp"
#include "eagers/error.hpp"

namespace eagers {

ImageBuffer::ImageBuffer(int width, int height)
    : ImageBuffer(width, height,
                  std::vector<std::uint8_t>(
                      width > 0 && height > 0 ? static_cast<std::size_t>(width) * height * 3 : 0)) {}

ImageBuffer::ImageBuffer(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::kInvalidGeometry, "image dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error(ErrorKind::kInvalidGeometry, "pixel buffer does not match " +
                                                 std::to_string(width) + "x" +
                                                 std::to_string(height) + " RGB");
  }
}

void ImageBuffer::fill(const Rect& r, std::uint8_t red, std::uint8_t green, std::uint8_t blue) {
  const Rect c{std::max(0, r.x0), std::max(0, r.y0), std::min(width_, r.x1), std::min(height_, r.y1)};
  for (int y = c.y0; y < c.y1; ++y) {
    for (int x = c.x0; x < c.x1; ++x) set(x, y, red, green, blue);
  }
}

ImageBuffer resize_longest_side(const ImageBuffer& img, int max_side) {
  if (max_side < 1) {
    throw Error(ErrorKind::kPrecondition, "max_side must be at least 1");
  }
  const int w = img.width();
  const int h = img.height();
  const int longest = std::max(w, h);
  if (longest <= max_side) return img;

  // Other side = round(side * max_side / longest), at least one pixel.
  auto scaled = [&](int side) {
    const std::int64_t v = (2LL * side * max_side + longest) / (2LL * longest);
    return std::max<int>(1, static_cast<int>(v));
  };
  const int out_w = w >= h ? max_side : scaled(w);
  const int out_h = h > w ? max_side : scaled(h);

  ImageBuffer out(out_w, out_h);
  const double sx = static_cast<double>(w) / out_w;
  const double sy = static_cast<double>(h) / out_h;
  for (int y = 0; y < out_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(h - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, h - 1);
    const double ty = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(w - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, w - 1);
      const double tx = fx - x0;
      const auto* p00 = img.at(x0, y0);
      const auto* p10 = img.at(x1, y0);
      const auto* p01 = img.at(x0, y1);
      const auto* p11 = img.at(x1, y1);
      auto* dst = out.at(x, y);
      for (int ch = 0; ch < 3; ++ch) {
        const double top = p00[ch] + (p10[ch] - p00[ch]) * tx;
        const double bottom = p01[ch] + (p11[ch] - p01[ch]) * tx;
        dst[ch] = static_cast<std::uint8_t>(std::lround(top + (bottom - top) * ty));
      }
    }
  }
  return out;
}

ImageBuffer crop(const ImageBuffer& img, const Rect& r) {
  if (!r.within(img.width(), img.height())) {
    throw Error(ErrorKind::kInvalidGeometry, "crop rect outside image bounds");
  }
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(r.area()) * 3);
  const std::size_t row_bytes = static_cast<std::size_t>(r.width()) * 3;
  for (int y = r.y0; y < r.y1; ++y) {
    std::memcpy(pixels.data() + static_cast<std::size_t>(y - r.y0) * row_bytes, img.at(r.x0, y), row_bytes);
  }
  return ImageBuffer(r.width(), r.height(), std::move(pixels));
}

ImageBuffer apply_mask(const ImageBuffer& img, std::span<const Rect> visible) {
  if (visible.empty()) {
    throw Error(ErrorKind::kInvalidSelection, "mask with no visible region would black out the image");
  }
  for (const auto& r : visible) {
    if (!r.within(img.width(), img.height())) {
      throw Error(ErrorKind::kInvalidGeometry, "visible rect outside image bounds");
    }
  }
  ImageBuffer out(img.width(), img.height());
  for (const auto& r : visible) {
    const std::size_t row_bytes = static_cast<std::size_t>(r.width()) * 3;
    for (int y = r.y0; y < r.y1; ++y) {
      std::memcpy(out.at(r.x0, y), img.at(r.x0, y), row_bytes);
    }
  }
  return out;
}

bool looks_like_image(std::span<const std::uint8_t> header) {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (header.size() >= sizeof(kPng) && std::equal(std::begin(kPng), std::end(kPng), header.begin())) {
    return true;
  }
  return header.size() >= 3 && header[0] == 0xFF && header[1] == 0xD8 && header[2] == 0xFF;
}

namespace {

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorKind::kFormat, std::string("PNG decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::kFormat, "PNG decode failed: " + msg);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0, j = 0; i < rgba.size(); i += 4, j += 3) {
    rgb[j] = rgba[i];
    rgb[j + 1] = rgba[i + 1];
    rgb[j + 2] = rgba[i + 2];
  }
  return ImageBuffer(w, h, std::move(rgb));
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Returns false with err.message set on failure. Kept free of objects with
// destructors so longjmp is well defined.
bool decode_jpeg_raw(const std::uint8_t* data, std::size_t size, std::uint8_t** out, int* width,
                     int* height, JpegErrorManager& err) {
  jpeg_decompress_struct cinfo;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  *out = nullptr;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    std::free(*out);
    *out = nullptr;
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  *width = static_cast<int>(cinfo.output_width);
  *height = static_cast<int>(cinfo.output_height);
  const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
  *out = static_cast<std::uint8_t*>(std::malloc(stride * cinfo.output_height));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = *out + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

ImageBuffer decode_jpeg(std::span<const std::uint8_t> bytes) {
  JpegErrorManager err{};
  std::uint8_t* raw = nullptr;
  int w = 0;
  int h = 0;
  if (!decode_jpeg_raw(bytes.data(), bytes.size(), &raw, &w, &h, err)) {
    throw Error(ErrorKind::kFormat, std::string("JPEG decode failed: ") + err.message);
  }
  std::vector<std::uint8_t> rgb(raw, raw + static_cast<std::size_t>(w) * h * 3);
  std::free(raw);
  return ImageBuffer(w, h, std::move(rgb));
}

}  // namespace

ImageBuffer decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P') return decode_png(bytes);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8) return decode_jpeg(bytes);
  throw Error(ErrorKind::kFormat, "unsupported image format (expected PNG or JPEG)");
}

ImageBuffer load_image(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels().data(), 0, nullptr)) {
    throw Error(ErrorKind::kFormat, std::string("PNG encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels().data(), 0, nullptr)) {
    throw Error(ErrorKind::kFormat, std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void write_png(const std::filesystem::path& path, const ImageBuffer& img) {
  const auto bytes = encode_png(img);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) {
    throw Error(ErrorKind::kIo, "cannot write " + path.string());
  }
  const bool ok = std::fwrite(bytes.data(), 1, bytes.size(), f) == bytes.size();
  const bool closed = std::fclose(f) == 0;
  if (!ok || !closed) {
    throw Error(ErrorKind::kIo, "short write to " + path.string());
  }
}

}  // namespace eagers

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

#include "mode/errors.hpp"
#include "mode/io.hpp"

namespace mode {

namespace {

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  (void)msg;
  std::longjmp(png_jmpbuf(png), 1);
}

void png_warn_fn(png_structp, png_const_charp) {}

}  // namespace

void png_write(const PanoImage& image, const std::filesystem::path& path,
               int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16)
    throw DataError("png_write: bit depth must be 8 or 16");
  if (image.channels != 1 && image.channels != 3)
    throw DataError("png_write: 1 or 3 channels required");
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw DataError("png_write: cannot open " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            png_error_fn, png_warn_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw DataError("png_write: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("png_write: encode failed for " + path.string());
  }
  png_init_io(png, fp.get());
  const int color_type =
      image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, image.width, image.height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const double maxv = bit_depth == 8 ? 255.0 : 65535.0;
  const size_t samples = static_cast<size_t>(image.width) * image.channels;
  std::vector<png_byte> row(samples * (bit_depth / 8));
  for (int r = 0; r < image.height; ++r) {
    for (size_t i = 0; i < samples; ++i) {
      const float v =
          image.data[static_cast<size_t>(r) * samples + i];
      const double q = std::lround(std::fmin(std::fmax(v, 0.0f), 1.0f) * maxv);
      if (bit_depth == 8) {
        row[i] = static_cast<png_byte>(q);
      } else {  // PNG stores 16-bit samples big endian
        row[2 * i] = static_cast<png_byte>(static_cast<long>(q) >> 8);
        row[2 * i + 1] = static_cast<png_byte>(static_cast<long>(q) & 0xff);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

PanoImage png_read(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw DataError("png_read: cannot open " + path.string());
  png_byte sig[8] = {};
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw DataError("png_read: not a PNG file: " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           png_error_fn, png_warn_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("png_read: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("png_read: decode failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const int out_depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  if ((out_depth != 8 && out_depth != 16) ||
      (channels != 1 && channels != 3)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("png_read: unsupported format in " + path.string());
  }
  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));

  const size_t samples = static_cast<size_t>(width) * channels;
  std::vector<std::vector<png_byte>> rows(
      height, std::vector<png_byte>(samples * (out_depth / 8)));
  std::vector<png_bytep> row_ptrs(height);
  for (int r = 0; r < height; ++r) row_ptrs[r] = rows[r].data();
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  PanoImage image(width, height, channels, Projection::kErp);
  const float inv = out_depth == 8 ? 1.0f / 255.0f : 1.0f / 65535.0f;
  for (int r = 0; r < height; ++r)
    for (size_t i = 0; i < samples; ++i) {
      unsigned v = out_depth == 8
                       ? rows[r][i]
                       : (static_cast<unsigned>(rows[r][2 * i]) << 8) |
                             rows[r][2 * i + 1];
      image.data[static_cast<size_t>(r) * samples + i] = v * inv;
    }
  return image;
}

void mask_write(const ValidityMask& mask, const std::filesystem::path& path) {
  PanoImage img(mask.width, mask.height, 1, Projection::kErp);
  for (size_t i = 0; i < mask.data.size(); ++i)
    img.data[i] = mask.data[i] ? 1.0f : 0.0f;
  png_write(img, path, 8);
}

ValidityMask mask_read(const std::filesystem::path& path) {
  const PanoImage img = png_read(path);
  if (img.channels != 1) throw DataError("mask_read: expected gray PNG");
  ValidityMask mask(img.width, img.height, false);
  for (size_t i = 0; i < mask.data.size(); ++i)
    mask.data[i] = img.data[i] >= 0.5f ? 1 : 0;
  return mask;
}

}  // namespace mode

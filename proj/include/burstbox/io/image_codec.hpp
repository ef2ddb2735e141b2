#pragma once

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "burstbox/image.hpp"

namespace burstbox {

namespace detail {

struct FileHandle {
  FILE* f = nullptr;
  explicit FileHandle(const std::filesystem::path& path, const char* mode)
      : f(std::fopen(path.string().c_str(), mode)) {}
  ~FileHandle() {
    if (f) std::fclose(f);
  }
  FileHandle(const FileHandle&) = delete;
  FileHandle& operator=(const FileHandle&) = delete;
};

inline ImageBuffer decode_png_file(const std::filesystem::path& path) {
  FileHandle fh(path, "rb");
  if (!fh.f) throw std::runtime_error("decode_image: cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("decode_image: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("decode_image: PNG decode failed: " + path.string());
  }
  png_init_io(png, fh.f);
  // normalize everything to 8-bit RGB
  png_read_png(png, info,
               PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_PACKING | PNG_TRANSFORM_EXPAND |
                   PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_GRAY_TO_RGB,
               nullptr);

  const uint32_t w = png_get_image_width(png, info);
  const uint32_t h = png_get_image_height(png, info);
  if (png_get_channels(png, info) != 3 || png_get_bit_depth(png, info) != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("decode_image: unexpected PNG layout: " + path.string());
  }
  ImageBuffer out(w, h, 3);
  png_bytepp rows = png_get_rows(png, info);
  for (uint32_t y = 0; y < h; ++y)
    std::memcpy(out.data.data() + static_cast<size_t>(y) * w * 3, rows[y], static_cast<size_t>(w) * 3);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

struct JpegErrorTrap {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX] = {0};

  static void on_error(j_common_ptr cinfo) {
    auto* trap = reinterpret_cast<JpegErrorTrap*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, trap->message);
    std::longjmp(trap->jump, 1);
  }
};

inline ImageBuffer decode_jpeg_file(const std::filesystem::path& path) {
  FileHandle fh(path, "rb");
  if (!fh.f) throw std::runtime_error("decode_image: cannot open " + path.string());

  jpeg_decompress_struct cinfo;
  JpegErrorTrap trap;
  cinfo.err = jpeg_std_error(&trap.pub);
  trap.pub.error_exit = JpegErrorTrap::on_error;
  if (setjmp(trap.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error("decode_image: JPEG decode failed: " + path.string() + " (" +
                             trap.message + ")");
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, fh.f);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  if (cinfo.output_components != 3) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error("decode_image: unsupported JPEG color space: " + path.string());
  }
  ImageBuffer out(cinfo.output_width, cinfo.output_height, 3);
  const size_t stride = static_cast<size_t>(out.width) * 3;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.data.data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  const long warnings = trap.pub.num_warnings;
  jpeg_destroy_decompress(&cinfo);
  if (warnings > 0)
    throw std::runtime_error("decode_image: corrupt JPEG data: " + path.string());
  return out;
}

}  // namespace detail

/// Decode a PNG or JPEG file into an 8-bit RGB buffer. Grayscale and palette
/// sources come back expanded to 3 identical channels.
inline ImageBuffer decode_image(const std::filesystem::path& path) {
  unsigned char sig[8] = {0};
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("decode_image: cannot open " + path.string());
    in.read(reinterpret_cast<char*>(sig), sizeof(sig));
  }
  if (!png_sig_cmp(sig, 0, 8)) return detail::decode_png_file(path);
  if (sig[0] == 0xFF && sig[1] == 0xD8) return detail::decode_jpeg_file(path);
  throw std::runtime_error("decode_image: unsupported file format: " + path.string());
}

/// Write a 1- or 3-channel buffer as PNG. Output bytes depend only on the
/// pixel contents (fixed compression settings, no ancillary chunks).
inline void write_png(const std::filesystem::path& path, const ImageBuffer& img) {
  img.validate();
  detail::FileHandle fh(path, "wb");
  if (!fh.f) throw std::runtime_error("write_png: cannot open " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("write_png: libpng init failed");
  }
  std::vector<png_bytep> rows(img.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("write_png: PNG encode failed: " + path.string());
  }
  png_init_io(png, fh.f);
  png_set_IHDR(png, info, img.width, img.height, 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  const size_t stride = static_cast<size_t>(img.width) * img.channels;
  for (uint32_t y = 0; y < img.height; ++y)
    rows[y] = const_cast<png_bytep>(img.data.data() + y * stride);
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
}

inline void write_jpeg(const std::filesystem::path& path, const ImageBuffer& img,
                       int quality = 90) {
  img.validate();
  detail::FileHandle fh(path, "wb");
  if (!fh.f) throw std::runtime_error("write_jpeg: cannot open " + path.string());

  jpeg_compress_struct cinfo;
  detail::JpegErrorTrap trap;
  cinfo.err = jpeg_std_error(&trap.pub);
  trap.pub.error_exit = detail::JpegErrorTrap::on_error;
  if (setjmp(trap.jump)) {
    jpeg_destroy_compress(&cinfo);
    throw std::runtime_error("write_jpeg: JPEG encode failed: " + path.string());
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, fh.f);
  cinfo.image_width = img.width;
  cinfo.image_height = img.height;
  cinfo.input_components = static_cast<int>(img.channels);
  cinfo.in_color_space = img.channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const size_t stride = static_cast<size_t>(img.width) * img.channels;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(img.data.data() + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

}  // namespace burstbox

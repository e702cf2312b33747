#pragma once

#include <csetjmp>
#include <cstring>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "photoscreen/common/error.hpp"
#include "photoscreen/common/fsio.hpp"
#include "photoscreen/imaging/image.hpp"

namespace photoscreen::imaging {

enum class ImageFormat { png, jpeg, unknown };

inline ImageFormat sniff_format(const std::string& bytes) {
  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_sig, 8) == 0) return ImageFormat::png;
  if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xFF &&
      static_cast<unsigned char>(bytes[1]) == 0xD8 &&
      static_cast<unsigned char>(bytes[2]) == 0xFF) {
    return ImageFormat::jpeg;
  }
  return ImageFormat::unknown;
}

namespace detail {

struct PngReadState {
  const unsigned char* data;
  std::size_t size;
  std::size_t offset;
  char message[256];
  std::jmp_buf jump;
};

inline void png_error_fn(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngReadState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  std::longjmp(state->jump, 1);
}

inline void png_warn_fn(png_structp, png_const_charp) {}

inline void png_read_fn(png_structp png, png_bytep out, png_size_t len) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->offset + len > state->size) {
    png_error(png, "unexpected end of PNG data");
    return;
  }
  std::memcpy(out, state->data + state->offset, len);
  state->offset += len;
}

inline RgbImage decode_png(const std::string& bytes) {
  PngReadState state{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), 0, {}, {}};
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_fn, png_warn_fn);
  if (!png) throw DecodeError("png: allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DecodeError("png: allocation failed");
  }

  // raw buffers only; nothing with a destructor may live across the longjmp
  png_byte* volatile row_storage = nullptr;
  png_bytep* volatile row_ptrs = nullptr;
  png_uint_32 w = 0, h = 0;

  if (setjmp(state.jump)) {
    delete[] row_storage;
    delete[] row_ptrs;
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError(std::string("png: ") + state.message);
  }

  png_set_read_fn(png, &state, png_read_fn);
  png_read_info(png, info);
  w = png_get_image_width(png, info);
  h = png_get_image_height(png, info);

  // normalize every variant to 8-bit RGB
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  png_set_tRNS_to_alpha(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  const png_size_t rowbytes = png_get_rowbytes(png, info);
  row_storage = new png_byte[rowbytes * h];
  row_ptrs = new png_bytep[h];
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = row_storage + y * rowbytes;
  png_read_image(png, const_cast<png_bytepp>(row_ptrs));
  png_read_end(png, nullptr);

  RgbImage img(static_cast<int>(w), static_cast<int>(h));
  for (png_uint_32 y = 0; y < h; ++y) {
    std::memcpy(img.at(0, static_cast<int>(y)), row_ptrs[y], static_cast<std::size_t>(w) * 3);
  }
  delete[] row_storage;
  delete[] row_ptrs;
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

struct JpegErrorState {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* state = reinterpret_cast<JpegErrorState*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, state->message);
  std::longjmp(state->jump, 1);
}

inline RgbImage decode_jpeg(const std::string& bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorState err{};
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_error_exit;

  unsigned char* volatile row_storage = nullptr;
  if (setjmp(err.jump)) {
    delete[] row_storage;
    jpeg_destroy_decompress(&cinfo);
    throw DecodeError(std::string("jpeg: ") + err.message);
  }

  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, reinterpret_cast<const unsigned char*>(bytes.data()),
               static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  const int w = static_cast<int>(cinfo.output_width);
  const int h = static_cast<int>(cinfo.output_height);
  const std::size_t stride = static_cast<std::size_t>(w) * 3;
  row_storage = new unsigned char[stride * h];
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = row_storage + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);

  RgbImage img(w, h);
  std::memcpy(img.pixels.data(), row_storage, stride * h);
  delete[] row_storage;
  return img;
}

}  // namespace detail

// Decodes PNG or baseline/progressive JPEG; anything else is rejected with a
// typed UnsupportedFormatError. Decode failures throw DecodeError.
inline RgbImage decode_image(const std::string& bytes) {
  switch (sniff_format(bytes)) {
    case ImageFormat::png:
      return detail::decode_png(bytes);
    case ImageFormat::jpeg:
      return detail::decode_jpeg(bytes);
    default:
      break;
  }
  std::string sig;
  for (std::size_t i = 0; i < bytes.size() && i < 4; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02x", static_cast<unsigned char>(bytes[i]));
    sig += buf;
  }
  throw UnsupportedFormatError("unsupported image format (signature 0x" + sig + ")");
}

inline RgbImage decode_image_file(const std::string& path) {
  return decode_image(read_file_bytes(path));
}

}  // namespace photoscreen::imaging

#include "parallax/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include <jpeglib.h>

#include "parallax/error.hpp"

namespace parallax {
namespace {

struct PngWriteState {
  Bytes* out;
};

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
  state->out->insert(state->out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void png_read_from_span(png_structp png, png_bytep data, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->offset + length > state->bytes.size()) png_error(png, "truncated PNG");
  std::memcpy(data, state->bytes.data() + state->offset, length);
  state->offset += length;
}

void png_error_throw(png_structp png, png_const_charp message) {
  // Unwind through libpng's own longjmp; the caller converts to an Error.
  (void)message;
  png_longjmp(png, 1);
}

void png_warning_silent(png_structp, png_const_charp) {}

Bytes encode_png_rows(int width, int height, int bit_depth, int color_type,
                      const std::vector<std::vector<std::uint8_t>>& rows) {
  Bytes out;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_silent);
  if (!png) fail(ErrorCode::EncodeError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorCode::EncodeError, "png_create_info_struct failed");
  }
  PngWriteState state{&out};
  std::vector<png_const_bytep> row_ptrs(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) row_ptrs[static_cast<std::size_t>(y)] = rows[static_cast<std::size_t>(y)].data();

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::EncodeError, "PNG encoding failed");
  }
  png_set_write_fn(png, &state, png_write_to_vector, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  png_write_rows(png, const_cast<png_bytepp>(row_ptrs.data()), static_cast<png_uint_32>(height));
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  return out;
}

struct DecodedPng {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  std::vector<std::vector<std::uint8_t>> rows;
};

// Decodes with the given transform setup applied after reading the header.
template <typename Setup>
DecodedPng decode_png_rows(std::span<const std::uint8_t> bytes, Setup&& setup) {
  if (!looks_like_png(bytes)) fail(ErrorCode::DecodeError, "not a PNG stream");
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_silent);
  if (!png) fail(ErrorCode::DecodeError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorCode::DecodeError, "png_create_info_struct failed");
  }
  PngReadState state{bytes, 0};
  DecodedPng result;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::DecodeError, "corrupt PNG stream");
  }
  png_set_read_fn(png, &state, png_read_from_span);
  png_read_info(png, info);
  setup(png, info);
  png_read_update_info(png, info);
  result.width = png_get_image_width(png, info);
  result.height = png_get_image_height(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  result.rows.assign(result.height, std::vector<std::uint8_t>(rowbytes));
  std::vector<png_bytep> ptrs(result.height);
  for (png_uint_32 y = 0; y < result.height; ++y) ptrs[y] = result.rows[y].data();
  png_read_image(png, ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return result;
}

}  // namespace

bool looks_like_png(std::span<const std::uint8_t> bytes) noexcept {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

bool looks_like_jpeg(std::span<const std::uint8_t> bytes) noexcept {
  return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

Bytes encode_png(const Image& image) {
  if (image.empty()) fail(ErrorCode::EncodeError, "cannot encode an empty raster");
  std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y) {
    auto& row = rows[static_cast<std::size_t>(y)];
    row.resize(static_cast<std::size_t>(image.width()) * 4);
    for (int x = 0; x < image.width(); ++x) {
      const Rgba8 p = image(x, y);
      const std::size_t i = static_cast<std::size_t>(x) * 4;
      row[i] = p.r;
      row[i + 1] = p.g;
      row[i + 2] = p.b;
      row[i + 3] = p.a;
    }
  }
  return encode_png_rows(image.width(), image.height(), 8, PNG_COLOR_TYPE_RGBA, rows);
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  auto decoded = decode_png_rows(bytes, [](png_structp png, png_infop info) {
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
      png_set_gray_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_RGB || color_type == PNG_COLOR_TYPE_GRAY ||
        color_type == PNG_COLOR_TYPE_PALETTE)
      png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
    png_set_interlace_handling(png);
  });
  Image image(static_cast<int>(decoded.width), static_cast<int>(decoded.height));
  for (int y = 0; y < image.height(); ++y) {
    const auto& row = decoded.rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < image.width(); ++x) {
      const std::size_t i = static_cast<std::size_t>(x) * 4;
      image(x, y) = Rgba8{row[i], row[i + 1], row[i + 2], row[i + 3]};
    }
  }
  return image;
}

Raster<std::uint16_t> decode_png_gray16(std::span<const std::uint8_t> bytes) {
  int source_depth = 0;
  auto decoded = decode_png_rows(bytes, [&](png_structp png, png_infop info) {
    const int color_type = png_get_color_type(png, info);
    source_depth = png_get_bit_depth(png, info);
    if (color_type != PNG_COLOR_TYPE_GRAY)
      png_error(png, "depth PNG must be single-channel grayscale");
    if (source_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_interlace_handling(png);
  });
  Raster<std::uint16_t> out(static_cast<int>(decoded.width), static_cast<int>(decoded.height));
  for (int y = 0; y < out.height(); ++y) {
    const auto& row = decoded.rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < out.width(); ++x) {
      if (source_depth == 16) {
        const std::size_t i = static_cast<std::size_t>(x) * 2;
        out(x, y) = static_cast<std::uint16_t>((row[i] << 8) | row[i + 1]);  // PNG is big-endian
      } else {
        out(x, y) = row[static_cast<std::size_t>(x)];
      }
    }
  }
  return out;
}

Bytes encode_png_gray16(const Raster<std::uint16_t>& image) {
  std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y) {
    auto& row = rows[static_cast<std::size_t>(y)];
    row.resize(static_cast<std::size_t>(image.width()) * 2);
    for (int x = 0; x < image.width(); ++x) {
      row[static_cast<std::size_t>(x) * 2] = static_cast<std::uint8_t>(image(x, y) >> 8);
      row[static_cast<std::size_t>(x) * 2 + 1] = static_cast<std::uint8_t>(image(x, y) & 0xFF);
    }
  }
  return encode_png_rows(image.width(), image.height(), 16, PNG_COLOR_TYPE_GRAY, rows);
}

namespace {

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

void jpeg_silent(j_common_ptr, int) {}

}  // namespace

Image decode_jpeg(std::span<const std::uint8_t> bytes) {
  if (!looks_like_jpeg(bytes)) fail(ErrorCode::DecodeError, "not a JPEG stream");
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_silent;
  std::vector<std::uint8_t> scanline;
  Image image;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    fail(ErrorCode::DecodeError, "corrupt JPEG stream");
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  image = Image(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
  scanline.resize(static_cast<std::size_t>(cinfo.output_width) * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    const int y = static_cast<int>(cinfo.output_scanline);
    JSAMPROW row = scanline.data();
    jpeg_read_scanlines(&cinfo, &row, 1);
    for (int x = 0; x < image.width(); ++x) {
      const std::size_t i = static_cast<std::size_t>(x) * 3;
      image(x, y) = Rgba8{scanline[i], scanline[i + 1], scanline[i + 2], 255};
    }
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return image;
}

Image decode_image(std::span<const std::uint8_t> bytes) {
  if (looks_like_png(bytes)) return decode_png(bytes);
  if (looks_like_jpeg(bytes)) return decode_jpeg(bytes);
  fail(ErrorCode::DecodeError, "unrecognized image format (expected PNG or JPEG)");
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "short write to " + path);
}

void write_file_atomic(const std::string& path, std::span<const std::uint8_t> bytes) {
  const std::string tmp = path + ".tmp";
  write_file(tmp, bytes);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoError, "rename " + tmp + " -> " + path + ": " + ec.message());
}

}  // namespace parallax

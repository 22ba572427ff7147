#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "parallax/raster.hpp"

namespace parallax {

using Bytes = std::vector<std::uint8_t>;

/// 8-bit RGBA PNG, no interlace, default filters, zlib level 6. Output bytes
/// are a pure function of the raster.
Bytes encode_png(const Image& image);

/// Decodes any PNG libpng understands into 8-bit RGBA. Throws DecodeError.
Image decode_png(std::span<const std::uint8_t> bytes);

/// Decodes a 16-bit (or 8-bit) grayscale PNG keeping full precision.
Raster<std::uint16_t> decode_png_gray16(std::span<const std::uint8_t> bytes);
Bytes encode_png_gray16(const Raster<std::uint16_t>& image);

/// Baseline/progressive JPEG to RGBA (alpha 255). Throws DecodeError.
Image decode_jpeg(std::span<const std::uint8_t> bytes);

/// Sniffs the signature and dispatches to the PNG or JPEG decoder.
Image decode_image(std::span<const std::uint8_t> bytes);

bool looks_like_png(std::span<const std::uint8_t> bytes) noexcept;
bool looks_like_jpeg(std::span<const std::uint8_t> bytes) noexcept;

Bytes read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
/// Write to a sibling temp file, then rename over the target.
void write_file_atomic(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace parallax

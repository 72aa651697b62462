#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "edstereo/raster.hpp"

namespace edstereo {

/// Decoded 8-bit raster with 1 (gray) or 3 (RGB, interleaved) channels.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
};

/// Reads binary PGM (P5), PPM (P6) or 8-bit PNG. The format is detected from
/// the file signature, not the extension. PNG alpha is dropped and palette
/// images are expanded to RGB. 16-bit data is rejected.
Image load_image(const std::filesystem::path& path);

/// Decodes an in-memory PNM buffer; `origin` is used in error messages.
Image decode_pnm(std::span<const std::uint8_t> bytes, std::string_view origin);

/// CIE L* of each pixel (sRGB companding, D65 white) rescaled to
/// round(L* * 255 / 100). Single-channel input is returned unchanged.
GrayImage to_lightness(const Image& image);

/// L* in [0, 100] for one sRGB triple.
double srgb_lightness(std::uint8_t r, std::uint8_t g, std::uint8_t b);

Image to_image(const GrayImage& gray);

std::vector<std::uint8_t> encode_pgm(const GrayImage& image);

/// Writes `bytes` to a sibling temp file and renames it over `path`, so the
/// destination is either complete or untouched.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Min-max normalization of a real map to 0..255 for inspection only.
GrayImage normalize_for_display(const RealMap& map);

}  // namespace edstereo

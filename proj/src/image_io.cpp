#include "edstereo/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

namespace edstereo {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void format_error(std::string_view origin, const std::string& msg) {
  throw Error(ErrorKind::Format, std::string(origin) + ": " + msg);
}

std::vector<std::uint8_t> read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, path.string() + ": cannot open file");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorKind::Io, path.string() + ": read failed");
  }
  return bytes;
}

// Header tokenizer for binary PNM: whitespace separated, '#' comments.
class PnmHeader {
public:
  PnmHeader(std::span<const std::uint8_t> bytes, std::string_view origin)
      : bytes_(bytes), origin_(origin) {}

  long next_int(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) {
      format_error(origin_, std::string("truncated header, missing ") + field);
    }
    if (bytes_[pos_] < '0' || bytes_[pos_] > '9') {
      format_error(origin_, std::string("malformed header field ") + field);
    }
    long value = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) {
        format_error(origin_, std::string("header field ") + field + " too large");
      }
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the payload.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      format_error(origin_, "missing whitespace after maxval");
    }
    return pos_ + 1;
  }

private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::string_view origin_;
  std::size_t pos_ = 2;
};

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->pos + length > state->bytes.size()) {
    png_error(png, "unexpected end of pixel data");
  }
  std::copy_n(state->bytes.begin() + static_cast<std::ptrdiff_t>(state->pos),
              length, out);
  state->pos += length;
}

Image decode_png(std::span<const std::uint8_t> bytes, std::string_view origin) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) format_error(origin, "cannot initialize PNG decoder");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    format_error(origin, "cannot initialize PNG decoder");
  }

  PngReadState state{bytes, 0};
  Image image;
  std::vector<png_bytep> rows;
  std::string failure;
  int bit_depth = 0;

  // libpng reports errors by longjmp; keep non-trivial objects declared above.
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    format_error(origin, "corrupt PNG data (unexpected end of pixel data or bad chunk)");
  }

  png_set_read_fn(png, &state, png_read_from_span);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  if (bit_depth == 16) {
    failure = "unsupported bit depth 16 (only 8-bit images are accepted)";
  } else {
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
      png_set_expand_gray_1_2_4_to_8(png);
    }
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    image.width = static_cast<int>(width);
    image.height = static_cast<int>(height);
    image.channels = png_get_channels(png, info);
    image.data.resize(static_cast<std::size_t>(width) * height * image.channels);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) {
      rows[y] = image.data.data() +
                static_cast<std::size_t>(y) * width * image.channels;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);

  if (!failure.empty()) format_error(origin, failure);
  if (image.channels != 1 && image.channels != 3) {
    format_error(origin, "unsupported channel count " +
                             std::to_string(image.channels));
  }
  return image;
}

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

}  // namespace

Image decode_pnm(std::span<const std::uint8_t> bytes, std::string_view origin) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    format_error(origin, "not a binary PGM (P5) or PPM (P6) file");
  }
  const int channels = bytes[1] == '5' ? 1 : 3;
  PnmHeader header(bytes, origin);
  const long width = header.next_int("width");
  const long height = header.next_int("height");
  const long maxval = header.next_int("maxval");
  if (width <= 0 || height <= 0) {
    format_error(origin, "invalid dimensions " + std::to_string(width) + "x" +
                             std::to_string(height));
  }
  if (maxval > 255) {
    format_error(origin, "unsupported bit depth (maxval " + std::to_string(maxval) +
                             ", only 8-bit images are accepted)");
  }
  if (maxval == 0) format_error(origin, "invalid maxval 0");

  const std::size_t offset = header.payload_offset();
  const std::size_t expected = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() - offset < expected) {
    format_error(origin, "unexpected end of pixel data (" +
                             std::to_string(bytes.size() - offset) + " of " +
                             std::to_string(expected) + " bytes)");
  }

  Image image;
  image.width = static_cast<int>(width);
  image.height = static_cast<int>(height);
  image.channels = channels;
  image.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                    bytes.begin() + static_cast<std::ptrdiff_t>(offset + expected));
  return image;
}

Image load_image(const fs::path& path) {
  const auto bytes = read_all(path);
  const std::string origin = path.string();
  if (is_png(bytes)) return decode_png(bytes, origin);
  return decode_pnm(bytes, origin);
}

double srgb_lightness(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  // Relative luminance Y with the D65 white normalized to Y = 1.
  const double y = 0.2126729 * srgb_to_linear(r / 255.0) +
                   0.7151522 * srgb_to_linear(g / 255.0) +
                   0.0721750 * srgb_to_linear(b / 255.0);
  constexpr double delta = 6.0 / 29.0;
  const double f = y > delta * delta * delta ? std::cbrt(y)
                                             : y / (3.0 * delta * delta) + 4.0 / 29.0;
  return std::clamp(116.0 * f - 16.0, 0.0, 100.0);
}

GrayImage to_lightness(const Image& image) {
  if (image.channels == 1) {
    return GrayImage(image.width, image.height, image.data);
  }
  if (image.channels != 3) {
    throw Error(ErrorKind::InvalidArgument,
                "to_lightness expects 1 or 3 channels, got " +
                    std::to_string(image.channels));
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(image.width) * image.height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double l = srgb_lightness(image.data[3 * i], image.data[3 * i + 1],
                                    image.data[3 * i + 2]);
    out[i] = static_cast<std::uint8_t>(std::lround(l * 255.0 / 100.0));
  }
  return GrayImage(image.width, image.height, std::move(out));
}

Image to_image(const GrayImage& gray) {
  return Image{gray.width(), gray.height(), 1,
               std::vector<std::uint8_t>(gray.values().begin(), gray.values().end())};
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), image.values().begin(), image.values().end());
  return bytes;
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error(ErrorKind::Io, path.parent_path().string() +
                                     ": cannot create directory: " + ec.message());
    }
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, tmp.string() + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error(ErrorKind::Io, tmp.string() + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::Io, path.string() + ": rename failed: " + ec.message());
  }
}

void write_text_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, std::span<const std::uint8_t>(
                              reinterpret_cast<const std::uint8_t*>(text.data()),
                              text.size()));
}

void write_pgm(const fs::path& path, const GrayImage& image) {
  write_file_atomic(path, encode_pgm(image));
}

GrayImage normalize_for_display(const RealMap& map) {
  const auto [lo, hi] = std::minmax_element(map.values().begin(), map.values().end());
  const double span = *hi - *lo;
  std::vector<std::uint8_t> out(map.size(), 0);
  if (span > 0.0) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = static_cast<std::uint8_t>(std::lround(255.0 * (map[i] - *lo) / span));
    }
  }
  return GrayImage(map.width(), map.height(), std::move(out));
}

}  // namespace edstereo

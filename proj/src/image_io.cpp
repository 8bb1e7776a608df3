#include "corf/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <unistd.h>
#include <vector>

#include "corf/io_util.hpp"

namespace corf {

namespace {

constexpr double kLumaR = 0.299, kLumaG = 0.587, kLumaB = 0.114;

bool has_extension(const std::string& path, const char* ext) {
  std::string e = std::filesystem::path(path).extension().string();
  for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e == ext;
}

unsigned char to_byte(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));
}

// ---- PGM (binary P5) ----

int pgm_token(const std::string& bytes, std::size_t& pos) {
  // Skips whitespace and '#' comments, then reads a decimal token.
  for (;;) {
    while (pos < bytes.size() &&
           std::isspace(static_cast<unsigned char>(bytes[pos])))
      ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos])))
    throw FormatError("malformed PGM header");
  long v = 0;
  while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    v = v * 10 + (bytes[pos] - '0');
    if (v > 1 << 20) throw FormatError("PGM header value out of range");
    ++pos;
  }
  return static_cast<int>(v);
}

Image load_pgm(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw FormatError(path + ": not a binary PGM (P5) file");
  std::size_t pos = 2;
  const int width = pgm_token(bytes, pos);
  const int height = pgm_token(bytes, pos);
  const int maxval = pgm_token(bytes, pos);
  if (width < 1 || height < 1) throw FormatError(path + ": bad PGM dimensions");
  if (maxval < 1 || maxval > 255)
    throw FormatError(path + ": unsupported PGM bit depth (maxval " +
                      std::to_string(maxval) + ")");
  ++pos;  // single whitespace after maxval
  const std::size_t need = static_cast<std::size_t>(width) * height;
  if (pos > bytes.size() || bytes.size() - pos < need)
    throw FormatError(path + ": truncated PGM payload");

  PlaneD values(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      values(y, x) =
          static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(y) * width + x]) /
          255.0;
  return Image(std::move(values));
}

void save_pgm(const std::string& path, const PlaneD& values) {
  std::string out = "P5\n" + std::to_string(values.cols()) + " " +
                    std::to_string(values.rows()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(values.size()));
  for (long y = 0; y < values.rows(); ++y)
    for (long x = 0; x < values.cols(); ++x)
      out.push_back(static_cast<char>(to_byte(values(y, x))));
  write_file_atomic(path, out);
}

// ---- PNG via libpng ----

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image load_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path);

  png_byte header[8] = {};
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
    throw FormatError(path + ": not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }
  std::vector<png_bytep> rows;
  std::vector<png_byte> data;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path + ": corrupt PNG data");
  }

  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_byte depth = png_get_bit_depth(png, info);
  const png_byte color = png_get_color_type(png, info);
  if (depth == 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path + ": unsupported bit depth 16 (need 8-bit)");
  }
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const png_uint_32 channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path + ": unsupported PNG channel layout");
  }

  const std::size_t stride = png_get_rowbytes(png, info);
  data.resize(stride * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = data.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  PlaneD values(height, width);
  for (png_uint_32 y = 0; y < height; ++y) {
    const png_bytep row = data.data() + y * stride;
    for (png_uint_32 x = 0; x < width; ++x) {
      if (channels == 1) {
        values(y, x) = row[x] / 255.0;
      } else {
        const double luma =
            kLumaR * row[3 * x] + kLumaG * row[3 * x + 1] + kLumaB * row[3 * x + 2];
        values(y, x) = luma / 255.0;
      }
    }
  }
  return Image(std::move(values));
}

void save_png(const std::string& path, const PlaneD& values) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    FilePtr fp(std::fopen(tmp.c_str(), "wb"));
    if (!fp) throw IoError("cannot open " + tmp + " for writing");

    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
      png_destroy_write_struct(&png, nullptr);
      throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      throw IoError("PNG write failed for " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(values.cols()),
                 static_cast<png_uint_32>(values.rows()), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(values.cols());
    for (long y = 0; y < values.rows(); ++y) {
      for (long x = 0; x < values.cols(); ++x) row[x] = to_byte(values(y, x));
      png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into place: " + path);
  }
}

}  // namespace

Image load_grayscale(const std::string& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path);
  if (has_extension(path, ".pgm")) return load_pgm(path);
  if (has_extension(path, ".png")) return load_png(path);
  // Fall back to content sniffing for unrecognized extensions.
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  unsigned char magic[2] = {};
  const std::size_t got = std::fread(magic, 1, 2, f);
  std::fclose(f);
  if (got == 2 && magic[0] == 'P' && magic[1] == '5') return load_pgm(path);
  if (got == 2 && magic[0] == 0x89 && magic[1] == 'P') return load_png(path);
  throw FormatError(path + ": unsupported image format (need 8-bit PNG or P5 PGM)");
}

void save_grayscale(const std::string& path, const PlaneD& values) {
  if (values.rows() < 1 || values.cols() < 1)
    throw InvalidArgument("cannot save empty image");
  if (has_extension(path, ".pgm"))
    save_pgm(path, values);
  else
    save_png(path, values);
}

}  // namespace corf

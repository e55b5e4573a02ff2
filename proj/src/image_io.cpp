#include "camo/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include <jpeglib.h>

namespace camo
{
namespace
{

struct FileCloser
{
  void operator()(std::FILE* f) const
  {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_for_read(const std::filesystem::path& path)
{
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
  {
    throw Error(ErrorKind::FileMissing, path.string());
  }
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error(ErrorKind::FileMissing, path.string());
  return f;
}

void check_dims(const std::filesystem::path& path, Dims found, std::optional<Dims> expected)
{
  if (expected && found != *expected)
  {
    throw Error(ErrorKind::DimensionMismatch,
                path.string() + ": found " + std::to_string(found.width) + "x" + std::to_string(found.height) +
                  ", expected " + std::to_string(expected->width) + "x" + std::to_string(expected->height));
  }
}

void png_error_fn(png_structp png, png_const_charp msg)
{
  auto* buf = static_cast<std::string*>(png_get_error_ptr(png));
  if (buf) *buf = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

bool has_png_signature(std::FILE* f)
{
  unsigned char sig[8] = {};
  const bool ok = std::fread(sig, 1, 8, f) == 8 && png_sig_cmp(sig, 0, 8) == 0;
  std::rewind(f);
  return ok;
}

enum class PngMode
{
  Gray,
  Rgb8,
};

// Reads a PNG into 16-bit storage (gray) or interleaved 8-bit RGB.
struct PngResult
{
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::vector<std::uint16_t> gray;
  std::vector<std::uint8_t> rgb;
};

PngResult read_png(const std::filesystem::path& path, std::FILE* f, PngMode mode)
{
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw Error(ErrorKind::ParseError, path.string() + ": png init failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows;
  PngResult out;
  std::vector<std::uint8_t> buffer;
  volatile bool unsupported = false;

  if (setjmp(png_jmpbuf(png)))
  {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::ParseError, path.string() + ": " + err);
  }

  png_init_io(png, f);
  png_read_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  const int color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  std::size_t channels = 1;
  std::size_t bytes_per_sample = 1;

  if (mode == PngMode::Gray)
  {
    if (color_type != PNG_COLOR_TYPE_GRAY || (depth != 8 && depth != 16))
    {
      unsupported = true;
    }
    else
    {
      out.bit_depth = depth;
      bytes_per_sample = depth == 16 ? 2 : 1;
    }
  }
  else
  {
    if (depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
    channels = 3;
  }

  if (!unsupported)
  {
    png_read_update_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(out.width) * channels * bytes_per_sample;
    if (png_get_rowbytes(png, info) != stride)
    {
      unsupported = true;
    }
    else
    {
      buffer.resize(stride * out.height);
      rows.resize(out.height);
      for (int y = 0; y < out.height; ++y) rows[y] = buffer.data() + stride * y;
      png_read_image(png, rows.data());
      png_read_end(png, nullptr);
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (unsupported)
  {
    throw Error(ErrorKind::UnsupportedPixelFormat,
                path.string() + ": color type " + std::to_string(color_type) + ", depth " + std::to_string(depth));
  }

  if (mode == PngMode::Gray)
  {
    const std::size_t n = static_cast<std::size_t>(out.width) * out.height;
    out.gray.resize(n);
    if (out.bit_depth == 16)
    {
      for (std::size_t i = 0; i < n; ++i) out.gray[i] = static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]);
    }
    else
    {
      for (std::size_t i = 0; i < n; ++i) out.gray[i] = buffer[i];
    }
  }
  else
  {
    out.rgb = std::move(buffer);
  }
  return out;
}

struct JpegErrorManager
{
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo)
{
  auto* mgr = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, mgr->message);
  std::longjmp(mgr->jump, 1);
}

RgbImage read_jpeg(const std::filesystem::path& path, std::FILE* f)
{
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  RgbImage out;
  if (setjmp(err.jump))
  {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorKind::ParseError, path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out.width = static_cast<int>(cinfo.output_width);
  out.height = static_cast<int>(cinfo.output_height);
  out.data.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  while (cinfo.output_scanline < cinfo.output_height)
  {
    JSAMPROW row = out.data.data() + static_cast<std::size_t>(cinfo.output_scanline) * out.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

void write_png(const std::filesystem::path& path, int width, int height, int color_type, int depth,
               const std::uint8_t* data, std::size_t stride)
{
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(ErrorKind::UnwritablePath, path.string());
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw Error(ErrorKind::UnwritablePath, path.string());
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png)))
  {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::UnwritablePath, path.string() + ": " + err);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, width, height, depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
  {
    png_write_row(png, const_cast<png_bytep>(data + stride * y));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

GrayImage read_gray_png(const std::filesystem::path& path)
{
  auto f = open_for_read(path);
  if (!has_png_signature(f.get()))
  {
    throw Error(ErrorKind::UnsupportedPixelFormat, path.string() + ": not a PNG file");
  }
  auto png = read_png(path, f.get(), PngMode::Gray);
  GrayImage out;
  out.bit_depth = png.bit_depth;
  out.samples = Eigen::Map<const Image<std::uint16_t>>(png.gray.data(), png.height, png.width);
  return out;
}

ScalarMap load_scalar_map(const std::filesystem::path& path, std::optional<Dims> expected)
{
  auto gray = read_gray_png(path);
  check_dims(path, dims_of(gray.samples), expected);
  return gray.samples.cast<double>() / gray.max_value();
}

BinaryMask load_mask(const std::filesystem::path& path, std::optional<Dims> expected)
{
  auto gray = read_gray_png(path);
  check_dims(path, dims_of(gray.samples), expected);
  const std::uint16_t midpoint = gray.bit_depth == 16 ? 32767 : 127;
  return (gray.samples > midpoint).cast<std::uint8_t>();
}

RgbImage load_rgb(const std::filesystem::path& path, std::optional<Dims> expected)
{
  auto f = open_for_read(path);
  RgbImage out;
  if (has_png_signature(f.get()))
  {
    auto png = read_png(path, f.get(), PngMode::Rgb8);
    out.width = png.width;
    out.height = png.height;
    out.data = std::move(png.rgb);
  }
  else
  {
    unsigned char magic[2] = {};
    const bool jpeg = std::fread(magic, 1, 2, f.get()) == 2 && magic[0] == 0xFF && magic[1] == 0xD8;
    std::rewind(f.get());
    if (!jpeg) throw Error(ErrorKind::UnsupportedPixelFormat, path.string() + ": neither PNG nor JPEG");
    out = read_jpeg(path, f.get());
  }
  check_dims(path, {out.width, out.height}, expected);
  return out;
}

void write_gray_png(const std::filesystem::path& path, const Image<std::uint8_t>& pixels)
{
  write_png(path, static_cast<int>(pixels.cols()), static_cast<int>(pixels.rows()), PNG_COLOR_TYPE_GRAY, 8,
            pixels.data(), static_cast<std::size_t>(pixels.cols()));
}

void write_gray_png16(const std::filesystem::path& path, const Image<std::uint16_t>& pixels)
{
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(pixels.size()) * 2);
  for (Eigen::Index i = 0; i < pixels.size(); ++i)
  {
    bytes[2 * i] = static_cast<std::uint8_t>(pixels.data()[i] >> 8);
    bytes[2 * i + 1] = static_cast<std::uint8_t>(pixels.data()[i] & 0xFF);
  }
  write_png(path, static_cast<int>(pixels.cols()), static_cast<int>(pixels.rows()), PNG_COLOR_TYPE_GRAY, 16,
            bytes.data(), static_cast<std::size_t>(pixels.cols()) * 2);
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image)
{
  write_png(path, image.width, image.height, PNG_COLOR_TYPE_RGB, 8, image.data.data(),
            static_cast<std::size_t>(image.width) * 3);
}

Image<std::uint8_t> quantize8(const ScalarMap& map)
{
  return (map.max(0.0).min(1.0) * 255.0).round().cast<std::uint8_t>();
}

}  // namespace camo

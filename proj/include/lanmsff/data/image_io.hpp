#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "lanmsff/data/image.hpp"

#ifdef LANMSFF_HAVE_JPEG
#include <csetjmp>
#include <jpeglib.h>
#endif

namespace lanmsff::data {

/// Decoded 8-bit image, interleaved when channels == 3.
struct RawImage {
  std::size_t width = 0, height = 0, channels = 1;
  std::vector<unsigned char> bytes;
};

namespace detail {

inline std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::Io, "cannot open ", path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class PnmTokenizer {
 public:
  explicit PnmTokenizer(const std::vector<unsigned char>& b) : b_(b) {}

  std::size_t next_int() {
    skip();
    require(pos_ < b_.size() && std::isdigit(b_[pos_]), ErrorKind::Parse, "malformed PNM header");
    std::size_t v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) v = v * 10 + (b_[pos_++] - '0');
    return v;
  }
  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#')
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      else if (std::isspace(b_[pos_]))
        ++pos_;
      else
        break;
    }
  }
  const std::vector<unsigned char>& b_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Reads P2/P3 (ASCII) and P5/P6 (binary) with maxval up to 255.
inline RawImage decode_pnm(const std::vector<unsigned char>& b) {
  require(b.size() >= 2 && b[0] == 'P' && (b[1] == '2' || b[1] == '3' || b[1] == '5' || b[1] == '6'),
          ErrorKind::Parse, "not a PGM/PPM image");
  const char kind = static_cast<char>(b[1]);
  detail::PnmTokenizer tok(b);
  tok.advance(2);
  RawImage img;
  img.width = tok.next_int();
  img.height = tok.next_int();
  const std::size_t maxval = tok.next_int();
  require(maxval > 0 && maxval <= 255, ErrorKind::Parse, "unsupported PNM maxval ", maxval);
  img.channels = (kind == '3' || kind == '6') ? 3 : 1;
  const std::size_t n = img.width * img.height * img.channels;
  img.bytes.resize(n);
  if (kind == '5' || kind == '6') {
    tok.advance(1);
    require(tok.pos() + n <= b.size(), ErrorKind::Truncated, "PNM pixel data truncated");
    for (std::size_t i = 0; i < n; ++i) img.bytes[i] = b[tok.pos() + i];
  } else {
    for (std::size_t i = 0; i < n; ++i) img.bytes[i] = static_cast<unsigned char>(tok.next_int());
  }
  if (maxval != 255)
    for (auto& v : img.bytes) v = static_cast<unsigned char>(std::lround(255.0 * v / static_cast<double>(maxval)));
  return img;
}

inline bool jpeg_supported() {
#ifdef LANMSFF_HAVE_JPEG
  return true;
#else
  return false;
#endif
}

#ifdef LANMSFF_HAVE_JPEG
namespace detail {
struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};
inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegError*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}
}  // namespace detail
#endif

inline RawImage decode_jpeg(const std::vector<unsigned char>& b) {
#ifdef LANMSFF_HAVE_JPEG
  jpeg_decompress_struct cinfo{};
  detail::JpegError err{};
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = detail::jpeg_error_exit;
  RawImage img;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    fail(ErrorKind::Parse, "JPEG decode failed: ", err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, b.data(), static_cast<unsigned long>(b.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
  jpeg_start_decompress(&cinfo);
  img.width = cinfo.output_width;
  img.height = cinfo.output_height;
  img.channels = static_cast<std::size_t>(cinfo.output_components);
  img.bytes.resize(img.width * img.height * img.channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = img.bytes.data() + cinfo.output_scanline * img.width * img.channels;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
#else
  (void)b;
  fail(ErrorKind::Io, "JPEG support not compiled in; convert images to PGM/PPM");
#endif
}

inline RawImage read_image(const std::filesystem::path& path) {
  const auto bytes = detail::slurp(path);
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_pnm(bytes);
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8) return decode_jpeg(bytes);
  fail(ErrorKind::Parse, "unrecognized image format: ", path.string());
}

/// Luminance (channels == 1) or per-channel planes (channels == 3) of a
/// decoded image, as unnormalized 0..255 values.
inline std::vector<Image> to_planes(const RawImage& raw, std::size_t channels) {
  require(channels == 1 || channels == 3, ErrorKind::InvalidArgument, "channels must be 1 or 3");
  std::vector<Image> planes;
  if (channels == 1) {
    planes.push_back(raw.channels == 3 ? rgb_to_luma(raw.bytes, raw.width, raw.height)
                                       : from_bytes(raw.bytes, raw.width, raw.height));
    return planes;
  }
  for (std::size_t c = 0; c < 3; ++c) {
    Image p(raw.width, raw.height);
    for (std::size_t i = 0; i < raw.width * raw.height; ++i)
      p.pixels[i] = raw.bytes[i * raw.channels + (raw.channels == 3 ? c : 0)];
    planes.push_back(std::move(p));
  }
  return planes;
}

/// Binary PGM (P5) of values in [0,1].
inline std::vector<unsigned char> encode_pgm(const std::vector<real>& values, std::size_t width, std::size_t height) {
  require(values.size() == width * height, ErrorKind::ShapeMismatch, "PGM needs ", width * height, " values");
  const std::string header = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  for (real v : values)
    out.push_back(static_cast<unsigned char>(std::lround(255.0 * std::clamp(static_cast<double>(v), 0.0, 1.0))));
  return out;
}

inline void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::Io, "cannot open ", path.string(), " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(f), ErrorKind::Io, "failed writing ", path.string());
}

}  // namespace lanmsff::data

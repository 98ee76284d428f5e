#include "gcnm/instances.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

namespace gcnm {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path));
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(fmt::format("read error on '{}'", path));
  return data;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("write error on '{}'", path));
}

namespace {

class PgmReader {
 public:
  explicit PgmReader(const std::string& b) : b_(b) {}

  std::size_t pos() const { return pos_; }

  // Skips whitespace and '#' comments.
  void skip_space() {
    while (pos_ < b_.size()) {
      const char c = b_[pos_];
      if (c == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint64_t integer(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    if (pos_ >= b_.size()) throw ParseError(fmt::format("PGM: unexpected end of file reading {}", what), pos_);
    std::uint64_t v = 0;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      v = v * 10 + static_cast<std::uint64_t>(b_[pos_] - '0');
      if (v > (1ULL << 40)) throw ParseError(fmt::format("PGM: {} too large", what), start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(fmt::format("PGM: expected an integer for {}", what), start);
    return v;
  }

  const std::string& bytes() const { return b_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  const std::string& b_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw ParseError("PGM: bad magic (expected P2 or P5)", 0);
  }
  const bool binary = bytes[1] == '5';
  PgmReader r(bytes);
  r.advance(2);
  const std::size_t after_magic = r.pos();
  if (after_magic < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[after_magic])) &&
      bytes[after_magic] != '#') {
    throw ParseError("PGM: expected whitespace after magic", after_magic);
  }
  const std::uint64_t w = r.integer("width");
  const std::uint64_t h = r.integer("height");
  const std::size_t maxval_at = r.pos();
  const std::uint64_t maxval = r.integer("maxval");
  if (w == 0 || h == 0) throw ParseError("PGM: width and height must be positive", maxval_at);
  if (maxval == 0 || maxval > 65535) {
    throw ParseError(fmt::format("PGM: maxval {} outside 1..65535", maxval), maxval_at);
  }
  GrayImage img;
  img.width = static_cast<Index>(w);
  img.height = static_cast<Index>(h);
  const std::uint64_t count = w * h;
  img.pixels.resize(static_cast<Index>(count));
  const double scale = 1.0 / static_cast<double>(maxval);

  if (binary) {
    if (r.pos() >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[r.pos()]))) {
      throw ParseError("PGM: expected a single whitespace byte before the P5 payload", r.pos());
    }
    r.advance(1);
    const std::size_t start = r.pos();
    const std::uint64_t bpp = maxval < 256 ? 1 : 2;
    const std::uint64_t need = count * bpp;
    const std::uint64_t have = bytes.size() - start;
    if (have < need) {
      throw ParseError(fmt::format("PGM: truncated P5 payload: expected {} bytes, received {}", need, have),
                       bytes.size());
    }
    for (std::uint64_t i = 0; i < count; ++i) {
      std::uint64_t v;
      if (bpp == 1) {
        v = static_cast<unsigned char>(bytes[start + i]);
      } else {
        v = (static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[start + 2 * i])) << 8) |
            static_cast<unsigned char>(bytes[start + 2 * i + 1]);
      }
      if (v > maxval) {
        throw ParseError(fmt::format("PGM: sample {} exceeds maxval {}", v, maxval), start + i * bpp);
      }
      img.pixels[static_cast<Index>(i)] = static_cast<double>(v) * scale;
    }
    return img;
  }

  for (std::uint64_t i = 0; i < count; ++i) {
    r.skip_space();
    if (r.pos() >= bytes.size()) {
      throw ParseError(fmt::format("PGM: truncated P2 payload: expected {} samples, received {}", count, i),
                       r.pos());
    }
    const std::size_t at = r.pos();
    const std::uint64_t v = r.integer("sample");
    if (v > maxval) throw ParseError(fmt::format("PGM: sample {} exceeds maxval {}", v, maxval), at);
    img.pixels[static_cast<Index>(i)] = static_cast<double>(v) * scale;
  }
  return img;
}

GrayImage read_pgm(const std::string& path) {
  const std::string bytes = read_file(path);
  try {
    return parse_pgm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {} (byte offset {})", path, e.what(), e.offset()), e.offset());
  }
}

std::string encode_pgm(const GrayImage& image, int maxval, bool binary) {
  if (maxval < 1 || maxval > 65535) throw InvalidArgument(fmt::format("PGM: maxval {} outside 1..65535", maxval));
  require_same_size(image.width * image.height, image.pixels.size(), "encode_pgm");
  std::string out = fmt::format("{}\n{} {}\n{}\n", binary ? "P5" : "P2", image.width, image.height, maxval);
  const Index count = image.pixels.size();
  for (Index i = 0; i < count; ++i) {
    double p = image.pixels[i];
    if (std::isnan(p)) p = 0.0;
    const auto v = static_cast<unsigned>(std::lround(std::clamp(p, 0.0, 1.0) * maxval));
    if (binary) {
      if (maxval < 256) {
        out.push_back(static_cast<char>(v));
      } else {
        out.push_back(static_cast<char>(v >> 8));
        out.push_back(static_cast<char>(v & 0xff));
      }
    } else {
      out += fmt::format("{}{}", v, (i + 1) % image.width == 0 ? '\n' : ' ');
    }
  }
  return out;
}

void write_pgm(const std::string& path, const GrayImage& image, int maxval, bool binary) {
  write_file(path, encode_pgm(image, maxval, binary));
}

}  // namespace gcnm

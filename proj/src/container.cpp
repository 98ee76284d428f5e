#include "gcnm/instances.hpp"

#include <fmt/format.h>

#include <cstring>

namespace gcnm {

namespace {

constexpr char kMagic[8] = {'G', 'C', 'N', 'M', 'I', 'N', 'S', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  put_u64(out, bits);
}

template <typename Derived>
void put_array(std::string& out, const Eigen::DenseBase<Derived>& a) {
  put_u64(out, static_cast<std::uint64_t>(a.size()));
  for (Index i = 0; i < a.size(); ++i) put_f64(out, a.derived().data()[i]);
}

class Decoder {
 public:
  explicit Decoder(const std::string& b) : b_(b) {}

  std::size_t pos() const { return pos_; }

  void need(std::uint64_t n, const char* what) const {
    if (b_.size() - pos_ < n) {
      throw ParseError(fmt::format("instance file truncated reading {}: expected {} bytes, {} available", what, n,
                                   b_.size() - pos_),
                       pos_);
    }
  }

  std::uint64_t u(int bytes, const char* what) {
    need(static_cast<std::uint64_t>(bytes), what);
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }

  std::string text(const char* what) {
    const std::uint64_t len = u(8, what);
    need(len, what);
    std::string s = b_.substr(pos_, static_cast<std::size_t>(len));
    pos_ += static_cast<std::size_t>(len);
    return s;
  }

  Vec array(const char* what, std::uint64_t expected) {
    const std::size_t at = pos_;
    const std::uint64_t count = u(8, what);
    if (count != expected) {
      throw ParseError(fmt::format("instance file: {} has {} entries, header implies {}", what, count, expected), at);
    }
    if (count > (b_.size() - pos_) / 8) need(count * 8, what);
    Vec v(static_cast<Index>(count));
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t bits = u(8, what);
      double d;
      std::memcpy(&d, &bits, sizeof d);
      v[static_cast<Index>(i)] = d;
    }
    return v;
  }

  // Arrays that may legitimately be absent (count 0).
  Vec optional_array(const char* what, std::uint64_t expected) {
    const std::size_t save = pos_;
    const std::uint64_t count = u(8, what);
    pos_ = save;
    return array(what, count == 0 ? 0 : expected);
  }

 private:
  const std::string& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_instance(const Instance& inst) {
  const InstanceSpec& s = inst.spec;
  std::string out(kMagic, kMagic + 8);
  put_u32(out, kContainerVersion);
  put_u32(out, static_cast<std::uint32_t>(s.family));
  put_u64(out, static_cast<std::uint64_t>(s.m));
  put_u64(out, static_cast<std::uint64_t>(s.n));
  put_u64(out, static_cast<std::uint64_t>(s.family == Family::deblur ? s.width : 0));
  put_u64(out, static_cast<std::uint64_t>(s.family == Family::deblur ? s.height : 0));
  const std::string spec_text = format_spec(s);
  put_u64(out, spec_text.size());
  out += spec_text;
  // Row-major A so the file layout does not depend on Eigen's storage order.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a_rm = inst.a;
  put_array(out, a_rm);
  put_array(out, inst.b);
  put_array(out, inst.x0);
  put_array(out, inst.x_true);
  return out;
}

Instance decode_instance(const std::string& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw ParseError("instance file: bad magic (expected GCNMINST)", 0);
  }
  Decoder d(bytes);
  d.u(8, "magic");
  const std::size_t version_at = d.pos();
  const auto version = static_cast<std::uint32_t>(d.u(4, "version"));
  if (version != kContainerVersion) {
    throw ParseError(fmt::format("instance file: unsupported version {} (expected {})", version, kContainerVersion),
                     version_at);
  }
  const std::size_t family_at = d.pos();
  const auto family = static_cast<std::uint32_t>(d.u(4, "family"));
  if (family < 1 || family > 4) throw ParseError(fmt::format("instance file: unknown family code {}", family), family_at);
  const std::uint64_t m = d.u(8, "m");
  const std::uint64_t n = d.u(8, "n");
  const std::uint64_t width = d.u(8, "width");
  const std::uint64_t height = d.u(8, "height");
  const std::size_t spec_at = d.pos();
  const std::string spec_text = d.text("spec");

  Instance inst;
  try {
    inst.spec = parse_spec(spec_text);
  } catch (const InvalidArgument& e) {
    throw ParseError(fmt::format("instance file: embedded spec invalid: {}", e.what()), spec_at);
  }
  if (static_cast<std::uint32_t>(inst.spec.family) != family ||
      static_cast<std::uint64_t>(inst.spec.m) != m || static_cast<std::uint64_t>(inst.spec.n) != n) {
    throw ParseError("instance file: header disagrees with embedded spec", spec_at);
  }
  if (inst.spec.family == Family::deblur) {
    inst.spec.width = static_cast<Index>(width);
    inst.spec.height = static_cast<Index>(height);
    if (width * height != n) throw ParseError("instance file: width*height != n", spec_at);
  }

  const bool has_matrix = inst.spec.family != Family::deblur;
  const Vec a = d.array("A", has_matrix ? m * n : 0);
  if (has_matrix) {
    inst.a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        a.data(), static_cast<Index>(m), static_cast<Index>(n));
  }
  inst.b = d.array("b", m);
  inst.x0 = d.array("x0", n);
  inst.x_true = d.optional_array("x_true", n);
  if (d.pos() != bytes.size()) {
    throw ParseError(fmt::format("instance file: {} trailing bytes", bytes.size() - d.pos()), d.pos());
  }
  return inst;
}

void save_instance(const std::string& path, const Instance& inst) { write_file(path, encode_instance(inst)); }

Instance load_instance(const std::string& path) {
  const std::string bytes = read_file(path);
  try {
    return decode_instance(bytes);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {} (byte offset {})", path, e.what(), e.offset()), e.offset());
  }
}

}  // namespace gcnm

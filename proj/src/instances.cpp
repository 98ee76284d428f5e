#include "gcnm/instances.hpp"

#include "gcnm/operators.hpp"
#include "gcnm/regularizers.hpp"
#include "gcnm/rng.hpp"
#include "gcnm/smooth_models.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gcnm {

const char* to_string(Family f) {
  switch (f) {
    case Family::l0l2: return "l0l2";
    case Family::studentt: return "studentt";
    case Family::deblur: return "deblur";
    case Family::studentt2d: return "studentt2d";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "l0l2") return Family::l0l2;
  if (s == "studentt") return Family::studentt;
  if (s == "deblur") return Family::deblur;
  if (s == "studentt2d") return Family::studentt2d;
  throw InvalidArgument(fmt::format("unknown family '{}' (expected l0l2, studentt, deblur or studentt2d)", s));
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text, int line) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw InvalidArgument(fmt::format("spec line {}: invalid value '{}' for key '{}'", line, text, key));
  }
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& text, int line) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, trim(item), line));
  return out;
}

Index complete_ratio(Index& n, Index& m, Index ratio, const char* family) {
  if (n == 0 && m == 0) throw InvalidArgument(fmt::format("{}: n or m must be given", family));
  if (n < 0 || m < 0) throw InvalidArgument(fmt::format("{}: dimensions must be positive", family));
  if (n == 0) n = ratio * m;
  if (m == 0) {
    if (n % ratio != 0) {
      throw InvalidArgument(fmt::format("{}: n={} is not a multiple of n/m = {}", family, n, ratio));
    }
    m = n / ratio;
  }
  if (n != ratio * m) {
    throw InvalidArgument(fmt::format("{}: requires n = {}m (got n={}, m={})", family, ratio, n, m));
  }
  return n;
}

Mat gaussian_matrix(Rng& rng, Index m, Index n) {
  Mat a(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a;
}

}  // namespace

InstanceSpec normalize_spec(InstanceSpec s) {
  if (s.mu0 < 0.0 || !std::isfinite(s.mu0)) throw InvalidArgument(fmt::format("mu0 must be > 0 (got {})", s.mu0));
  if (!std::isfinite(s.mu2)) throw InvalidArgument("mu2 must be finite");
  if (!std::isfinite(s.nu) || !(s.nu > 0.0)) throw InvalidArgument(fmt::format("nu must be > 0 (got {})", s.nu));
  switch (s.family) {
    case Family::l0l2:
      if (s.mu0 == 0.0) s.mu0 = 1e-2;
      if (s.mu2 < 0.0) s.mu2 = 1e-2;
      complete_ratio(s.n, s.m, 5, "l0l2");
      break;
    case Family::studentt:
      if (s.mu0 == 0.0) s.mu0 = 1e-1;
      if (s.mu2 < 0.0) s.mu2 = 0.0;
      complete_ratio(s.n, s.m, 8, "studentt");
      if (s.n < 40) {
        throw InvalidArgument(fmt::format(
            "studentt: n={} gives k = floor(n/40) = 0 nonzeros; degenerate instance (need n >= 40)", s.n));
      }
      break;
    case Family::deblur:
      if (s.mu0 == 0.0) s.mu0 = 1e-4;
      if (s.mu2 < 0.0) s.mu2 = 5e-3;
      if (s.kernel_size < 1 || s.kernel_size % 2 == 0) {
        throw InvalidArgument(fmt::format("deblur: kernel_size must be odd and >= 1 (got {})", s.kernel_size));
      }
      if (!(s.kernel_std > 0.0)) throw InvalidArgument("deblur: kernel_std must be > 0");
      if (!(s.noise_std >= 0.0)) throw InvalidArgument("deblur: noise_std must be >= 0");
      if (s.image.empty()) {
        if (s.width < 1 || s.height < 1) throw InvalidArgument("deblur: width and height must be >= 1");
        s.n = s.m = s.width * s.height;
      }
      break;
    case Family::studentt2d:
      if (s.mu0 == 0.0) s.mu0 = 1e-1;
      if (s.mu2 < 0.0) s.mu2 = 0.0;
      s.n = 2;
      s.m = 1;
      if (s.x0.empty()) s.x0 = {5.0, 5.0};
      if (s.x0.size() != 2) throw InvalidArgument(fmt::format("studentt2d: x0 needs 2 entries (got {})", s.x0.size()));
      break;
  }
  return s;
}

InstanceSpec parse_spec(const std::string& text) {
  InstanceSpec s;
  bool have_family = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string l = trim(raw);
    if (l.empty() || l[0] == '#') continue;
    const auto eq = l.find('=');
    if (eq == std::string::npos) throw InvalidArgument(fmt::format("spec line {}: expected key=value", line));
    const std::string key = trim(l.substr(0, eq));
    const std::string val = trim(l.substr(eq + 1));
    if (key == "family") {
      s.family = family_from_string(val);
      have_family = true;
    } else if (key == "n") {
      s.n = parse_number<Index>(key, val, line);
    } else if (key == "m") {
      s.m = parse_number<Index>(key, val, line);
    } else if (key == "mu0") {
      s.mu0 = parse_number<double>(key, val, line);
      if (!(s.mu0 > 0.0)) throw InvalidArgument(fmt::format("spec line {}: mu0 must be > 0", line));
    } else if (key == "mu2") {
      s.mu2 = parse_number<double>(key, val, line);
      if (s.mu2 < 0.0) throw InvalidArgument(fmt::format("spec line {}: mu2 must be >= 0", line));
    } else if (key == "nu") {
      s.nu = parse_number<double>(key, val, line);
    } else if (key == "seed") {
      s.seed = parse_number<std::uint64_t>(key, val, line);
    } else if (key == "kernel_size") {
      s.kernel_size = parse_number<int>(key, val, line);
    } else if (key == "kernel_std") {
      s.kernel_std = parse_number<double>(key, val, line);
    } else if (key == "noise_std") {
      s.noise_std = parse_number<double>(key, val, line);
    } else if (key == "image") {
      s.image = val;
    } else if (key == "width") {
      s.width = parse_number<Index>(key, val, line);
    } else if (key == "height") {
      s.height = parse_number<Index>(key, val, line);
    } else if (key == "x0") {
      s.x0 = parse_list(key, val, line);
    } else {
      throw InvalidArgument(fmt::format("spec line {}: unknown key '{}'", line, key));
    }
  }
  if (!have_family) throw InvalidArgument("spec: missing 'family'");
  return normalize_spec(s);
}

InstanceSpec read_spec_file(const std::string& path) { return parse_spec(read_file(path)); }

std::string format_spec(const InstanceSpec& s) {
  std::string out = fmt::format("family={}\nn={}\nm={}\nmu0={}\nmu2={}\nnu={}\nseed={}\n", to_string(s.family),
                                s.n, s.m, s.mu0, s.mu2, s.nu, s.seed);
  if (s.family == Family::deblur) {
    out += fmt::format("kernel_size={}\nkernel_std={}\nnoise_std={}\n", s.kernel_size, s.kernel_std, s.noise_std);
    if (!s.image.empty()) out += fmt::format("image={}\n", s.image);
    out += fmt::format("width={}\nheight={}\n", s.width, s.height);
  }
  if (!s.x0.empty()) out += fmt::format("x0={}\n", fmt::join(s.x0, ","));
  return out;
}

// ---------------------------------------------------------------------------

Instance gen_l0l2(const InstanceSpec& spec_in) {
  const InstanceSpec spec = normalize_spec(spec_in);
  if (spec.family != Family::l0l2) throw InvalidArgument("gen_l0l2: family must be l0l2");
  Rng rng(spec.seed);
  Instance inst;
  inst.spec = spec;
  inst.a = gaussian_matrix(rng, spec.m, spec.n);
  inst.b.resize(spec.m);
  for (Index i = 0; i < spec.m; ++i) inst.b[i] = rng.uniform();
  inst.x0 = Vec::Zero(spec.n);
  return inst;
}

Instance gen_studentt(const InstanceSpec& spec_in) {
  const InstanceSpec spec = normalize_spec(spec_in);
  if (spec.family != Family::studentt) throw InvalidArgument("gen_studentt: family must be studentt");
  Rng rng(spec.seed);
  Instance inst;
  inst.spec = spec;
  inst.a = gaussian_matrix(rng, spec.m, spec.n);

  const Index k = spec.n / 40;
  std::vector<Index> perm(static_cast<std::size_t>(spec.n));
  std::iota(perm.begin(), perm.end(), Index{0});
  // Partial Fisher-Yates: the first k entries are a uniform k-subset.
  for (Index i = 0; i < k; ++i) {
    const Index j = i + static_cast<Index>(rng.index(static_cast<std::uint64_t>(spec.n - i)));
    std::swap(perm[i], perm[j]);
  }
  inst.x_true = Vec::Zero(spec.n);
  for (Index i = 0; i < k; ++i) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    inst.x_true[perm[i]] = sign * std::pow(10.0, rng.uniform());
  }
  inst.b = inst.a * inst.x_true;
  for (Index i = 0; i < spec.m; ++i) inst.b[i] += 0.1 * rng.student_t(4);
  inst.x0 = inst.a.transpose() * inst.b;
  return inst;
}

Instance gen_deblur(const GrayImage& image, const InstanceSpec& spec_in) {
  InstanceSpec spec = spec_in;
  spec.family = Family::deblur;
  spec.width = image.width;
  spec.height = image.height;
  spec = normalize_spec(spec);
  spec.n = spec.m = image.width * image.height;
  require_same_size(spec.n, image.pixels.size(), "gen_deblur: image");
  if (spec.n == 0) throw InvalidArgument("gen_deblur: empty image");

  const BlurOperator blur(gaussian_kernel(spec.kernel_size, spec.kernel_std), image.width, image.height);
  Rng rng(spec.seed);
  Instance inst;
  inst.spec = spec;
  inst.b = blur.apply(image.pixels);
  if (spec.noise_std > 0.0) {
    for (Index i = 0; i < inst.b.size(); ++i) inst.b[i] += spec.noise_std * rng.normal();
  }
  inst.x0 = inst.b;
  inst.x_true = image.pixels;
  return inst;
}

Instance gen_studentt2d(const InstanceSpec& spec_in) {
  const InstanceSpec spec = normalize_spec(spec_in);
  if (spec.family != Family::studentt2d) throw InvalidArgument("gen_studentt2d: family must be studentt2d");
  Instance inst;
  inst.spec = spec;
  inst.a = Mat::Ones(1, 2);
  inst.b = Vec::Ones(1);
  inst.x0 = Eigen::Map<const Vec>(spec.x0.data(), 2);
  return inst;
}

GrayImage synthetic_image(Index width, Index height) {
  if (width < 1 || height < 1) throw InvalidArgument("synthetic_image: dimensions must be >= 1");
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(width * height);
  for (Index r = 0; r < height; ++r)
    for (Index c = 0; c < width; ++c) img.pixels[r * width + c] = ((r / 16 + c / 16) % 2 == 0) ? 1.0 : 0.0;
  return img;
}

Instance generate(const InstanceSpec& spec_in) {
  const InstanceSpec spec = normalize_spec(spec_in);
  switch (spec.family) {
    case Family::l0l2: return gen_l0l2(spec);
    case Family::studentt: return gen_studentt(spec);
    case Family::studentt2d: return gen_studentt2d(spec);
    case Family::deblur: {
      const GrayImage img = spec.image.empty() ? synthetic_image(spec.width, spec.height) : read_pgm(spec.image);
      Instance inst = gen_deblur(img, spec);
      inst.spec.image = spec.image;
      return inst;
    }
  }
  throw InvalidArgument("generate: unknown family");
}

CompositeProblem make_problem(const Instance& inst) {
  const InstanceSpec& s = inst.spec;
  auto g = std::make_shared<L0Norm>(s.mu0);
  switch (s.family) {
    case Family::l0l2:
      return CompositeProblem(
          std::make_shared<LeastSquaresRidge>(std::make_shared<DenseOperator>(inst.a), inst.b, s.mu2), g);
    case Family::studentt:
    case Family::studentt2d:
      return CompositeProblem(std::make_shared<StudentT>(std::make_shared<DenseOperator>(inst.a), inst.b, s.nu), g);
    case Family::deblur: {
      auto blur = std::make_shared<BlurOperator>(gaussian_kernel(s.kernel_size, s.kernel_std), s.width, s.height);
      return CompositeProblem(std::make_shared<BlurModel>(blur, inst.b, s.mu2), g);
    }
  }
  throw InvalidArgument("make_problem: unknown family");
}

}  // namespace gcnm

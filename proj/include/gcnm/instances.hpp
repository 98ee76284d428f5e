#pragma once

#include "gcnm/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gcnm {

enum class Family : std::uint32_t { l0l2 = 1, studentt = 2, deblur = 3, studentt2d = 4 };

const char* to_string(Family f);
/// Throws InvalidArgument("unknown family ...").
Family family_from_string(const std::string& s);

/// Flat key=value description of one instance. Keys:
///   family, n, m, mu0, mu2, nu, seed, kernel_size, kernel_std, noise_std,
///   image (PGM path, deblur), width, height (synthetic deblur image),
///   x0 (comma-separated start point, studentt2d).
/// Blank lines and lines starting with '#' are ignored.
struct InstanceSpec {
  Family family = Family::l0l2;
  Index n = 0;
  Index m = 0;
  double mu0 = 0.0;  ///< 0 selects the family default
  double mu2 = -1.0; ///< negative selects the family default
  double nu = 1.0;
  std::uint64_t seed = 0;
  int kernel_size = 9;
  double kernel_std = 4.0;
  double noise_std = 1e-3;
  std::string image;
  Index width = 64;
  Index height = 64;
  std::vector<double> x0;
};

/// Parses and validates; fills family defaults (mu0, mu2, and the missing one
/// of n/m from the family's column-to-row ratio).
InstanceSpec parse_spec(const std::string& text);
InstanceSpec read_spec_file(const std::string& path);
std::string format_spec(const InstanceSpec& spec);

/// Applies family defaults and checks the family constraints
/// (l0l2: n = 5m; studentt: n = 8m and n >= 40). Throws InvalidArgument.
InstanceSpec normalize_spec(InstanceSpec spec);

struct GrayImage {
  Index width = 0;
  Index height = 0;
  Vec pixels;  ///< row-major, nominally in [0, 1]
};

/// Generated data. `a` is empty for deblur (the operator is rebuilt from the
/// kernel parameters). `x_true` is the planted signal for studentt and the
/// clean image for deblur, empty otherwise.
struct Instance {
  InstanceSpec spec;
  Mat a;
  Vec b;
  Vec x0;
  Vec x_true;
};

Instance gen_l0l2(const InstanceSpec& spec);
Instance gen_studentt(const InstanceSpec& spec);
Instance gen_deblur(const GrayImage& image, const InstanceSpec& spec);
Instance gen_studentt2d(const InstanceSpec& spec);

/// Dispatch on spec.family. deblur reads spec.image, or builds the synthetic
/// image of spec.width x spec.height when no path is given.
Instance generate(const InstanceSpec& spec);

/// Checkerboard of 16-pixel blocks with values 0 and 1.
GrayImage synthetic_image(Index width, Index height);

/// f from the family's smooth model plus g = mu0 ||.||_0.
CompositeProblem make_problem(const Instance& inst);

// ---------------------------------------------------------------------------
// PGM (P2 ASCII / P5 binary, maxval <= 65535).

GrayImage parse_pgm(const std::string& bytes);
GrayImage read_pgm(const std::string& path);
/// Pixels are clamped to [0,1] and quantized to maxval. P5 when binary.
std::string encode_pgm(const GrayImage& image, int maxval = 255, bool binary = true);
void write_pgm(const std::string& path, const GrayImage& image, int maxval = 255, bool binary = true);

// ---------------------------------------------------------------------------
// Instance container: little-endian binary with a versioned header.
//
//   "GCNMINST"            8 bytes magic
//   version               u32 (= 1)
//   family                u32
//   m, n, width, height   u64 each
//   spec text             u64 length + bytes (format_spec output)
//   A (row-major), b, x0, x_true
//                         each u64 count + count f64

inline constexpr std::uint32_t kContainerVersion = 1;

std::string encode_instance(const Instance& inst);
Instance decode_instance(const std::string& bytes);
void save_instance(const std::string& path, const Instance& inst);
Instance load_instance(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

}  // namespace gcnm

#pragma once

#include <cstdint>
#include <random>

namespace gcnm {

/// Platform-stable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distributions are implemented here rather than taken from
/// <random> because the library distributions are implementation-defined:
///   uniform  : top 53 bits of one engine draw, scaled to [0, 1)
///   normal   : Box-Muller, both variates of a pair are used
///   student t: Z / sqrt(chi2_k / k), chi2_k a sum of k squared normals
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double student_t(int dof);

  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gcnm

#pragma once

#include <cstdint>
#include <random>

#include "qsylv/quat_matrix.hpp"

namespace qsylv {

/// Deterministic random source. The normal variates are produced by an
/// explicit Box-Muller transform on top of mt19937_64 rather than
/// std::normal_distribution, whose output is implementation defined; every
/// stream here is reproducible bit for bit from the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double th = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  /// Uniform integer in [lo, hi], inclusive.
  Index uniform_index(Index lo, Index hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<Index>(gen_() % span);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline Quaternion random_quaternion(Rng& rng) {
  const double w = rng.normal();
  const double x = rng.normal();
  const double y = rng.normal();
  const double z = rng.normal();
  return Quaternion(w, x, y, z);
}

/// Matrix with independent standard normal components.
inline QuatMatrix random_matrix(Rng& rng, Index rows, Index cols) {
  QuatMatrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = random_quaternion(rng);
  return out;
}

/// Product of two normal factors through an inner dimension of the given
/// rank; with rank < min(rows, cols) the result is rank deficient.
inline QuatMatrix random_rank_deficient(Rng& rng, Index rows, Index cols, Index rank) {
  return random_matrix(rng, rows, rank) * random_matrix(rng, rank, cols);
}

}  // namespace qsylv

#pragma once

#include <riscf/linalg.hpp>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace riscf {

/// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Identifies one random link or quantity inside a realization.
enum class Stream : std::uint64_t {
  kUserPositions = 1,
  kDirect = 2,
  kApRis = 3,
  kRisUser = 4,
  kRandomTheta = 5,
  kTest = 99,
};

/// Seed for the substream (seed, stream, i, j). Pure function, so any
/// generation order or thread layout yields the same draws.
inline std::uint64_t substream_seed(std::uint64_t seed, Stream stream, std::uint64_t i = 0,
                                    std::uint64_t j = 0) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(stream));
  h = mix64(h ^ (i + 0x1000));
  h = mix64(h ^ (j + 0x2000000));
  return h;
}

inline std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t i = 0,
                                   std::uint64_t j = 0) {
  return std::mt19937_64(substream_seed(seed, stream, i, j));
}

/// rows x cols matrix of i.i.d. CN(0, variance) entries.
inline CMatrix circular_gaussian(std::mt19937_64& eng, Index rows, Index cols, double variance) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double s = std::sqrt(variance / 2.0);
  CMatrix out(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      const double re = n(eng);
      const double im = n(eng);
      out(r, c) = Complex(s * re, s * im);
    }
  return out;
}

/// Unit-modulus vector with i.i.d. uniform phases.
inline CVector random_phases(std::mt19937_64& eng, Index m) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  CVector out(m);
  for (Index i = 0; i < m; ++i) out(i) = std::polar(1.0, u(eng));
  return out;
}

}  // namespace riscf

#pragma once

// Counter-based random numbers.
//
// Every random draw in the library is a pure function of
// (seed, stream, trial, coordinate), so Monte Carlo work can be split over
// any number of threads without changing a single bit of the result.

#include <array>
#include <cmath>
#include <cstdint>

namespace isolab::rng {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    ctr = round(ctr, key);
    for (int r = 1; r < 10; ++r) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Named sub-streams so unrelated consumers of one seed never share counters.
enum class Stream : std::uint32_t {
  noise = 0,
  triple_sampling = 1,
};

/// Two 64-bit words for one (seed, stream, trial, block) address.
inline std::array<std::uint64_t, 2> block_bits(std::uint64_t seed, Stream stream, std::uint64_t trial,
                                                std::uint64_t block) noexcept {
  // The block index uses the low 32 bits of counter word 0 and the high bits
  // are folded into word 1 next to the stream tag, so blocks up to 2^32 * 2^16
  // stay distinct for any stream.
  const Philox4x32::Counter ctr{
      static_cast<std::uint32_t>(block),
      (static_cast<std::uint32_t>(block >> 32) << 16) ^ static_cast<std::uint32_t>(stream),
      static_cast<std::uint32_t>(trial),
      static_cast<std::uint32_t>(trial >> 32),
  };
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const auto out = Philox4x32::generate(ctr, key);
  return {(std::uint64_t{out[1]} << 32) | out[0], (std::uint64_t{out[3]} << 32) | out[2]};
}

/// Maps 64 random bits to the open interval (0, 1) on a 52-bit midpoint grid.
/// (A 53-bit grid would round its top point up to exactly 1.)
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Standard normal quantile, Wichura's algorithm AS 241 (PPND16); relative
/// accuracy about 1e-16 on (0, 1).
inline double normal_quantile(double p) noexcept {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
               4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
               2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    z = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
             1.27045825245236838258e0) * r + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
             1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
             2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
             7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -z : z;
}

/// Two standard normals from one block by inversion; coordinate c uses
/// half c % 2 of block c / 2, the same layout as uniform_at.
inline std::array<double, 2> normal_pair(std::uint64_t seed, Stream stream, std::uint64_t trial,
                                         std::uint64_t block) noexcept {
  const auto bits = block_bits(seed, stream, trial, block);
  return {normal_quantile(to_open_unit(bits[0])), normal_quantile(to_open_unit(bits[1]))};
}

/// Uniform (0,1) value for one coordinate: coordinate c uses half c % 2 of block c / 2.
inline double uniform_at(std::uint64_t seed, Stream stream, std::uint64_t trial, std::uint64_t coordinate) noexcept {
  const auto bits = block_bits(seed, stream, trial, coordinate / 2);
  return to_open_unit(bits[coordinate % 2]);
}

/// Uniform integer in [0, bound) by multiply-shift; bias is below 2^-32 for
/// bounds under 2^32.
constexpr std::uint64_t bounded(std::uint64_t bits, std::uint64_t bound) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * bound) >> 64);
}

}  // namespace isolab::rng

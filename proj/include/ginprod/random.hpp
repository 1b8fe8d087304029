#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

namespace ginprod {

/// SplitMix64; used to expand seeds into generator states.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

/// Independent random stream owned by one realization.
///
/// Streams are addressed by (seed, index): the pair is hashed through SplitMix64
/// into a fresh xoshiro256** state, so realizations can be generated in any order
/// or on any thread and still reproduce bit-identically.
///
/// Gaussian variates use the Marsaglia polar method; the second variate of each
/// accepted pair is cached and returned by the next call.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) noexcept : gen_(seed) {}

  static RandomStream for_realization(std::uint64_t seed, std::uint64_t index) noexcept {
    SplitMix64 mix(seed);
    const std::uint64_t a = mix.next();
    SplitMix64 mix2(a ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    return RandomStream(mix2.next());
  }

  std::uint64_t next_u64() noexcept { return gen_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal variate.
  double gaussian() noexcept {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    return u * m;
  }

 private:
  Xoshiro256 gen_;
  std::optional<double> spare_;
};

}  // namespace ginprod

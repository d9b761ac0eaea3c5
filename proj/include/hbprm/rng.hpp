#pragma once

#include <cstdint>

namespace hbprm {

// xoshiro256++ core with library-owned transformations from raw bits to
// variates. std::*_distribution is avoided on purpose: its output is not
// pinned across standard library implementations, and reproducibility of
// sampler output for a given (seed, stream) pair is part of the contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_bits() { return next(); }

  // strictly inside (0, 1)
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // 128-layer ziggurat over the standard normal
  double normal(double mean = 0.0, double sd = 1.0);

  // Marsaglia-Tsang; shape < 1 handled by boosting shape by one
  double gamma(double shape, double scale = 1.0);

  // X with 1/X ~ Gamma(shape, 1/scale); density b^a/Gamma(a) x^-(a+1) e^(-b/x)
  double inverse_gamma(double shape, double scale);

  // product-of-uniforms inversion for small lambda, transformed rejection
  // with squeeze for large lambda
  long long poisson(double lambda);

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  std::uint64_t s_[4];
};

}  // namespace hbprm

#include "hbprm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace hbprm {

namespace {

// SplitMix64, used to decorrelate (seed, stream) pairs and expand them into
// the full engine state.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Ziggurat layer edges for exp(-x^2/2): 128 strips of equal area kZigV,
// x[0] = kZigV / f(r) spans the base strip including the tail mass past r.
constexpr int kZigLayers = 128;
constexpr double kZigR = 3.442619855899;
constexpr double kZigV = 9.91256303526217e-3;

struct ZigTables {
  double x[kZigLayers + 1];
  double ratio[kZigLayers];
  ZigTables() {
    double f = std::exp(-0.5 * kZigR * kZigR);
    x[0] = kZigV / f;
    x[1] = kZigR;
    x[kZigLayers] = 0.0;
    for (int i = 2; i < kZigLayers; ++i) {
      x[i] = std::sqrt(-2.0 * std::log(kZigV / x[i - 1] + f));
      f = std::exp(-0.5 * x[i] * x[i]);
    }
    for (int i = 0; i < kZigLayers; ++i) ratio[i] = x[i + 1] / x[i];
  }
};

const ZigTables kZig;

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = mix64(seed) ^ (0xD1B54A32D192ED03ull * (stream + 1));
  for (auto& w : s_) w = z = mix64(z);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

double Rng::normal(double mean, double sd) {
  for (;;) {
    const std::uint64_t bits = next();
    const int i = static_cast<int>(bits & (kZigLayers - 1));
    // bits 12..63 give a signed uniform strictly inside (-1, 1), disjoint
    // from the layer index bits
    const double u =
        (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-51 - 1.0;
    if (std::fabs(u) < kZig.ratio[i]) return mean + sd * (u * kZig.x[i]);
    if (i == 0) {
      // tail past r, Marsaglia's exponential envelope
      double x, y;
      do {
        x = std::log(uniform()) * (1.0 / kZigR);
        y = std::log(uniform());
      } while (-2.0 * y < x * x);
      return u < 0.0 ? mean + sd * (x - kZigR) : mean + sd * (kZigR - x);
    }
    const double z = u * kZig.x[i];
    const double f0 = std::exp(-0.5 * (kZig.x[i] * kZig.x[i] - z * z));
    const double f1 =
        std::exp(-0.5 * (kZig.x[i + 1] * kZig.x[i + 1] - z * z));
    if (f1 + uniform() * (f0 - f1) < 1.0) return mean + sd * z;
  }
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0, scale);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return scale * d * v;
  }
}

double Rng::inverse_gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("inverse_gamma: shape and scale must be positive");
  return scale / gamma(shape, 1.0);
}

long long Rng::poisson(double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("poisson: lambda must be positive");
  if (lambda < 30.0) {
    const double limit = std::exp(-lambda);
    double p = 1.0;
    long long k = 0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }
  // Hormann's PTRS transformed rejection
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<long long>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * loglam - lambda - std::lgamma(k + 1.0))
      return static_cast<long long>(k);
  }
}

}  // namespace hbprm

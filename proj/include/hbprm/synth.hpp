#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hbprm/model.hpp"
#include "hbprm/rng.hpp"

// Synthetic grouped-count generators: a large-count family (group scales of
// 1e4..1e6) and a small-count family (group scales below a small y_max,
// floor-rounded so zeros occur). The group scale is emitted as an extra,
// group-constant covariate column so the fitted model can absorb the
// per-group magnitude; the generating coefficients cover only the K random
// covariate columns.

namespace hbprm {

enum class SynthFamily { large, small };

struct SynthSpec {
  SynthFamily family = SynthFamily::large;
  std::size_t J = 10;
  std::size_t n_per_group = 20;
  std::size_t K = 2;       // random covariate columns (excludes scale column)
  double y_max = 5.0;      // small family only
  std::uint64_t seed = 0;
};

struct TruncExpParams {
  double rate = 0.7;
  double lower = 1.0;
  double upper = 5.0;
};

// each value -> (v - min)/(max - min); a constant vector maps to all zeros
std::vector<double> min_max_normalize(const std::vector<double>& values);

// Inverse-CDF draw from the density proportional to exp(rate*x) on
// [lower, upper]: mass leans toward the upper end.
double sample_trunc_exp(const TruncExpParams& params, Rng& rng);

struct SynthResult {
  GroupedCountDataset data;     // K+1 columns; zeros possible (small family)
  std::vector<double> w_true;   // J*K generating coefficients, group-major
  std::vector<double> group_scale;  // J
  std::size_t k_gen = 0;        // K (columns covered by w_true)
};

SynthResult generate_large(const SynthSpec& spec);
SynthResult generate_small(const SynthSpec& spec);
SynthResult generate(const SynthSpec& spec);

// Copy with y = 0 rows dropped; groups left empty disappear.
GroupedCountDataset remove_zero_counts(const GroupedCountDataset& data);

}  // namespace hbprm

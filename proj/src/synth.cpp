#include "hbprm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hbprm {

namespace {

struct Range {
  double lo, hi;
};

// per-column sampling ranges for the random covariates; columns past the
// list reuse it cyclically
constexpr Range kLargeRanges[6] = {{0.1, 2.0}, {0.1, 1.0}, {0.1, 0.5},
                                   {1.0, 10.0}, {0.5, 5.0}, {10.0, 100.0}};
constexpr Range kSmallRanges[5] = {
    {0.1, 2.0}, {0.1, 1.0}, {0.1, 0.5}, {1.0, 10.0}, {0.5, 5.0}};

void check_spec(const SynthSpec& spec) {
  if (spec.J < 1 || spec.n_per_group < 1 || spec.K < 1)
    throw std::invalid_argument("synth: J, n_per_group, K must be positive");
  if (spec.family == SynthFamily::large && spec.K > 6)
    throw std::invalid_argument("synth: large family defines at most 6 covariates");
  if (spec.family == SynthFamily::small) {
    if (spec.K > 5)
      throw std::invalid_argument("synth: small family defines at most 5 covariates");
    if (!(spec.y_max > 1.0))
      throw std::invalid_argument("synth: y_max must exceed 1");
  }
}

}  // namespace

std::vector<double> min_max_normalize(const std::vector<double>& values) {
  if (values.empty())
    throw std::invalid_argument("min_max_normalize: empty input");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  std::vector<double> out(values.size(), 0.0);
  if (*mx == *mn) return out;
  const double span = *mx - *mn;
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = (values[i] - *mn) / span;
  return out;
}

double sample_trunc_exp(const TruncExpParams& params, Rng& rng) {
  if (!(params.rate > 0.0))
    throw std::invalid_argument("trunc_exp: rate must be positive");
  if (params.upper < params.lower)
    throw std::invalid_argument("trunc_exp: upper < lower");
  if (params.upper == params.lower) return params.lower;
  const double width = params.rate * (params.upper - params.lower);
  if (width > 700.0)
    throw std::invalid_argument("trunc_exp: interval too wide for the rate");
  const double u = rng.uniform();
  return params.lower +
         std::log1p(u * (std::exp(width) - 1.0)) / params.rate;
}

namespace {

SynthResult generate_family(const SynthSpec& spec) {
  check_spec(spec);
  const bool small = spec.family == SynthFamily::small;
  const std::size_t K = spec.K;
  const std::size_t n = spec.n_per_group;
  const double w_mean = small ? 0.1 : 0.001;
  const double w_sd = std::sqrt(small ? 0.1 : 0.001);

  Rng rng(spec.seed);
  SynthResult res;
  res.k_gen = K;
  res.w_true.resize(spec.J * K);
  res.group_scale.resize(spec.J);

  DatasetBuilder builder(K + 1);
  std::vector<double> xrow(K + 1);
  std::vector<double> z(n);
  std::vector<double> xs(n * K);
  for (std::size_t j = 0; j < spec.J; ++j) {
    const std::string gid = "g" + std::to_string(j + 1);
    const double scale =
        small ? sample_trunc_exp({0.7, 1.0, spec.y_max}, rng)
              : rng.uniform(1.0e4, 1.0e6);
    res.group_scale[j] = scale;
    double* wj = res.w_true.data() + j * K;
    for (std::size_t k = 0; k < K; ++k) wj[k] = rng.normal(w_mean, w_sd);
    for (std::size_t i = 0; i < n; ++i) {
      double zi = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const Range r = small ? kSmallRanges[k % 5] : kLargeRanges[k % 6];
        const double xv = rng.uniform(r.lo, r.hi);
        xs[i * K + k] = xv;
        zi += wj[k] * xv;
      }
      z[i] = std::exp(zi);
    }
    const std::vector<double> u = min_max_normalize(z);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < K; ++k) xrow[k] = xs[i * K + k];
      xrow[K] = scale;
      long long y;
      if (small) {
        y = static_cast<long long>(std::floor(u[i] * scale));
      } else {
        y = std::llround(u[i] * scale);
        if (y < 1) y = 1;
      }
      builder.add_row(gid, xrow, y);
    }
  }
  res.data = builder.build(/*allow_zero=*/small);
  res.data.group_covariate = res.group_scale;
  return res;
}

}  // namespace

SynthResult generate_large(const SynthSpec& spec) {
  if (spec.family != SynthFamily::large)
    throw std::invalid_argument("generate_large: wrong family");
  return generate_family(spec);
}

SynthResult generate_small(const SynthSpec& spec) {
  if (spec.family != SynthFamily::small)
    throw std::invalid_argument("generate_small: wrong family");
  return generate_family(spec);
}

SynthResult generate(const SynthSpec& spec) { return generate_family(spec); }

GroupedCountDataset remove_zero_counts(const GroupedCountDataset& data) {
  DatasetBuilder builder(data.K);
  std::vector<double> xrow(data.K);
  bool any = false;
  for (std::size_t j = 0; j < data.J; ++j) {
    const std::size_t n = data.n_obs(j);
    const long long* yj = data.y_group(j);
    for (std::size_t i = 0; i < n; ++i) {
      if (yj[i] < 1) continue;
      for (std::size_t k = 0; k < data.K; ++k) xrow[k] = data.x_at(j, i, k);
      builder.add_row(data.group_ids[j], xrow, yj[i]);
      any = true;
    }
  }
  if (!any)
    throw std::invalid_argument("remove_zero_counts: no positive counts left");
  GroupedCountDataset out = builder.build();
  if (!data.group_covariate.empty()) {
    out.group_covariate.resize(out.J);
    for (std::size_t g = 0; g < out.J; ++g) {
      for (std::size_t j = 0; j < data.J; ++j)
        if (data.group_ids[j] == out.group_ids[g]) {
          out.group_covariate[g] = data.group_covariate[j];
          break;
        }
    }
  }
  return out;
}

}  // namespace hbprm

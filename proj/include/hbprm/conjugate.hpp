#pragma once

#include <cstddef>

#include "hbprm/model.hpp"
#include "hbprm/rng.hpp"

// Closed-form conditional posteriors for the covariate-level mean and
// variance, shared by both samplers.

namespace hbprm {

struct GaussianParams {
  double mean;
  double variance;
};

// Shape/scale convention: density scale^shape / Gamma(shape) *
// x^-(shape+1) * exp(-scale/x), mean scale/(shape-1) for shape > 1.
struct InvGammaParams {
  double shape;
  double scale;
};

// precision = 1/tau2 + J/sigma2_k; mean = (m/tau2 + sum_j w_jk/sigma2_k)/precision
GaussianParams mu_conditional(const double* w_column, std::size_t J,
                              double sigma2_k, const PriorConfig& prior);

// shape = (a+J)/2; scale = (b + sum_j (w_jk - mu_k)^2)/2
InvGammaParams sigma2_conditional(const double* w_column, std::size_t J,
                                  double mu_k, const PriorConfig& prior);

double draw_gaussian(const GaussianParams& p, Rng& rng);
double draw_inverse_gamma(const InvGammaParams& p, Rng& rng);

}  // namespace hbprm

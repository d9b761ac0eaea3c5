#include "hbprm/conjugate.hpp"

#include <cmath>
#include <stdexcept>

namespace hbprm {

GaussianParams mu_conditional(const double* w_column, std::size_t J,
                              double sigma2_k, const PriorConfig& prior) {
  if (J < 1) throw std::invalid_argument("mu_conditional: J must be >= 1");
  if (!(sigma2_k > 0.0))
    throw std::domain_error("mu_conditional: sigma2_k must be positive");
  double wsum = 0.0;
  for (std::size_t j = 0; j < J; ++j) wsum += w_column[j];
  const double precision =
      1.0 / prior.tau2 + static_cast<double>(J) / sigma2_k;
  const double mean = (prior.m / prior.tau2 + wsum / sigma2_k) / precision;
  return {mean, 1.0 / precision};
}

InvGammaParams sigma2_conditional(const double* w_column, std::size_t J,
                                  double mu_k, const PriorConfig& prior) {
  if (J < 1) throw std::invalid_argument("sigma2_conditional: J must be >= 1");
  double ss = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double r = w_column[j] - mu_k;
    ss += r * r;
  }
  return {(prior.a + static_cast<double>(J)) / 2.0, (prior.b + ss) / 2.0};
}

double draw_gaussian(const GaussianParams& p, Rng& rng) {
  return rng.normal(p.mean, std::sqrt(p.variance));
}

double draw_inverse_gamma(const InvGammaParams& p, Rng& rng) {
  return rng.inverse_gamma(p.shape, p.scale);
}

}  // namespace hbprm

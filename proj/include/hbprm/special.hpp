#pragma once

#include <cstddef>
#include <vector>

// Digamma / trigamma at positive integer arguments, the Gaussian
// approximation to the log-gamma distribution built from them, and the
// Kolmogorov-Smirnov style distance used to quantify that approximation.

namespace hbprm {

// Finite-sum values for integer y >= 1; closed-form asymptotics are used
// above kPsiAsymptoticThreshold, where they are accurate to ~1e-13 absolute.
// Throws std::domain_error for y < 1.
double psi0(long long y);
double psi1(long long y);

inline constexpr long long kPsiAsymptoticThreshold = 1000000;

// Table of psi0/psi1 for 1..min(y_max, threshold), built once per dataset
// by two O(y_max) recurrences and shared read-only across sampler chains.
class PsiTable {
 public:
  explicit PsiTable(long long y_max);

  double psi0(long long y) const;
  double psi1(long long y) const;
  long long table_max() const { return static_cast<long long>(p0_.size()) - 1; }

 private:
  std::vector<double> p0_, p1_;
};

// Moments of the Gaussian approximation to ln X, X ~ Gamma(y, scale beta).
struct LogGammaApprox {
  double mean;
  double var;
};

LogGammaApprox log_gamma_approx(long long y, double beta = 1.0);

// Log of the exact density of v = ln X, X ~ Gamma(y, scale beta). All
// evaluation happens in log space; the density underflows long before the
// log does.
double true_loggamma_log_pdf(double v, long long y, double beta = 1.0);
double true_loggamma_pdf(double v, long long y, double beta = 1.0);

struct QuadGrid {
  std::size_t points;
  double span_sd;
};

// Uniform grid of `points` values spanning approx mean +/- span_sd * sd.
std::vector<double> make_grid(long long y, double beta, QuadGrid grid);

// Sup over the grid of |trapezoid CDF of the exact density - Gaussian CDF|.
// Grid floor of 4096 points keeps the CDF discretization error well below
// the distances being measured.
double ks_distance(long long y, double beta = 1.0,
                   QuadGrid grid = {8192, 8.0});

// Trapezoid moments of the exact density, normalized by the integrated
// mass. The wider default span keeps tail truncation below 1e-6 even at
// y = 2, where the density is still visibly skewed.
double quadrature_mean(long long y, double beta = 1.0,
                       QuadGrid grid = {16384, 12.0});
double quadrature_variance(long long y, double beta = 1.0,
                           QuadGrid grid = {16384, 12.0});

// Largest pointwise gap between two curves sampled on a common grid.
double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b);

// Standard normal CDF.
double gaussian_cdf(double z);

}  // namespace hbprm

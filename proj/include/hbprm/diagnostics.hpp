#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hbprm/ags.hpp"
#include "hbprm/model.hpp"

namespace hbprm {

// Multi-chain effective sample size for one scalar estimand. Needs at
// least 2 chains of equal length >= 4. Constant input has no defined
// value: returns NaN after printing a diagnostic.
double effective_sample_size(const std::vector<std::vector<double>>& chains);

// 1 - sum (y - y_hat)^2 / sum (y - mean(y))^2; NaN (with a message) when y
// is constant.
double r_squared(const std::vector<double>& y, const std::vector<double>& y_hat);

// sqrt(mean squared difference)
double rmse(const std::vector<double>& y, const std::vector<double>& y_hat);

struct Characteristics {
  std::size_t n_d = 0;
  long long range_min = 0;
  long long range_max = 0;
  double pct_zero = 0.0;    // percent of counts equal to 0
  double pct_one_five = 0.0;  // percent of counts in [1, 5]
};

// Raw counts allowed here (pre-shift, pre-drop), so zeros are countable.
Characteristics characteristics(const std::vector<long long>& y);
Characteristics characteristics(const GroupedCountDataset& data);

struct FitMetrics {
  double r2 = 0.0;
  double rmse = 0.0;
  std::vector<double> y_hat;
};

// Point estimate is the posterior mean of the coefficients across retained
// draws and chains; y_hat = exp of the resulting linear predictor.
FitMetrics posterior_predictive_fit(const ChainOutput& output,
                                    const GroupedCountDataset& data);

// 1-based display names in sweep order: w[j,k], then mu[k], then sigma2[k].
std::vector<std::string> parameter_names(std::size_t J, std::size_t K);

// Column t of every chain for the named parameter layout above.
std::vector<std::vector<double>> extract_parameter(const ChainOutput& output,
                                                   std::size_t param_index);

struct DiagnosticsReport {
  std::vector<std::string> param_names;
  std::vector<double> ess;   // per parameter
  double mean_ess = 0.0;
  double t_s = 0.0;          // seconds per 1000 iterations, mean over chains
  double e_s = 0.0;          // mean_ess / t_s
  double r2 = 0.0;
  double rmse = 0.0;
  Characteristics chars;
};

DiagnosticsReport make_report(const ChainOutput& output,
                              const GroupedCountDataset& data);

}  // namespace hbprm

#include "hbprm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace hbprm {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double effective_sample_size(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw std::invalid_argument("ess: need at least 2 chains");
  const std::size_t n = chains[0].size();
  for (const auto& c : chains)
    if (c.size() != n) throw std::invalid_argument("ess: unequal chain lengths");
  if (n < 4) throw std::invalid_argument("ess: need at least 4 draws per chain");

  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  std::vector<double> mean(m, 0.0);
  double grand = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (double v : chains[j]) mean[j] += v;
    mean[j] /= nd;
    grand += mean[j];
  }
  grand /= md;

  double within = 0.0;  // sum of per-chain sample variances
  for (std::size_t j = 0; j < m; ++j) {
    double ss = 0.0;
    for (double v : chains[j]) {
      const double d = v - mean[j];
      ss += d * d;
    }
    within += ss / (nd - 1.0);
  }
  double between = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double d = mean[j] - grand;
    between += d * d;
  }
  const double var_plus =
      (nd - 1.0) / (md * nd) * within + between / (md - 1.0);
  if (!(var_plus > 0.0)) {
    std::cerr << "ess: constant samples, effective sample size undefined\n";
    return kNaN;
  }

  // lag-t autocorrelation from the variogram
  auto rho_at = [&](std::size_t t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const std::vector<double>& c = chains[j];
      for (std::size_t i = t; i < n; ++i) {
        const double d = c[i] - c[i - t];
        acc += d * d;
      }
    }
    const double vt = acc / (md * (nd - static_cast<double>(t)));
    return 1.0 - vt / (2.0 * var_plus);
  };

  const std::size_t t_max = n - 2;
  std::vector<double> rhos;
  auto rho = [&](std::size_t t) {
    while (rhos.size() < t) rhos.push_back(rho_at(rhos.size() + 1));
    return rhos[t - 1];
  };

  // first odd T whose next two autocorrelations sum negative; otherwise
  // every available lag contributes
  std::size_t t_stop = t_max;
  for (std::size_t cand = 1; cand + 2 <= t_max; cand += 2) {
    if (rho(cand + 1) + rho(cand + 2) < 0.0) {
      t_stop = cand;
      break;
    }
  }
  double s = 0.0;
  for (std::size_t t = 1; t <= t_stop; ++t) s += rho(t);
  double ess = md * nd / (1.0 + 2.0 * s);
  if (!(ess > 0.0)) {
    std::cerr << "ess: nonpositive autocorrelation sum, value undefined\n";
    return kNaN;
  }
  return std::min(ess, md * nd);
}

double r_squared(const std::vector<double>& y, const std::vector<double>& y_hat) {
  if (y.size() != y_hat.size() || y.size() < 2)
    throw std::invalid_argument("r_squared: need equal lengths >= 2");
  double ybar = 0.0;
  for (double v : y) ybar += v;
  ybar /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - y_hat[i]) * (y[i] - y_hat[i]);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  if (!(ss_tot > 0.0)) {
    std::cerr << "r_squared: constant y, value undefined\n";
    return kNaN;
  }
  return 1.0 - ss_res / ss_tot;
}

double rmse(const std::vector<double>& y, const std::vector<double>& y_hat) {
  if (y.size() != y_hat.size() || y.empty())
    throw std::invalid_argument("rmse: need equal non-empty lengths");
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    ss += (y_hat[i] - y[i]) * (y_hat[i] - y[i]);
  return std::sqrt(ss / static_cast<double>(y.size()));
}

Characteristics characteristics(const std::vector<long long>& y) {
  if (y.empty()) throw std::invalid_argument("characteristics: empty counts");
  Characteristics c;
  c.n_d = y.size();
  c.range_min = y[0];
  c.range_max = y[0];
  std::size_t zeros = 0, one_five = 0;
  for (long long v : y) {
    c.range_min = std::min(c.range_min, v);
    c.range_max = std::max(c.range_max, v);
    if (v == 0) ++zeros;
    if (v >= 1 && v <= 5) ++one_five;
  }
  const double nd = static_cast<double>(c.n_d);
  c.pct_zero = 100.0 * static_cast<double>(zeros) / nd;
  c.pct_one_five = 100.0 * static_cast<double>(one_five) / nd;
  return c;
}

Characteristics characteristics(const GroupedCountDataset& data) {
  return characteristics(data.y);
}

FitMetrics posterior_predictive_fit(const ChainOutput& output,
                                    const GroupedCountDataset& data) {
  if (output.draws.empty())
    throw std::invalid_argument("posterior_predictive_fit: no chains");
  std::size_t total = 0;
  for (const auto& chain : output.draws) total += chain.size();
  if (total == 0)
    throw std::invalid_argument("posterior_predictive_fit: no retained draws");

  std::vector<double> wbar(data.J * data.K, 0.0);
  for (const auto& chain : output.draws)
    for (const ModelState& st : chain)
      for (std::size_t p = 0; p < wbar.size(); ++p) wbar[p] += st.w[p];
  for (double& v : wbar) v /= static_cast<double>(total);

  FitMetrics fm;
  fm.y_hat.resize(data.n_rows());
  for (std::size_t j = 0; j < data.J; ++j) {
    const std::size_t n = data.n_obs(j);
    for (std::size_t i = 0; i < n; ++i) {
      double eta = 0.0;
      for (std::size_t k = 0; k < data.K; ++k)
        eta += wbar[j * data.K + k] * data.x_at(j, i, k);
      fm.y_hat[data.offsets[j] + i] = std::exp(eta);
    }
  }
  std::vector<double> yd(data.n_rows());
  for (std::size_t r = 0; r < data.n_rows(); ++r)
    yd[r] = static_cast<double>(data.y[r]);
  fm.r2 = r_squared(yd, fm.y_hat);
  fm.rmse = rmse(yd, fm.y_hat);
  return fm;
}

std::vector<std::string> parameter_names(std::size_t J, std::size_t K) {
  std::vector<std::string> names;
  names.reserve(J * K + 2 * K);
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t k = 0; k < K; ++k)
      names.push_back("w[" + std::to_string(j + 1) + "," +
                      std::to_string(k + 1) + "]");
  for (std::size_t k = 0; k < K; ++k)
    names.push_back("mu[" + std::to_string(k + 1) + "]");
  for (std::size_t k = 0; k < K; ++k)
    names.push_back("sigma2[" + std::to_string(k + 1) + "]");
  return names;
}

std::vector<std::vector<double>> extract_parameter(const ChainOutput& output,
                                                   std::size_t param_index) {
  const std::size_t nw = output.J * output.K;
  if (param_index >= nw + 2 * output.K)
    throw std::out_of_range("extract_parameter: index out of range");
  std::vector<std::vector<double>> out(output.draws.size());
  for (std::size_t c = 0; c < output.draws.size(); ++c) {
    out[c].reserve(output.draws[c].size());
    for (const ModelState& st : output.draws[c]) {
      double v;
      if (param_index < nw)
        v = st.w[param_index];
      else if (param_index < nw + output.K)
        v = st.mu[param_index - nw];
      else
        v = st.sigma2[param_index - nw - output.K];
      out[c].push_back(v);
    }
  }
  return out;
}

DiagnosticsReport make_report(const ChainOutput& output,
                              const GroupedCountDataset& data) {
  DiagnosticsReport rep;
  rep.param_names = parameter_names(output.J, output.K);
  rep.ess.resize(rep.param_names.size(), kNaN);
  const bool ess_defined =
      output.draws.size() >= 2 && output.retained_count >= 4;
  double sum_ess = 0.0;
  for (std::size_t p = 0; p < rep.ess.size(); ++p) {
    if (ess_defined) rep.ess[p] = effective_sample_size(extract_parameter(output, p));
    sum_ess += rep.ess[p];
  }
  rep.mean_ess = sum_ess / static_cast<double>(rep.ess.size());
  rep.t_s = output.seconds_per_1000_iterations();
  rep.e_s = rep.t_s > 0.0 ? rep.mean_ess / rep.t_s : kNaN;
  const FitMetrics fm = posterior_predictive_fit(output, data);
  rep.r2 = fm.r2;
  rep.rmse = fm.rmse;
  rep.chars = characteristics(data);
  return rep;
}

}  // namespace hbprm

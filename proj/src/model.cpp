#include "hbprm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hbprm/kernels.hpp"

namespace hbprm {

long long GroupedCountDataset::y_max() const {
  long long m = 1;
  for (long long v : y) m = std::max(m, v);
  return m;
}

void GroupedCountDataset::finalize(bool allow_zero) {
  if (J == 0 || K == 0) throw std::invalid_argument("dataset: empty shape");
  if (offsets.size() != J + 1 || offsets.front() != 0 || offsets.back() != y.size())
    throw std::invalid_argument("dataset: bad group offsets");
  if (x.size() != y.size() * K) throw std::invalid_argument("dataset: x size");
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite covariate");
  const long long floor_y = allow_zero ? 0 : 1;
  for (long long v : y)
    if (v < floor_y) throw std::invalid_argument("dataset: counts must be positive");
  log_fact.resize(y.size());
  for (std::size_t r = 0; r < y.size(); ++r)
    log_fact[r] = std::lgamma(static_cast<double>(y[r]) + 1.0);
}

DatasetBuilder::DatasetBuilder(std::size_t K) : K_(K) {
  if (K == 0) throw std::invalid_argument("builder: K must be positive");
}

void DatasetBuilder::add_row(const std::string& group,
                             const std::vector<double>& xrow, long long y) {
  if (xrow.size() != K_) throw std::invalid_argument("builder: row width");
  std::size_t g = 0;
  for (; g < order_.size(); ++g)
    if (order_[g] == group) break;
  if (g == order_.size()) {
    order_.push_back(group);
    xs_.emplace_back();
    ys_.emplace_back();
  }
  xs_[g].insert(xs_[g].end(), xrow.begin(), xrow.end());
  ys_[g].push_back(y);
}

GroupedCountDataset DatasetBuilder::build(bool allow_zero) {
  GroupedCountDataset d;
  d.J = order_.size();
  d.K = K_;
  if (d.J == 0) throw std::invalid_argument("builder: no rows");
  d.group_ids = order_;
  d.offsets.resize(d.J + 1, 0);
  for (std::size_t g = 0; g < d.J; ++g)
    d.offsets[g + 1] = d.offsets[g] + ys_[g].size();
  const std::size_t n = d.offsets.back();
  d.x.resize(n * K_);
  d.y.resize(n);
  for (std::size_t g = 0; g < d.J; ++g) {
    const std::size_t nj = ys_[g].size();
    for (std::size_t i = 0; i < nj; ++i) {
      d.y[d.offsets[g] + i] = ys_[g][i];
      for (std::size_t k = 0; k < K_; ++k)
        d.x[d.offsets[g] * K_ + k * nj + i] = xs_[g][i * K_ + k];
    }
  }
  d.finalize(allow_zero);
  return d;
}

ModelState ModelState::zeros(std::size_t J, std::size_t K) {
  ModelState s;
  s.w.assign(J * K, 0.0);
  s.mu.assign(K, 0.0);
  s.sigma2.assign(K, 1.0);
  return s;
}

double linear_predictor(const ModelState& state, const GroupedCountDataset& data,
                        std::size_t j, std::size_t i) {
  if (j >= data.J || i >= data.n_obs(j))
    throw std::out_of_range("linear_predictor: index out of bounds");
  double eta = 0.0;
  for (std::size_t k = 0; k < data.K; ++k)
    eta += state.w_at(j, k) * data.x_at(j, i, k);
  return eta;
}

void fill_linear_predictor(const ModelState& state,
                           const GroupedCountDataset& data, std::size_t j,
                           double* out) {
  const std::size_t n = data.n_obs(j);
  std::fill(out, out + n, 0.0);
  for (std::size_t k = 0; k < data.K; ++k)
    kernels::axpy(state.w_at(j, k), data.x_col(j, k), out, n);
}

double log_poisson_likelihood(const ModelState& state,
                              const GroupedCountDataset& data) {
  if (state.mu.size() != data.K || state.w.size() != data.J * data.K)
    throw std::invalid_argument("log_poisson_likelihood: state/data mismatch");
  std::vector<double> eta;
  double ll = 0.0;
  for (std::size_t j = 0; j < data.J; ++j) {
    const std::size_t n = data.n_obs(j);
    eta.resize(n);
    fill_linear_predictor(state, data, j, eta.data());
    const long long* yj = data.y_group(j);
    const double* lf = data.log_fact.data() + data.offsets[j];
    for (std::size_t i = 0; i < n; ++i)
      ll += static_cast<double>(yj[i]) * eta[i] - std::exp(eta[i]) - lf[i];
  }
  return ll;
}

}  // namespace hbprm

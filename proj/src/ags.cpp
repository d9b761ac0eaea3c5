#include "hbprm/ags.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <stdexcept>

#include "hbprm/conjugate.hpp"
#include "hbprm/kernels.hpp"

namespace hbprm {

namespace {

void check_positive_counts(const GroupedCountDataset& data) {
  for (long long v : data.y)
    if (v < 1)
      throw std::invalid_argument(
          "sampler requires positive counts; shift or drop zero counts first");
}

}  // namespace

double ChainOutput::seconds_per_1000_iterations() const {
  if (chain_seconds.empty() || iterations() == 0) return 0.0;
  double s = 0.0;
  for (double v : chain_seconds) s += v;
  s /= static_cast<double>(chain_seconds.size());
  return s / static_cast<double>(iterations()) * 1000.0;
}

CoefficientConditional coefficient_conditional(std::size_t j, std::size_t k,
                                               const ModelState& state,
                                               const GroupedCountDataset& data,
                                               const PsiTable& table) {
  if (j >= data.J || k >= data.K)
    throw std::out_of_range("coefficient_conditional: index out of bounds");
  const double sigma2_k = state.sigma2[k];
  if (!(sigma2_k > 0.0))
    throw std::domain_error("coefficient_conditional: sigma2_k must be positive");
  const std::size_t n = data.n_obs(j);
  const long long* yj = data.y_group(j);
  const double* xk = data.x_col(j, k);
  double big_a = 0.0;
  double b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (yj[i] < 1)
      throw std::logic_error("coefficient_conditional: zero count in data");
    const double p1 = table.psi1(yj[i]);
    const double p0 = table.psi0(yj[i]);
    double eta_minus = 0.0;
    for (std::size_t h = 0; h < data.K; ++h)
      if (h != k) eta_minus += state.w_at(j, h) * data.x_at(j, i, h);
    big_a += xk[i] * xk[i] / p1;
    b += xk[i] / p1 * (p0 - eta_minus);
  }
  const double denom = sigma2_k * big_a + 1.0;
  return {(state.mu[k] + sigma2_k * b) / denom, sigma2_k / denom, j, k};
}

AgsChain::AgsChain(const GroupedCountDataset& data, const PriorConfig& prior,
                   const PsiTable& table)
    : data_(data), prior_(prior) {
  check_positive_counts(data);
  gram_.assign(data.J * data.K * data.K, 0.0);
  s1_.assign(data.J * data.K, 0.0);
  wcol_.resize(data.J);

  std::vector<double> ak, p0;
  for (std::size_t j = 0; j < data.J; ++j) {
    const std::size_t n = data.n_obs(j);
    const long long* yj = data.y_group(j);
    ak.resize(n);
    p0.resize(n);
    for (std::size_t i = 0; i < n; ++i) p0[i] = table.psi0(yj[i]);
    for (std::size_t k = 0; k < data.K; ++k) {
      const double* xk = data.x_col(j, k);
      for (std::size_t i = 0; i < n; ++i) ak[i] = xk[i] / table.psi1(yj[i]);
      s1_[j * data.K + k] = kernels::dot(ak.data(), p0.data(), n);
      double* mrow = gram_.data() + (j * data.K + k) * data.K;
      for (std::size_t h = 0; h < data.K; ++h)
        mrow[h] = kernels::dot(ak.data(), data.x_col(j, h), n);
    }
  }
}

void AgsChain::sweep(ModelState& state, Rng& rng) {
  const std::size_t J = data_.J;
  const std::size_t K = data_.K;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t j = 0; j < J; ++j) wcol_[j] = state.w_at(j, k);
    const double mu_k =
        draw_gaussian(mu_conditional(wcol_.data(), J, state.sigma2[k], prior_), rng);
    state.mu[k] = mu_k;
    const double sig =
        draw_inverse_gamma(sigma2_conditional(wcol_.data(), J, mu_k, prior_), rng);
    state.sigma2[k] = sig;
    for (std::size_t j = 0; j < J; ++j) {
      const double* mrow = gram_.data() + (j * K + k) * K;
      double* wrow = state.w.data() + j * K;
      double cross = 0.0;
      for (std::size_t h = 0; h < K; ++h) cross += wrow[h] * mrow[h];
      const double idx_a = mrow[k];
      const double b = s1_[j * K + k] - cross + wrow[k] * idx_a;
      const double inv = 1.0 / (sig * idx_a + 1.0);
      wrow[k] = rng.normal((mu_k + sig * b) * inv, std::sqrt(sig * inv));
    }
  }
}

ModelState initial_state(const GroupedCountDataset& data,
                         const PriorConfig& prior, Init init, Rng& rng) {
  ModelState s = ModelState::zeros(data.J, data.K);
  if (init == Init::prior_draw) {
    for (std::size_t k = 0; k < data.K; ++k)
      s.mu[k] = rng.normal(prior.m, std::sqrt(prior.tau2));
    for (std::size_t k = 0; k < data.K; ++k)
      s.sigma2[k] = rng.inverse_gamma(prior.a, prior.b);
    for (std::size_t j = 0; j < data.J; ++j)
      for (std::size_t k = 0; k < data.K; ++k)
        s.w_at(j, k) = rng.normal(s.mu[k], std::sqrt(s.sigma2[k]));
  }
  return s;
}

void ags_sweep(ModelState& state, const GroupedCountDataset& data,
               const PriorConfig& prior, const PsiTable& table, Rng& rng) {
  AgsChain chain(data, prior, table);
  chain.sweep(state, rng);
}

namespace {

void validate_config(const AgsConfig& cfg) {
  if (cfg.n_keep < 1) throw std::invalid_argument("config: n_keep must be >= 1");
  if (cfg.n_chains < 1)
    throw std::invalid_argument("config: n_chains must be >= 1");
}

}  // namespace

ChainOutput run_ags(const GroupedCountDataset& data, const PriorConfig& prior,
                    const AgsConfig& config) {
  validate_config(config);
  check_positive_counts(data);
  const PsiTable table(data.y_max());

  ChainOutput out;
  out.sampler = "ags";
  out.J = data.J;
  out.K = data.K;
  out.warmup_count = config.n_warmup;
  out.retained_count = config.n_keep;
  out.draws.resize(config.n_chains);
  out.chain_seconds.assign(config.n_chains, 0.0);

  auto worker = [&](std::size_t c) {
    Rng rng(config.seed, c);
    ModelState st = initial_state(data, prior, config.init, rng);
    AgsChain chain(data, prior, table);
    auto& keep = out.draws[c];
    keep.resize(config.n_keep, ModelState::zeros(data.J, data.K));
    const std::size_t total = config.n_warmup + config.n_keep;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t it = 0; it < total; ++it) {
      chain.sweep(st, rng);
      if (it >= config.n_warmup) keep[it - config.n_warmup] = st;
    }
    const auto t1 = std::chrono::steady_clock::now();
    out.chain_seconds[c] = std::chrono::duration<double>(t1 - t0).count();
  };

  std::vector<std::future<void>> futures;
  for (std::size_t c = 1; c < config.n_chains; ++c)
    futures.push_back(std::async(std::launch::async, worker, c));
  worker(0);
  for (auto& f : futures) f.get();
  return out;
}

}  // namespace hbprm

#include "hbprm/mwg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "hbprm/conjugate.hpp"
#include "hbprm/kernels.hpp"

namespace hbprm {

namespace {

constexpr std::size_t kRebuildEvery = 256;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_positive_counts(const GroupedCountDataset& data) {
  for (long long v : data.y)
    if (v < 1)
      throw std::invalid_argument(
          "sampler requires positive counts; shift or drop zero counts first");
}

struct Decision {
  double dlik;
  bool accepted;
};

// Log-likelihood difference of the proposed move. An overflowing proposal
// is rejected outright; an overflowing current state accepts any finite
// proposal, so chains cannot get stuck when started far out in the tails.
Decision rw_decide(double delta, double syx, double sum_exp_cur,
                   double sum_exp_prop, double w_old, double mu, double sig,
                   double log_u) {
  double dlik;
  if (std::isinf(sum_exp_prop) || std::isnan(sum_exp_prop))
    dlik = -kInf;
  else if (std::isinf(sum_exp_cur))
    dlik = kInf;
  else
    dlik = delta * syx - (sum_exp_prop - sum_exp_cur);
  const double r_old = w_old - mu;
  const double r_new = w_old + delta - mu;
  const double dpri = (r_old * r_old - r_new * r_new) / (2.0 * sig);
  return {dlik, log_u < dlik + dpri};
}

}  // namespace

MwgStepResult mwg_coefficient_step(std::size_t j, std::size_t k,
                                   ModelState& state,
                                   const GroupedCountDataset& data,
                                   const PriorConfig& prior,
                                   const MwgConfig& config, Rng& rng) {
  (void)prior;
  if (j >= data.J || k >= data.K)
    throw std::out_of_range("mwg_coefficient_step: index out of bounds");
  const std::size_t n = data.n_obs(j);
  const double* xk = data.x_col(j, k);
  const long long* yj = data.y_group(j);
  std::vector<double> eta(n);
  fill_linear_predictor(state, data, j, eta.data());
  const double sum_exp_cur = kernels::sum_exp(eta.data(), n);
  double syx = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    syx += static_cast<double>(yj[i]) * xk[i];

  const double delta = rng.normal(0.0, config.step_scale);
  const double sum_exp_prop =
      kernels::sum_exp_shifted(eta.data(), xk, delta, n);
  const double log_u = std::log(rng.uniform());
  const Decision d = rw_decide(delta, syx, sum_exp_cur, sum_exp_prop,
                               state.w_at(j, k), state.mu[k], state.sigma2[k],
                               log_u);
  if (d.accepted) state.w_at(j, k) += delta;
  return {state.w_at(j, k), d.accepted};
}

MwgChain::MwgChain(const GroupedCountDataset& data, const PriorConfig& prior,
                   const MwgConfig& config)
    : data_(data),
      prior_(prior),
      adapt_target_(config.adapt_target),
      adapt_window_(config.adapt_window) {
  check_positive_counts(data);
  if (!(config.step_scale > 0.0))
    throw std::invalid_argument("config: step_scale must be positive");
  if (!(config.adapt_target > 0.0 && config.adapt_target < 1.0))
    throw std::invalid_argument("config: adapt_target must be in (0,1)");
  if (config.adapt_window < 1)
    throw std::invalid_argument("config: adapt_window must be >= 1");

  const std::size_t nrows = data.n_rows();
  yd_.resize(nrows);
  for (std::size_t r = 0; r < nrows; ++r)
    yd_[r] = static_cast<double>(data.y[r]);
  syx_.assign(data.J * data.K, 0.0);
  for (std::size_t j = 0; j < data.J; ++j)
    for (std::size_t k = 0; k < data.K; ++k)
      syx_[j * data.K + k] = kernels::dot(yd_.data() + data.offsets[j],
                                          data.x_col(j, k), data.n_obs(j));
  eta_.assign(nrows, 0.0);
  sum_exp_g_.assign(data.J, 0.0);
  wcol_.resize(data.J);
  ls_.assign(data.J * data.K, std::log(config.step_scale));
  step_.assign(data.J * data.K, config.step_scale);
  win_acc_.assign(data.J * data.K, 0);
}

void MwgChain::reset(const ModelState& state) {
  for (std::size_t j = 0; j < data_.J; ++j) {
    double* etaj = eta_.data() + data_.offsets[j];
    fill_linear_predictor(state, data_, j, etaj);
    sum_exp_g_[j] = kernels::sum_exp(etaj, data_.n_obs(j));
  }
}

void MwgChain::reset_accept_counters() {
  acc_ = 0;
  prop_ = 0;
}

void MwgChain::sweep(ModelState& state, Rng& rng, bool adapt) {
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
      const std::size_t n = data_.n_obs(j);
      const double* xk = data_.x_col(j, k);
      double* etaj = eta_.data() + data_.offsets[j];
      const double delta = rng.normal(0.0, step_[j * K + k]);
      const double sum_exp_prop =
          kernels::sum_exp_shifted(etaj, xk, delta, n);
      const double log_u = std::log(rng.uniform());
      const Decision d =
          rw_decide(delta, syx_[j * K + k], sum_exp_g_[j], sum_exp_prop,
                    state.w_at(j, k), mu_k, sig, log_u);
      ++prop_;
      if (d.accepted) {
        kernels::axpy(delta, xk, etaj, n);
        sum_exp_g_[j] = sum_exp_prop;
        state.w_at(j, k) += delta;
        ++acc_;
        if (adapt) ++win_acc_[j * K + k];
      }
    }
  }
  if (adapt) {
    ++win_len_;
    if (win_len_ == adapt_window_) {
      ++batches_;
      const double step =
          std::min(0.5, 2.0 / std::sqrt(static_cast<double>(batches_)));
      for (std::size_t p = 0; p < ls_.size(); ++p) {
        const double rate = static_cast<double>(win_acc_[p]) /
                            static_cast<double>(adapt_window_);
        ls_[p] += rate > adapt_target_ ? step : -step;
        step_[p] = std::exp(ls_[p]);
        win_acc_[p] = 0;
      }
      win_len_ = 0;
    }
  }
}

ChainOutput run_mwg(const GroupedCountDataset& data, const PriorConfig& prior,
                    const MwgConfig& config) {
  if (config.n_keep < 1) throw std::invalid_argument("config: n_keep must be >= 1");
  if (config.n_chains < 1)
    throw std::invalid_argument("config: n_chains must be >= 1");
  check_positive_counts(data);

  ChainOutput out;
  out.sampler = "mwg";
  out.J = data.J;
  out.K = data.K;
  out.warmup_count = config.n_warmup;
  out.retained_count = config.n_keep;
  out.draws.resize(config.n_chains);
  out.chain_seconds.assign(config.n_chains, 0.0);
  out.accept_rate.assign(config.n_chains, 0.0);

  auto worker = [&](std::size_t c) {
    Rng rng(config.seed, c);
    ModelState st = initial_state(data, prior, config.init, rng);
    MwgChain chain(data, prior, config);
    chain.reset(st);
    auto& keep = out.draws[c];
    keep.resize(config.n_keep, ModelState::zeros(data.J, data.K));
    std::vector<double> frozen;
    const std::size_t total = config.n_warmup + config.n_keep;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t it = 0; it < total; ++it) {
      if (it > 0 && it % kRebuildEvery == 0) chain.reset(st);
      if (it == config.n_warmup) {
        frozen = chain.log_steps();
        chain.reset_accept_counters();
      }
      chain.sweep(st, rng, it < config.n_warmup);
      if (it >= config.n_warmup) keep[it - config.n_warmup] = st;
    }
    const auto t1 = std::chrono::steady_clock::now();
    out.chain_seconds[c] = std::chrono::duration<double>(t1 - t0).count();
    if (chain.log_steps() != frozen)
      throw std::logic_error("step scales changed after warmup");
    out.accept_rate[c] =
        chain.proposals() > 0
            ? static_cast<double>(chain.accepts()) /
                  static_cast<double>(chain.proposals())
            : 0.0;
  };

  std::vector<std::future<void>> futures;
  for (std::size_t c = 1; c < config.n_chains; ++c)
    futures.push_back(std::async(std::launch::async, worker, c));
  worker(0);
  for (auto& f : futures) f.get();
  return out;
}

}  // namespace hbprm

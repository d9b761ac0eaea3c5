#pragma once

#include <cstddef>
#include <vector>

#include "hbprm/ags.hpp"
#include "hbprm/model.hpp"
#include "hbprm/rng.hpp"

// Exact-likelihood reference sampler: Gaussian random-walk
// Metropolis-within-Gibbs on each w_jk against the true Poisson
// conditional, with the same conjugate updates for mu_k and sigma2_k.

namespace hbprm {

struct MwgConfig : AgsConfig {
  double step_scale = 0.1;
  double adapt_target = 0.44;
  std::size_t adapt_window = 25;
};

struct MwgStepResult {
  double w;
  bool accepted;
};

// One random-walk update of w_jk against the exact conditional. Stateless
// reference path: rebuilds the group's linear predictor on every call.
// Accepted moves are written back into state.
MwgStepResult mwg_coefficient_step(std::size_t j, std::size_t k,
                                   ModelState& state,
                                   const GroupedCountDataset& data,
                                   const PriorConfig& prior,
                                   const MwgConfig& config, Rng& rng);

// Per-run workspace caching sum_i y x per (j,k) and per-group exp-sums.
// Step sizes adapt toward adapt_target during warmup in windows of
// adapt_window sweeps, then stay frozen.
class MwgChain {
 public:
  MwgChain(const GroupedCountDataset& data, const PriorConfig& prior,
           const MwgConfig& config);

  void reset(const ModelState& state);
  void sweep(ModelState& state, Rng& rng, bool adapt);

  const std::vector<double>& log_steps() const { return ls_; }
  unsigned long long proposals() const { return prop_; }
  unsigned long long accepts() const { return acc_; }
  void reset_accept_counters();

 private:
  const GroupedCountDataset& data_;
  PriorConfig prior_;
  double adapt_target_;
  std::size_t adapt_window_;
  std::vector<double> yd_;         // counts as doubles, dataset row order
  std::vector<double> syx_;        // J*K: sum_i y x
  std::vector<double> eta_;        // linear predictor, all rows
  std::vector<double> sum_exp_g_;  // per group: sum_i exp(eta)
  std::vector<double> wcol_;       // scratch, length J
  std::vector<double> ls_;         // J*K log step scales
  std::vector<double> step_;       // exp(ls_), refreshed on adaptation
  std::vector<unsigned> win_acc_;  // per (j,k) accepts in current window
  std::size_t win_len_ = 0;
  std::size_t batches_ = 0;
  unsigned long long acc_ = 0;
  unsigned long long prop_ = 0;
};

ChainOutput run_mwg(const GroupedCountDataset& data, const PriorConfig& prior,
                    const MwgConfig& config);

}  // namespace hbprm

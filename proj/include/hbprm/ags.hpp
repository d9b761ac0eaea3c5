#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hbprm/model.hpp"
#include "hbprm/rng.hpp"
#include "hbprm/special.hpp"

namespace hbprm {

enum class Init { prior_draw, zeros };

struct AgsConfig {
  std::size_t n_warmup = 5000;
  std::size_t n_keep = 5000;
  std::size_t n_chains = 4;
  std::uint64_t seed = 0;
  Init init = Init::prior_draw;
};

// Aggregated result of a multi-chain run. chain_seconds covers the sweep
// loop only (no data prep, no psi table build); chains run concurrently, so
// per-1000-iteration time is averaged over chains rather than summed.
struct ChainOutput {
  std::string sampler;
  std::size_t J = 0;
  std::size_t K = 0;
  std::size_t warmup_count = 0;
  std::size_t retained_count = 0;
  std::vector<std::vector<ModelState>> draws;  // [chain][draw]
  std::vector<double> chain_seconds;
  std::vector<double> accept_rate;  // per chain, random-walk sampler only

  std::size_t n_chains() const { return draws.size(); }
  std::size_t iterations() const { return warmup_count + retained_count; }
  double seconds_per_1000_iterations() const;
};

struct CoefficientConditional {
  double mean_hat;
  double var_hat;
  std::size_t j;
  std::size_t k;
};

// Gaussian conditional for w_jk obtained by moment-matching each
// observation's log-gamma likelihood factor. Slow reference path; the sweep
// below keeps the per-observation pieces precomputed.
CoefficientConditional coefficient_conditional(std::size_t j, std::size_t k,
                                               const ModelState& state,
                                               const GroupedCountDataset& data,
                                               const PsiTable& table);

// Per-run sufficient statistics for the Gaussian conditionals. The
// per-observation weights x/psi1(y) never change within a run, so each
// group's cross-products collapse into a K x K Gram matrix plus a
// psi0-weighted vector, and every coefficient update costs O(K) regardless
// of group size. The sweep reads the live state directly and keeps no
// incremental quantities.
class AgsChain {
 public:
  AgsChain(const GroupedCountDataset& data, const PriorConfig& prior,
           const PsiTable& table);

  // One full update: for each covariate k, draw mu_k and sigma2_k from
  // their conjugate conditionals, then each group's w_jk from its Gaussian
  // approximation.
  void sweep(ModelState& state, Rng& rng);

 private:
  const GroupedCountDataset& data_;
  PriorConfig prior_;
  std::vector<double> gram_;  // J*K*K: sum_i x_k x_h / psi1
  std::vector<double> s1_;    // J*K: sum_i (x/psi1) psi0
  std::vector<double> wcol_;  // scratch, length J
};

ModelState initial_state(const GroupedCountDataset& data,
                         const PriorConfig& prior, Init init, Rng& rng);

// Convenience wrapper over AgsChain for single-sweep use.
void ags_sweep(ModelState& state, const GroupedCountDataset& data,
               const PriorConfig& prior, const PsiTable& table, Rng& rng);

ChainOutput run_ags(const GroupedCountDataset& data, const PriorConfig& prior,
                    const AgsConfig& config);

}  // namespace hbprm

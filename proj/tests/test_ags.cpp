#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hbprm/ags.hpp"
#include "hbprm/conjugate.hpp"
#include "hbprm/model.hpp"
#include "hbprm/rng.hpp"
#include "hbprm/special.hpp"

using namespace hbprm;

namespace {

GroupedCountDataset flat_x_dataset() {
  DatasetBuilder b(1);
  b.add_row("g", {0.0}, 4);
  b.add_row("g", {0.0}, 7);
  b.add_row("g", {0.0}, 2);
  return b.build();
}

// Reference sweep that recomputes every coefficient conditional from the
// dataset instead of maintaining running sums. Must consume the rng in the
// same order as AgsChain::sweep.
void definitional_sweep(ModelState& st, const GroupedCountDataset& d,
                        const PriorConfig& pr, const PsiTable& tbl, Rng& rng) {
  std::vector<double> wcol(d.J);
  for (std::size_t k = 0; k < d.K; ++k) {
    for (std::size_t j = 0; j < d.J; ++j) wcol[j] = st.w_at(j, k);
    st.mu[k] =
        draw_gaussian(mu_conditional(wcol.data(), d.J, st.sigma2[k], pr), rng);
    st.sigma2[k] = draw_inverse_gamma(
        sigma2_conditional(wcol.data(), d.J, st.mu[k], pr), rng);
    for (std::size_t j = 0; j < d.J; ++j) {
      const auto c = coefficient_conditional(j, k, st, d, tbl);
      st.w_at(j, k) = rng.normal(c.mean_hat, std::sqrt(c.var_hat));
    }
  }
}

struct GridMoments {
  double mean;
  double sd;
};

// Normalized moments of exp(logp) on a uniform grid, stabilized by the max.
template <typename LogP>
GridMoments grid_moments(LogP logp, double lo, double hi, std::size_t n) {
  std::vector<double> lp(n);
  double mx = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(n - 1);
    lp[i] = logp(w);
    mx = std::max(mx, lp[i]);
  }
  double mass = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(n - 1);
    const double f = std::exp(lp[i] - mx) * ((i == 0 || i + 1 == n) ? 0.5 : 1.0);
    mass += f;
    m1 += w * f;
    m2 += w * w * f;
  }
  const double mean = m1 / mass;
  return {mean, std::sqrt(m2 / mass - mean * mean)};
}

}  // namespace

TEST_CASE("coefficient conditional, single unit observation") {
  DatasetBuilder b(1);
  b.add_row("g", {1.0}, 1);
  auto d = b.build();
  PsiTable tbl(1);
  ModelState s = ModelState::zeros(1, 1);  // mu = 0, sigma2 = 1
  const auto c = coefficient_conditional(0, 0, s, d, tbl);
  // A = 1/psi1(1), b = psi0(1)/psi1(1), denom = A + 1
  const double denom = 1.0 / psi1(1) + 1.0;
  CHECK(denom == doctest::Approx(1.6079271018540266).epsilon(1e-14));
  CHECK(c.var_hat == doctest::Approx(1.0 / denom).epsilon(1e-14));
  CHECK(c.mean_hat == doctest::Approx(psi0(1) / (1.0 + psi1(1))).epsilon(1e-13));
  CHECK(c.mean_hat == doctest::Approx(-0.2182346).epsilon(1e-5));
}

TEST_CASE("zero covariate column recovers the prior") {
  auto d = flat_x_dataset();
  PsiTable tbl(d.y_max());
  ModelState s = ModelState::zeros(1, 1);
  s.mu[0] = 0.4;
  s.sigma2[0] = 1.7;
  const auto c = coefficient_conditional(0, 0, s, d, tbl);
  CHECK(c.mean_hat == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(c.var_hat == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("conditional variance never exceeds the prior variance") {
  DatasetBuilder b(2);
  Rng rng(31);
  for (int i = 0; i < 12; ++i)
    b.add_row(i % 3 == 0 ? "a" : "b", {rng.uniform(0.1, 2.0), rng.uniform(0.1, 1.0)},
              1 + rng.poisson(8.0));
  auto d = b.build();
  PsiTable tbl(d.y_max());
  for (int rep = 0; rep < 20; ++rep) {
    ModelState s = ModelState::zeros(2, 2);
    s.mu = {rng.normal(), rng.normal()};
    s.sigma2 = {rng.inverse_gamma(2.0, 1.0), rng.inverse_gamma(2.0, 1.0)};
    s.w = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) {
        const auto c = coefficient_conditional(j, k, s, d, tbl);
        CHECK(c.var_hat > 0.0);
        CHECK(c.var_hat <= s.sigma2[k] + 1e-15);
      }
  }
}

TEST_CASE("conditional mean moves from prior toward data as sigma2 grows") {
  DatasetBuilder b(1);
  b.add_row("g", {1.0}, 50);
  auto d = b.build();
  PsiTable tbl(50);
  const double target = psi0(50);  // likelihood-optimal w for x = 1
  ModelState tight = ModelState::zeros(1, 1);
  tight.sigma2[0] = 1.0;
  ModelState loose = ModelState::zeros(1, 1);
  loose.sigma2[0] = 100.0;
  const auto ct = coefficient_conditional(0, 0, tight, d, tbl);
  const auto cl = coefficient_conditional(0, 0, loose, d, tbl);
  CHECK(ct.mean_hat > 0.0);
  CHECK(ct.mean_hat < target);
  CHECK(std::fabs(cl.mean_hat - target) < std::fabs(ct.mean_hat - target));
}

TEST_CASE("conditional rejects invalid inputs") {
  auto d = flat_x_dataset();
  PsiTable tbl(d.y_max());
  ModelState s = ModelState::zeros(1, 1);
  CHECK_THROWS_AS(coefficient_conditional(1, 0, s, d, tbl), std::out_of_range);
  s.sigma2[0] = -1.0;
  CHECK_THROWS_AS(coefficient_conditional(0, 0, s, d, tbl), std::domain_error);

  DatasetBuilder zb(1);
  zb.add_row("g", {1.0}, 0);
  zb.add_row("g", {1.0}, 2);
  auto zd = zb.build(true);
  ModelState zs = ModelState::zeros(1, 1);
  PsiTable ztbl(zd.y_max());
  CHECK_THROWS_AS(coefficient_conditional(0, 0, zs, zd, ztbl), std::logic_error);
}

TEST_CASE("incremental sweep matches the definitional sweep") {
  DatasetBuilder b(2);
  Rng gen(5150);
  for (int i = 0; i < 18; ++i) {
    const char* g = (i % 3 == 0) ? "a" : (i % 3 == 1) ? "b" : "c";
    b.add_row(g, {gen.uniform(0.5, 2.0), gen.uniform(0.1, 1.5)},
              1 + gen.poisson(12.0));
  }
  auto d = b.build();
  PriorConfig prior;
  PsiTable tbl(d.y_max());

  ModelState fast = ModelState::zeros(d.J, d.K);
  ModelState slow = fast;
  Rng r1(999), r2(999);
  AgsChain chain(d, prior, tbl);
  for (int sweep = 0; sweep < 5; ++sweep) {
    chain.sweep(fast, r1);
    definitional_sweep(slow, d, prior, tbl, r2);
    for (std::size_t t = 0; t < fast.w.size(); ++t)
      CHECK(fast.w[t] == doctest::Approx(slow.w[t]).epsilon(1e-9));
    for (std::size_t k = 0; k < d.K; ++k) {
      CHECK(fast.mu[k] == doctest::Approx(slow.mu[k]).epsilon(1e-9));
      CHECK(fast.sigma2[k] == doctest::Approx(slow.sigma2[k]).epsilon(1e-9));
    }
  }
}

TEST_CASE("single-sweep wrapper equals one chain sweep") {
  DatasetBuilder b(1);
  b.add_row("g", {1.1}, 5);
  b.add_row("g", {0.7}, 9);
  auto d = b.build();
  PriorConfig prior;
  PsiTable tbl(d.y_max());
  ModelState s1 = ModelState::zeros(1, 1);
  ModelState s2 = s1;
  Rng r1(4), r2(4);
  ags_sweep(s1, d, prior, tbl, r1);
  AgsChain chain(d, prior, tbl);
  chain.sweep(s2, r2);
  CHECK(s1.w[0] == s2.w[0]);
  CHECK(s1.mu[0] == s2.mu[0]);
  CHECK(s1.sigma2[0] == s2.sigma2[0]);
}

TEST_CASE("gaussian approximation tracks the exact conditional closely") {
  // K = 1 so the conditional over w has no other-coefficient term. The
  // moment-matching error decays with the count magnitude (not with n), so
  // the tight budget applies to counts in the hundreds and up; with counts
  // of tens the bias is a visible fraction of the narrowing posterior sd.
  struct Setting {
    double slope;
    std::size_t n;
    double budget;  // |error| bound in units of the exact sd
  };
  double rel_bias_moderate = 0.0, rel_bias_large = 0.0;
  for (const Setting setting : {Setting{3.0, 5, 0.10}, Setting{3.0, 20, 0.10},
                                Setting{1.2, 20, 0.60}}) {
    const std::size_t n = setting.n;
    DatasetBuilder b(1);
    for (std::size_t i = 0; i < n; ++i) {
      const double x =
          2.0 + 1.2 * static_cast<double>(i) / static_cast<double>(n - 1);
      b.add_row("g", {x}, std::llround(std::exp(setting.slope * x)));
    }
    auto d = b.build();
    REQUIRE(*std::min_element(d.y.begin(), d.y.end()) >= 10);
    PsiTable tbl(d.y_max());
    ModelState s = ModelState::zeros(1, 1);
    s.mu[0] = 1.0;
    s.sigma2[0] = 0.5;
    const auto c = coefficient_conditional(0, 0, s, d, tbl);

    const auto exact = grid_moments(
        [&](double w) {
          double lp = -(w - s.mu[0]) * (w - s.mu[0]) / (2.0 * s.sigma2[0]);
          for (std::size_t i = 0; i < n; ++i) {
            const double eta = w * d.x_at(0, i, 0);
            lp += static_cast<double>(d.y_group(0)[i]) * eta - std::exp(eta);
          }
          return lp;
        },
        c.mean_hat - 10.0 * std::sqrt(c.var_hat),
        c.mean_hat + 10.0 * std::sqrt(c.var_hat), 100001);

    const double rel_bias = std::fabs(c.mean_hat - exact.mean) / exact.sd;
    CHECK(rel_bias < setting.budget);
    CHECK(std::fabs(std::sqrt(c.var_hat) - exact.sd) < 0.10 * exact.sd);
    if (setting.slope == 1.2)
      rel_bias_moderate = rel_bias;
    else if (n == 20)
      rel_bias_large = rel_bias;
  }
  // larger counts, same design: visibly better approximation
  CHECK(rel_bias_large < rel_bias_moderate);
}

TEST_CASE("flat covariates leave the hierarchical prior invariant") {
  auto d = flat_x_dataset();
  PriorConfig prior;
  prior.m = 0.7;
  prior.a = 3.0;  // finite prior variance for sigma2
  prior.b = 2.0;
  AgsConfig cfg;
  cfg.n_warmup = 2000;
  cfg.n_keep = 15000;
  cfg.n_chains = 2;
  cfg.seed = 81;
  const auto out = run_ags(d, prior, cfg);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& chain : out.draws)
    for (const auto& st : chain) {
      sum += st.w[0];
      ++count;
    }
  // marginal of w is centered on prior.m; sd ~ 1.4, ESS >= several thousand
  CHECK(std::fabs(sum / static_cast<double>(count) - 0.7) < 0.06);
}

TEST_CASE("runs are reproducible and chains are distinct") {
  DatasetBuilder b(1);
  b.add_row("a", {1.0}, 6);
  b.add_row("a", {1.4}, 11);
  b.add_row("b", {0.8}, 3);
  auto d = b.build();
  PriorConfig prior;
  AgsConfig cfg;
  cfg.n_warmup = 50;
  cfg.n_keep = 50;
  cfg.n_chains = 2;
  cfg.seed = 7;
  const auto o1 = run_ags(d, prior, cfg);
  const auto o2 = run_ags(d, prior, cfg);
  REQUIRE(o1.draws.size() == 2);
  REQUIRE(o1.draws[0].size() == 50);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t t = 0; t < 50; ++t) {
      CHECK(o1.draws[c][t].w == o2.draws[c][t].w);
      CHECK(o1.draws[c][t].mu == o2.draws[c][t].mu);
      CHECK(o1.draws[c][t].sigma2 == o2.draws[c][t].sigma2);
    }
  CHECK(o1.draws[0][0].w != o1.draws[1][0].w);
  CHECK(o1.sampler == "ags");
  CHECK(o1.iterations() == 100);
}

TEST_CASE("config validation and zero-count rejection") {
  auto d = flat_x_dataset();
  PriorConfig prior;
  AgsConfig bad;
  bad.n_keep = 0;
  CHECK_THROWS_AS(run_ags(d, prior, bad), std::invalid_argument);
  bad.n_keep = 1;
  bad.n_chains = 0;
  CHECK_THROWS_AS(run_ags(d, prior, bad), std::invalid_argument);

  DatasetBuilder zb(1);
  zb.add_row("g", {1.0}, 0);
  zb.add_row("g", {1.0}, 2);
  auto zd = zb.build(true);
  AgsConfig cfg;
  cfg.n_warmup = 1;
  cfg.n_keep = 1;
  cfg.n_chains = 1;
  CHECK_THROWS_AS(run_ags(zd, prior, cfg), std::invalid_argument);
}

TEST_CASE("minimal run bounds") {
  auto d = flat_x_dataset();
  PriorConfig prior;
  AgsConfig cfg;
  cfg.n_warmup = 0;
  cfg.n_keep = 1;
  cfg.n_chains = 1;
  cfg.seed = 3;
  const auto out = run_ags(d, prior, cfg);
  CHECK(out.draws.size() == 1);
  CHECK(out.draws[0].size() == 1);
  CHECK(out.retained_count == 1);
  CHECK(out.warmup_count == 0);
}

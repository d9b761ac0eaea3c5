#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hbprm {

// Grouped count data. Rows are stored grouped; within a group each
// covariate column is contiguous, which is the access pattern of both
// samplers' inner loops. Immutable after construction and shared read-only
// across chains.
struct GroupedCountDataset {
  std::size_t J = 0;
  std::size_t K = 0;
  std::vector<std::size_t> offsets;     // J+1 row offsets
  std::vector<double> x;                // column-contiguous within group
  std::vector<long long> y;
  std::vector<double> log_fact;         // ln(y!) per row, cached
  std::vector<std::string> group_ids;   // in first-appearance order
  std::vector<double> group_covariate;  // size J for generated data, else empty

  std::size_t n_rows() const { return y.size(); }
  std::size_t n_obs(std::size_t j) const { return offsets[j + 1] - offsets[j]; }

  const double* x_col(std::size_t j, std::size_t k) const {
    return x.data() + offsets[j] * K + k * n_obs(j);
  }
  double* x_col(std::size_t j, std::size_t k) {
    return x.data() + offsets[j] * K + k * n_obs(j);
  }
  double x_at(std::size_t j, std::size_t i, std::size_t k) const {
    return x_col(j, k)[i];
  }
  const long long* y_group(std::size_t j) const { return y.data() + offsets[j]; }

  long long y_max() const;

  // Validates shape and count positivity, fills log_fact. Raw synthetic
  // small-count data may carry zeros until the caller shifts or drops them;
  // the samplers re-check positivity themselves.
  void finalize(bool allow_zero = false);
};

// Assembles a dataset from rows arriving in any group order. Groups keep
// first-appearance order; rows keep file order within their group.
class DatasetBuilder {
 public:
  explicit DatasetBuilder(std::size_t K);
  void add_row(const std::string& group, const std::vector<double>& xrow,
               long long y);
  GroupedCountDataset build(bool allow_zero = false);

 private:
  std::size_t K_;
  std::vector<std::string> order_;
  std::vector<std::vector<double>> xs_;  // row-major per group
  std::vector<std::vector<long long>> ys_;
};

struct PriorConfig {
  double m = 0.0;
  double tau2 = 1.0;
  double a = 1.0;
  double b = 1.0;
};

// One point in parameter space: per-group coefficients plus the covariate
// level means and variances.
struct ModelState {
  std::vector<double> w;       // J*K, group-major
  std::vector<double> mu;      // K
  std::vector<double> sigma2;  // K

  static ModelState zeros(std::size_t J, std::size_t K);

  double& w_at(std::size_t j, std::size_t k) { return w[j * mu.size() + k]; }
  double w_at(std::size_t j, std::size_t k) const {
    return w[j * mu.size() + k];
  }
};

// eta_ij = sum_k w_jk x_ijk for one (j, i).
double linear_predictor(const ModelState& state, const GroupedCountDataset& data,
                        std::size_t j, std::size_t i);

// Fills out[i] = eta_ij for all rows of group j. out must have n_obs(j) room.
void fill_linear_predictor(const ModelState& state,
                           const GroupedCountDataset& data, std::size_t j,
                           double* out);

// sum_ij [y eta - exp(eta) - ln(y!)]
double log_poisson_likelihood(const ModelState& state,
                              const GroupedCountDataset& data);

}  // namespace hbprm

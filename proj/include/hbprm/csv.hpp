#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hbprm/ags.hpp"
#include "hbprm/diagnostics.hpp"
#include "hbprm/model.hpp"
#include "hbprm/synth.hpp"

// File formats. Everything numeric is written with %.17g so that values
// round-trip exactly and repeated runs produce byte-identical files.

namespace hbprm {

std::string format_double(double v);

struct IngestOptions {
  long long shift_counts = 0;  // added to every count before validation
};

// Expects header group,x1,...,xK,y. Groups keep first-appearance order.
// Zero or negative counts (after any shift) are rejected with the
// offending row numbers listed.
GroupedCountDataset ingest_csv(std::istream& in, const IngestOptions& opts = {},
                               const std::string& label = "<stream>");
GroupedCountDataset ingest_csv(const std::string& path,
                               const IngestOptions& opts = {});

// Same schema as ingest_csv.
void write_dataset_csv(const std::string& path, const GroupedCountDataset& data);

// Generating coefficients and group scale, one row per group.
void write_truth_csv(const std::string& path, const SynthResult& result);

// Long format: chain,iteration,parameter,value. Iterations are global
// sweep numbers (warmup + t, 1-based); parameters are w[j,k], mu[k],
// sigma2[k] with 1-based indices.
void write_draws_csv(const std::string& path, const ChainOutput& output);

struct DiagnosticsRow {
  std::string dataset;
  std::string sampler;
  std::size_t n_d = 0;
  std::size_t k = 0;
  std::size_t j = 0;
  double t_s = 0.0;
  double e_s = 0.0;
  double r2 = 0.0;
  double rmse = 0.0;
};

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& rows);

struct KsCurveRow {
  long long y = 0;
  double ks = 0.0;
  double abs_mean_error = 0.0;
};

void write_ks_curve_csv(const std::string& path,
                        const std::vector<KsCurveRow>& rows);

}  // namespace hbprm

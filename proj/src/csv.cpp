#include "hbprm/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hbprm {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(trim(line.substr(pos)));
      break;
    }
    out.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const std::string& label, std::size_t line,
                       const std::string& what) {
  throw std::runtime_error(label + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, const std::string& label,
                    std::size_t line) {
  if (tok.empty()) fail(label, line, "empty field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || errno == ERANGE)
    fail(label, line, "bad number '" + tok + "'");
  return v;
}

long long parse_count(const std::string& tok, const std::string& label,
                      std::size_t line) {
  if (tok.empty()) fail(label, line, "empty count");
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || errno == ERANGE)
    fail(label, line, "count must be an integer, got '" + tok + "'");
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

GroupedCountDataset ingest_csv(std::istream& in, const IngestOptions& opts,
                               const std::string& label) {
  if (opts.shift_counts < 0)
    throw std::invalid_argument("shift-counts must be nonnegative");
  std::string line;
  if (!std::getline(in, line)) fail(label, 1, "empty file");
  const std::vector<std::string> header = split(line);
  if (header.size() < 3 || header.front() != "group" || header.back() != "y")
    fail(label, 1, "expected header group,x1,...,xK,y");
  const std::size_t K = header.size() - 2;
  for (std::size_t k = 0; k < K; ++k)
    if (header[k + 1] != "x" + std::to_string(k + 1))
      fail(label, 1, "expected covariate column x" + std::to_string(k + 1) +
                         ", got '" + header[k + 1] + "'");

  DatasetBuilder builder(K);
  std::vector<double> xrow(K);
  std::vector<std::size_t> nonpositive_rows;
  std::size_t lineno = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split(line);
    if (f.size() != header.size())
      fail(label, lineno, "expected " + std::to_string(header.size()) +
                              " fields, got " + std::to_string(f.size()));
    if (f[0].empty()) fail(label, lineno, "empty group id");
    for (std::size_t k = 0; k < K; ++k)
      xrow[k] = parse_double(f[k + 1], label, lineno);
    long long y = parse_count(f.back(), label, lineno);
    if (y < 0) fail(label, lineno, "negative count");
    y += opts.shift_counts;
    if (y < 1) nonpositive_rows.push_back(lineno);
    builder.add_row(f[0], xrow, y);
    ++rows;
  }
  if (rows == 0) fail(label, lineno, "no data rows");
  if (!nonpositive_rows.empty()) {
    std::ostringstream msg;
    msg << label << ": counts must be positive (y >= 1); zero counts at row";
    if (nonpositive_rows.size() > 1) msg << "s";
    msg << " ";
    const std::size_t show = std::min<std::size_t>(nonpositive_rows.size(), 20);
    for (std::size_t i = 0; i < show; ++i) {
      if (i) msg << ", ";
      msg << nonpositive_rows[i];
    }
    if (show < nonpositive_rows.size())
      msg << " and " << nonpositive_rows.size() - show << " more";
    msg << "; use --shift-counts to raise all counts";
    throw std::runtime_error(msg.str());
  }
  return builder.build();
}

GroupedCountDataset ingest_csv(const std::string& path,
                               const IngestOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return ingest_csv(in, opts, path);
}

void write_dataset_csv(const std::string& path,
                       const GroupedCountDataset& data) {
  std::ofstream out = open_out(path);
  out << "group";
  for (std::size_t k = 0; k < data.K; ++k) out << ",x" << k + 1;
  out << ",y\n";
  for (std::size_t j = 0; j < data.J; ++j) {
    const std::size_t n = data.n_obs(j);
    for (std::size_t i = 0; i < n; ++i) {
      out << data.group_ids[j];
      for (std::size_t k = 0; k < data.K; ++k)
        out << ',' << format_double(data.x_at(j, i, k));
      out << ',' << data.y[data.offsets[j] + i] << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_truth_csv(const std::string& path, const SynthResult& result) {
  std::ofstream out = open_out(path);
  out << "group";
  for (std::size_t k = 0; k < result.k_gen; ++k) out << ",w" << k + 1;
  out << ",scale\n";
  for (std::size_t j = 0; j < result.data.J; ++j) {
    out << result.data.group_ids[j];
    for (std::size_t k = 0; k < result.k_gen; ++k)
      out << ',' << format_double(result.w_true[j * result.k_gen + k]);
    out << ',' << format_double(result.group_scale[j]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_draws_csv(const std::string& path, const ChainOutput& output) {
  std::ofstream out = open_out(path);
  out << "chain,iteration,parameter,value\n";
  const std::vector<std::string> names = parameter_names(output.J, output.K);
  const std::size_t nw = output.J * output.K;
  std::string buf;
  buf.reserve(1 << 20);
  for (std::size_t c = 0; c < output.draws.size(); ++c) {
    for (std::size_t t = 0; t < output.draws[c].size(); ++t) {
      const ModelState& st = output.draws[c][t];
      const std::string head = std::to_string(c + 1) + "," +
                               std::to_string(output.warmup_count + t + 1) +
                               ",";
      for (std::size_t p = 0; p < names.size(); ++p) {
        double v;
        if (p < nw)
          v = st.w[p];
        else if (p < nw + output.K)
          v = st.mu[p - nw];
        else
          v = st.sigma2[p - nw - output.K];
        buf += head;
        buf += names[p];
        buf += ',';
        buf += format_double(v);
        buf += '\n';
        if (buf.size() > (1 << 20) - 256) {
          out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
          buf.clear();
        }
      }
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& rows) {
  std::ofstream out = open_out(path);
  out << "dataset,sampler,N_d,K,J,T_s,E_s,R2,RMSE\n";
  for (const DiagnosticsRow& r : rows) {
    out << r.dataset << ',' << r.sampler << ',' << r.n_d << ',' << r.k << ','
        << r.j << ',' << format_double(r.t_s) << ',' << format_double(r.e_s)
        << ',' << format_double(r.r2) << ',' << format_double(r.rmse) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_ks_curve_csv(const std::string& path,
                        const std::vector<KsCurveRow>& rows) {
  std::ofstream out = open_out(path);
  out << "y,ks_distance,abs_mean_error\n";
  for (const KsCurveRow& r : rows)
    out << r.y << ',' << format_double(r.ks) << ','
        << format_double(r.abs_mean_error) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace hbprm

#include "hbprm/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hbprm {

namespace {

void check_y(long long y) {
  if (y < 1) throw std::domain_error("psi: argument must be a positive integer");
}

void check_beta(double beta) {
  if (!(beta > 0.0)) throw std::domain_error("beta must be positive");
}

void check_grid(QuadGrid grid) {
  if (grid.points < 4096)
    throw std::invalid_argument("grid must have at least 4096 points");
  if (!(grid.span_sd > 0.0))
    throw std::invalid_argument("grid span must be positive");
}

double psi0_asymptotic(double y) { return std::log(y) - 1.0 / (2.0 * y); }

double psi1_asymptotic(double y) {
  return 1.0 / y + 1.0 / (2.0 * y * y);
}

}  // namespace

double psi0(long long y) {
  check_y(y);
  if (y > kPsiAsymptoticThreshold) return psi0_asymptotic(static_cast<double>(y));
  double s = -std::numbers::egamma;
  for (long long t = 1; t < y; ++t) s += 1.0 / static_cast<double>(t);
  return s;
}

double psi1(long long y) {
  check_y(y);
  if (y > kPsiAsymptoticThreshold) return psi1_asymptotic(static_cast<double>(y));
  double s = std::numbers::pi * std::numbers::pi / 6.0;
  for (long long t = 1; t < y; ++t) {
    const double td = static_cast<double>(t);
    s -= 1.0 / (td * td);
  }
  return s;
}

PsiTable::PsiTable(long long y_max) {
  const long long cap = std::clamp<long long>(y_max, 1, kPsiAsymptoticThreshold);
  p0_.resize(static_cast<std::size_t>(cap) + 1);
  p1_.resize(static_cast<std::size_t>(cap) + 1);
  p0_[1] = -std::numbers::egamma;
  p1_[1] = std::numbers::pi * std::numbers::pi / 6.0;
  for (long long n = 1; n < cap; ++n) {
    const double nd = static_cast<double>(n);
    p0_[n + 1] = p0_[n] + 1.0 / nd;
    p1_[n + 1] = p1_[n] - 1.0 / (nd * nd);
  }
}

double PsiTable::psi0(long long y) const {
  check_y(y);
  if (y <= table_max()) return p0_[static_cast<std::size_t>(y)];
  if (y > kPsiAsymptoticThreshold) return psi0_asymptotic(static_cast<double>(y));
  return hbprm::psi0(y);
}

double PsiTable::psi1(long long y) const {
  check_y(y);
  if (y <= table_max()) return p1_[static_cast<std::size_t>(y)];
  if (y > kPsiAsymptoticThreshold) return psi1_asymptotic(static_cast<double>(y));
  return hbprm::psi1(y);
}

LogGammaApprox log_gamma_approx(long long y, double beta) {
  check_y(y);
  check_beta(beta);
  return {psi0(y) + std::log(beta), psi1(y)};
}

double true_loggamma_log_pdf(double v, long long y, double beta) {
  check_y(y);
  check_beta(beta);
  const double yd = static_cast<double>(y);
  const double lb = std::log(beta);
  return yd * v - std::exp(v - lb) - yd * lb - std::lgamma(yd);
}

double true_loggamma_pdf(double v, long long y, double beta) {
  return std::exp(true_loggamma_log_pdf(v, y, beta));
}

std::vector<double> make_grid(long long y, double beta, QuadGrid grid) {
  check_grid(grid);
  const LogGammaApprox ap = log_gamma_approx(y, beta);
  const double sd = std::sqrt(ap.var);
  const double lo = ap.mean - grid.span_sd * sd;
  const double step = 2.0 * grid.span_sd * sd / static_cast<double>(grid.points - 1);
  std::vector<double> v(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i)
    v[i] = lo + step * static_cast<double>(i);
  return v;
}

double gaussian_cdf(double z) {
  return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
}

double ks_distance(long long y, double beta, QuadGrid grid) {
  const std::vector<double> v = make_grid(y, beta, grid);
  const LogGammaApprox ap = log_gamma_approx(y, beta);
  const double sd = std::sqrt(ap.var);
  const double dx = v[1] - v[0];
  double prev_pdf = true_loggamma_pdf(v[0], y, beta);
  double cdf = 0.0;
  double d = std::fabs(cdf - gaussian_cdf((v[0] - ap.mean) / sd));
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double pdf = true_loggamma_pdf(v[i], y, beta);
    cdf += 0.5 * (pdf + prev_pdf) * dx;
    prev_pdf = pdf;
    d = std::max(d, std::fabs(cdf - gaussian_cdf((v[i] - ap.mean) / sd)));
  }
  return d;
}

namespace {

// trapezoid integrals of f, v*f, v^2*f on the quadrature grid
struct RawMoments {
  double mass, m1, m2;
};

RawMoments raw_moments(long long y, double beta, QuadGrid grid) {
  const std::vector<double> v = make_grid(y, beta, grid);
  const double dx = v[1] - v[0];
  RawMoments r{0.0, 0.0, 0.0};
  double pf = true_loggamma_pdf(v[0], y, beta);
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double f = true_loggamma_pdf(v[i], y, beta);
    r.mass += 0.5 * (f + pf) * dx;
    r.m1 += 0.5 * (v[i] * f + v[i - 1] * pf) * dx;
    r.m2 += 0.5 * (v[i] * v[i] * f + v[i - 1] * v[i - 1] * pf) * dx;
    pf = f;
  }
  return r;
}

}  // namespace

double quadrature_mean(long long y, double beta, QuadGrid grid) {
  const RawMoments r = raw_moments(y, beta, grid);
  return r.m1 / r.mass;
}

double quadrature_variance(long long y, double beta, QuadGrid grid) {
  const RawMoments r = raw_moments(y, beta, grid);
  const double mean = r.m1 / r.mass;
  return r.m2 / r.mass - mean * mean;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("max_abs_diff: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace hbprm

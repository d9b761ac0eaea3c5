#include "hbprm/kernels.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace hbprm::kernels {

namespace detail {
#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double*, const double*, std::size_t);
void axpy_avx2(double, const double*, double*, std::size_t);
double sum_exp_avx2(const double*, std::size_t);
double sum_exp_shifted_avx2(const double*, const double*, double, std::size_t);
#endif
}  // namespace detail

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend detect_default() {
  return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend> g_backend{detect_default()};

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_exp_scalar(const double* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::exp(v[i]);
  return acc;
}

double sum_exp_shifted_scalar(const double* eta, const double* x, double delta,
                              std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::exp(eta[i] + delta * x[i]);
  return acc;
}

}  // namespace

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_supported())
    throw std::invalid_argument("avx2 backend not supported on this cpu");
  g_backend.store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

double dot(const double* x, const double* y, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::avx2) return detail::dot_avx2(x, y, n);
#endif
  return dot_scalar(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::avx2) {
    detail::axpy_avx2(a, x, y, n);
    return;
  }
#endif
  axpy_scalar(a, x, y, n);
}

double sum_exp(const double* v, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::avx2) return detail::sum_exp_avx2(v, n);
#endif
  return sum_exp_scalar(v, n);
}

double sum_exp_shifted(const double* eta, const double* x, double delta,
                       std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::avx2)
    return detail::sum_exp_shifted_avx2(eta, x, delta, n);
#endif
  return sum_exp_shifted_scalar(eta, x, delta, n);
}

}  // namespace hbprm::kernels

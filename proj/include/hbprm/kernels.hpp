#pragma once

#include <cstddef>

// Low-level numeric loops used by the samplers. Each kernel has a scalar
// reference implementation and, on x86-64 with AVX2/FMA, a vectorized one.
// The active implementation is chosen at runtime and can be forced for
// equivalence testing. Results are deterministic for a fixed backend.

namespace hbprm::kernels {

enum class Backend { scalar, avx2 };

// True when the running CPU supports the avx2 backend.
bool avx2_supported();

Backend active_backend();

// Throws std::invalid_argument when the backend is unavailable.
void set_backend(Backend b);

const char* backend_name(Backend b);

// sum_i x[i] * y[i]
double dot(const double* x, const double* y, std::size_t n);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// sum_i exp(v[i]); overflow yields +inf, like the scalar loop
double sum_exp(const double* v, std::size_t n);

// sum_i exp(eta[i] + delta * x[i]) without materializing the shifted vector
double sum_exp_shifted(const double* eta, const double* x, double delta,
                       std::size_t n);

}  // namespace hbprm::kernels

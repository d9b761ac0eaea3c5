#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace hbprm::kernels::detail {

namespace {

// exp on 4 lanes: Cody-Waite range reduction, degree-13 Taylor on the
// reduced argument, exponent rebuilt through the double bit layout.
// Lanes above 709 return +inf, lanes below -708 return 0 (true value
// there is < 4e-308, so the absolute error of flushing is negligible).
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d hi_cut = _mm256_set1_pd(709.0);
  const __m256d lo_cut = _mm256_set1_pd(-708.0);

  const __m256d over = _mm256_cmp_pd(x, hi_cut, _CMP_GT_OQ);
  const __m256d under = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
  const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo_cut), hi_cut);

  const __m256d n = _mm256_round_pd(
      _mm256_mul_pd(xc, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, xc);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  const double fact[14] = {1.0,
                           1.0,
                           1.0 / 2,
                           1.0 / 6,
                           1.0 / 24,
                           1.0 / 120,
                           1.0 / 720,
                           1.0 / 5040,
                           1.0 / 40320,
                           1.0 / 362880,
                           1.0 / 3628800,
                           1.0 / 39916800,
                           1.0 / 479001600,
                           1.0 / 6227020800.0};
  __m256d p = _mm256_set1_pd(fact[13]);
  for (int k = 12; k >= 0; --k)
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(fact[k]));

  // 2^n for integer n in [-1022, 1023]
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i bits =
      _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  __m256d res = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));

  const __m256d inf = _mm256_set1_pd(HUGE_VAL);
  res = _mm256_blendv_pd(res, inf, over);
  res = _mm256_blendv_pd(res, _mm256_setzero_pd(), under);
  return res;
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

}  // namespace

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yi = _mm256_loadu_pd(y + i);
    yi = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yi);
    _mm256_storeu_pd(y + i, yi);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double sum_exp_avx2(const double* v, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, exp4(_mm256_loadu_pd(v + i)));
  double out = hsum(acc);
  for (; i < n; ++i) out += std::exp(v[i]);
  return out;
}

double sum_exp_shifted_avx2(const double* eta, const double* x, double delta,
                            std::size_t n) {
  const __m256d dv = _mm256_set1_pd(delta);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d arg =
        _mm256_fmadd_pd(dv, _mm256_loadu_pd(x + i), _mm256_loadu_pd(eta + i));
    acc = _mm256_add_pd(acc, exp4(arg));
  }
  double out = hsum(acc);
  for (; i < n; ++i) out += std::exp(eta[i] + delta * x[i]);
  return out;
}

}  // namespace hbprm::kernels::detail

#endif

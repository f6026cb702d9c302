// Compiled with -mavx2 -mfma on x86-64; only reached after avx2::available().
#include <algorithm>
#include <numbers>

#include "tospec/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define TOSPEC_HAVE_AVX2 1
#else
#define TOSPEC_HAVE_AVX2 0
#endif

namespace tospec::kernels::avx2 {

#if TOSPEC_HAVE_AVX2

bool available() noexcept {
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
}

void cardinal_row(const CardinalArgs& a, double* out) {
  const std::size_t n = a.n;
  const bool even = n % 2 == 0;
  const double scale = a.sin_nx / double(n);
  const __m256d sx = _mm256_set1_pd(a.sin_x);
  const __m256d cx = _mm256_set1_pd(a.cos_x);
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d ct = _mm256_loadu_pd(a.cos_tab + k);
    const __m256d st = _mm256_loadu_pd(a.sin_tab + k);
    const __m256d sg = _mm256_loadu_pd(a.sign_tab + k);
    const __m256d s = _mm256_fmsub_pd(sx, ct, _mm256_mul_pd(cx, st));
    __m256d num = _mm256_mul_pd(sg, vs);
    if (even) num = _mm256_mul_pd(num, _mm256_fmadd_pd(cx, ct, _mm256_mul_pd(sx, st)));
    _mm256_storeu_pd(out + k, _mm256_div_pd(num, s));
  }
  for (; k < n; ++k) {
    const double s = a.sin_x * a.cos_tab[k] - a.cos_x * a.sin_tab[k];
    const double c = even ? a.cos_x * a.cos_tab[k] + a.sin_x * a.sin_tab[k] : 1.0;
    out[k] = a.sign_tab[k] * scale * c / s;
  }
}

void cardinal_derivative_row(const CardinalArgs& a, double* out) {
  constexpr double pi = std::numbers::pi;
  const std::size_t n = a.n;
  const bool even = n % 2 == 0;
  const double inv_n = 1.0 / double(n);
  const __m256d sx = _mm256_set1_pd(a.sin_x);
  const __m256d cx = _mm256_set1_pd(a.cos_x);
  const __m256d bn = _mm256_set1_pd(a.cos_nx);
  const __m256d an = _mm256_set1_pd(a.sin_nx * inv_n);
  const __m256d vpi = _mm256_set1_pd(pi);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d ct = _mm256_loadu_pd(a.cos_tab + k);
    const __m256d st = _mm256_loadu_pd(a.sin_tab + k);
    const __m256d sg = _mm256_loadu_pd(a.sign_tab + k);
    const __m256d s = _mm256_fmsub_pd(sx, ct, _mm256_mul_pd(cx, st));
    const __m256d c = _mm256_fmadd_pd(cx, ct, _mm256_mul_pd(sx, st));
    const __m256d inv_s = _mm256_div_pd(one, s);
    const __m256d inv_s2 = _mm256_mul_pd(inv_s, inv_s);
    __m256d v;
    if (even) {
      v = _mm256_fmsub_pd(_mm256_mul_pd(bn, c), inv_s, _mm256_mul_pd(an, inv_s2));
    } else {
      v = _mm256_fmsub_pd(bn, inv_s, _mm256_mul_pd(_mm256_mul_pd(an, c), inv_s2));
    }
    _mm256_storeu_pd(out + k, _mm256_mul_pd(_mm256_mul_pd(sg, vpi), v));
  }
  for (; k < n; ++k) {
    const double s = a.sin_x * a.cos_tab[k] - a.cos_x * a.sin_tab[k];
    const double c = a.cos_x * a.cos_tab[k] + a.sin_x * a.sin_tab[k];
    const double inv_s = 1.0 / s;
    const double v = even ? a.cos_nx * c * inv_s - a.sin_nx * inv_n * inv_s * inv_s
                          : a.cos_nx * inv_s - a.sin_nx * c * inv_n * inv_s * inv_s;
    out[k] = a.sign_tab[k] * pi * v;
  }
}

double lagged_max_sq(const double* re, const double* im, std::size_t n,
                     const double* lag_weight_sq, std::size_t max_lag) {
  double best = 0.0;
  for (std::size_t m = 1; m <= max_lag; ++m) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const __m256d dr = _mm256_sub_pd(_mm256_loadu_pd(re + j), _mm256_loadu_pd(re + j + m));
      const __m256d di = _mm256_sub_pd(_mm256_loadu_pd(im + j), _mm256_loadu_pd(im + j + m));
      acc = _mm256_max_pd(acc, _mm256_fmadd_pd(dr, dr, _mm256_mul_pd(di, di)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double lag_best = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; j < n; ++j) {
      const double dr = re[j] - re[j + m];
      const double di = im[j] - im[j + m];
      lag_best = std::max(lag_best, dr * dr + di * di);
    }
    best = std::max(best, lag_best * lag_weight_sq[m]);
  }
  return best;
}

#else

bool available() noexcept { return false; }
void cardinal_row(const CardinalArgs& a, double* out) { scalar::cardinal_row(a, out); }
void cardinal_derivative_row(const CardinalArgs& a, double* out) {
  scalar::cardinal_derivative_row(a, out);
}
double lagged_max_sq(const double* re, const double* im, std::size_t n,
                     const double* lag_weight_sq, std::size_t max_lag) {
  return scalar::lagged_max_sq(re, im, n, lag_weight_sq, max_lag);
}

#endif

}  // namespace tospec::kernels::avx2

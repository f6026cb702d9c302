#include <algorithm>
#include <numbers>

#include "tospec/kernels.hpp"

namespace tospec::kernels::scalar {

// With t = x - k/N:  sin(pi t) = sin_x c_k - cos_x s_k,  cos(pi t) = cos_x c_k + sin_x s_k,
// sin(pi N t) = (-1)^k sin(pi N x),  cos(pi N t) = (-1)^k cos(pi N x).
//   even N:  S(t) = sin(pi N t) cos(pi t) / (N sin(pi t))
//   odd N:   S(t) = sin(pi N t) / (N sin(pi t))

void cardinal_row(const CardinalArgs& a, double* out) {
  const double inv_n = 1.0 / double(a.n);
  const bool even = a.n % 2 == 0;
  for (std::size_t k = 0; k < a.n; ++k) {
    const double s = a.sin_x * a.cos_tab[k] - a.cos_x * a.sin_tab[k];
    const double c = even ? a.cos_x * a.cos_tab[k] + a.sin_x * a.sin_tab[k] : 1.0;
    out[k] = a.sign_tab[k] * a.sin_nx * c * inv_n / s;
  }
}

void cardinal_derivative_row(const CardinalArgs& a, double* out) {
  constexpr double pi = std::numbers::pi;
  const double inv_n = 1.0 / double(a.n);
  const bool even = a.n % 2 == 0;
  for (std::size_t k = 0; k < a.n; ++k) {
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
    const double w = lag_weight_sq[m];
    double lag_best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double dr = re[j] - re[j + m];
      const double di = im[j] - im[j + m];
      lag_best = std::max(lag_best, dr * dr + di * di);
    }
    best = std::max(best, lag_best * w);
  }
  return best;
}

}  // namespace tospec::kernels::scalar

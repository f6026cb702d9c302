#pragma once

#include <cstddef>

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64, an AVX2+FMA version; the unqualified entry points dispatch once at
// first use based on CPUID (set TOSPEC_SIMD=scalar to force the reference
// path). All variants are pure functions of their arguments.
namespace tospec::kernels {

/// Inputs shared by the cardinal-row kernels for an N-point grid and an
/// evaluation point x. Tables hold cos(pi k/N), sin(pi k/N), (-1)^k.
struct CardinalArgs {
  std::size_t n = 0;
  const double* cos_tab = nullptr;
  const double* sin_tab = nullptr;
  const double* sign_tab = nullptr;
  double sin_nx = 0.0;  // sin(pi N x)
  double cos_nx = 0.0;  // cos(pi N x)
  double sin_x = 0.0;   // sin(pi x)
  double cos_x = 0.0;   // cos(pi x)
};

/// out[k] = S_N(x - k/N) in closed form. Entries whose node lies within half a
/// grid spacing of x lose accuracy and are patched by the caller.
using CardinalRowFn = void (*)(const CardinalArgs&, double* out);

/// out[k] = S_N'(x - k/N) in closed form; same caveat, within 1.5 spacings.
using CardinalDerivativeRowFn = void (*)(const CardinalArgs&, double* out);

/// max over lags m in [1, max_lag] and j in [0, n) of
/// ((re[j]-re[j+m])^2 + (im[j]-im[j+m])^2) * lag_weight_sq[m].
/// re/im hold 2n entries (the sequence repeated twice) so the lag never wraps.
using LaggedMaxFn = double (*)(const double* re, const double* im, std::size_t n,
                               const double* lag_weight_sq, std::size_t max_lag);

namespace scalar {
void cardinal_row(const CardinalArgs& args, double* out);
void cardinal_derivative_row(const CardinalArgs& args, double* out);
double lagged_max_sq(const double* re, const double* im, std::size_t n,
                     const double* lag_weight_sq, std::size_t max_lag);
}  // namespace scalar

namespace avx2 {
/// True when the binary carries the AVX2 variants and the CPU runs them.
bool available() noexcept;
void cardinal_row(const CardinalArgs& args, double* out);
void cardinal_derivative_row(const CardinalArgs& args, double* out);
double lagged_max_sq(const double* re, const double* im, std::size_t n,
                     const double* lag_weight_sq, std::size_t max_lag);
}  // namespace avx2

/// Name of the variant chosen by the dispatcher: "avx2" or "scalar".
const char* active_isa() noexcept;

void cardinal_row(const CardinalArgs& args, double* out);
void cardinal_derivative_row(const CardinalArgs& args, double* out);
double lagged_max_sq(const double* re, const double* im, std::size_t n,
                     const double* lag_weight_sq, std::size_t max_lag);

}  // namespace tospec::kernels

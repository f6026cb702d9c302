#include <cstdlib>
#include <string_view>

#include "tospec/kernels.hpp"

namespace tospec::kernels {

namespace {

struct Table {
  const char* isa;
  CardinalRowFn cardinal_row;
  CardinalDerivativeRowFn cardinal_derivative_row;
  LaggedMaxFn lagged_max_sq;
};

Table select() {
  const char* forced = std::getenv("TOSPEC_SIMD");
  const bool force_scalar = forced != nullptr && std::string_view(forced) == "scalar";
  if (!force_scalar && avx2::available()) {
    return {"avx2", avx2::cardinal_row, avx2::cardinal_derivative_row, avx2::lagged_max_sq};
  }
  return {"scalar", scalar::cardinal_row, scalar::cardinal_derivative_row, scalar::lagged_max_sq};
}

const Table& table() {
  static const Table t = select();
  return t;
}

}  // namespace

const char* active_isa() noexcept { return table().isa; }

void cardinal_row(const CardinalArgs& args, double* out) { table().cardinal_row(args, out); }

void cardinal_derivative_row(const CardinalArgs& args, double* out) {
  table().cardinal_derivative_row(args, out);
}

double lagged_max_sq(const double* re, const double* im, std::size_t n,
                     const double* lag_weight_sq, std::size_t max_lag) {
  return table().lagged_max_sq(re, im, n, lag_weight_sq, max_lag);
}

}  // namespace tospec::kernels

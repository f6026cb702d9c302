#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tospec/dynamics.hpp"
#include "tospec/function_space.hpp"

namespace tospec {

struct TransferMeta {
  ParameterPoint u{0.0};
  int order = 1;
  int grid_size = 0;
  std::string map_name;
  std::string weight_name;
};

/// Collocation matrix acting on grid values: row j is the branch sum of
/// weighted cardinal rows at the order-n preimages of x_j.
struct TransferMatrix {
  Eigen::MatrixXcd entries;
  TransferMeta meta;

  int size() const noexcept { return static_cast<int>(entries.rows()); }
  GridFunction apply(const GridFunction& f) const;
};

/// g^(n)(p) = prod_k g(T^k p) along the stored orbit of a branch.
double weight_cocycle(const WeightFamily& weight, const ParameterPoint& u, const InverseBranch& b);

/// D[g^(n)](p) by the product rule along the orbit.
double weight_cocycle_derivative(const MapFamily& map, const WeightFamily& weight,
                                 const ParameterPoint& u, const InverseBranch& b);

/// L^n f at the grid points by direct branch sums and interpolation.
GridFunction apply_transfer_exact(const MapFamily& map, const WeightFamily& weight,
                                  const ParameterPoint& u, const GridFunction& f, int n = 1);

TransferMatrix assemble_transfer(const MapFamily& map, const WeightFamily& weight,
                                 const ParameterPoint& u, int grid_size, int n = 1);

/// Matrix of phi -> L_u[phi (d_u g . h)/g - phi (g'/g) X_u.h - phi' X_u.h].
TransferMatrix assemble_du_transfer(const MapFamily& map, const WeightFamily& weight,
                                    const ParameterPoint& u, std::span<const double> h,
                                    int grid_size);

struct LYBranchRow {
  std::vector<int> labels;
  double sup_weight = 0.0;             // sup |g^(n)(i^n x)|
  double sup_inverse_derivative = 0.0; // sup |(T^n)'(i^n x)|^{-1}
  double contraction_alpha = 0.0;      // sup (d(i^n x1, i^n x2)/d(x1, x2))^alpha
  double contribution = 0.0;           // sup of the product, summed into s_n_alpha
};

struct LYReport {
  int order = 1;
  double alpha = 0.0;
  double s_n_alpha = 0.0;
  double c_n = 0.0;
  double ess_radius_estimate = 0.0;
  int sample_grid = 0;
  double pair_guard = 0.0;
  std::vector<LYBranchRow> branches;
};

struct LYOptions {
  int sample_grid = 128;
  /// Pairs (x1, x2) are restricted to d(x1, x2) <= pair_guard.
  double pair_guard = 0.25;
  /// Largest admissible number of branch tuples d^n.
  long branch_budget = 4096;
};

LYReport ly_constants(const MapFamily& map, const WeightFamily& weight, const ParameterPoint& u,
                      int n, double alpha, const LYOptions& options = {});

struct LYCheckRow {
  int order = 1;
  double s_n_alpha = 0.0;
  /// Smallest C with both inequalities holding on every probe.
  double c_required = 0.0;
  /// c_required^{1/n}.
  double root_growth = 0.0;
};

struct LYCheckReport {
  double alpha = 0.0;
  std::vector<LYCheckRow> rows;
  /// Sub-exponential growth is checked as C(n) <= growth_base^n with
  /// growth_base = max(1, C(1)).
  double growth_base = 1.0;
  bool subexponential = true;
};

/// Tests ||L^n phi||_{C^{1+a}} <= s_n ||phi||_{C^{1+a}} + C ||phi||_{C^1} and
/// ||L^n phi||_{C^1} <= C ||phi||_{C^1} on a probe suite, one row per report.
LYCheckReport ly_empirical_check(const MapFamily& map, const WeightFamily& weight,
                                 const ParameterPoint& u, std::span<const LYReport> reports,
                                 std::span<const GridFunction> probes);

struct DecompositionResidual {
  double residual = 0.0;        // ||D[L^n phi] - K^n(D phi) - R^(n)(phi)||_inf
  double k_term_sup = 0.0;
  double r_term_sup = 0.0;
  double derivative_sup = 0.0;  // ||D[L^n phi]||_inf
};

DecompositionResidual derivative_decomposition_check(const MapFamily& map,
                                                     const WeightFamily& weight,
                                                     const ParameterPoint& u,
                                                     const GridFunction& phi, int n);

/// Lower bound of ||A||_{C^{r_in} -> C^{r_out}}: max over probes of
/// cr_norm(A f, r_out) / cr_norm(f, r_in).
double operator_norm_holder(const Eigen::MatrixXcd& a, HolderIndex r_in, HolderIndex r_out,
                            std::span<const GridFunction> probes);

/// Constants, low Fourier modes and Weierstrass-type functions of regularity r.
std::vector<GridFunction> standard_probes(int grid_size, double r);

/// Row-major, one row per matrix row, complex entries as re,im pairs.
void write_csv(std::ostream& os, const TransferMatrix& m, int precision = 17);
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m, int precision = 17);
/// Columns n,s_n_alpha,c_n,ess_radius_estimate.
void write_csv(std::ostream& os, std::span<const LYReport> reports, int precision = 17);

}  // namespace tospec

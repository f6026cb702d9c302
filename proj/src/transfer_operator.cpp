#include "tospec/transfer_operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "tospec/circle.hpp"
#include "tospec/csv.hpp"
#include "tospec/errors.hpp"

namespace tospec {

namespace {

double dot_padded(std::span<const double> grad, std::span<const double> h) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(grad.size(), h.size()); ++i) s += grad[i] * h[i];
  return s;
}

TransferMeta make_meta(const MapFamily& map, const WeightFamily& weight, const ParameterPoint& u,
                       int order, int grid_size) {
  return TransferMeta{u, order, grid_size, map.name, weight.name};
}

void require_grid(int grid_size) {
  if (grid_size < 8) throw Error(ErrorKind::InvalidArgument, "grid size must be >= 8");
}

// Displacement of the order-n inverse branch through p when its target moves
// by delta; follows the branch one inverse step at a time.
double continue_branch(const MapFamily& map, const ParameterPoint& u, const InverseBranch& b,
                       double delta) {
  double disp = delta;
  for (auto it = b.orbit.rbegin(); it != b.orbit.rend(); ++it) {
    const double q = *it;
    const double level = map.lift(u, q) + disp;
    const double reach = std::abs(disp);
    const double guess = q + disp / map.d_x(u, q);
    disp = solve_lift(map, u, level, q - reach, q + reach, guess) - q;
  }
  return disp;
}

}  // namespace

GridFunction TransferMatrix::apply(const GridFunction& f) const {
  if (f.size() != size()) throw Error(ErrorKind::InvalidArgument, "grid size mismatch");
  return GridFunction(entries * f.values());
}

double weight_cocycle(const WeightFamily& weight, const ParameterPoint& u, const InverseBranch& b) {
  double g = 1.0;
  for (double x : b.orbit) g *= weight.eval(u, x);
  return g;
}

double weight_cocycle_derivative(const MapFamily& map, const WeightFamily& weight,
                                 const ParameterPoint& u, const InverseBranch& b) {
  // D[prod_k g(T^k p)] = sum_k g'(T^k p) (T^k)'(p) prod_{j != k} g(T^j p)
  double total = 0.0;
  double chain = 1.0;
  for (std::size_t k = 0; k < b.orbit.size(); ++k) {
    double others = 1.0;
    for (std::size_t j = 0; j < b.orbit.size(); ++j) {
      if (j != k) others *= weight.eval(u, b.orbit[j]);
    }
    total += weight.d_x(u, b.orbit[k]) * chain * others;
    chain *= map.d_x(u, b.orbit[k]);
  }
  return total;
}

GridFunction apply_transfer_exact(const MapFamily& map, const WeightFamily& weight,
                                  const ParameterPoint& u, const GridFunction& f, int n) {
  const int size = f.size();
  const CardinalBasis basis(size);
  Eigen::VectorXcd out(size);
  Eigen::RowVectorXd row(size);
  for (int j = 0; j < size; ++j) {
    const auto set = inverse_branches(map, u, f.point(j), n);
    cplx acc = 0.0;
    for (const InverseBranch& b : set.branches) {
      basis.row(b.point, std::span<double>(row.data(), std::size_t(size)));
      acc += weight_cocycle(weight, u, b) * (row.cast<cplx>() * f.values())(0);
    }
    out[j] = acc;
  }
  return GridFunction(std::move(out));
}

TransferMatrix assemble_transfer(const MapFamily& map, const WeightFamily& weight,
                                 const ParameterPoint& u, int grid_size, int n) {
  require_grid(grid_size);
  const CardinalBasis basis(grid_size);
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(grid_size, grid_size);
  Eigen::RowVectorXd row(grid_size);
  for (int j = 0; j < grid_size; ++j) {
    const auto set = inverse_branches(map, u, double(j) / grid_size, n);
    for (const InverseBranch& b : set.branches) {
      basis.row(b.point, std::span<double>(row.data(), std::size_t(grid_size)));
      entries.row(j) += weight_cocycle(weight, u, b) * row;
    }
  }
  return TransferMatrix{entries.cast<cplx>(), make_meta(map, weight, u, n, grid_size)};
}

TransferMatrix assemble_du_transfer(const MapFamily& map, const WeightFamily& weight,
                                    const ParameterPoint& u, std::span<const double> h,
                                    int grid_size) {
  require_grid(grid_size);
  if (h.size() != u.dim()) throw Error(ErrorKind::InvalidArgument, "direction dimension mismatch");
  const CardinalBasis basis(grid_size);
  Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(grid_size, grid_size);
  Eigen::RowVectorXd row(grid_size), drow(grid_size);
  for (int j = 0; j < grid_size; ++j) {
    const auto set = inverse_branches(map, u, double(j) / grid_size, 1);
    for (const InverseBranch& b : set.branches) {
      const double x = b.point;
      const double g = weight.eval(u, x);
      const double x_field = vector_field_x(map, u, x, h);
      const double value_coef = dot_padded(weight.d_u(u, x), h) - weight.d_x(u, x) * x_field;
      basis.row(x, std::span<double>(row.data(), std::size_t(grid_size)));
      basis.derivative_row(x, std::span<double>(drow.data(), std::size_t(grid_size)));
      entries.row(j) += value_coef * row - g * x_field * drow;
    }
  }
  return TransferMatrix{entries.cast<cplx>(), make_meta(map, weight, u, 1, grid_size)};
}

LYReport ly_constants(const MapFamily& map, const WeightFamily& weight, const ParameterPoint& u,
                      int n, double alpha, const LYOptions& options) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha in [0, 1)");
  if (options.sample_grid < 4) throw Error(ErrorKind::InvalidArgument, "sample grid too small");
  double tuples = std::pow(double(map.degree), n);
  if (tuples > double(options.branch_budget)) {
    throw Error(ErrorKind::BranchExplosion, std::to_string(map.degree) + "^" + std::to_string(n) +
                                                " branch tuples exceed the budget");
  }

  const int samples = options.sample_grid;
  const int max_shift = int(std::floor(options.pair_guard * samples + 1e-9));
  std::map<std::vector<int>, LYBranchRow> rows;
  double weight_sum_sup = 0.0;
  double dweight_sum_sup = 0.0;
  std::map<std::vector<int>, double> s0_terms;

  for (int i = 0; i < samples; ++i) {
    const double x1 = double(i) / samples;
    const auto set = inverse_branches(map, u, x1, n);
    double weight_sum = 0.0;
    double dweight_sum = 0.0;
    for (const InverseBranch& b : set.branches) {
      const double gw = std::abs(weight_cocycle(weight, u, b));
      const double inv = 1.0 / std::abs(b.derivative);
      weight_sum += gw;
      dweight_sum += std::abs(weight_cocycle_derivative(map, weight, u, b)) * inv;

      double contraction = 1.0;
      if (alpha > 0.0) {
        double ratio = 0.0;
        for (int k = 1; k <= max_shift; ++k) {
          for (int sign : {-1, 1}) {
            const double delta = sign * double(k) / samples;
            ratio = std::max(ratio, std::abs(continue_branch(map, u, b, delta)) / std::abs(delta));
          }
        }
        contraction = std::pow(ratio, alpha);
      }

      LYBranchRow& row = rows[b.labels];
      row.labels = b.labels;
      row.sup_weight = std::max(row.sup_weight, gw);
      row.sup_inverse_derivative = std::max(row.sup_inverse_derivative, inv);
      row.contraction_alpha = std::max(row.contraction_alpha, contraction);
      row.contribution = std::max(row.contribution, gw * inv * contraction);
      double& s0 = s0_terms[b.labels];
      s0 = std::max(s0, gw * inv);
    }
    weight_sum_sup = std::max(weight_sum_sup, weight_sum);
    dweight_sum_sup = std::max(dweight_sum_sup, dweight_sum);
  }

  LYReport report;
  report.order = n;
  report.alpha = alpha;
  report.sample_grid = samples;
  report.pair_guard = options.pair_guard;
  double s0 = 0.0;
  for (const auto& [labels, value] : s0_terms) s0 += value;
  for (auto& [labels, row] : rows) {
    report.s_n_alpha += row.contribution;
    report.branches.push_back(std::move(row));
  }
  report.c_n = s0 + dweight_sum_sup + weight_sum_sup;
  report.ess_radius_estimate = std::pow(report.s_n_alpha, 1.0 / n);
  return report;
}

LYCheckReport ly_empirical_check(const MapFamily& map, const WeightFamily& weight,
                                 const ParameterPoint& u, std::span<const LYReport> reports,
                                 std::span<const GridFunction> probes) {
  if (probes.empty()) throw Error(ErrorKind::EmptyProbeSet, "LY check needs test functions");
  if (reports.empty()) throw Error(ErrorKind::InvalidArgument, "LY check needs reports");
  LYCheckReport out;
  out.alpha = reports.front().alpha;
  const HolderIndex strong(1.0 + out.alpha);
  const HolderIndex weak(1.0);
  for (const LYReport& rep : reports) {
    if (rep.alpha != out.alpha) throw Error(ErrorKind::InvalidArgument, "mixed alpha in reports");
    double c = 0.0;
    for (const GridFunction& phi : probes) {
      const GridFunction image = apply_transfer_exact(map, weight, u, phi, rep.order);
      const double phi_weak = cr_norm(phi, weak);
      if (!(phi_weak > 0.0)) continue;
      const double phi_strong = cr_norm(phi, strong);
      c = std::max(c, (cr_norm(image, strong) - rep.s_n_alpha * phi_strong) / phi_weak);
      c = std::max(c, cr_norm(image, weak) / phi_weak);
    }
    out.rows.push_back({rep.order, rep.s_n_alpha, c, std::pow(c, 1.0 / rep.order)});
  }
  const auto first = std::min_element(out.rows.begin(), out.rows.end(),
                                      [](const auto& a, const auto& b) { return a.order < b.order; });
  out.growth_base = std::max(1.0, std::pow(first->c_required, 1.0 / first->order));
  for (const LYCheckRow& row : out.rows) {
    if (row.root_growth > out.growth_base * (1.0 + 1e-9)) out.subexponential = false;
  }
  return out;
}

DecompositionResidual derivative_decomposition_check(const MapFamily& map,
                                                     const WeightFamily& weight,
                                                     const ParameterPoint& u,
                                                     const GridFunction& phi, int n) {
  const int size = phi.size();
  const GridFunction lhs = spectral_derivative(apply_transfer_exact(map, weight, u, phi, n));
  const CardinalBasis basis(size);
  DecompositionResidual out;
  for (int j = 0; j < size; ++j) {
    const auto set = inverse_branches(map, u, phi.point(j), n);
    cplx k_term = 0.0;
    cplx r_term = 0.0;
    for (const InverseBranch& b : set.branches) {
      const cplx value = (basis.row(b.point).cast<cplx>() * phi.values())(0);
      const cplx slope = (basis.derivative_row(b.point).cast<cplx>() * phi.values())(0);
      k_term += weight_cocycle(weight, u, b) * slope / b.derivative;
      r_term += value * weight_cocycle_derivative(map, weight, u, b) / b.derivative;
    }
    out.residual = std::max(out.residual, std::abs(lhs[j] - k_term - r_term));
    out.k_term_sup = std::max(out.k_term_sup, std::abs(k_term));
    out.r_term_sup = std::max(out.r_term_sup, std::abs(r_term));
    out.derivative_sup = std::max(out.derivative_sup, std::abs(lhs[j]));
  }
  return out;
}

double operator_norm_holder(const Eigen::MatrixXcd& a, HolderIndex r_in, HolderIndex r_out,
                            std::span<const GridFunction> probes) {
  if (probes.empty()) throw Error(ErrorKind::EmptyProbeSet, "operator norm needs probes");
  double best = 0.0;
  for (const GridFunction& f : probes) {
    if (f.size() != a.cols()) throw Error(ErrorKind::InvalidArgument, "probe size mismatch");
    const double denom = cr_norm(f, r_in);
    if (!(denom > 0.0)) throw Error(ErrorKind::InvalidArgument, "probe with zero norm");
    best = std::max(best, cr_norm(GridFunction(a * f.values()), r_out) / denom);
  }
  return best;
}

std::vector<GridFunction> standard_probes(int grid_size, double r) {
  std::vector<GridFunction> probes;
  probes.push_back(GridFunction::constant(grid_size, 1.0));
  for (int m = 1; m <= 3 && 2 * m < grid_size; ++m) {
    probes.push_back(GridFunction::sample(grid_size, [m](double x) { return cplx(cospi(2.0 * m * x)); }));
    probes.push_back(GridFunction::sample(grid_size, [m](double x) { return cplx(sinpi(2.0 * m * x)); }));
  }
  for (int b : {2, 3}) {
    probes.push_back(weierstrass_test(r, b, grid_size));
    // Sine-phase companion of the same regularity.
    probes.push_back(GridFunction::sample(grid_size, [r, b, grid_size](double x) {
      double v = 0.0;
      for (double freq = 1.0; 2.0 * freq < grid_size; freq *= b) {
        v += std::pow(freq, -r) * sinpi(2.0 * freq * x);
      }
      return cplx(v);
    }));
  }
  return probes;
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m, int precision) {
  std::vector<std::string> header;
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    header.push_back("re_" + std::to_string(k));
    header.push_back("im_" + std::to_string(k));
  }
  csv::write_header(os, header);
  std::vector<double> row(2 * m.cols());
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      row[2 * k] = m(j, k).real();
      row[2 * k + 1] = m(j, k).imag();
    }
    csv::write_row(os, row, precision);
  }
}

void write_csv(std::ostream& os, const TransferMatrix& m, int precision) {
  write_matrix_csv(os, m.entries, precision);
}

void write_csv(std::ostream& os, std::span<const LYReport> reports, int precision) {
  csv::write_header(os, {"n", "s_n_alpha", "c_n", "ess_radius_estimate"});
  for (const LYReport& r : reports) {
    csv::write_row(os, {double(r.order), r.s_n_alpha, r.c_n, r.ess_radius_estimate}, precision);
  }
}

}  // namespace tospec

#include "tospec/response.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "tospec/circle.hpp"
#include "tospec/csv.hpp"
#include "tospec/errors.hpp"
#include "tospec/transfer_operator.hpp"

namespace tospec {

namespace {

std::vector<double> unit_direction(std::span<const double> h, std::size_t dim) {
  if (h.size() != dim) throw Error(ErrorKind::InvalidArgument, "direction dimension mismatch");
  double norm = 0.0;
  for (double v : h) norm += v * v;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "direction must be nonzero");
  std::vector<double> out(h.begin(), h.end());
  for (double& v : out) v /= norm;
  return out;
}

void check_offsets(std::span<const double> offsets) {
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (!(offsets[i] > 0.0) || (i > 0 && !(offsets[i] < offsets[i - 1]))) {
      throw Error(ErrorKind::InvalidArgument, "offsets must be positive and strictly decreasing");
    }
  }
}

// Shared tail of both scans: norms of D(t) = M(u0 + t h) - M(u0).
template <class MatrixAt>
RegularityScan run_scan(const ParameterPoint& base, std::span<const double> h,
                        std::span<const double> offsets, HolderIndex r_in, HolderIndex r_out,
                        std::span<const GridFunction> probes, MatrixAt&& matrix_at,
                        std::vector<cplx>* traces) {
  check_offsets(offsets);
  RegularityScan scan;
  scan.base = base;
  scan.direction = unit_direction(h, base.dim());
  scan.offsets.assign(offsets.begin(), offsets.end());
  scan.gamma_target = r_in.value() - r_out.value();
  const Eigen::MatrixXcd m0 = matrix_at(base);
  if (traces) traces->push_back(m0.trace());
  for (double t : offsets) {
    const Eigen::MatrixXcd mt = matrix_at(base.shifted(scan.direction, t));
    if (traces) traces->push_back(mt.trace());
    scan.norms.push_back(operator_norm_holder(mt - m0, r_in, r_out, probes));
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < scan.norms.size(); ++i) {
    if (scan.norms[i] > 0.0) {
      xs.push_back(scan.offsets[i]);
      ys.push_back(scan.norms[i]);
    }
  }
  if (xs.empty()) {
    scan.exactly_invariant = true;
    scan.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    scan.slope_stderr = std::numeric_limits<double>::quiet_NaN();
    return scan;
  }
  if (xs.size() < 3) {
    throw Error(ErrorKind::DegenerateFit, std::to_string(xs.size()) + " usable offsets, need 3");
  }
  const SlopeFit fit = fit_log_log(xs, ys);
  scan.fitted_slope = fit.slope;
  scan.slope_stderr = fit.stderr_slope;
  return scan;
}

}  // namespace

double resolvent_difference_check(const MapFamily& map, const WeightFamily& weight,
                                  const ParameterPoint& u, const ParameterPoint& v, cplx lambda,
                                  int grid_size) {
  const Eigen::MatrixXcd lu = assemble_transfer(map, weight, u, grid_size).entries;
  const Eigen::MatrixXcd lv = assemble_transfer(map, weight, v, grid_size).entries;
  const Eigen::MatrixXcd ru = resolvent_matrix(lu, lambda);
  const Eigen::MatrixXcd rv = resolvent_matrix(lv, lambda);
  return (ru - rv - ru * (lu - lv) * rv).cwiseAbs().maxCoeff();
}

SlopeFit fit_log_log(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorKind::DegenerateFit, "need two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::DegenerateFit, "abscissae coincide");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = std::log(y[i]) - fit.intercept - fit.slope * std::log(x[i]);
      ssr += r * r;
    }
    fit.stderr_slope = std::sqrt(ssr / double(n - 2) / sxx);
  }
  return fit;
}

RegularityScan holder_exponent_scan(const MapFamily& map, const WeightFamily& weight,
                                    const ParameterPoint& base, std::span<const double> h,
                                    cplx lambda, HolderIndex r_in, HolderIndex r_out,
                                    std::span<const double> offsets,
                                    std::span<const GridFunction> probes) {
  if (probes.empty()) throw Error(ErrorKind::EmptyProbeSet, "scan needs probes");
  const int size = probes.front().size();
  return run_scan(
      base, h, offsets, r_in, r_out, probes,
      [&](const ParameterPoint& u) {
        return resolvent_matrix(assemble_transfer(map, weight, u, size).entries, lambda);
      },
      nullptr);
}

Eigen::MatrixXcd du_resolvent(const MapFamily& map, const WeightFamily& weight,
                              const ParameterPoint& u, std::span<const double> h, cplx lambda,
                              int grid_size) {
  const Eigen::MatrixXcd l = assemble_transfer(map, weight, u, grid_size).entries;
  const Eigen::MatrixXcd dl = assemble_du_transfer(map, weight, u, h, grid_size).entries;
  const Eigen::MatrixXcd r = resolvent_matrix(l, lambda);
  return r * dl * r;
}

Eigen::MatrixXcd du_projector(const MapFamily& map, const WeightFamily& weight,
                              const ParameterPoint& u, std::span<const double> h,
                              const ContourSpec& contour, int grid_size) {
  const Eigen::MatrixXcd l = assemble_transfer(map, weight, u, grid_size).entries;
  const Eigen::MatrixXcd dl = assemble_du_transfer(map, weight, u, h, grid_size).entries;
  const Eigen::VectorXcd spectrum = eigenvalues(l);
  validate_contour(contour, spectrum);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(grid_size, grid_size);
  for (int k = 0; k < contour.nodes; ++k) {
    const double phase = 2.0 * double(k) / contour.nodes;
    const cplx step = contour.radius * cplx(cospi(phase), sinpi(phase));
    const Eigen::MatrixXcd r = Resolvent(l, contour.center + step, spectrum).matrix();
    sum += step * (r * dl * r);
  }
  return sum / double(contour.nodes);
}

RegularityScan projector_holder_scan(const MapFamily& map, const WeightFamily& weight,
                                     const ParameterPoint& base, std::span<const double> h,
                                     const ContourSpec& contour, std::span<const double> offsets,
                                     HolderIndex r_in, HolderIndex r_out,
                                     std::span<const GridFunction> probes) {
  if (probes.empty()) throw Error(ErrorKind::EmptyProbeSet, "scan needs probes");
  const int size = probes.front().size();
  std::vector<cplx> traces;
  RegularityScan scan = run_scan(
      base, h, offsets, r_in, r_out, probes,
      [&](const ParameterPoint& u) {
        return spectral_projector(assemble_transfer(map, weight, u, size).entries, contour);
      },
      &traces);
  scan.traces = std::move(traces);
  return scan;
}

void write_csv(std::ostream& os, const RegularityScan& scan, int precision) {
  csv::write_header(os, {"t", "norm", "log_t", "log_norm"});
  for (std::size_t i = 0; i < scan.offsets.size(); ++i) {
    const double t = scan.offsets[i], v = scan.norms[i];
    csv::write_row(os, {t, v, std::log(t), v > 0.0 ? std::log(v) : -INFINITY}, precision);
  }
  os << "fitted_slope," << csv::format(scan.fitted_slope, precision) << ",gamma_target,"
     << csv::format(scan.gamma_target, precision) << '\n';
}

}  // namespace tospec

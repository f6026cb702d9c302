#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tospec/dynamics.hpp"
#include "tospec/function_space.hpp"
#include "tospec/spectral.hpp"

namespace tospec {

/// max-entry norm of R(l,u) - R(l,v) - R(l,u)(L_u - L_v)R(l,v).
double resolvent_difference_check(const MapFamily& map, const WeightFamily& weight,
                                  const ParameterPoint& u, const ParameterPoint& v, cplx lambda,
                                  int grid_size);

/// Operator-norm differences along u0 + t h for decreasing offsets t.
struct RegularityScan {
  ParameterPoint base{0.0};
  /// Unit direction.
  std::vector<double> direction;
  std::vector<double> offsets;
  /// Probe-suite lower bounds of the C^{r_in} -> C^{r_out} norm.
  std::vector<double> norms;
  double fitted_slope = 0.0;
  double slope_stderr = 0.0;
  double gamma_target = 0.0;
  /// Every difference vanished identically; the slope is then NaN.
  bool exactly_invariant = false;
  /// Projector trace at u0, then at each offset (projector scans only).
  std::vector<cplx> traces;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
};

/// Ordinary least squares of log y against log x.
SlopeFit fit_log_log(std::span<const double> x, std::span<const double> y);

RegularityScan holder_exponent_scan(const MapFamily& map, const WeightFamily& weight,
                                    const ParameterPoint& base, std::span<const double> h,
                                    cplx lambda, HolderIndex r_in, HolderIndex r_out,
                                    std::span<const double> offsets,
                                    std::span<const GridFunction> probes);

/// d/dt R(lambda, u + t h) at t = 0, i.e. R (dL.h) R with R = (lambda - L_u)^{-1}.
Eigen::MatrixXcd du_resolvent(const MapFamily& map, const WeightFamily& weight,
                              const ParameterPoint& u, std::span<const double> h, cplx lambda,
                              int grid_size);

/// Contour quadrature of du_resolvent over a fixed circle.
Eigen::MatrixXcd du_projector(const MapFamily& map, const WeightFamily& weight,
                              const ParameterPoint& u, std::span<const double> h,
                              const ContourSpec& contour, int grid_size);

RegularityScan projector_holder_scan(const MapFamily& map, const WeightFamily& weight,
                                     const ParameterPoint& base, std::span<const double> h,
                                     const ContourSpec& contour, std::span<const double> offsets,
                                     HolderIndex r_in, HolderIndex r_out,
                                     std::span<const GridFunction> probes);

/// Columns t,norm,log_t,log_norm and a footer row fitted_slope,<v>,gamma_target,<v>.
void write_csv(std::ostream& os, const RegularityScan& scan, int precision = 17);

}  // namespace tospec

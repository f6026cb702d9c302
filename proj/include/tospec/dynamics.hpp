#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace tospec {

/// A point of the finite-dimensional parameter space R^p.
class ParameterPoint {
 public:
  ParameterPoint(std::initializer_list<double> coords);
  explicit ParameterPoint(std::vector<double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  /// u + t*h.
  ParameterPoint shifted(std::span<const double> h, double t) const;

  friend bool operator==(const ParameterPoint&, const ParameterPoint&) = default;

 private:
  std::vector<double> coords_;
};

/// Axis-aligned box [lo_i, hi_i] in parameter space.
struct ParameterBox {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const noexcept { return lo.size(); }
  bool contains(const ParameterPoint& u) const;
};

using Callback = std::function<double(const ParameterPoint&, double)>;
using GradientCallback = std::function<std::vector<double>(const ParameterPoint&, double)>;

/// Parameterized degree-d circle map given through its lift T~_u, which must
/// satisfy T~_u(x + 1) = T~_u(x) + d and be strictly increasing.
struct MapFamily {
  std::string name;
  int degree = 2;
  std::size_t param_dim = 1;
  Callback lift;
  Callback d_x;
  Callback d_xx;
  GradientCallback d_u;
  /// Mixed derivative d/du of T'_u(x). Optional; only needed by weights that
  /// depend on T'. When absent it is replaced by a central difference.
  GradientCallback d_xu;

  /// T_u(x) in [0, 1).
  double eval(const ParameterPoint& u, double x) const;
  std::vector<double> mixed_derivative(const ParameterPoint& u, double x) const;
};

/// Positive weight g(u, x) with its spatial derivative and parameter gradient.
struct WeightFamily {
  std::string name;
  Callback eval;
  Callback d_x;
  GradientCallback d_u;
};

/// T~_u(x) = d*x + sum_i u_i sin(2 pi (i+1) x).
MapFamily sine_perturbed_map(int degree = 2, std::size_t param_dim = 1);

/// T~(x) = d*x; ignores its parameter.
MapFamily linear_map(int degree = 2, std::size_t param_dim = 1);

WeightFamily constant_weight(double value);

/// g = 1/|T'_u|, the weight of the density-transport operator.
WeightFamily inverse_derivative_weight(const MapFamily& map);

/// g(u, x) = (scale + sum_i u_slope_i u_i) * exp(sum_m cos_coefficients_m cos(2 pi (m+1) x)).
WeightFamily custom_weight(double scale, std::vector<double> u_slope,
                           std::vector<double> cos_coefficients);

struct NewtonOptions {
  double tolerance = 1e-13;
  int max_iterations = 50;
  /// Required margin in T' >= 1 + expansion_epsilon.
  double expansion_epsilon = 1e-3;
};

/// One order-n preimage of a target point.
struct InverseBranch {
  double point = 0.0;
  /// (T^n)'(point).
  double derivative = 1.0;
  /// Lift-interval index chosen at each of the n inverse steps, starting
  /// from the target.
  std::vector<int> labels;
  /// point, T(point), ..., T^{n-1}(point).
  std::vector<double> orbit;
};

struct InverseBranchSet {
  double target = 0.0;
  int order = 1;
  /// Sorted by increasing point, i.e. by lift-interval index of T^n.
  std::vector<InverseBranch> branches;
};

/// All d^n preimages of y under T_u^n with chain-rule derivatives.
InverseBranchSet inverse_branches(const MapFamily& map, const ParameterPoint& u, double y, int n,
                                  const NewtonOptions& options = {});

/// Solve T~_u(x) = level for the unique x in the monotone lift interval
/// containing the initial guess. Safeguarded Newton with bisection fallback.
double solve_lift(const MapFamily& map, const ParameterPoint& u, double level, double lo, double hi,
                  double guess, const NewtonOptions& options = {});

/// X_u(x).h = (d_u T_u(x) . h) / T'_u(x).
double vector_field_x(const MapFamily& map, const ParameterPoint& u, double x,
                      std::span<const double> h, const NewtonOptions& options = {});

/// min over a sampled (u, x) grid of |T'_u(x)| - 1. Negative means the
/// configuration is not expanding somewhere in the box.
double expansion_margin(const MapFamily& map, const ParameterBox& box, int grid_size);

}  // namespace tospec

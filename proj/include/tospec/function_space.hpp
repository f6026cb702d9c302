#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tospec {

using cplx = std::complex<double>;

/// Periodic function sampled at x_j = j/N, j = 0..N-1. Stands for the
/// band-limited trigonometric interpolant of its samples.
class GridFunction {
 public:
  explicit GridFunction(Eigen::VectorXcd values);

  static GridFunction sample(int n, const std::function<cplx(double)>& f);
  static GridFunction constant(int n, cplx value);

  int size() const noexcept { return static_cast<int>(values_.size()); }
  const Eigen::VectorXcd& values() const noexcept { return values_; }
  std::span<const cplx> span() const noexcept { return {values_.data(), std::size_t(size())}; }
  cplx operator[](int j) const { return values_[j]; }
  double point(int j) const noexcept { return double(j) / size(); }

  double sup_norm() const;
  cplx mean() const;
  bool is_real() const;

 private:
  Eigen::VectorXcd values_;
};

/// Regularity index r = k + s with k in {0, 1}, s in [0, 1).
class HolderIndex {
 public:
  explicit HolderIndex(double r);

  double value() const noexcept { return r_; }
  int integer_part() const noexcept { return r_ >= 1.0 ? 1 : 0; }
  double fractional_part() const noexcept { return r_ - integer_part(); }

 private:
  double r_;
};

/// Cardinal functions S_N(x - k/N) of N-point trigonometric interpolation
/// (the Nyquist mode of even N enters as cos(pi N x)), evaluated row-wise.
class CardinalBasis {
 public:
  explicit CardinalBasis(int n);

  int size() const noexcept { return n_; }

  /// out[k] = S_N(x - k/N); a unit vector when x is a grid node.
  void row(double x, std::span<double> out) const;
  /// out[k] = S_N'(x - k/N): the derivative of the interpolant at x.
  void derivative_row(double x, std::span<double> out) const;

  Eigen::RowVectorXd row(double x) const;
  Eigen::RowVectorXd derivative_row(double x) const;

 private:
  int n_;
  std::vector<double> cos_tab_;
  std::vector<double> sin_tab_;
  std::vector<double> sign_tab_;
};

/// Value at x of the trigonometric interpolant of f.
cplx trig_interpolate(const GridFunction& f, double x);

/// Derivative at x of the trigonometric interpolant of f.
cplx trig_interpolate_derivative(const GridFunction& f, double x);

/// Grid samples of the interpolant's derivative (Nyquist mode dropped).
GridFunction spectral_derivative(const GridFunction& f);

/// Mean-zero periodic antiderivative of the mean-free part of f.
GridFunction spectral_antiderivative(const GridFunction& f);

/// N x N matrix with D * values == spectral_derivative(values).
Eigen::MatrixXd differentiation_matrix(int n);

/// max_{j != k} |f_j - f_k| / d(x_j, x_k)^s by exhaustive pair scan, 0 < s <= 1.
/// Accepts any N >= 2.
double holder_seminorm(std::span<const cplx> values, double s);
double holder_seminorm(const GridFunction& f, double s);

/// Discrete C^r norm: ||f|| + |f|_s for r = s, ||f|| + ||f'|| + |f'|_s for r = 1 + s.
double cr_norm(const GridFunction& f, HolderIndex r);

/// sum_{j=0..J} b^{-r j} cos(2 pi b^j x) sampled on N points, with J the
/// largest level below Nyquist (b^J < N/2) unless `levels` is given.
GridFunction weierstrass_test(double r, int b, int n, std::optional<int> levels = std::nullopt);

/// Columns x,value_re[,value_im]; the imaginary column appears for complex data.
void write_csv(std::ostream& os, const GridFunction& f, int precision = 17);
GridFunction read_grid_function_csv(std::istream& is);

}  // namespace tospec

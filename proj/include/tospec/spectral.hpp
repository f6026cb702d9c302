#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tospec/dynamics.hpp"
#include "tospec/function_space.hpp"
#include "tospec/transfer_operator.hpp"

namespace tospec {

struct SpectralData {
  /// Sorted by decreasing modulus, ties by increasing argument.
  Eigen::VectorXcd eigenvalues;
  cplx lead_value;
  /// Real, positive and of mean 1 when the lead eigenvalue is real and the
  /// eigenvector admits it; otherwise scaled to mean 1.
  GridFunction lead_right;
  /// Left eigenvector with <lead_left, lead_right> = 1.
  GridFunction lead_left;
  /// |lambda_1| - |lambda_2|.
  double gap = 0.0;
};

/// <l, phi> = sum_j conj(l_j) phi_j / N.
cplx pairing(const GridFunction& l, const GridFunction& phi);

/// All eigenvalues of a collocation matrix, sorted as in SpectralData.
///
/// The matrix is rotated into Fourier coordinates and entries below 1e-14 of
/// the largest one are dropped before the QR iteration. Transfer matrices are
/// nearly triangular there, so tiny eigenvalues come out as exact zeros rather
/// than as the O(eps^{1/k}) cloud of a perturbed Jordan block.
Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& a);

SpectralData eigendecompose(const TransferMatrix& l);
SpectralData eigendecompose(const Eigen::MatrixXcd& a);

/// Dense LU factorization of (lambda I - L) with the admissibility checks.
class Resolvent {
 public:
  /// Throws NearSingular when lambda lies within 1e-8 of an eigenvalue.
  Resolvent(const Eigen::MatrixXcd& l, cplx lambda);
  /// Same, with the eigenvalues of l supplied by the caller.
  Resolvent(const Eigen::MatrixXcd& l, cplx lambda, const Eigen::VectorXcd& spectrum);

  cplx lambda() const noexcept { return lambda_; }

  /// x with (lambda I - L) x = f; throws NearSingular if the residual exceeds
  /// 1e-10 ||f||_inf.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& f) const;
  GridFunction apply(const GridFunction& f) const;
  /// (lambda I - L)^{-1}, each column held to the same residual contract.
  Eigen::MatrixXcd matrix() const;

 private:
  Eigen::MatrixXcd shifted_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  cplx lambda_;
};

GridFunction resolvent_apply(const TransferMatrix& l, cplx lambda, const GridFunction& f);
Eigen::MatrixXcd resolvent_matrix(const Eigen::MatrixXcd& l, cplx lambda);

struct ContourSpec {
  cplx center = 0.0;
  double radius = 1.0;
  int nodes = 32;
};

/// Circle around eigenvalue `target` with radius half the distance to the
/// nearest other eigenvalue.
ContourSpec default_contour(const Eigen::VectorXcd& spectrum, Eigen::Index target = 0,
                            int nodes = 32);

/// Throws ContourTooClose if an eigenvalue lies within 0.05 radius of the circle,
/// InvalidArgument for a malformed spec.
void validate_contour(const ContourSpec& contour, const Eigen::VectorXcd& spectrum);

/// Number of eigenvalues strictly inside the contour.
int enclosed_count(const ContourSpec& contour, const Eigen::VectorXcd& spectrum);

/// Trapezoidal rule for (1/2 pi i) of the contour integral of (z - L)^{-1}.
Eigen::MatrixXcd spectral_projector(const Eigen::MatrixXcd& l, const ContourSpec& contour);
Eigen::MatrixXcd spectral_projector(const TransferMatrix& l, const ContourSpec& contour);

struct MatchedEigenvalue {
  cplx coarse;
  cplx fine;
  double discrepancy = 0.0;
  bool reliable = false;
};

struct ReliableSpectrum {
  int coarse_size = 0;
  int fine_size = 0;
  double radius_floor = 0.0;
  /// In the fine-grid sort order.
  std::vector<MatchedEigenvalue> entries;
};

/// Certification threshold on cross-resolution discrepancies.
inline constexpr double kReliableTolerance = 1e-8;

/// Eigenvalues above `radius_floor` at two resolutions, matched greedily by
/// proximity. When `ess_radius` is given the floor must exceed it by 0.05.
ReliableSpectrum reliable_spectrum(const MapFamily& map, const WeightFamily& weight,
                                   const ParameterPoint& u, int coarse_size, int fine_size,
                                   double radius_floor,
                                   std::optional<double> ess_radius = std::nullopt);

struct BoundScanRow {
  ParameterPoint u{0.0};
  /// max over probes of ||R f||_strong / ||f||_strong.
  double norm_strong = 0.0;
  /// max over probes of ||R f||_weak / ||f||_weak.
  double norm_weak = 0.0;
};

struct BoundScan {
  double a = 0.0;
  double b = 0.0;
  std::vector<BoundScanRow> rows;
  /// max / min of norm_strong over the grid.
  double spread_ratio = 1.0;
  /// max - min of norm_strong over the grid.
  double spread = 0.0;
};

/// Smallest a + b over a, b >= 0 with a x_i + b y_i >= z_i for all samples.
std::pair<double, double> fit_bound(std::span<const double> strong_in,
                                    std::span<const double> weak_in,
                                    std::span<const double> strong_out);

/// Fits ||R(z,u) f||_strong <= a ||f||_strong + b ||f||_weak over a parameter
/// grid and a probe suite; NearSingular names the offending u.
BoundScan uniform_bound_scan(const MapFamily& map, const WeightFamily& weight,
                             std::span<const ParameterPoint> u_grid, cplx z, HolderIndex r_strong,
                             HolderIndex r_weak, std::span<const GridFunction> probes);

/// Columns index,re,im,modulus.
void write_csv(std::ostream& os, const SpectralData& data, int precision = 17);
void write_eigenvalues_csv(std::ostream& os, const Eigen::VectorXcd& values, int precision = 17);
/// Columns index,coarse_re,coarse_im,fine_re,fine_im,discrepancy,reliable.
void write_csv(std::ostream& os, const ReliableSpectrum& data, int precision = 17);
/// Columns u_0..u_{p-1},norm_strong,norm_weak.
void write_csv(std::ostream& os, const BoundScan& scan, int precision = 17);

}  // namespace tospec

#include "tospec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <limits>
#include <sstream>
#include <tuple>

#include <lapacke.h>

#include "tospec/circle.hpp"
#include "tospec/csv.hpp"
#include "tospec/errors.hpp"

namespace tospec {

namespace {

constexpr double kChop = 1e-14;
constexpr double kSingularDistance = 1e-8;
constexpr double kResidualTolerance = 1e-10;

// F maps grid values to Fourier coefficients, c_m = (1/N) sum_j f_j e^{-2 pi i m j/N};
// inverse is its conjugate transpose times N.
Eigen::MatrixXcd dft_matrix(Eigen::Index n) {
  Eigen::MatrixXcd f(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double phase = -2.0 * double((m * j) % n) / double(n);
      f(m, j) = cplx(cospi(phase), sinpi(phase)) / double(n);
    }
  }
  return f;
}

struct Eig {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd right;  // columns in value coordinates
  Eigen::MatrixXcd left;   // columns w with w^H L = lambda w^H
};

Eig modal_eig(const Eigen::MatrixXcd& a, bool vectors) {
  const Eigen::Index n = a.rows();
  if (n != a.cols()) throw Error(ErrorKind::InvalidArgument, "matrix must be square");
  if (!a.allFinite()) throw Error(ErrorKind::InvalidArgument, "matrix not finite");
  const Eigen::MatrixXcd f = dft_matrix(n);
  const Eigen::MatrixXcd f_inv = f.adjoint() * double(n);
  Eigen::MatrixXcd modal = f * a * f_inv;
  const double scale = modal.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < modal.size(); ++i) {
    cplx& z = modal.data()[i];
    z = cplx(std::abs(z.real()) < kChop * scale ? 0.0 : z.real(),
             std::abs(z.imag()) < kChop * scale ? 0.0 : z.imag());
  }
  Eig out;
  out.values.resize(n);
  Eigen::MatrixXcd vl(n, n), vr(n, n);
  const char job = vectors ? 'V' : 'N';
  const int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, job, job, int(n), reinterpret_cast<lapack_complex_double*>(modal.data()),
      int(n), reinterpret_cast<lapack_complex_double*>(out.values.data()),
      reinterpret_cast<lapack_complex_double*>(vl.data()), int(n),
      reinterpret_cast<lapack_complex_double*>(vr.data()), int(n));
  if (info != 0) {
    throw Error(ErrorKind::InvalidArgument, "eigenvalue iteration failed (info " +
                                                std::to_string(info) + ")");
  }
  if (vectors) {
    out.right = f_inv * vr;
    out.left = f.adjoint() * vl;
  }
  return out;
}

// Decreasing modulus, then increasing argument; moduli equal to 1e-11 tie.
std::vector<Eigen::Index> sorted_order(const Eigen::VectorXcd& values) {
  std::vector<Eigen::Index> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](Eigen::Index i) { return std::llround(std::abs(values[i]) * 1e11); };
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    const auto ki = key(i), kj = key(j);
    if (ki != kj) return ki > kj;
    return std::arg(values[i]) < std::arg(values[j]);
  });
  return order;
}

double min_distance(const Eigen::VectorXcd& spectrum, cplx z) {
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) d = std::min(d, std::abs(spectrum[i] - z));
  return d;
}

std::string complex_text(cplx z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

std::string point_text(const ParameterPoint& u) {
  std::string s = "u=(";
  for (std::size_t i = 0; i < u.dim(); ++i) s += (i ? "," : "") + csv::format(u[i], 6);
  return s + ")";
}

}  // namespace

cplx pairing(const GridFunction& l, const GridFunction& phi) {
  if (l.size() != phi.size()) throw Error(ErrorKind::InvalidArgument, "grid size mismatch");
  return l.values().dot(phi.values()) / double(l.size());
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& a) {
  const Eig e = modal_eig(a, false);
  const auto order = sorted_order(e.values);
  Eigen::VectorXcd out(e.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[Eigen::Index(i)] = e.values[order[i]];
  return out;
}

SpectralData eigendecompose(const Eigen::MatrixXcd& a) {
  const Eig e = modal_eig(a, true);
  const auto order = sorted_order(e.values);
  Eigen::VectorXcd values(e.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) values[Eigen::Index(i)] = e.values[order[i]];

  const double gap = values.size() > 1 ? std::abs(values[0]) - std::abs(values[1])
                                       : std::abs(values[0]);
  if (gap < 1e-12) {
    throw Error(ErrorKind::DegenerateLead,
                "lead eigenvalue not simple in modulus (gap " + csv::format(gap, 3) + ")");
  }

  // The left vector belongs to the same eigenvalue; pick the zgeev column
  // whose eigenvalue is closest, which is the same index.
  Eigen::VectorXcd right = e.right.col(order[0]);
  Eigen::VectorXcd left = e.left.col(order[0]);

  const cplx mean = right.mean();
  if (std::abs(mean) > 1e-8 * right.cwiseAbs().maxCoeff()) {
    right /= mean;
  } else {
    Eigen::Index k = 0;
    right.cwiseAbs().maxCoeff(&k);
    right /= right[k];
  }
  const bool real_lead = std::abs(values[0].imag()) <= 1e-12 * std::abs(values[0]);
  if (real_lead && right.imag().cwiseAbs().maxCoeff() <= 1e-9 * right.cwiseAbs().maxCoeff()) {
    right = right.real().cast<cplx>();
  }
  const cplx p = left.dot(right) / double(right.size());
  left /= std::conj(p);
  if (real_lead && left.imag().cwiseAbs().maxCoeff() <= 1e-9 * left.cwiseAbs().maxCoeff()) {
    left = left.real().cast<cplx>();
  }

  return SpectralData{values, values[0], GridFunction(std::move(right)),
                      GridFunction(std::move(left)), gap};
}

SpectralData eigendecompose(const TransferMatrix& l) { return eigendecompose(l.entries); }

Resolvent::Resolvent(const Eigen::MatrixXcd& l, cplx lambda)
    : Resolvent(l, lambda, eigenvalues(l)) {}

Resolvent::Resolvent(const Eigen::MatrixXcd& l, cplx lambda, const Eigen::VectorXcd& spectrum)
    : lambda_(lambda) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) {
    throw Error(ErrorKind::InvalidArgument, "lambda not finite");
  }
  const double d = min_distance(spectrum, lambda);
  if (d <= kSingularDistance) {
    throw Error(ErrorKind::NearSingular, "lambda=" + complex_text(lambda) +
                                             " within " + csv::format(d, 3) + " of the spectrum");
  }
  shifted_ = lambda * Eigen::MatrixXcd::Identity(l.rows(), l.cols()) - l;
  lu_.compute(shifted_);
}

Eigen::VectorXcd Resolvent::solve(const Eigen::VectorXcd& f) const {
  Eigen::VectorXcd x = lu_.solve(f);
  const double scale = f.cwiseAbs().maxCoeff();
  const double residual = (shifted_ * x - f).cwiseAbs().maxCoeff();
  if (!x.allFinite() || residual > kResidualTolerance * scale) {
    throw Error(ErrorKind::NearSingular, "resolvent residual " + csv::format(residual, 3) +
                                             " at lambda=" + complex_text(lambda_));
  }
  return x;
}

GridFunction Resolvent::apply(const GridFunction& f) const { return GridFunction(solve(f.values())); }

Eigen::MatrixXcd Resolvent::matrix() const {
  const Eigen::Index n = shifted_.rows();
  Eigen::MatrixXcd r = lu_.solve(Eigen::MatrixXcd::Identity(n, n));
  const Eigen::MatrixXcd residual = shifted_ * r - Eigen::MatrixXcd::Identity(n, n);
  const double worst = residual.cwiseAbs().colwise().maxCoeff().maxCoeff();
  if (!r.allFinite() || worst > kResidualTolerance) {
    throw Error(ErrorKind::NearSingular, "resolvent residual " + csv::format(worst, 3) +
                                             " at lambda=" + complex_text(lambda_));
  }
  return r;
}

GridFunction resolvent_apply(const TransferMatrix& l, cplx lambda, const GridFunction& f) {
  return Resolvent(l.entries, lambda).apply(f);
}

Eigen::MatrixXcd resolvent_matrix(const Eigen::MatrixXcd& l, cplx lambda) {
  return Resolvent(l, lambda).matrix();
}

ContourSpec default_contour(const Eigen::VectorXcd& spectrum, Eigen::Index target, int nodes) {
  if (target < 0 || target >= spectrum.size()) {
    throw Error(ErrorKind::InvalidArgument, "target eigenvalue index out of range");
  }
  const cplx c = spectrum[target];
  double nearest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (i != target) nearest = std::min(nearest, std::abs(spectrum[i] - c));
  }
  if (!std::isfinite(nearest)) nearest = 1.0;
  if (nearest <= 0.0) throw Error(ErrorKind::ContourTooClose, "target eigenvalue is repeated");
  return ContourSpec{c, 0.5 * nearest, nodes};
}

void validate_contour(const ContourSpec& contour, const Eigen::VectorXcd& spectrum) {
  if (!(contour.radius > 0.0) || contour.nodes < 8) {
    throw Error(ErrorKind::InvalidArgument, "contour needs radius > 0 and at least 8 nodes");
  }
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    const double gap = std::abs(std::abs(spectrum[i] - contour.center) - contour.radius);
    if (gap < 0.05 * contour.radius) {
      throw Error(ErrorKind::ContourTooClose,
                  "eigenvalue " + complex_text(spectrum[i]) + " lies " + csv::format(gap, 3) +
                      " from the contour");
    }
  }
}

int enclosed_count(const ContourSpec& contour, const Eigen::VectorXcd& spectrum) {
  int count = 0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (std::abs(spectrum[i] - contour.center) < contour.radius) ++count;
  }
  return count;
}

Eigen::MatrixXcd spectral_projector(const Eigen::MatrixXcd& l, const ContourSpec& contour) {
  const Eigen::VectorXcd spectrum = eigenvalues(l);
  validate_contour(contour, spectrum);
  const Eigen::Index n = l.rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < contour.nodes; ++k) {
    const double phase = 2.0 * double(k) / contour.nodes;
    const cplx step = contour.radius * cplx(cospi(phase), sinpi(phase));
    sum += step * Resolvent(l, contour.center + step, spectrum).matrix();
  }
  return sum / double(contour.nodes);
}

Eigen::MatrixXcd spectral_projector(const TransferMatrix& l, const ContourSpec& contour) {
  return spectral_projector(l.entries, contour);
}

ReliableSpectrum reliable_spectrum(const MapFamily& map, const WeightFamily& weight,
                                   const ParameterPoint& u, int coarse_size, int fine_size,
                                   double radius_floor, std::optional<double> ess_radius) {
  if (fine_size < 2 * coarse_size) {
    throw Error(ErrorKind::InvalidArgument, "fine grid must be at least twice the coarse grid");
  }
  if (ess_radius && radius_floor < *ess_radius + 0.05) {
    throw Error(ErrorKind::InvalidArgument,
                "radius floor must exceed the essential radius estimate by 0.05");
  }
  auto above = [&](int size) {
    const Eigen::VectorXcd all = eigenvalues(assemble_transfer(map, weight, u, size).entries);
    std::vector<cplx> kept;
    for (Eigen::Index i = 0; i < all.size(); ++i) {
      if (std::abs(all[i]) > radius_floor) kept.push_back(all[i]);
    }
    return kept;
  };
  const auto coarse = above(coarse_size);
  const auto fine = above(fine_size);
  if (coarse.size() != fine.size()) {
    throw Error(ErrorKind::MatchFailure,
                std::to_string(coarse.size()) + " eigenvalues above the floor at N=" +
                    std::to_string(coarse_size) + " but " + std::to_string(fine.size()) +
                    " at N=" + std::to_string(fine_size));
  }
  ReliableSpectrum out{coarse_size, fine_size, radius_floor, {}};
  std::vector<bool> used(coarse.size(), false);
  for (const cplx f : fine) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      if (!used[i] && std::abs(coarse[i] - f) < best_d) {
        best_d = std::abs(coarse[i] - f);
        best = i;
      }
    }
    used[best] = true;
    out.entries.push_back({coarse[best], f, best_d, best_d < kReliableTolerance});
  }
  return out;
}

std::pair<double, double> fit_bound(std::span<const double> strong_in,
                                    std::span<const double> weak_in,
                                    std::span<const double> strong_out) {
  const std::size_t m = strong_in.size();
  if (m == 0 || weak_in.size() != m || strong_out.size() != m) {
    throw Error(ErrorKind::InvalidArgument, "bound fit needs matching nonempty samples");
  }
  auto feasible = [&](double a, double b) {
    if (a < 0.0 || b < 0.0) return false;
    for (std::size_t i = 0; i < m; ++i) {
      if (a * strong_in[i] + b * weak_in[i] < strong_out[i] * (1.0 - 1e-12)) return false;
    }
    return true;
  };
  // The optimum of this two-variable LP sits at a vertex: an axis point or
  // the intersection of two active constraints.
  std::vector<std::pair<double, double>> candidates;
  double a_only = 0.0, b_only = 0.0;
  bool b_axis_ok = true;
  for (std::size_t i = 0; i < m; ++i) {
    a_only = std::max(a_only, strong_out[i] / strong_in[i]);
    if (weak_in[i] > 0.0) {
      b_only = std::max(b_only, strong_out[i] / weak_in[i]);
    } else if (strong_out[i] > 0.0) {
      b_axis_ok = false;
    }
  }
  candidates.emplace_back(a_only, 0.0);
  if (b_axis_ok) candidates.emplace_back(0.0, b_only);
  for (std::size_t i = 0; i < m; ++i) {
    // Constraint i alone on an axis.
    candidates.emplace_back(strong_out[i] / strong_in[i], 0.0);
    if (weak_in[i] > 0.0) candidates.emplace_back(0.0, strong_out[i] / weak_in[i]);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double det = strong_in[i] * weak_in[j] - strong_in[j] * weak_in[i];
      if (std::abs(det) < 1e-14 * strong_in[i] * weak_in[j]) continue;
      const double a = (strong_out[i] * weak_in[j] - strong_out[j] * weak_in[i]) / det;
      const double b = (strong_in[i] * strong_out[j] - strong_in[j] * strong_out[i]) / det;
      candidates.emplace_back(a, b);
    }
  }
  std::pair<double, double> best{a_only, 0.0};
  for (const auto& [a, b] : candidates) {
    if (feasible(a, b) && a + b < best.first + best.second) best = {a, b};
  }
  return best;
}

BoundScan uniform_bound_scan(const MapFamily& map, const WeightFamily& weight,
                             std::span<const ParameterPoint> u_grid, cplx z, HolderIndex r_strong,
                             HolderIndex r_weak, std::span<const GridFunction> probes) {
  if (probes.empty()) throw Error(ErrorKind::EmptyProbeSet, "bound scan needs probes");
  if (u_grid.empty()) throw Error(ErrorKind::InvalidArgument, "bound scan needs parameters");
  const int size = probes.front().size();
  std::vector<double> strong_in, weak_in, strong_out;
  BoundScan scan;
  for (const ParameterPoint& u : u_grid) {
    const TransferMatrix l = assemble_transfer(map, weight, u, size);
    Eigen::MatrixXcd r;
    try {
      r = resolvent_matrix(l.entries, z);
    } catch (const Error& e) {
      throw Error(ErrorKind::NearSingular, point_text(u) + ": " + e.what());
    }
    BoundScanRow row{u, 0.0, 0.0};
    for (const GridFunction& f : probes) {
      if (f.size() != size) throw Error(ErrorKind::InvalidArgument, "probe size mismatch");
      const GridFunction rf(r * f.values());
      const double fs = cr_norm(f, r_strong), fw = cr_norm(f, r_weak);
      const double rs = cr_norm(rf, r_strong), rw = cr_norm(rf, r_weak);
      strong_in.push_back(fs);
      weak_in.push_back(fw);
      strong_out.push_back(rs);
      row.norm_strong = std::max(row.norm_strong, rs / fs);
      row.norm_weak = std::max(row.norm_weak, rw / fw);
    }
    scan.rows.push_back(std::move(row));
  }
  std::tie(scan.a, scan.b) = fit_bound(strong_in, weak_in, strong_out);
  const auto [lo, hi] = std::minmax_element(
      scan.rows.begin(), scan.rows.end(),
      [](const auto& x, const auto& y) { return x.norm_strong < y.norm_strong; });
  scan.spread_ratio = hi->norm_strong / lo->norm_strong;
  scan.spread = hi->norm_strong - lo->norm_strong;
  return scan;
}

void write_eigenvalues_csv(std::ostream& os, const Eigen::VectorXcd& values, int precision) {
  csv::write_header(os, {"index", "re", "im", "modulus"});
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    csv::write_row(os, {double(i), values[i].real(), values[i].imag(), std::abs(values[i])},
                   precision);
  }
}

void write_csv(std::ostream& os, const SpectralData& data, int precision) {
  write_eigenvalues_csv(os, data.eigenvalues, precision);
}

void write_csv(std::ostream& os, const ReliableSpectrum& data, int precision) {
  csv::write_header(
      os, {"index", "coarse_re", "coarse_im", "fine_re", "fine_im", "discrepancy", "reliable"});
  for (std::size_t i = 0; i < data.entries.size(); ++i) {
    const auto& e = data.entries[i];
    csv::write_row(os,
                   {double(i), e.coarse.real(), e.coarse.imag(), e.fine.real(), e.fine.imag(),
                    e.discrepancy, e.reliable ? 1.0 : 0.0},
                   precision);
  }
}

void write_csv(std::ostream& os, const BoundScan& scan, int precision) {
  std::vector<std::string> header;
  const std::size_t dim = scan.rows.empty() ? 0 : scan.rows.front().u.dim();
  for (std::size_t i = 0; i < dim; ++i) header.push_back("u_" + std::to_string(i));
  header.push_back("norm_strong");
  header.push_back("norm_weak");
  csv::write_header(os, header);
  for (const auto& row : scan.rows) {
    std::vector<double> values(row.u.coords().begin(), row.u.coords().end());
    values.push_back(row.norm_strong);
    values.push_back(row.norm_weak);
    csv::write_row(os, values, precision);
  }
}

}  // namespace tospec

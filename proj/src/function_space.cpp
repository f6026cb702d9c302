#include "tospec/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include <unsupported/Eigen/FFT>

#include "tospec/circle.hpp"
#include "tospec/csv.hpp"
#include "tospec/errors.hpp"
#include "tospec/kernels.hpp"

namespace tospec {

namespace {

constexpr double kPi = std::numbers::pi;

// Signed frequency of FFT slot m.
int signed_mode(int m, int n) { return m <= n / 2 ? m : m - n; }

// S_N(t) directly from its closed form; accurate for any t in [-1/2, 1/2].
double cardinal_direct(double t, int n) {
  if (t == 0.0) return 1.0;
  const double num = sinpi(double(n) * t);
  return n % 2 == 0 ? num * cospi(t) / (double(n) * sinpi(t)) : num / (double(n) * sinpi(t));
}

// S_N'(t) as a mode sum, free of cancellation near t = 0.
double cardinal_derivative_modes(double t, int n) {
  double acc = 0.0;
  const int top = n % 2 == 0 ? n / 2 - 1 : (n - 1) / 2;
  for (int m = 1; m <= top; ++m) acc += 2.0 * m * sinpi(2.0 * m * t);
  if (n % 2 == 0) acc += 0.5 * n * sinpi(double(n) * t);
  return -2.0 * kPi * acc / double(n);
}

// Differentiation-matrix entry for node offset q = j - k (q != 0 mod n).
double node_derivative(int q, int n) {
  const double t = double(q) / n;
  const double sign = (q % 2 == 0) ? 1.0 : -1.0;
  return n % 2 == 0 ? kPi * sign * cospi(t) / sinpi(t) : kPi * sign / sinpi(t);
}

}  // namespace

// ---------------------------------------------------------------------------
// GridFunction

GridFunction::GridFunction(Eigen::VectorXcd values) : values_(std::move(values)) {
  if (values_.size() < 8) throw Error(ErrorKind::InvalidArgument, "grid functions need N >= 8");
  if (!values_.allFinite()) throw Error(ErrorKind::InvalidArgument, "grid function not finite");
}

GridFunction GridFunction::sample(int n, const std::function<cplx(double)>& f) {
  Eigen::VectorXcd v(n);
  for (int j = 0; j < n; ++j) v[j] = f(double(j) / n);
  return GridFunction(std::move(v));
}

GridFunction GridFunction::constant(int n, cplx value) {
  return GridFunction(Eigen::VectorXcd::Constant(n, value));
}

double GridFunction::sup_norm() const { return values_.cwiseAbs().maxCoeff(); }

cplx GridFunction::mean() const { return values_.mean(); }

bool GridFunction::is_real() const { return values_.imag().isZero(0.0); }

// ---------------------------------------------------------------------------
// HolderIndex

HolderIndex::HolderIndex(double r) : r_(r) {
  if (!(r >= 0.0 && r < 2.0)) {
    throw Error(ErrorKind::InvalidArgument, "Holder index must lie in [0, 2)");
  }
}

// ---------------------------------------------------------------------------
// CardinalBasis

CardinalBasis::CardinalBasis(int n) : n_(n), cos_tab_(n), sin_tab_(n), sign_tab_(n) {
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "cardinal basis needs N >= 3");
  for (int k = 0; k < n; ++k) {
    cos_tab_[k] = cospi(double(k) / n);
    sin_tab_[k] = sinpi(double(k) / n);
    sign_tab_[k] = k % 2 == 0 ? 1.0 : -1.0;
  }
}

void CardinalBasis::row(double x, std::span<double> out) const {
  x = wrap_unit(x);
  const double scaled = x * n_;
  const long k0 = std::lround(scaled);
  const int nearest = int(((k0 % n_) + n_) % n_);
  if (std::abs(scaled - double(k0)) <= 4.0 * std::numeric_limits<double>::epsilon() * n_) {
    std::fill(out.begin(), out.end(), 0.0);
    out[nearest] = 1.0;
    return;
  }
  kernels::CardinalArgs args{std::size_t(n_), cos_tab_.data(), sin_tab_.data(), sign_tab_.data(),
                             sinpi(scaled), cospi(scaled), sinpi(x), cospi(x)};
  kernels::cardinal_row(args, out.data());
  out[nearest] = cardinal_direct(x - double(k0) / n_, n_);
}

void CardinalBasis::derivative_row(double x, std::span<double> out) const {
  x = wrap_unit(x);
  const double scaled = x * n_;
  const long k0 = std::lround(scaled);
  if (std::abs(scaled - double(k0)) <= 4.0 * std::numeric_limits<double>::epsilon() * n_) {
    const int j = int(((k0 % n_) + n_) % n_);
    for (int k = 0; k < n_; ++k) out[k] = k == j ? 0.0 : node_derivative(j - k, n_);
    return;
  }
  kernels::CardinalArgs args{std::size_t(n_), cos_tab_.data(), sin_tab_.data(), sign_tab_.data(),
                             sinpi(scaled), cospi(scaled), sinpi(x), cospi(x)};
  kernels::cardinal_derivative_row(args, out.data());
  for (long k = k0 - 1; k <= k0 + 1; ++k) {
    const int idx = int(((k % n_) + n_) % n_);
    out[idx] = cardinal_derivative_modes(x - double(k) / n_, n_);
  }
}

Eigen::RowVectorXd CardinalBasis::row(double x) const {
  Eigen::RowVectorXd r(n_);
  row(x, std::span<double>(r.data(), std::size_t(n_)));
  return r;
}

Eigen::RowVectorXd CardinalBasis::derivative_row(double x) const {
  Eigen::RowVectorXd r(n_);
  derivative_row(x, std::span<double>(r.data(), std::size_t(n_)));
  return r;
}

// ---------------------------------------------------------------------------
// Interpolation and differentiation

cplx trig_interpolate(const GridFunction& f, double x) {
  const CardinalBasis basis(f.size());
  return basis.row(x).cast<cplx>() * f.values();
}

cplx trig_interpolate_derivative(const GridFunction& f, double x) {
  const CardinalBasis basis(f.size());
  return basis.derivative_row(x).cast<cplx>() * f.values();
}

namespace {

template <class Multiplier>
GridFunction spectral_transform(const GridFunction& f, Multiplier&& mult) {
  const int n = f.size();
  Eigen::FFT<double> fft;
  std::vector<cplx> in(f.values().data(), f.values().data() + n);
  std::vector<cplx> coeffs;
  fft.fwd(coeffs, in);
  for (int m = 0; m < n; ++m) {
    const bool nyquist = n % 2 == 0 && m == n / 2;
    coeffs[m] = nyquist ? cplx(0.0) : mult(signed_mode(m, n)) * coeffs[m];
  }
  std::vector<cplx> out;
  fft.inv(out, coeffs);
  return GridFunction(Eigen::Map<Eigen::VectorXcd>(out.data(), n));
}

}  // namespace

GridFunction spectral_derivative(const GridFunction& f) {
  return spectral_transform(f, [](int m) { return cplx(0.0, 2.0 * kPi * m); });
}

GridFunction spectral_antiderivative(const GridFunction& f) {
  return spectral_transform(
      f, [](int m) { return m == 0 ? cplx(0.0) : 1.0 / cplx(0.0, 2.0 * kPi * m); });
}

Eigen::MatrixXd differentiation_matrix(int n) {
  Eigen::MatrixXd d(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) d(j, k) = j == k ? 0.0 : node_derivative(j - k, n);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Norms

double holder_seminorm(std::span<const cplx> values, double s) {
  if (!(s > 0.0 && s <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "Holder exponent must lie in (0, 1]");
  }
  const std::size_t n = values.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "seminorm needs at least two points");
  std::vector<double> re(2 * n), im(2 * n);
  for (std::size_t j = 0; j < 2 * n; ++j) {
    re[j] = values[j % n].real();
    im[j] = values[j % n].imag();
  }
  const std::size_t max_lag = n / 2;
  std::vector<double> w2(max_lag + 1, 0.0);
  for (std::size_t m = 1; m <= max_lag; ++m) {
    const double dist = double(std::min(m, n - m)) / double(n);
    w2[m] = std::pow(dist, -2.0 * s);
  }
  return std::sqrt(kernels::lagged_max_sq(re.data(), im.data(), n, w2.data(), max_lag));
}

double holder_seminorm(const GridFunction& f, double s) { return holder_seminorm(f.span(), s); }

double cr_norm(const GridFunction& f, HolderIndex r) {
  const double s = r.fractional_part();
  if (r.integer_part() == 0) {
    return f.sup_norm() + (s > 0.0 ? holder_seminorm(f, s) : 0.0);
  }
  const GridFunction df = spectral_derivative(f);
  return f.sup_norm() + df.sup_norm() + (s > 0.0 ? holder_seminorm(df, s) : 0.0);
}

GridFunction weierstrass_test(double r, int b, int n, std::optional<int> levels) {
  if (b < 2) throw Error(ErrorKind::InvalidArgument, "Weierstrass base must be >= 2");
  if (n < 8) throw Error(ErrorKind::InvalidArgument, "grid functions need N >= 8");
  int top = 0;
  for (long p = b; 2 * p < n; p *= b) ++top;
  if (levels) {
    long p = 1;
    for (int j = 0; j < *levels; ++j) p *= b;
    if (*levels < 0 || 2 * p >= n) {
      throw Error(ErrorKind::InvalidArgument, "Weierstrass modes must stay below Nyquist");
    }
    top = *levels;
  }
  return GridFunction::sample(n, [&](double x) {
    double v = 0.0;
    double freq = 1.0;
    for (int j = 0; j <= top; ++j, freq *= b) v += std::pow(freq, -r) * cospi(2.0 * freq * x);
    return cplx(v);
  });
}

// ---------------------------------------------------------------------------
// CSV

void write_csv(std::ostream& os, const GridFunction& f, int precision) {
  const bool complex_data = !f.is_real();
  csv::write_header(os, complex_data ? std::vector<std::string>{"x", "value_re", "value_im"}
                                     : std::vector<std::string>{"x", "value_re"});
  for (int j = 0; j < f.size(); ++j) {
    std::vector<double> row{f.point(j), f[j].real()};
    if (complex_data) row.push_back(f[j].imag());
    csv::write_row(os, row, precision);
  }
}

GridFunction read_grid_function_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::InvalidArgument, "empty grid function CSV");
  const auto header = csv::split(line);
  if (header.size() < 2 || header[0] != "x" || header[1] != "value_re") {
    throw Error(ErrorKind::InvalidArgument, "unexpected grid function CSV header");
  }
  const bool complex_data = header.size() >= 3 && header[2] == "value_im";
  std::vector<cplx> values;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = csv::split(line);
    if (fields.size() < (complex_data ? 3u : 2u)) {
      throw Error(ErrorKind::InvalidArgument, "short grid function CSV row");
    }
    values.emplace_back(std::stod(fields[1]), complex_data ? std::stod(fields[2]) : 0.0);
  }
  return GridFunction(Eigen::Map<Eigen::VectorXcd>(values.data(), Eigen::Index(values.size())));
}

}  // namespace tospec

#pragma once

// Reference computations used as test oracles. Written independently of the
// library: plain loops, explicit DFT sums and bisection.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

/// Fourier coefficients c_m, m in (-N/2, N/2], of the samples f_j = f(j/N).
inline std::vector<cplx> dft(const std::vector<cplx>& f) {
  const int n = int(f.size());
  std::vector<cplx> c(n);
  for (int m = 0; m < n; ++m) {
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) acc += f[j] * std::polar(1.0, -2.0 * pi * double(m) * j / n);
    c[m] = acc / double(n);
  }
  return c;
}

inline int signed_mode(int m, int n) { return m <= n / 2 ? m : m - n; }

/// Interpolant at x; for even N the Nyquist coefficient enters as cos(pi N x).
inline cplx interpolate(const std::vector<cplx>& f, double x) {
  const int n = int(f.size());
  const auto c = dft(f);
  cplx acc = 0.0;
  for (int m = 0; m < n; ++m) {
    const int k = signed_mode(m, n);
    if (n % 2 == 0 && m == n / 2) {
      acc += c[m] * std::cos(pi * n * x) * std::polar(1.0, 0.0);
    } else {
      acc += c[m] * std::polar(1.0, 2.0 * pi * k * x);
    }
  }
  return acc;
}

inline cplx interpolate_derivative(const std::vector<cplx>& f, double x) {
  const int n = int(f.size());
  const auto c = dft(f);
  cplx acc = 0.0;
  for (int m = 0; m < n; ++m) {
    const int k = signed_mode(m, n);
    if (n % 2 == 0 && m == n / 2) {
      acc += -c[m] * pi * double(n) * std::sin(pi * n * x);
    } else {
      acc += c[m] * cplx(0.0, 2.0 * pi * k) * std::polar(1.0, 2.0 * pi * k * x);
    }
  }
  return acc;
}

/// Exhaustive max over pairs of |f_j - f_k| / d(x_j, x_k)^s on the circle.
inline double holder_seminorm(const std::vector<cplx>& f, double s) {
  const int n = int(f.size());
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const int gap = std::abs(j - k);
      const double d = double(std::min(gap, n - gap)) / n;
      best = std::max(best, std::abs(f[j] - f[k]) / std::pow(d, s));
    }
  }
  return best;
}

/// Root of a strictly increasing g on [lo, hi] by bisection to machine precision.
inline double bisect(const std::function<double(double)>& g, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Preimages of y in [0, 1) under x -> d x + u sin(2 pi x) mod 1, by bisection.
inline std::vector<double> sine_map_preimages(int d, double u, double y) {
  std::vector<double> out;
  auto lift = [&](double x) { return d * x + u * std::sin(2.0 * pi * x); };
  for (int k = 0; k < d; ++k) {
    // The lift maps [0, 1) onto [0, d); preimage k solves lift(x) = y + k.
    out.push_back(bisect([&](double x) { return lift(x) - (y + k); }, 0.0, 1.0));
  }
  return out;
}

/// sum_{k=0}^{terms-1} lambda^{-k-1} L^k.
inline Eigen::MatrixXcd neumann(const Eigen::MatrixXcd& l, cplx lambda, int terms) {
  const auto n = l.rows();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(n, n);
  cplx scale = 1.0 / lambda;
  for (int k = 0; k < terms; ++k) {
    acc += scale * power;
    power = power * l;
    scale /= lambda;
  }
  return acc;
}

}  // namespace oracle

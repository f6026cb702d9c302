#include "tospec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "tospec/circle.hpp"
#include "tospec/errors.hpp"

namespace tospec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " has a non-finite entry");
    }
  }
}

double dot_padded(std::span<const double> grad, std::span<const double> h) {
  double s = 0.0;
  const std::size_t n = std::min(grad.size(), h.size());
  for (std::size_t i = 0; i < n; ++i) s += grad[i] * h[i];
  return s;
}

}  // namespace

ParameterPoint::ParameterPoint(std::initializer_list<double> coords)
    : ParameterPoint(std::vector<double>(coords)) {}

ParameterPoint::ParameterPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw Error(ErrorKind::InvalidArgument, "parameter point needs p >= 1");
  require_finite(coords_, "parameter point");
}

ParameterPoint ParameterPoint::shifted(std::span<const double> h, double t) const {
  if (h.size() != coords_.size()) {
    throw Error(ErrorKind::InvalidArgument, "direction dimension does not match parameter");
  }
  std::vector<double> out(coords_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += t * h[i];
  return ParameterPoint(std::move(out));
}

bool ParameterBox::contains(const ParameterPoint& u) const {
  if (u.dim() != lo.size() || u.dim() != hi.size()) return false;
  for (std::size_t i = 0; i < u.dim(); ++i) {
    if (u[i] < lo[i] || u[i] > hi[i]) return false;
  }
  return true;
}

double MapFamily::eval(const ParameterPoint& u, double x) const { return wrap_unit(lift(u, x)); }

std::vector<double> MapFamily::mixed_derivative(const ParameterPoint& u, double x) const {
  if (d_xu) return d_xu(u, x);
  constexpr double step = 1e-6;
  std::vector<double> out(u.dim());
  std::vector<double> e(u.dim(), 0.0);
  for (std::size_t i = 0; i < u.dim(); ++i) {
    e[i] = 1.0;
    out[i] = (d_x(u.shifted(e, step), x) - d_x(u.shifted(e, -step), x)) / (2.0 * step);
    e[i] = 0.0;
  }
  return out;
}

MapFamily sine_perturbed_map(int degree, std::size_t param_dim) {
  if (degree < 2) throw Error(ErrorKind::InvalidArgument, "degree must be >= 2");
  if (param_dim < 1) throw Error(ErrorKind::InvalidArgument, "param_dim must be >= 1");
  const double d = degree;
  MapFamily m;
  m.name = "sine_perturbed";
  m.degree = degree;
  m.param_dim = param_dim;
  m.lift = [d](const ParameterPoint& u, double x) {
    double v = d * x;
    for (std::size_t i = 0; i < u.dim(); ++i) v += u[i] * sinpi(2.0 * double(i + 1) * x);
    return v;
  };
  m.d_x = [d](const ParameterPoint& u, double x) {
    double v = d;
    for (std::size_t i = 0; i < u.dim(); ++i) {
      const double k = kTwoPi * double(i + 1);
      v += u[i] * k * cospi(2.0 * double(i + 1) * x);
    }
    return v;
  };
  m.d_xx = [](const ParameterPoint& u, double x) {
    double v = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) {
      const double k = kTwoPi * double(i + 1);
      v -= u[i] * k * k * sinpi(2.0 * double(i + 1) * x);
    }
    return v;
  };
  m.d_u = [](const ParameterPoint& u, double x) {
    std::vector<double> g(u.dim());
    for (std::size_t i = 0; i < u.dim(); ++i) g[i] = sinpi(2.0 * double(i + 1) * x);
    return g;
  };
  m.d_xu = [](const ParameterPoint& u, double x) {
    std::vector<double> g(u.dim());
    for (std::size_t i = 0; i < u.dim(); ++i) {
      g[i] = kTwoPi * double(i + 1) * cospi(2.0 * double(i + 1) * x);
    }
    return g;
  };
  return m;
}

MapFamily linear_map(int degree, std::size_t param_dim) {
  if (degree < 2) throw Error(ErrorKind::InvalidArgument, "degree must be >= 2");
  const double d = degree;
  MapFamily m;
  m.name = "linear";
  m.degree = degree;
  m.param_dim = param_dim;
  m.lift = [d](const ParameterPoint&, double x) { return d * x; };
  m.d_x = [d](const ParameterPoint&, double) { return d; };
  m.d_xx = [](const ParameterPoint&, double) { return 0.0; };
  m.d_u = [](const ParameterPoint& u, double) { return std::vector<double>(u.dim(), 0.0); };
  m.d_xu = m.d_u;
  return m;
}

WeightFamily constant_weight(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::InvalidArgument, "constant weight must be positive");
  }
  WeightFamily w;
  w.name = "constant";
  w.eval = [value](const ParameterPoint&, double) { return value; };
  w.d_x = [](const ParameterPoint&, double) { return 0.0; };
  w.d_u = [](const ParameterPoint& u, double) { return std::vector<double>(u.dim(), 0.0); };
  return w;
}

WeightFamily inverse_derivative_weight(const MapFamily& map) {
  WeightFamily w;
  w.name = "one_over_Tprime";
  w.eval = [map](const ParameterPoint& u, double x) { return 1.0 / std::abs(map.d_x(u, x)); };
  w.d_x = [map](const ParameterPoint& u, double x) {
    const double t1 = map.d_x(u, x);
    return -std::copysign(1.0, t1) * map.d_xx(u, x) / (t1 * t1);
  };
  w.d_u = [map](const ParameterPoint& u, double x) {
    const double t1 = map.d_x(u, x);
    std::vector<double> g = map.mixed_derivative(u, x);
    for (double& gi : g) gi *= -std::copysign(1.0, t1) / (t1 * t1);
    return g;
  };
  return w;
}

WeightFamily custom_weight(double scale, std::vector<double> u_slope,
                           std::vector<double> cos_coefficients) {
  WeightFamily w;
  w.name = "custom";
  auto amplitude = [scale, u_slope](const ParameterPoint& u) {
    double a = scale;
    for (std::size_t i = 0; i < std::min(u_slope.size(), u.dim()); ++i) a += u_slope[i] * u[i];
    if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "custom weight is not positive");
    return a;
  };
  auto shape = [cos_coefficients](double x) {
    double e = 0.0;
    for (std::size_t m = 0; m < cos_coefficients.size(); ++m) {
      e += cos_coefficients[m] * cospi(2.0 * double(m + 1) * x);
    }
    return std::exp(e);
  };
  auto shape_log_dx = [cos_coefficients](double x) {
    double e = 0.0;
    for (std::size_t m = 0; m < cos_coefficients.size(); ++m) {
      e -= cos_coefficients[m] * kTwoPi * double(m + 1) * sinpi(2.0 * double(m + 1) * x);
    }
    return e;
  };
  w.eval = [=](const ParameterPoint& u, double x) { return amplitude(u) * shape(x); };
  w.d_x = [=](const ParameterPoint& u, double x) {
    return amplitude(u) * shape(x) * shape_log_dx(x);
  };
  w.d_u = [=](const ParameterPoint& u, double x) {
    amplitude(u);
    std::vector<double> g(u.dim(), 0.0);
    const double s = shape(x);
    for (std::size_t i = 0; i < std::min(u_slope.size(), u.dim()); ++i) g[i] = u_slope[i] * s;
    return g;
  };
  return w;
}

double solve_lift(const MapFamily& map, const ParameterPoint& u, double level, double lo, double hi,
                  double guess, const NewtonOptions& options) {
  auto residual = [&](double x) { return map.lift(u, x) - level; };
  double f_lo = residual(lo);
  double f_hi = residual(hi);
  if (!(f_lo <= 0.0 && f_hi >= 0.0)) {
    throw Error(ErrorKind::NewtonDivergence, "lift level is not bracketed by its interval");
  }
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;

  double x = std::clamp(guess, lo, hi);
  double fx = residual(x);
  bool converged = std::abs(fx) <= options.tolerance;
  for (int it = 0; it < options.max_iterations && !converged; ++it) {
    if (fx < 0.0) lo = x; else hi = x;
    const double slope = map.d_x(u, x);
    double next = x - fx / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    x = next;
    fx = residual(x);
    converged = std::abs(fx) <= options.tolerance;
  }
  // Bisection fallback.
  for (int it = 0; it < 200 && !converged; ++it) {
    if (fx < 0.0) lo = x; else hi = x;
    x = 0.5 * (lo + hi);
    fx = residual(x);
    converged = std::abs(fx) <= options.tolerance;
    if (hi - lo <= std::numeric_limits<double>::epsilon()) break;
  }
  if (!converged || !std::isfinite(fx)) {
    throw Error(ErrorKind::NewtonDivergence,
                "residual " + std::to_string(std::abs(fx)) + " above tolerance");
  }
  // One polishing step brings the residual down to round-off.
  const double polished = x - fx / map.d_x(u, x);
  if (std::isfinite(polished) && std::abs(residual(polished)) <= std::abs(fx)) x = polished;
  return x;
}

namespace {

struct Preimage {
  double point;
  double derivative;
};

std::vector<Preimage> first_order_preimages(const MapFamily& map, const ParameterPoint& u, double y,
                                            const NewtonOptions& options) {
  const double a = map.lift(u, 0.0);
  const double b = map.lift(u, 1.0);
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorKind::NewtonDivergence, "lift is not finite");
  }
  if (std::abs(b - a - double(map.degree)) > 1e-12 * std::max(1.0, std::abs(a))) {
    throw Error(ErrorKind::InvalidArgument, "lift of " + map.name + " is not degree-consistent");
  }
  const double m0 = std::ceil(a - y);
  std::vector<Preimage> out;
  out.reserve(map.degree);
  for (int k = 0; k < map.degree; ++k) {
    const double level = y + m0 + double(k);
    const double guess = (level - a) / double(map.degree);
    double x = solve_lift(map, u, level, 0.0, 1.0, guess, options);
    const double slope = map.d_x(u, x);
    if (!(slope >= 1.0 + options.expansion_epsilon)) {
      throw Error(ErrorKind::NotExpanding,
                  map.name + " has T' = " + std::to_string(slope) + " at x = " + std::to_string(x));
    }
    out.push_back({wrap_unit(x), slope});
  }
  return out;
}

}  // namespace

InverseBranchSet inverse_branches(const MapFamily& map, const ParameterPoint& u, double y, int n,
                                  const NewtonOptions& options) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
  if (u.dim() != map.param_dim) {
    throw Error(ErrorKind::InvalidArgument, "parameter dimension does not match map family");
  }
  const double target = wrap_unit(y);
  std::vector<InverseBranch> current{InverseBranch{target, 1.0, {}, {}}};
  for (int step = 0; step < n; ++step) {
    std::vector<InverseBranch> next;
    next.reserve(current.size() * map.degree);
    for (const InverseBranch& chain : current) {
      const auto pre = first_order_preimages(map, u, chain.point, options);
      for (int k = 0; k < map.degree; ++k) {
        InverseBranch b;
        b.point = pre[k].point;
        b.derivative = chain.derivative * pre[k].derivative;
        b.labels = chain.labels;
        b.labels.push_back(k);
        b.orbit.reserve(chain.orbit.size() + 1);
        b.orbit.push_back(pre[k].point);
        b.orbit.insert(b.orbit.end(), chain.orbit.begin(), chain.orbit.end());
        next.push_back(std::move(b));
      }
    }
    current = std::move(next);
  }
  std::sort(current.begin(), current.end(),
            [](const InverseBranch& a, const InverseBranch& b) { return a.point < b.point; });
  return InverseBranchSet{target, n, std::move(current)};
}

double vector_field_x(const MapFamily& map, const ParameterPoint& u, double x,
                      std::span<const double> h, const NewtonOptions& options) {
  if (h.size() != u.dim()) throw Error(ErrorKind::InvalidArgument, "direction dimension mismatch");
  const double slope = map.d_x(u, x);
  if (!(std::abs(slope) >= 1.0 + options.expansion_epsilon)) {
    throw Error(ErrorKind::NotExpanding, "|T'| below threshold at x = " + std::to_string(x));
  }
  return dot_padded(map.d_u(u, x), h) / slope;
}

double expansion_margin(const MapFamily& map, const ParameterBox& box, int grid_size) {
  if (grid_size < 16) throw Error(ErrorKind::InvalidArgument, "grid_size must be >= 16");
  if (box.lo.size() != box.hi.size() || box.dim() != map.param_dim) {
    throw Error(ErrorKind::InvalidArgument, "parameter box dimension mismatch");
  }
  const std::size_t p = box.dim();
  std::vector<int> index(p, 0);
  double margin = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<double> coords(p);
    for (std::size_t i = 0; i < p; ++i) {
      const double span = box.hi[i] - box.lo[i];
      coords[i] = span == 0.0 ? box.lo[i] : box.lo[i] + span * double(index[i]) / (grid_size - 1);
    }
    const ParameterPoint u(std::move(coords));
    for (int j = 0; j < grid_size; ++j) {
      margin = std::min(margin, std::abs(map.d_x(u, double(j) / grid_size)) - 1.0);
    }
    std::size_t i = 0;
    while (i < p && ++index[i] == grid_size) index[i++] = 0;
    if (i == p) break;
  }
  return margin;
}

}  // namespace tospec

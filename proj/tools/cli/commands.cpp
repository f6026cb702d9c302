#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <vector>

#include <CLI11.hpp>

#include "tospec/csv.hpp"
#include "tospec/errors.hpp"
#include "tospec/response.hpp"
#include "tospec/spectral.hpp"
#include "tospec/transfer_operator.hpp"

namespace tospec::cli {

namespace {

constexpr double kProjectorFdStep = 1e-4;
constexpr double kProjectorFdTolerance = 1e-6;
constexpr double kProductRuleTolerance = 1e-7;
const std::vector<double> kResolventFdSteps{1e-3, 1e-4, 1e-5};

double max_entry(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::ostream& info(const RunContext& ctx) {
  static std::ostream null_stream(nullptr);
  return ctx.quiet || !ctx.info ? null_stream : *ctx.info;
}

// Writes one CSV under the output directory and appends the hash comment.
void emit(const RunContext& ctx, const std::string& name,
          const std::function<void(std::ostream&)>& body) {
  const std::filesystem::path path = ctx.out_dir / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  body(os);
  os << "# config-hash: " << hex_hash(ctx.config.hash) << '\n';
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

struct Setup {
  MapFamily map;
  WeightFamily weight;
  ParameterPoint u0;
  int n;
  int precision;
};

Setup setup(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  MapFamily map = c.make_map();
  WeightFamily weight = c.make_weight(map);
  return {std::move(map), std::move(weight), ParameterPoint(c.u0), c.grid_size, c.precision};
}

ContourSpec resolve_contour(const ExperimentConfig& c, const Eigen::VectorXcd& spectrum) {
  ContourSpec contour = c.contour_radius
                            ? ContourSpec{c.contour_center, *c.contour_radius, c.contour_nodes}
                            : default_contour(spectrum, 0, c.contour_nodes);
  validate_contour(contour, spectrum);
  return contour;
}

Eigen::MatrixXcd resolvent_at(const Setup& s, const ParameterPoint& u, cplx lambda) {
  return resolvent_matrix(assemble_transfer(s.map, s.weight, u, s.n).entries, lambda);
}

Eigen::MatrixXcd projector_at(const Setup& s, const ParameterPoint& u, const ContourSpec& c) {
  return spectral_projector(assemble_transfer(s.map, s.weight, u, s.n).entries, c);
}

std::string fmt(double v, int precision) { return csv::format(v, precision); }

}  // namespace

int cmd_spectrum(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const Setup s = setup(ctx);
  const SpectralData data = eigendecompose(assemble_transfer(s.map, s.weight, s.u0, s.n));
  LYOptions options;
  options.sample_grid = c.ly_sample_grid;
  const LYReport ly = ly_constants(s.map, s.weight, s.u0, c.ly_n_max, c.alpha, options);
  const double ess = ly.ess_radius_estimate;
  const ReliableSpectrum reliable =
      reliable_spectrum(s.map, s.weight, s.u0, s.n, c.grid_refine, ess + 0.05, ess);

  emit(ctx, "spectrum.csv", [&](std::ostream& os) { write_csv(os, data, s.precision); });
  emit(ctx, "lead_eigenfunction.csv", [&](std::ostream& os) { write_csv(os, data.lead_right, s.precision); });
  emit(ctx, "reliability.csv", [&](std::ostream& os) { write_csv(os, reliable, s.precision); });

  info(ctx) << "lead eigenvalue " << fmt(data.lead_value.real(), 12) << (data.lead_value.imag() < 0 ? " - " : " + ")
            << fmt(std::abs(data.lead_value.imag()), 12) << "i, gap " << fmt(data.gap, 6)
            << ", essential radius estimate " << fmt(ess, 6) << ", reliable eigenvalues "
            << reliable.entries.size() << '\n';
  return kOk;
}

int cmd_response(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const Setup s = setup(ctx);
  const Eigen::MatrixXcd l0 = assemble_transfer(s.map, s.weight, s.u0, s.n).entries;
  const ContourSpec contour = resolve_contour(c, eigenvalues(l0));

  const Eigen::MatrixXcd dr = du_resolvent(s.map, s.weight, s.u0, c.h, c.lambda, s.n);
  std::vector<double> fd_errors;
  for (double t : kResolventFdSteps) {
    const Eigen::MatrixXcd fd =
        (resolvent_at(s, s.u0.shifted(c.h, t), c.lambda) - resolvent_at(s, s.u0.shifted(c.h, -t), c.lambda)) /
        (2 * t);
    fd_errors.push_back(max_entry(dr - fd));
  }

  const Eigen::MatrixXcd dp = du_projector(s.map, s.weight, s.u0, c.h, contour, s.n);
  const double t = kProjectorFdStep;
  const Eigen::MatrixXcd fd_p =
      (projector_at(s, s.u0.shifted(c.h, t), contour) - projector_at(s, s.u0.shifted(c.h, -t), contour)) / (2 * t);
  const Eigen::MatrixXcd p = spectral_projector(l0, contour);
  const double fd_error = max_entry(dp - fd_p);
  const double product_rule = max_entry(dp * p + p * dp - dp);
  const bool pass = fd_error < kProjectorFdTolerance && product_rule < kProductRuleTolerance;

  emit(ctx, "du_resolvent_check.csv", [&](std::ostream& os) {
    csv::write_header(os, {"step", "fd_error", "derivative_max_entry"});
    for (std::size_t i = 0; i < fd_errors.size(); ++i) {
      csv::write_row(os, {kResolventFdSteps[i], fd_errors[i], max_entry(dr)}, s.precision);
    }
  });
  emit(ctx, "du_projector_check.csv", [&](std::ostream& os) {
    csv::write_header(os, {"derivative_max_entry", "fd_step", "fd_error", "fd_tolerance",
                           "product_rule_residual", "product_rule_tolerance", "pass"});
    csv::write_row(os, {max_entry(dp), t, fd_error, kProjectorFdTolerance, product_rule,
                        kProductRuleTolerance, pass ? 1.0 : 0.0},
                   s.precision);
  });

  info(ctx) << "du_resolvent fd errors";
  for (double e : fd_errors) info(ctx) << ' ' << fmt(e, 3);
  info(ctx) << "; du_projector fd error " << fmt(fd_error, 3) << ", product rule " << fmt(product_rule, 3) << '\n';
  if (!pass) {
    if (ctx.diag) {
      *ctx.diag << "error: projector derivative agreement exceeded tolerance (fd " << fmt(fd_error, 3)
                << ", product rule " << fmt(product_rule, 3) << ")\n";
    }
    return kNumericalFailure;
  }
  return kOk;
}

int cmd_holder_scan(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const Setup s = setup(ctx);
  const HolderIndex r_in(1.0 + c.alpha), r_out(1.0 + c.beta);
  const std::vector<GridFunction> probes = standard_probes(s.n, r_in.value());
  const Eigen::VectorXcd spectrum = eigenvalues(assemble_transfer(s.map, s.weight, s.u0, s.n).entries);
  const ContourSpec contour = resolve_contour(c, spectrum);

  const RegularityScan rs =
      holder_exponent_scan(s.map, s.weight, s.u0, c.h, c.lambda, r_in, r_out, c.offsets, probes);
  const RegularityScan ps =
      projector_holder_scan(s.map, s.weight, s.u0, c.h, contour, c.offsets, r_in, r_out, probes);

  emit(ctx, "scan.csv", [&](std::ostream& os) { write_csv(os, rs, s.precision); });
  emit(ctx, "projector_scan.csv", [&](std::ostream& os) { write_csv(os, ps, s.precision); });

  info(ctx) << "resolvent slope " << fmt(rs.fitted_slope, 4) << ", projector slope " << fmt(ps.fitted_slope, 4)
            << ", gamma " << fmt(rs.gamma_target, 4) << '\n';
  return kOk;
}

int cmd_ly(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const Setup s = setup(ctx);
  LYOptions options;
  options.sample_grid = c.ly_sample_grid;
  std::vector<LYReport> reports;
  for (int n = 1; n <= c.ly_n_max; ++n) {
    reports.push_back(ly_constants(s.map, s.weight, s.u0, n, c.alpha, options));
  }
  const std::vector<GridFunction> probes = standard_probes(s.n, 1.0 + c.alpha);
  const LYCheckReport check = ly_empirical_check(s.map, s.weight, s.u0, reports, probes);

  emit(ctx, "ly.csv", [&](std::ostream& os) { write_csv(os, reports, s.precision); });
  emit(ctx, "ly_check.csv", [&](std::ostream& os) {
    csv::write_header(os, {"n", "s_n_alpha", "c_required", "root_growth"});
    for (const LYCheckRow& row : check.rows) {
      csv::write_row(os, {double(row.order), row.s_n_alpha, row.c_required, row.root_growth}, s.precision);
    }
    os << "growth_base," << fmt(check.growth_base, s.precision) << ",subexponential,"
       << (check.subexponential ? 1 : 0) << '\n';
  });

  info(ctx) << "essential radius estimate " << fmt(reports.back().ess_radius_estimate, 6) << " at n = "
            << c.ly_n_max << ", C(n) sub-exponential: " << (check.subexponential ? "yes" : "no") << '\n';
  return kOk;
}

int cmd_projector(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const Setup s = setup(ctx);
  const Eigen::MatrixXcd l0 = assemble_transfer(s.map, s.weight, s.u0, s.n).entries;
  const Eigen::VectorXcd spectrum = eigenvalues(l0);
  const ContourSpec contour = resolve_contour(c, spectrum);
  const Eigen::MatrixXcd p = spectral_projector(l0, contour);
  const double idempotence = max_entry(p * p - p);
  const double commutator = max_entry(p * l0 - l0 * p);
  const cplx trace = p.trace();

  emit(ctx, "projector.csv", [&](std::ostream& os) { write_matrix_csv(os, p, s.precision); });
  emit(ctx, "projector_report.csv", [&](std::ostream& os) {
    csv::write_header(os, {"center_re", "center_im", "radius", "nodes", "enclosed", "trace_re", "trace_im",
                           "idempotence", "commutator"});
    csv::write_row(os, {contour.center.real(), contour.center.imag(), contour.radius, double(contour.nodes),
                        double(enclosed_count(contour, spectrum)), trace.real(), trace.imag(), idempotence,
                        commutator},
                   s.precision);
  });

  info(ctx) << "projector trace " << fmt(trace.real(), 10) << ", idempotence residual " << fmt(idempotence, 3)
            << ", commutator " << fmt(commutator, 3) << '\n';
  return kOk;
}

int cmd_bound_scan(const RunContext& ctx) {
  const ExperimentConfig& c = ctx.config;
  const Setup s = setup(ctx);
  // Tensor grid with bound.points samples per coordinate.
  std::vector<ParameterPoint> grid;
  const std::size_t dim = c.param_dim();
  std::vector<int> index(dim, 0);
  while (true) {
    std::vector<double> u(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      u[i] = c.bound_points == 1 ? 0.5 * (c.box_lo[i] + c.box_hi[i])
                                 : c.box_lo[i] + (c.box_hi[i] - c.box_lo[i]) * index[i] / (c.bound_points - 1);
    }
    grid.emplace_back(u);
    std::size_t i = 0;
    while (i < dim && ++index[i] == c.bound_points) index[i++] = 0;
    if (i == dim) break;
  }
  const std::vector<GridFunction> probes = standard_probes(s.n, 1.0 + c.alpha);
  const BoundScan scan =
      uniform_bound_scan(s.map, s.weight, grid, c.lambda, HolderIndex(1.0 + c.alpha), HolderIndex(1.0), probes);

  emit(ctx, "bound_scan.csv", [&](std::ostream& os) { write_csv(os, scan, s.precision); });
  info(ctx) << "a = " << fmt(scan.a, 6) << ", b = " << fmt(scan.b, 6) << ", strong-norm spread ratio "
            << fmt(scan.spread_ratio, 4) << '\n';
  return kOk;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral and response analysis of parameterized transfer operators"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  bool quiet = false;

  const std::vector<std::pair<std::string, std::function<int(const RunContext&)>>> commands{
      {"spectrum", cmd_spectrum},       {"response", cmd_response}, {"holder-scan", cmd_holder_scan},
      {"ly", cmd_ly},                   {"projector", cmd_projector}, {"bound-scan", cmd_bound_scan},
  };
  const std::vector<std::string> help{
      "eigenvalues, lead eigenfunction and grid-refinement reliability",
      "resolvent and projector derivatives against finite differences",
      "Holder-exponent scans of the resolvent and the spectral projector",
      "Lasota-Yorke constants and their empirical check",
      "contour-integral spectral projector and its idempotence report",
      "uniform resolvent bound fit over the parameter box",
  };
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_flag("--quiet", quiet, "suppress summary lines");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kConfigFailure;
  }

  RunContext ctx;
  try {
    ctx.config = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const Error& e) {
    err << "error: invalid config: " << e.name() << ": " << e.what() << '\n';
    return kConfigFailure;
  }
  ctx.out_dir = out_dir.empty() ? std::filesystem::path(ctx.config.output_directory) : std::filesystem::path(out_dir);
  ctx.quiet = quiet;
  ctx.info = &out;
  ctx.diag = &err;
  for (int n : {ctx.config.grid_size, ctx.config.grid_refine}) {
    if (n & (n - 1)) err << "warning: grid size " << n << " is not a power of two; continuing\n";
  }

  try {
    std::filesystem::create_directories(ctx.out_dir);
    for (const auto& [name, run] : commands) {
      if (app.got_subcommand(name)) return run(ctx);
    }
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kOk;
}

}  // namespace tospec::cli

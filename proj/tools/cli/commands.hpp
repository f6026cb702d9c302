#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "config.hpp"

namespace tospec::cli {

enum ExitCode : int { kOk = 0, kConfigFailure = 2, kNumericalFailure = 3 };

struct RunContext {
  ExperimentConfig config;
  std::filesystem::path out_dir;
  bool quiet = false;
  std::ostream* info = nullptr;  // summaries; suppressed when quiet
  std::ostream* diag = nullptr;  // warnings and errors
};

/// spectrum.csv, lead_eigenfunction.csv, reliability.csv.
int cmd_spectrum(const RunContext& ctx);
/// du_resolvent_check.csv, du_projector_check.csv; exit 3 when the
/// projector derivative checks exceed tolerance.
int cmd_response(const RunContext& ctx);
/// scan.csv (resolvent) and projector_scan.csv.
int cmd_holder_scan(const RunContext& ctx);
/// ly.csv and ly_check.csv.
int cmd_ly(const RunContext& ctx);
/// projector.csv and projector_report.csv.
int cmd_projector(const RunContext& ctx);
/// bound_scan.csv.
int cmd_bound_scan(const RunContext& ctx);

/// Parses flags, loads the config, runs one command and maps failures to
/// exit codes.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace tospec::cli

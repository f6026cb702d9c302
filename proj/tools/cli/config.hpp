#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tospec/dynamics.hpp"
#include "tospec/spectral.hpp"

namespace tospec::cli {

/// Config validation failure; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // [map]
  std::string family = "sine";  // sine | linear
  int degree = 2;
  std::vector<double> box_lo{-0.05};
  std::vector<double> box_hi{0.05};
  // [weight]
  std::string weight_kind = "one_over_Tprime";  // constant | one_over_Tprime | custom
  double weight_value = 0.5;
  double weight_scale = 1.0;
  std::vector<double> weight_u_slope;
  std::vector<double> weight_cos;
  // [grid]
  int grid_size = 64;
  int grid_refine = 128;
  // [holder]
  double alpha = 0.6;
  double beta = 0.1;
  // [resolvent]
  cplx lambda = 2.0;
  // [contour]; no radius means a circle around the lead eigenvalue
  cplx contour_center = 1.0;
  std::optional<double> contour_radius;
  int contour_nodes = 32;
  // [scan]
  std::vector<double> u0;
  std::vector<double> h;
  std::vector<double> offsets;
  // [ly]
  int ly_n_max = 5;
  int ly_sample_grid = 128;
  // [bound]
  int bound_points = 5;
  // [output]
  std::string output_directory = "out";
  int precision = 17;

  /// FNV-1a of the canonical (sorted section.key=value) form of the file.
  std::uint64_t hash = 0;

  std::size_t param_dim() const { return box_lo.size(); }
  ParameterBox box() const { return {box_lo, box_hi}; }
  MapFamily make_map() const;
  WeightFamily make_weight(const MapFamily& map) const;
};

/// Parses and validates; throws ConfigError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);

std::uint64_t fnv1a(const std::string& bytes);
std::string hex_hash(std::uint64_t hash);

}  // namespace tospec::cli

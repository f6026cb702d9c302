#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tospec/csv.hpp"

namespace tospec::cli {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"map", {"family", "degree", "box_lo", "box_hi"}},
      {"weight", {"kind", "value", "scale", "u_slope", "cos_coefficients"}},
      {"grid", {"N", "N_refine"}},
      {"holder", {"alpha", "beta"}},
      {"resolvent", {"lambda_re", "lambda_im"}},
      {"contour", {"center_re", "center_im", "radius", "K"}},
      {"scan", {"u0", "h", "offsets"}},
      {"ly", {"n_max", "sample_grid"}},
      {"bound", {"points"}},
      {"output", {"directory", "precision"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + text + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw ConfigError(key + ": not a finite number: '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": not an integer: '" + text + "'");
  return static_cast<int>(v);
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : csv::split(text)) out.push_back(to_double(key, item));
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  const std::string* get(const std::string& section, const std::string& key) const {
    const auto sec = tree_.find(section);
    if (sec == tree_.not_found()) return nullptr;
    const auto it = sec->second.find(key);
    if (it == sec->second.not_found()) return nullptr;
    return &it->second.data();
  }

  template <class T, class Parse>
  void read(const std::string& section, const std::string& key, T& target, Parse parse) const {
    if (const std::string* v = get(section, key)) target = parse(section + "." + key, *v);
  }

 private:
  const pt::ptree& tree_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(ExperimentConfig& c) {
  require(c.family == "sine" || c.family == "linear", "map.family must be 'sine' or 'linear'");
  require(c.degree >= 2, "map.degree must be at least 2");
  require(!c.box_lo.empty() && c.box_lo.size() == c.box_hi.size(),
          "map.box_lo and map.box_hi must have the same nonzero length");
  for (std::size_t i = 0; i < c.box_lo.size(); ++i) {
    require(c.box_lo[i] <= c.box_hi[i], "map.box_lo must not exceed map.box_hi");
  }
  const std::size_t dim = c.param_dim();

  require(c.weight_kind == "constant" || c.weight_kind == "one_over_Tprime" || c.weight_kind == "custom",
          "weight.kind must be 'constant', 'one_over_Tprime' or 'custom'");
  if (c.weight_kind == "constant") require(c.weight_value > 0.0, "weight.value must be positive");
  if (c.weight_kind == "custom") {
    if (c.weight_u_slope.empty()) c.weight_u_slope.assign(dim, 0.0);
    require(c.weight_u_slope.size() == dim, "weight.u_slope needs one entry per parameter");
  }

  require(c.grid_size >= 8, "grid.N must be at least 8");
  if (c.grid_refine == 0) c.grid_refine = 2 * c.grid_size;
  require(c.grid_refine >= 2 * c.grid_size, "grid.N_refine must be at least 2 N");

  require(0.0 <= c.beta && c.beta < c.alpha && c.alpha < 1.0, "holder: need 0 <= beta < alpha < 1");

  if (c.contour_radius) require(*c.contour_radius > 0.0, "contour.radius must be positive");
  require(c.contour_nodes >= 4, "contour.K must be at least 4");

  if (c.u0.empty()) c.u0.assign(dim, 0.0);
  if (c.h.empty()) {
    c.h.assign(dim, 0.0);
    c.h[0] = 1.0;
  }
  require(c.u0.size() == dim, "scan.u0 needs one entry per parameter");
  require(c.h.size() == dim, "scan.h needs one entry per parameter");
  double h_norm = 0.0;
  for (double v : c.h) h_norm += v * v;
  h_norm = std::sqrt(h_norm);
  require(h_norm > 0.0, "scan.h must be nonzero");
  if (c.offsets.empty()) {
    for (int k = 0; k < 6; ++k) c.offsets.push_back(std::ldexp(1e-2, -k));
  }
  for (std::size_t i = 0; i < c.offsets.size(); ++i) {
    require(c.offsets[i] > 0.0, "scan.offsets must be positive");
    if (i) require(c.offsets[i] < c.offsets[i - 1], "scan.offsets must be strictly decreasing");
  }

  require(c.ly_n_max >= 1, "ly.n_max must be at least 1");
  require(c.ly_sample_grid >= 8, "ly.sample_grid must be at least 8");
  require(c.bound_points >= 1, "bound.points must be at least 1");
  require(c.precision >= 1 && c.precision <= 17, "output.precision must be in 1..17");

  // Every point the commands visit must lie in the box.
  const ParameterBox box = c.box();
  const ParameterPoint base(c.u0);
  require(box.contains(base), "scan.u0 lies outside the parameter box");
  std::vector<double> unit(c.h);
  for (double& v : unit) v /= h_norm;
  require(box.contains(base.shifted(unit, c.offsets.front())),
          "scan: u0 + offsets[0] h lies outside the parameter box");

  const MapFamily map = c.make_map();
  const double margin = expansion_margin(map, box, 256);
  if (!(margin > 0.0)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", margin);
    throw ConfigError(std::string("map is not expanding on the box: expansion margin ") + buf + " <= 0");
  }
}

}  // namespace

MapFamily ExperimentConfig::make_map() const {
  return family == "linear" ? linear_map(degree, param_dim()) : sine_perturbed_map(degree, param_dim());
}

WeightFamily ExperimentConfig::make_weight(const MapFamily& map) const {
  if (weight_kind == "constant") return constant_weight(weight_value);
  if (weight_kind == "custom") return custom_weight(weight_scale, weight_u_slope, weight_cos);
  return inverse_derivative_weight(map);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_hash(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }

  std::vector<std::string> canonical;
  for (const auto& [section, body] : tree) {
    const auto known = schema().find(section);
    if (known == schema().end() || !body.data().empty()) {
      throw ConfigError("unknown config section or top-level key '" + section + "'");
    }
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) throw ConfigError("unknown config key '" + section + "." + key + "'");
      canonical.push_back(section + "." + key + "=" + trim(value.data()));
    }
  }
  std::sort(canonical.begin(), canonical.end());
  std::string joined;
  for (const std::string& line : canonical) joined += line + "\n";

  ExperimentConfig c;
  c.hash = fnv1a(joined);
  const Reader r(tree);
  auto text_of = [](const std::string&, const std::string& v) { return trim(v); };
  r.read("map", "family", c.family, text_of);
  r.read("map", "degree", c.degree, to_int);
  r.read("map", "box_lo", c.box_lo, to_list);
  r.read("map", "box_hi", c.box_hi, to_list);
  r.read("weight", "kind", c.weight_kind, text_of);
  r.read("weight", "value", c.weight_value, to_double);
  r.read("weight", "scale", c.weight_scale, to_double);
  r.read("weight", "u_slope", c.weight_u_slope, to_list);
  r.read("weight", "cos_coefficients", c.weight_cos, to_list);
  r.read("grid", "N", c.grid_size, to_int);
  c.grid_refine = 0;
  r.read("grid", "N_refine", c.grid_refine, to_int);
  r.read("holder", "alpha", c.alpha, to_double);
  r.read("holder", "beta", c.beta, to_double);
  double re = c.lambda.real(), im = c.lambda.imag();
  r.read("resolvent", "lambda_re", re, to_double);
  r.read("resolvent", "lambda_im", im, to_double);
  c.lambda = {re, im};
  re = c.contour_center.real();
  im = c.contour_center.imag();
  r.read("contour", "center_re", re, to_double);
  r.read("contour", "center_im", im, to_double);
  c.contour_center = {re, im};
  if (const std::string* v = r.get("contour", "radius"); v && trim(*v) != "auto") {
    c.contour_radius = to_double("contour.radius", *v);
  }
  r.read("contour", "K", c.contour_nodes, to_int);
  r.read("scan", "u0", c.u0, to_list);
  r.read("scan", "h", c.h, to_list);
  r.read("scan", "offsets", c.offsets, to_list);
  r.read("ly", "n_max", c.ly_n_max, to_int);
  r.read("ly", "sample_grid", c.ly_sample_grid, to_int);
  r.read("bound", "points", c.bound_points, to_int);
  r.read("output", "directory", c.output_directory, text_of);
  r.read("output", "precision", c.precision, to_int);

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace tospec::cli

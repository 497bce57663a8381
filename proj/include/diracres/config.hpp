#pragma once

// Run configuration: INI file with one section per module, overridable by
// section.key=value strings.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "errors.hpp"
#include "grid.hpp"
#include "search.hpp"
#include "surface.hpp"

namespace diracres::config {

struct RunConfig {
  std::uint64_t seed = 1;
  int workers = 1;
  std::string output_dir = "out";

  double grid_radius = 2.0;
  int grid_n = 16;

  std::string potential_family = "bump";  // bump | zero
  double coupling = 8.0;
  double coupling_im = 0.0;
  double support = 1.0;
  grid::PotentialMatrix matrix = grid::PotentialMatrix::Beta;

  double rho_inner = 1.25;
  double rho_outer = 1.75;

  search::ScanRegion region{surface::Chart::ZChart, cplx(1.05, -1.4), cplx(1.6, -0.05), 12, 12, -1};
  bool ppm = false;

  double tol = search::kDetectionTol;
  double contour_radius = 0.05;
  double residue_radius = 0.02;
  int probes = 8;

  double kappa_lo = 0.2;
  double kappa_hi = 2.0;
  int kappa_points = 50;

  double mit_radius = 1.5;
  double mit_outer = 4.0;
  int mit_n_radial = 48;
  int mit_n_angular = 48;
};

inline const char* kDefaultIni = R"(; diracres run configuration
[run]
seed = 1
workers = 1
output_dir = out

[grid]
radius = 2
n = 16

[potential]
family = bump
coupling = 8
coupling_im = 0
support = 1
matrix = beta

[cutoff]
inner = 1.25
outer = 1.75

[scan]
chart = z
re_lo = 1.05
im_lo = -1.4
re_hi = 1.6
im_hi = -0.05
nx = 12
ny = 12
sheet = -1
ppm = false

[search]
tol = 1e-6
contour_radius = 0.05
residue_radius = 0.02
probes = 8

[rellich]
kappa_lo = 0.2
kappa_hi = 2
points = 50

[mit]
radius = 1.5
outer = 4
n_radial = 48
n_angular = 48
)";

namespace detail {

using boost::property_tree::ptree;

template <typename T>
T get(const ptree& t, const std::string& key, T fallback) {
  const auto node = t.get_child_optional(ptree::path_type(key, '.'));
  if (!node) return fallback;
  const std::string raw = node->get_value<std::string>();
  std::istringstream in(raw);
  T out{};
  if constexpr (std::is_same_v<T, bool>) {
    if (raw == "true" || raw == "1") return true;
    if (raw == "false" || raw == "0") return false;
    throw ConfigError(key, "expected true or false, got '" + raw + "'");
  } else if constexpr (std::is_same_v<T, std::string>) {
    return raw;
  } else {
    in >> out;
    if (!in || !(in >> std::ws).eof()) throw ConfigError(key, "cannot parse '" + raw + "'");
    return out;
  }
}

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace detail

/// Radii ordering, positivity and region checks; throws ConfigError naming
/// the first offending field.
inline void validate(const RunConfig& c) {
  using detail::require;
  require(c.workers >= 1, "run.workers", "must be >= 1");
  require(c.grid_radius > 0.0, "grid.radius", "must be positive");
  require(c.grid_n >= 4, "grid.n", "must be >= 4");
  require(c.potential_family == "bump" || c.potential_family == "zero", "potential.family", "must be bump or zero");
  require(c.support > 0.0, "potential.support", "must be positive");
  require(c.support < c.rho_inner, "cutoff.inner", "must exceed potential.support");
  require(c.rho_inner < c.rho_outer, "cutoff.outer", "must exceed cutoff.inner");
  require(c.rho_outer <= c.grid_radius, "cutoff.outer", "must not exceed grid.radius");
  require(c.region.nx >= 2 && c.region.ny >= 2, "scan.nx", "scan needs at least 2 x 2 cells");
  require(c.region.sheet == 1 || c.region.sheet == -1, "scan.sheet", "must be 1 or -1");
  require(c.region.lo.real() < c.region.hi.real(), "scan.re_hi", "must exceed scan.re_lo");
  require(c.region.lo.imag() < c.region.hi.imag(), "scan.im_hi", "must exceed scan.im_lo");
  require(c.tol > 0.0, "search.tol", "must be positive");
  require(c.contour_radius > 0.0, "search.contour_radius", "must be positive");
  require(c.residue_radius > 0.0, "search.residue_radius", "must be positive");
  require(c.probes >= 1, "search.probes", "must be >= 1");
  require(c.kappa_lo < c.kappa_hi, "rellich.kappa_hi", "must exceed rellich.kappa_lo");
  require(c.kappa_points >= 1, "rellich.points", "must be >= 1");
  require(c.mit_radius > 0.0, "mit.radius", "must be positive");
  require(c.mit_outer > c.mit_radius, "mit.outer", "must exceed mit.radius");
  require(c.mit_n_radial >= 2, "mit.n_radial", "must be >= 2");
  require(c.mit_n_angular >= 2, "mit.n_angular", "must be >= 2");
  try {
    search::validate(c.region);
  } catch (const Error& e) {
    throw ConfigError("scan", e.what());
  }
}

inline RunConfig from_ptree(const boost::property_tree::ptree& t) {
  using detail::get;
  RunConfig c;
  c.seed = get<std::uint64_t>(t, "run.seed", c.seed);
  c.workers = get<int>(t, "run.workers", c.workers);
  c.output_dir = get<std::string>(t, "run.output_dir", c.output_dir);
  c.grid_radius = get<double>(t, "grid.radius", c.grid_radius);
  c.grid_n = get<int>(t, "grid.n", c.grid_n);
  c.potential_family = get<std::string>(t, "potential.family", c.potential_family);
  c.coupling = get<double>(t, "potential.coupling", c.coupling);
  c.coupling_im = get<double>(t, "potential.coupling_im", c.coupling_im);
  c.support = get<double>(t, "potential.support", c.support);
  try {
    c.matrix = grid::parse_potential_matrix(get<std::string>(t, "potential.matrix", grid::to_string(c.matrix)));
  } catch (const Error& e) {
    throw ConfigError("potential.matrix", e.what());
  }
  c.rho_inner = get<double>(t, "cutoff.inner", c.rho_inner);
  c.rho_outer = get<double>(t, "cutoff.outer", c.rho_outer);
  const std::string chart = get<std::string>(t, "scan.chart", surface::to_string(c.region.chart));
  if (chart == "z") {
    c.region.chart = surface::Chart::ZChart;
  } else if (chart == "omega") {
    c.region.chart = surface::Chart::OmegaChart;
  } else {
    throw ConfigError("scan.chart", "must be z or omega");
  }
  c.region.lo = cplx(get<double>(t, "scan.re_lo", c.region.lo.real()), get<double>(t, "scan.im_lo", c.region.lo.imag()));
  c.region.hi = cplx(get<double>(t, "scan.re_hi", c.region.hi.real()), get<double>(t, "scan.im_hi", c.region.hi.imag()));
  c.region.nx = get<int>(t, "scan.nx", c.region.nx);
  c.region.ny = get<int>(t, "scan.ny", c.region.ny);
  c.region.sheet = get<int>(t, "scan.sheet", c.region.sheet);
  c.ppm = get<bool>(t, "scan.ppm", c.ppm);
  c.tol = get<double>(t, "search.tol", c.tol);
  c.contour_radius = get<double>(t, "search.contour_radius", c.contour_radius);
  c.residue_radius = get<double>(t, "search.residue_radius", c.residue_radius);
  c.probes = get<int>(t, "search.probes", c.probes);
  c.kappa_lo = get<double>(t, "rellich.kappa_lo", c.kappa_lo);
  c.kappa_hi = get<double>(t, "rellich.kappa_hi", c.kappa_hi);
  c.kappa_points = get<int>(t, "rellich.points", c.kappa_points);
  c.mit_radius = get<double>(t, "mit.radius", c.mit_radius);
  c.mit_outer = get<double>(t, "mit.outer", c.mit_outer);
  c.mit_n_radial = get<int>(t, "mit.n_radial", c.mit_n_radial);
  c.mit_n_angular = get<int>(t, "mit.n_angular", c.mit_n_angular);
  return c;
}

/// `overrides` are "section.key=value" strings applied on top of the file.
inline RunConfig load(std::istream& in, const std::vector<std::string>& overrides = {}) {
  boost::property_tree::ptree t;
  try {
    boost::property_tree::read_ini(in, t);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("file", e.message() + " at line " + std::to_string(e.line()));
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(o, "override must look like section.key=value");
    const std::string key = o.substr(0, eq);
    if (key.find('.') == std::string::npos) throw ConfigError(key, "override key must be section.key");
    t.put(boost::property_tree::ptree::path_type(key, '.'), o.substr(eq + 1));
  }
  RunConfig c = from_ptree(t);
  validate(c);
  return c;
}

inline RunConfig load_file(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("file", "cannot open " + path);
  return load(in, overrides);
}

inline RunConfig defaults(const std::vector<std::string>& overrides = {}) {
  std::istringstream in(kDefaultIni);
  return load(in, overrides);
}

// ---- model construction ---------------------------------------------------------

struct Model {
  grid::GridPtr grid;
  grid::PotentialField potential;
  grid::CutoffField rho;
};

inline Model build_model(const RunConfig& c) {
  Model m;
  m.grid = grid::build_grid(c.grid_radius, c.grid_n);
  if (c.potential_family == "zero") {
    m.potential = grid::zero_potential(m.grid);
  } else {
    m.potential = grid::bump_potential(m.grid, cplx(c.coupling, c.coupling_im), grid::potential_matrix(c.matrix, c.seed),
                                       c.support);
  }
  m.rho = grid::cutoff(c.rho_inner, c.rho_outer, m.grid);
  return m;
}

}  // namespace diracres::config

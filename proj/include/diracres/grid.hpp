#pragma once

// Uniform midpoint grids on cubes, sampled spinor and matrix fields, radial
// cutoffs, and the text field format.

#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dirac.hpp"
#include "errors.hpp"
#include "types.hpp"

namespace diracres::grid {

struct QuadratureGrid {
  int n = 0;            ///< nodes per axis
  double radius = 0.0;  ///< covers [-radius, radius]^3
  double h = 0.0;
  std::vector<Vec3> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }
  double coordinate(int i) const noexcept { return -radius + (i + 0.5) * h; }
  double cell_volume() const noexcept { return h * h * h; }
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

inline GridPtr build_grid(double radius, int n_per_axis) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw Error(ErrorKind::InvalidArgument, "build_grid: radius must be positive");
  if (n_per_axis < 2) throw Error(ErrorKind::InvalidArgument, "build_grid: need at least 2 nodes per axis");
  auto g = std::make_shared<QuadratureGrid>();
  g->n = n_per_axis;
  g->radius = radius;
  g->h = 2.0 * radius / n_per_axis;
  const std::size_t total = static_cast<std::size_t>(n_per_axis) * n_per_axis * n_per_axis;
  g->nodes.reserve(total);
  const double w = g->cell_volume();
  for (int i = 0; i < n_per_axis; ++i)
    for (int j = 0; j < n_per_axis; ++j)
      for (int k = 0; k < n_per_axis; ++k) g->nodes.emplace_back(g->coordinate(i), g->coordinate(j), g->coordinate(k));
  g->weights.assign(total, w);
  return g;
}

inline bool same_grid(const QuadratureGrid& a, const QuadratureGrid& b) { return a.n == b.n && a.radius == b.radius; }

inline void require_same_grid(const GridPtr& a, const GridPtr& b, const char* where) {
  if (!a || !b || !same_grid(*a, *b)) throw Error(ErrorKind::GridMismatch, std::string(where) + ": fields live on different grids");
}

// Quintic smoothstep: C2, 0 at t<=0, 1 at t>=1.
inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}
inline double smoothstep_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = t * (1.0 - t);
  return 30.0 * s * s;
}

/// C2 radial profile on [0, 1]: 1 at the center, 0 for t >= 1.
inline double bump(double t) { return 1.0 - smoothstep(t); }

/// C-infinity bump exp(1 - 1/(1 - t^2)) for t < 1.
inline double smooth_bump(double t) {
  if (t >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

struct SpinorField {
  GridPtr grid;
  std::vector<Spinor4> values;
  double support_radius = 0.0;

  double norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i].squaredNorm() * grid->weights[i];
    return std::sqrt(s);
  }
  Spinor4 integral() const {
    Spinor4 s = Spinor4::Zero();
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * grid->weights[i];
    return s;
  }
};

struct PotentialField {
  GridPtr grid;
  std::vector<Mat4> values;
  double support_radius = 0.0;
  bool hermitian = false;

  double sup_norm() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, v.operatorNorm());
    return m;
  }
  bool vanishes() const {
    for (const auto& v : values)
      if (!v.isZero(0.0)) return false;
    return true;
  }
};

struct CutoffField {
  GridPtr grid;
  std::vector<double> values;
  std::vector<Vec3> gradient;
  double inner = 0.0;
  double outer = 0.0;
};

inline double cutoff_value(double r, double inner, double outer) {
  return 1.0 - smoothstep((r - inner) / (outer - inner));
}

inline Vec3 cutoff_gradient(const Vec3& x, double inner, double outer) {
  const double r = x.norm();
  if (r == 0.0) return Vec3::Zero();
  return (-smoothstep_derivative((r - inner) / (outer - inner)) / (outer - inner) / r) * x;
}

inline CutoffField cutoff(double inner, double outer, const GridPtr& g) {
  if (!(inner > 0.0 && inner < outer && outer <= g->radius)) {
    throw Error(ErrorKind::CutoffOrder, "cutoff: need 0 < inner < outer <= grid radius");
  }
  CutoffField c;
  c.grid = g;
  c.inner = inner;
  c.outer = outer;
  c.values.reserve(g->size());
  c.gradient.reserve(g->size());
  for (const auto& x : g->nodes) {
    c.values.push_back(cutoff_value(x.norm(), inner, outer));
    c.gradient.push_back(cutoff_gradient(x, inner, outer));
  }
  return c;
}

/// True iff g equals 1 (to 1e-14) wherever f is nonzero.
inline bool precedes(const CutoffField& f, const CutoffField& g) {
  require_same_grid(f.grid, g.grid, "precedes");
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (f.values[i] != 0.0 && std::abs(g.values[i] - 1.0) > 1e-14) return false;
  return true;
}

inline bool precedes(const PotentialField& f, const CutoffField& g) {
  require_same_grid(f.grid, g.grid, "precedes");
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (!f.values[i].isZero(0.0) && std::abs(g.values[i] - 1.0) > 1e-14) return false;
  return true;
}

enum class PotentialMatrix { Beta, Identity, Alpha3, RandomHermitian };

inline PotentialMatrix parse_potential_matrix(const std::string& s) {
  if (s == "beta") return PotentialMatrix::Beta;
  if (s == "identity") return PotentialMatrix::Identity;
  if (s == "alpha3") return PotentialMatrix::Alpha3;
  if (s == "random_hermitian") return PotentialMatrix::RandomHermitian;
  throw Error(ErrorKind::InvalidArgument, "unknown potential matrix '" + s + "'");
}

inline const char* to_string(PotentialMatrix m) {
  switch (m) {
    case PotentialMatrix::Beta: return "beta";
    case PotentialMatrix::Identity: return "identity";
    case PotentialMatrix::Alpha3: return "alpha3";
    case PotentialMatrix::RandomHermitian: return "random_hermitian";
  }
  return "?";
}

/// Hermitian matrix with Gaussian entries, scaled to operator norm 1.
inline Mat4 random_hermitian(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Mat4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = cplx(gauss(rng), gauss(rng));
  Mat4 m = 0.5 * (a + a.adjoint());
  m /= m.operatorNorm();
  return 0.5 * (m + m.adjoint());
}

inline Mat4 potential_matrix(PotentialMatrix m, std::uint64_t seed = 1) {
  switch (m) {
    case PotentialMatrix::Beta: return dirac::beta();
    case PotentialMatrix::Identity: return dirac::identity();
    case PotentialMatrix::Alpha3: return dirac::alpha(3);
    case PotentialMatrix::RandomHermitian: return random_hermitian(seed);
  }
  return Mat4::Zero();
}

/// V(x) = c * M * bump(|x| / r0).
inline PotentialField bump_potential(const GridPtr& g, cplx coupling, const Mat4& m, double r0) {
  if (!(r0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "bump_potential: support radius must be positive");
  PotentialField v;
  v.grid = g;
  v.support_radius = r0;
  v.values.reserve(g->size());
  for (const auto& x : g->nodes) {
    const double b = bump(x.norm() / r0);
    v.values.push_back(b == 0.0 ? Mat4::Zero().eval() : (coupling * b * m).eval());
  }
  v.hermitian = coupling.imag() == 0.0 && (m - m.adjoint()).norm() == 0.0;
  return v;
}

inline PotentialField zero_potential(const GridPtr& g) {
  PotentialField v;
  v.grid = g;
  v.values.assign(g->size(), Mat4::Zero());
  v.hermitian = true;
  return v;
}

inline SpinorField zero_spinor(const GridPtr& g) {
  SpinorField f;
  f.grid = g;
  f.values.assign(g->size(), Spinor4::Zero());
  return f;
}

/// Samples f at the grid nodes; nodes beyond `support_radius` are set to 0.
inline SpinorField sample_spinor(const GridPtr& g, const std::function<Spinor4(const Vec3&)>& f, double support_radius) {
  SpinorField s;
  s.grid = g;
  s.support_radius = support_radius;
  s.values.reserve(g->size());
  for (const auto& x : g->nodes) s.values.push_back(x.norm() < support_radius ? f(x) : Spinor4::Zero());
  return s;
}

/// Pointwise V * phi.
inline SpinorField apply(const PotentialField& v, const SpinorField& phi) {
  require_same_grid(v.grid, phi.grid, "apply");
  SpinorField out;
  out.grid = phi.grid;
  out.support_radius = std::min(v.support_radius, phi.support_radius);
  out.values.resize(phi.values.size());
  for (std::size_t i = 0; i < phi.values.size(); ++i) out.values[i] = v.values[i] * phi.values[i];
  return out;
}

// ---- field files ----------------------------------------------------------

namespace io {

inline void put_double(std::string& out, double x) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, p);
}

inline double get_double(const std::string& tok, std::size_t line) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw Error(ErrorKind::Format, "field file line " + std::to_string(line) + ": bad number '" + tok + "'");
  return x;
}

inline void write_header(std::string& out, const QuadratureGrid& g) {
  out += "DIRACFIELD v1 ";
  out += std::to_string(g.n);
  out += ' ';
  put_double(out, g.radius);
  out += '\n';
}

inline void write_index(std::string& out, const QuadratureGrid& g, std::size_t idx) {
  const int n = g.n;
  const int k = static_cast<int>(idx % n);
  const int j = static_cast<int>((idx / n) % n);
  const int i = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
  out += std::to_string(i);
  out += ' ';
  out += std::to_string(j);
  out += ' ';
  out += std::to_string(k);
}

}  // namespace io

inline std::string format_field(const SpinorField& f) {
  std::string out;
  io::write_header(out, *f.grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    io::write_index(out, *f.grid, i);
    for (int c = 0; c < 4; ++c) {
      out += ' ';
      io::put_double(out, f.values[i](c).real());
      out += ' ';
      io::put_double(out, f.values[i](c).imag());
    }
    out += '\n';
  }
  return out;
}

inline std::string format_field(const PotentialField& f) {
  std::string out;
  io::write_header(out, *f.grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    io::write_index(out, *f.grid, i);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        out += ' ';
        io::put_double(out, f.values[i](r, c).real());
        out += ' ';
        io::put_double(out, f.values[i](r, c).imag());
      }
    out += '\n';
  }
  return out;
}

using AnyField = std::variant<SpinorField, PotentialField>;

/// Parses a field file. The support radius is the largest node radius with a
/// nonzero value; the hermitian flag is computed from the data.
inline AnyField parse_field(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw Error(ErrorKind::Format, "field file: empty input");
  std::istringstream hs(line);
  std::string magic, version, n_tok, r_tok;
  hs >> magic >> version >> n_tok >> r_tok;
  if (magic != "DIRACFIELD" || version != "v1")
    throw Error(ErrorKind::Format, "field file: bad header '" + line + "'");
  int n = 0;
  {
    auto [p, ec] = std::from_chars(n_tok.data(), n_tok.data() + n_tok.size(), n);
    if (ec != std::errc() || n < 2) throw Error(ErrorKind::Format, "field file: bad grid size '" + n_tok + "'");
  }
  const double radius = io::get_double(r_tok, lineno);
  GridPtr g = build_grid(radius, n);

  std::vector<std::vector<double>> rows(g->size());
  std::vector<bool> seen(g->size(), false);
  std::size_t width = 0;
  std::vector<std::string> toks;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    toks.clear();
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.size() != 11 && toks.size() != 35)
      throw Error(ErrorKind::Format, "field file line " + std::to_string(lineno) + ": expected 11 or 35 tokens");
    if (width == 0) width = toks.size() - 3;
    if (toks.size() - 3 != width)
      throw Error(ErrorKind::Format, "field file line " + std::to_string(lineno) + ": mixed spinor/matrix rows");
    int ijk[3];
    for (int a = 0; a < 3; ++a) {
      auto [p, ec] = std::from_chars(toks[a].data(), toks[a].data() + toks[a].size(), ijk[a]);
      if (ec != std::errc() || ijk[a] < 0 || ijk[a] >= n)
        throw Error(ErrorKind::Format, "field file line " + std::to_string(lineno) + ": bad node index");
    }
    const std::size_t idx = g->index(ijk[0], ijk[1], ijk[2]);
    if (seen[idx]) throw Error(ErrorKind::Format, "field file line " + std::to_string(lineno) + ": duplicate node");
    seen[idx] = true;
    rows[idx].resize(width);
    for (std::size_t a = 0; a < width; ++a) rows[idx][a] = io::get_double(toks[a + 3], lineno);
  }
  if (width == 0) width = 8;
  double support = 0.0;
  if (width == 8) {
    SpinorField f = zero_spinor(g);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].empty()) continue;
      for (int c = 0; c < 4; ++c) f.values[i](c) = cplx(rows[i][2 * c], rows[i][2 * c + 1]);
      if (!all_finite(f.values[i])) throw Error(ErrorKind::NonFinite, "field file: non-finite value");
      if (!f.values[i].isZero(0.0)) support = std::max(support, g->nodes[i].norm());
    }
    f.support_radius = support;
    return f;
  }
  PotentialField v = zero_potential(g);
  bool herm = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) v.values[i](r, c) = cplx(rows[i][8 * r + 2 * c], rows[i][8 * r + 2 * c + 1]);
    if (!all_finite(v.values[i])) throw Error(ErrorKind::NonFinite, "field file: non-finite value");
    if (!v.values[i].isZero(0.0)) support = std::max(support, g->nodes[i].norm());
    if ((v.values[i] - v.values[i].adjoint()).cwiseAbs().maxCoeff() > 1e-14) herm = false;
  }
  v.support_radius = support;
  v.hermitian = herm;
  return v;
}

inline AnyField parse_field(const std::string& text) {
  std::istringstream in(text);
  return parse_field(in);
}

}  // namespace diracres::grid

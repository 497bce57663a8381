// diracres command-line front end.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <diracres/diracres.hpp>

namespace fs = std::filesystem;
using namespace diracres;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

void put(std::string& out, double x) { grid::io::put_double(out, x); }

/// Writes `text` to `path` through a temporary file in the same directory.
void atomic_write(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error(ErrorKind::InvalidArgument, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void append_log(const config::RunConfig& cfg, const std::string& what) {
  fs::create_directories(cfg.output_dir);
  std::ofstream log(fs::path(cfg.output_dir) / "run.log", std::ios::app);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
  log << stamp << " " << what << "\n";
}

std::string header(const config::RunConfig& cfg, const std::string& what) {
  std::ostringstream h;
  h << "# diracres " << what << " seed=" << cfg.seed << " grid.n=" << cfg.grid_n << " grid.radius=" << cfg.grid_radius
    << " potential=" << cfg.potential_family << " coupling=" << cfg.coupling << " matrix=" << grid::to_string(cfg.matrix)
    << " cutoff=" << cfg.rho_inner << "," << cfg.rho_outer << "\n";
  return h.str();
}

surface::SurfacePoint point_from(surface::Chart chart, const std::vector<double>& coord, int sheet) {
  if (coord.size() != 2) throw ConfigError("coordinate", "expects two numbers: real imaginary");
  if (sheet != 1 && sheet != -1) throw ConfigError("sheet", "must be 1 or -1");
  return search::point_on_sheet(chart, cplx(coord[0], coord[1]), sheet);
}

ordered_json point_json(const surface::SurfacePoint& p) {
  return {{"z", {p.z.real(), p.z.imag()}}, {"omega", {p.omega.real(), p.omega.imag()}}, {"chart", surface::to_string(p.chart)}};
}

std::string scan_csv(const config::RunConfig& cfg, const search::ScanResult& s) {
  std::string out = header(cfg, "scan");
  out += "# chart=" + std::string(surface::to_string(s.region.chart)) + " sheet=" + std::to_string(s.region.sheet) +
         " nx=" + std::to_string(s.region.nx) + " ny=" + std::to_string(s.region.ny) + "\n";
  out += "zeta_re,zeta_im,z_re,z_im,omega_re,omega_im,log_abs,phase,sigma_min,masked\n";
  for (const auto& c : s.cells) {
    put(out, c.coord.real());
    out += ',';
    put(out, c.coord.imag());
    for (double x : {c.at.z.real(), c.at.z.imag(), c.at.omega.real(), c.at.omega.imag()}) {
      out += ',';
      if (c.masked) {
        out += "nan";
      } else {
        put(out, x);
      }
    }
    for (double x : {c.logdet.log_abs, c.logdet.phase, c.sigma_min}) {
      out += ',';
      if (c.masked) {
        out += "nan";
      } else {
        put(out, x);
      }
    }
    out += c.masked ? ",1\n" : ",0\n";
  }
  return out;
}

/// log_abs rendered top row = largest imaginary part; masked cells grey.
std::string scan_ppm(const search::ScanResult& s, int scale = 8) {
  const int nx = s.region.nx, ny = s.region.ny;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : s.cells)
    if (!c.masked && std::isfinite(c.logdet.log_abs)) {
      lo = std::min(lo, c.logdet.log_abs);
      hi = std::max(hi, c.logdet.log_abs);
    }
  std::string out = "P6\n" + std::to_string(nx * scale) + " " + std::to_string(ny * scale) + "\n255\n";
  for (int row = ny - 1; row >= 0; --row) {
    for (int py = 0; py < scale; ++py) {
      for (int i = 0; i < nx; ++i) {
        const auto& c = s.cells[static_cast<std::size_t>(row) * nx + i];
        unsigned char rgb[3] = {128, 128, 128};
        if (!c.masked) {
          const double t = hi > lo && std::isfinite(c.logdet.log_abs) ? (c.logdet.log_abs - lo) / (hi - lo) : 0.0;
          rgb[0] = static_cast<unsigned char>(255.0 * t);
          rgb[1] = static_cast<unsigned char>(255.0 * (1.0 - std::abs(2.0 * t - 1.0)));
          rgb[2] = static_cast<unsigned char>(255.0 * (1.0 - t));
        }
        for (int px = 0; px < scale; ++px) out.append(reinterpret_cast<const char*>(rgb), 3);
      }
    }
  }
  return out;
}

int error_record(const std::string& kind, const std::string& message, const std::string& field, int code) {
  ordered_json e = {{"error", kind}, {"message", message}};
  if (!field.empty()) e["field"] = field;
  std::cerr << e.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering resonances of the massive Dirac operator"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  int workers = 0;
  app.add_option("-c,--config", config_path, "INI configuration file");
  app.add_option("--set", overrides, "override section.key=value (repeatable)");
  app.add_option("-w,--workers", workers, "worker threads (overrides run.workers)");

  std::vector<double> coord{0.0, 0.0};
  std::vector<double> point{1.0, 0.0, 0.0};
  int sheet = 1;
  std::string chart_name = "z";
  auto add_point_opts = [&](CLI::App* sub) {
    sub->add_option("--at", coord, "chart coordinate: real imaginary")->expected(2)->required();
    sub->add_option("--sheet", sheet, "sign of Im omega (z chart) or Re z (omega chart)")->allow_extra_args(false);
    sub->add_option("--chart", chart_name, "z or omega")->check(CLI::IsMember({"z", "omega"}));
  };

  auto* kernel_cmd = app.add_subcommand("kernel", "free kernel F");
  auto* kernel_eval = kernel_cmd->add_subcommand("eval", "evaluate F at a point");
  add_point_opts(kernel_eval);
  kernel_eval->add_option("--x", point, "evaluation point x y z")->expected(3);
  kernel_cmd->require_subcommand(1);

  std::string field_in, field_out;
  auto* resolvent_cmd = app.add_subcommand("resolvent", "free resolvent");
  auto* resolvent_apply = resolvent_cmd->add_subcommand("apply", "apply R0 to a field file");
  add_point_opts(resolvent_apply);
  resolvent_apply->add_option("--field", field_in, "input spinor field")->required();
  resolvent_apply->add_option("--out", field_out, "output field file")->required();
  resolvent_cmd->require_subcommand(1);

  auto* bs_cmd = app.add_subcommand("bs", "Birman-Schwinger operator");
  auto* bs_ind = bs_cmd->add_subcommand("indicator", "log det and smallest singular value");
  add_point_opts(bs_ind);
  bs_cmd->require_subcommand(1);

  auto* scan_cmd = app.add_subcommand("scan", "indicator heatmap over [scan]");
  bool want_residue = false;
  auto* find_cmd = app.add_subcommand("find", "scan, refine and count zeros");
  find_cmd->add_flag("--residue", want_residue, "also compute the residue rank of each record");

  double residue_radius = 0.0;
  auto* residue_cmd = app.add_subcommand("residue", "rank of the contour-integrated resolvent");
  add_point_opts(residue_cmd);
  residue_cmd->add_option("--radius", residue_radius, "contour radius (default search.residue_radius)");

  auto* rellich_cmd = app.add_subcommand("rellich", "real-axis checks");
  auto* rellich_scan = rellich_cmd->add_subcommand("scan", "sigma_min on the real points of the surface");
  double kappa = 1.0;
  int flux_sign = 1;
  std::vector<double> radii{25.0, 50.0, 100.0, 200.0};
  auto* rellich_flux = rellich_cmd->add_subcommand("flux", "far-field flux identity");
  rellich_flux->add_option("--kappa", kappa, "real kappa != 0");
  rellich_flux->add_option("--sign", flux_sign, "sign of lambda");
  rellich_flux->add_option("--radii", radii, "sphere radii");
  rellich_cmd->require_subcommand(1);

  auto* mit_cmd = app.add_subcommand("mit", "MIT boundary identity");
  auto* mit_check = mit_cmd->add_subcommand("check", "square-form identity on the exterior of a ball");
  double mit_radius = 0.0, mit_outer = 0.0;
  int n_radial = 0, n_angular = 0, mit_count = 5;
  mit_check->add_option("--radius", mit_radius, "ball radius");
  mit_check->add_option("--outer", mit_outer, "outer truncation radius");
  mit_check->add_option("--n-radial", n_radial, "radial nodes");
  mit_check->add_option("--n-angular", n_angular, "azimuthal nodes (polar = half)");
  mit_check->add_option("--count", mit_count, "number of test functions");
  mit_cmd->require_subcommand(1);

  auto* selftest_cmd = app.add_subcommand("selftest", "acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (workers > 0) overrides.push_back("run.workers=" + std::to_string(workers));
    const config::RunConfig cfg = config_path.empty() ? config::defaults(overrides) : config::load_file(config_path, overrides);
    const surface::Chart chart = chart_name == "z" ? surface::Chart::ZChart : surface::Chart::OmegaChart;
    const bs::Options bopt{bs::ActiveSet::PotentialSupport, cfg.workers};
    const fs::path outdir(cfg.output_dir);

    if (kernel_eval->parsed()) {
      const auto at = point_from(chart, coord, sheet);
      const Mat4 f = kernel::eval_f(at, Vec3(point[0], point[1], point[2]));
      ordered_json m = ordered_json::array();
      for (int i = 0; i < 4; ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < 4; ++j) row.push_back({f(i, j).real(), f(i, j).imag()});
        m.push_back(row);
      }
      std::cout << ordered_json{{"at", point_json(at)}, {"x", point}, {"F", m}}.dump() << "\n";
      return kExitOk;
    }

    if (resolvent_apply->parsed()) {
      const auto at = point_from(chart, coord, sheet);
      std::ifstream in(field_in);
      if (!in) throw ConfigError("field", "cannot open " + field_in);
      const auto any = grid::parse_field(in);
      const auto* phi = std::get_if<grid::SpinorField>(&any);
      if (!phi) throw ConfigError("field", "expected a spinor field");
      atomic_write(field_out, grid::format_field(resolvent::apply_r0_grid(at, *phi, cfg.workers)));
      return kExitOk;
    }

    const config::Model model = config::build_model(cfg);

    if (bs_ind->parsed()) {
      const auto at = point_from(chart, coord, sheet);
      const auto k = bs::assemble(at, model.potential, model.rho, bopt);
      const auto ind = bs::indicator(k);
      std::cout << ordered_json{{"at", point_json(at)},
                                {"size", k.matrix.rows()},
                                {"log_abs", ind.logdet.log_abs},
                                {"phase", ind.logdet.phase},
                                {"sigma_min", ind.sigma_min},
                                {"singular", ind.singular}}
                       .dump()
                << "\n";
      return kExitOk;
    }

    if (scan_cmd->parsed()) {
      append_log(cfg, "scan start");
      const auto s = search::scan(cfg.region, model.potential, model.rho, bopt);
      atomic_write(outdir / "scan.csv", scan_csv(cfg, s));
      if (cfg.ppm) atomic_write(outdir / "scan.ppm", scan_ppm(s));
      append_log(cfg, "scan done");
      std::cout << (outdir / "scan.csv").string() << "\n";
      return kExitOk;
    }

    if (find_cmd->parsed()) {
      append_log(cfg, "find start");
      const auto s = search::scan(cfg.region, model.potential, model.rho, bopt);
      auto minima = search::local_minima(s);
      std::sort(minima.begin(), minima.end(), [&](auto a, auto b) {
        return s.cells[a].sigma_min != s.cells[b].sigma_min ? s.cells[a].sigma_min < s.cells[b].sigma_min : a < b;
      });
      bs::Options serial = bopt;
      serial.workers = 1;
      std::vector<search::ResonanceRecord> found;
      std::string lines;
      search::RefineOptions ropt;
      ropt.tol = cfg.tol;
      for (auto idx : minima) {
        search::ResonanceRecord rec;
        try {
          rec = search::refine(s.cells[idx].at, cfg.region.chart, search::bs_indicator(model.potential, model.rho, serial), ropt);
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::RefineFailure || e.kind() == ErrorKind::Resolution ||
              e.kind() == ErrorKind::ContinuationFailure || e.kind() == ErrorKind::ChartSwitchRequired)
            continue;
          throw;
        }
        bool dup = false;
        for (const auto& f : found) dup = dup || std::abs(f.location.z - rec.location.z) < 1e-6;
        if (dup) continue;
        const cplx c0 = rec.location.coordinate(cfg.region.chart);
        const auto poly = search::circle_polygon(c0, cfg.contour_radius);
        try {
          const auto start = surface::continue_to(rec.location, poly.front(), cfg.region.chart);
          rec.winding = search::winding_number(poly, start, cfg.region.chart,
                                               search::bs_log_det(model.potential, model.rho, serial))
                            .winding;
        } catch (const Error&) {
          continue;
        }
        if (rec.winding < 1) continue;
        if (want_residue) {
          const auto chi = grid::cutoff(0.5 * (cfg.support + cfg.rho_inner), cfg.rho_inner, model.grid);
          search::ResidueOptions o;
          o.probes = cfg.probes;
          o.seed = cfg.seed;
          rec.multiplicity =
              search::residue_rank(rec.location, cfg.region.chart, model.potential, model.rho, chi, chi, cfg.residue_radius, o, serial)
                  .rank;
        }
        found.push_back(rec);
        ordered_json j = {{"location", point_json(rec.location)},
                          {"log_abs", rec.logdet.log_abs},
                          {"phase", rec.logdet.phase},
                          {"sigma_min", rec.sigma_min},
                          {"newton_iterations", rec.newton_iterations},
                          {"winding", rec.winding},
                          {"multiplicity", want_residue ? ordered_json(rec.multiplicity) : ordered_json(nullptr)},
                          {"seed", cfg.seed}};
        lines += j.dump() + "\n";
      }
      atomic_write(outdir / "resonances.jsonl", lines);
      append_log(cfg, "find done: " + std::to_string(found.size()) + " records");
      std::cout << lines;
      return kExitOk;
    }

    if (residue_cmd->parsed()) {
      const auto at = point_from(chart, coord, sheet);
      const auto chi = grid::cutoff(0.5 * (cfg.support + cfg.rho_inner), cfg.rho_inner, model.grid);
      search::ResidueOptions o;
      o.probes = cfg.probes;
      o.seed = cfg.seed;
      const double r = residue_radius > 0.0 ? residue_radius : cfg.residue_radius;
      const auto res = search::residue_rank(at, chart, model.potential, model.rho, chi, chi, r, o, bopt);
      std::cout << ordered_json{{"at", point_json(at)},
                                {"radius", r},
                                {"rank", res.rank},
                                {"threshold", res.threshold},
                                {"nodes", res.nodes},
                                {"singular_values", res.singular_values},
                                {"seed", cfg.seed}}
                       .dump()
                << "\n";
      return kExitOk;
    }

    if (rellich_scan->parsed()) {
      const auto r = rellich::rellich_scan(model.potential, cfg.kappa_lo, cfg.kappa_hi, cfg.kappa_points, model.rho, cfg.tol, bopt);
      std::string out = header(cfg, "rellich scan");
      out += "lambda,kappa,sigma_min\n";
      for (const auto& p : r.points) {
        put(out, p.lambda);
        out += ',';
        put(out, p.kappa);
        out += ',';
        put(out, p.sigma_min);
        out += '\n';
      }
      atomic_write(outdir / "rellich_scan.csv", out);
      std::cout << ordered_json{{"min_sigma", r.minimum.sigma_min},
                                {"lambda", r.minimum.lambda},
                                {"kappa", r.minimum.kappa},
                                {"threshold", r.threshold},
                                {"pass", r.pass}}
                       .dump()
                << "\n";
      return r.pass ? kExitOk : kExitNumeric;
    }

    if (rellich_flux->parsed()) {
      if (flux_sign != 1 && flux_sign != -1) throw ConfigError("sign", "must be 1 or -1");
      const auto phi = grid::sample_spinor(
          model.grid,
          [&](const Vec3& x) {
            Spinor4 s;
            s << 1.0, x(0), cplx(0.0, x(1)), 0.5 * x(2) + 0.3;
            return Spinor4(s * grid::smooth_bump(x.norm() / cfg.support));
          },
          cfg.support);
      const double lambda = flux_sign * std::sqrt(1.0 + kappa * kappa);
      const auto rep = rellich::flux_identity_check(phi, lambda, kappa, radii, sphere::default_rule(), cfg.workers);
      std::string out = header(cfg, "rellich flux");
      out += "# T=";
      put(out, rep.t_limit);
      out += "\nr,flux,residual,pointwise\n";
      for (const auto& row : rep.rows) {
        put(out, row.r);
        out += ',';
        put(out, row.flux);
        out += ',';
        put(out, row.residual);
        out += ',';
        put(out, row.pointwise);
        out += '\n';
      }
      atomic_write(outdir / "rellich_flux.csv", out);
      std::cout << out;
      return kExitOk;
    }

    if (mit_check->parsed()) {
      const double r = mit_radius > 0.0 ? mit_radius : cfg.mit_radius;
      const double ro = mit_outer > 0.0 ? mit_outer : cfg.mit_outer;
      const int nr = n_radial > 0 ? n_radial : cfg.mit_n_radial;
      const int na = n_angular > 0 ? n_angular : cfg.mit_n_angular;
      if (!(ro > r)) throw ConfigError("mit.outer", "must exceed mit.radius");
      const auto geo = mit::make_geometry(r, ro, na);
      ordered_json rows = ordered_json::array();
      for (const auto& f : mit::manufactured_family(geo, cfg.seed, mit_count)) {
        const auto rep = mit::verify_sl_identity(f, nr, na, cfg.workers);
        const auto s = mit::surface_checks(f, na);
        rows.push_back({{"lhs", rep.lhs},
                        {"l2", rep.l2},
                        {"gradient", rep.gradient},
                        {"boundary", rep.boundary},
                        {"curvature_term", rep.surface},
                        {"mismatch", rep.mismatch},
                        {"mismatch_with_mass_term", rep.mismatch_complete},
                        {"boundary_coefficient",
                         std::isnan(rep.boundary_coefficient) ? ordered_json(nullptr) : ordered_json(rep.boundary_coefficient)},
                        {"trace_error", s.trace_error},
                        {"surface_flux", s.flux},
                        {"p_identity_error", s.p_error}});
      }
      const ordered_json out = {{"radius", r},        {"outer", ro},   {"curvature", geo.curvature},
                                {"n_radial", nr},     {"n_angular", na}, {"seed", cfg.seed},
                                {"functions", rows}};
      atomic_write(outdir / "mit_check.json", out.dump(2) + "\n");
      std::cout << out.dump(2) << "\n";
      return kExitOk;
    }

    if (selftest_cmd->parsed()) {
      append_log(cfg, "selftest start");
      std::ostringstream timing;
      const auto cs = selftest::run_all(cfg, [&](const selftest::Criterion& c) {
        std::cout << selftest::line(c) << std::endl;
        timing << "criterion " << c.id << " " << c.elapsed_seconds << " s\n";
      });
      atomic_write(outdir / "selftest.json", selftest::report_json(cfg, cs).dump(2) + "\n");
      append_log(cfg, "selftest done\n" + timing.str());
      return selftest::all_passed(cs) ? kExitOk : kExitNumeric;
    }
  } catch (const ConfigError& e) {
    return error_record("Config", e.what(), e.field(), kExitUsage);
  } catch (const Error& e) {
    return error_record(std::string(to_string(e.kind())), e.what(), "", kExitNumeric);
  } catch (const std::exception& e) {
    return error_record("Exception", e.what(), "", kExitNumeric);
  }
  return kExitUsage;
}

// Deep-well resonance: refine from a coarse seed on the second sheet, count
// the zero with a small contour, and print the outgoing check.

#include <cstdio>

#include <diracres/birman_schwinger.hpp>
#include <diracres/grid.hpp>
#include <diracres/search.hpp>

using namespace diracres;

int main() {
  const auto g = grid::build_grid(2.0, 16);
  const auto v = grid::bump_potential(g, 8.0, dirac::beta(), 1.0);
  const auto rho = grid::cutoff(1.25, 1.75, g);
  const auto chart = surface::Chart::ZChart;

  const auto seed = search::point_on_sheet(chart, cplx(1.3, -1.15), -1);
  const auto rec = search::refine(seed, chart, search::bs_indicator(v, rho));
  std::printf("z     = %.6f %+.6fi\n", rec.location.z.real(), rec.location.z.imag());
  std::printf("omega = %.6f %+.6fi\n", rec.location.omega.real(), rec.location.omega.imag());
  std::printf("sigma_min %.2e after %d Newton steps\n", rec.sigma_min, rec.newton_iterations);

  const auto poly = search::circle_polygon(rec.location.z, 0.05);
  const auto start = surface::continue_to(rec.location, poly.front(), chart);
  const auto w = search::winding_number(poly, start, chart, search::bs_log_det(v, rho));
  std::printf("zeros inside |z - z0| = 0.05: %d (%d evaluations)\n", w.winding, w.evaluations);

  const auto st = bs::resonant_candidate_state(rec.location, v, rho, 1e-6);
  const auto out = search::outgoing_check(st.psi, rec.location, rho);
  std::printf("outgoing mismatch %.3g (h = %.3g)\n", out.mismatch, g->h);
  return 0;
}

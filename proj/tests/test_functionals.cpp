#include "kpi/functionals.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "kpi/approx.hpp"
#include "kpi/experiments.hpp"
#include "kpi/solver.hpp"

using namespace kpi;

namespace {

Grid2D box(std::size_t n = 64) { return {Grid1D(n, 2.0 * M_PI, 0.0), Grid1D(n, 2.0 * M_PI, 0.0)}; }

}  // namespace

TEST_CASE("mass: zero field, quadratic scaling, separable cross-check") {
  Field2D z(box());
  CHECK(mass(z) == 0.0);

  Field2D f = random_smooth_field(64, 2.0 * M_PI, 8.0, 99);
  Field2D f2 = f;
  for (auto& v : f2.values) v *= 2.0;
  CHECK(mass(f2) == doctest::Approx(4.0 * mass(f)).epsilon(1e-13));

  const ApproxParams p = default_params(8.0, 1.0);
  SolverConfig cfg = make_solver_config(p, 0.0);
  const SeparableSum u = build_u_ap(p, 0.0).full();
  const double sep = l2_norm(u);
  CHECK(mass(render(u, cfg.grid)) == doctest::Approx(sep * sep).epsilon(1e-6));
}

TEST_CASE("energy: zero field and a single-mode closed form") {
  Field2D z(box());
  CHECK(energy(z) == 0.0);

  // u = cos(2x + 3y): exact box mode; the cubic term integrates to zero
  const Grid2D g = box(64);
  Field2D u(g);
  for (std::size_t jy = 0; jy < g.gy.n; ++jy)
    for (std::size_t ix = 0; ix < g.gx.n; ++ix)
      u.at(ix, jy) = std::cos(2.0 * g.gx.point(ix) + 3.0 * g.gy.point(jy));
  const double area = g.gx.length * g.gy.length;
  const double expect = 0.5 * (4.0 + 9.0 / 4.0) * (area / 2.0);
  CHECK(energy(u) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("f_breakdown: zero field, exact recomposition, interpolation bounds") {
  Field2D z(box());
  for (const auto& [name, v] : f_breakdown(z)) CHECK(v == 0.0);

  const Field2D f = random_smooth_field(64, 2.0 * M_PI, 6.0, 4242);
  const auto parts = f_breakdown(f);
  REQUIRE(parts.size() == 7);
  double sum = 0.0;
  for (const auto& [name, v] : parts) sum += v;
  CHECK(sum == f_functional(f));  // bit-identical recomposition

  // |5/6 int u^2 dx^-2 u_yy| <= ||u||_4^2 ||dx^-2 u_yy||
  const SpectralField hat = fft(f);
  const double rhs = std::pow(lp_norm(f, 4.0), 2) * l2_norm(dx_inv(dy(hat, 2), 2));
  CHECK(std::fabs(parts[3].second) <= 5.0 / 6.0 * rhs * (1.0 + 1e-9));

  // |int u (dx^-1 u_y)^2| <= ||u||_3 ||dx^-1 u_y||_3^2
  const Field2D m1y = ifft(dx_inv(dy(hat, 1), 1));
  const double rhs2 = lp_norm(f, 3.0) * std::pow(lp_norm(m1y, 3.0), 2);
  CHECK(std::fabs(parts[4].second) <= 5.0 / 6.0 * rhs2 * (1.0 + 1e-9));

  // |int u^2 u_xx| <= ||u||_4^2 ||u_xx||
  const double rhs3 = std::pow(lp_norm(f, 4.0), 2) * l2_norm(dx(hat, 2));
  CHECK(std::fabs(parts[5].second) <= 5.0 / 4.0 * rhs3 * (1.0 + 1e-9));
}

TEST_CASE("norms: zero, Y_1 equals X, homogeneity and triangle inequality") {
  Field2D z(box());
  CHECK(x_norm(z) == 0.0);

  const Field2D f = random_smooth_field(64, 2.0 * M_PI, 8.0, 7);
  CHECK(ys_norm(f, 1.0) == doctest::Approx(x_norm(f)).epsilon(1e-12));

  const Field2D g = random_smooth_field(64, 2.0 * M_PI, 8.0, 8);
  Field2D fg(f.grid), f3(f.grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    fg.values[i] = f.values[i] + g.values[i];
    f3.values[i] = -3.0 * f.values[i];
  }
  for (auto norm : {x_norm, z_norm}) {
    CHECK(norm(fg, 1e-10) <= norm(f, 1e-10) + norm(g, 1e-10) + 1e-10);
    CHECK(norm(f3, 1e-10) == doctest::Approx(3.0 * norm(f, 1e-10)).epsilon(1e-12));
  }
}

TEST_CASE("sobolev_ratio: exact at p = 2, invariant under amplitude scaling") {
  const Field2D f = random_smooth_field(128, 2.0 * M_PI, 12.0, 31);
  CHECK(sobolev_ratio(f, 2.0) == 1.0);

  Field2D f5 = f;
  for (auto& v : f5.values) v *= 5.0;
  for (double p : {3.0, 4.0, 6.0})
    CHECK(sobolev_ratio(f5, p) == doctest::Approx(sobolev_ratio(f, p)).epsilon(1e-10));

  // degenerate field: no y dependence means dx^-1 u_y vanishes
  Field2D deg(box());
  for (std::size_t jy = 0; jy < deg.grid.gy.n; ++jy)
    for (std::size_t ix = 0; ix < deg.grid.gx.n; ++ix)
      deg.at(ix, jy) = std::sin(deg.grid.gx.point(ix));
  CHECK_THROWS_AS(sobolev_ratio(deg, 3.0), DegenerateRatioError);

  CHECK_THROWS_AS(sobolev_ratio(f, 8.0), ConstraintError);
}

TEST_CASE("sobolev_ratio on the construction itself") {
  const ApproxParams p = default_params(2.0, 1.0);
  SolverConfig cfg = make_solver_config(p, 0.0);
  const Field2D u = render(build_u_ap(p, 0.0).full(), cfg.grid);
  const double r3 = sobolev_ratio(u, 3.0);
  CHECK(std::isfinite(r3));
  CHECK(r3 > 0.0);
  CHECK(r3 < 10.0);
}

TEST_CASE("diagnostics bundles the component breakdown") {
  const Field2D f = random_smooth_field(64, 2.0 * M_PI, 8.0, 12);
  const Diagnostics d = diagnostics(f, 0.25);
  CHECK(d.t == 0.25);
  CHECK(d.n_mass == doctest::Approx(mass(f)).epsilon(1e-14));
  CHECK(d.energy == doctest::Approx(energy(f)).epsilon(1e-12));
  CHECK(d.f_value == doctest::Approx(f_functional(f)).epsilon(1e-12));
  CHECK(d.x_norm == doctest::Approx(x_norm(f)).epsilon(1e-12));
  CHECK(d.components.size() == 10);  // three energy integrals + seven F integrals
}

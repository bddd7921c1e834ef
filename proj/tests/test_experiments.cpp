#include "kpi/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "kpi/io.hpp"

using namespace kpi;

TEST_CASE("least squares recovers exact lines and power laws") {
  const LineFit f = least_squares({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.rms_residual <= 1e-14);

  std::vector<double> x = {2, 4, 8, 16}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -2.0));
  const LineFit g = loglog_fit(x, y);
  CHECK(g.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK_THROWS_AS(least_squares({1.0}, {2.0}), ConstraintError);
  CHECK_THROWS_AS(loglog_fit({1.0, 2.0}, {1.0, -2.0}), ConstraintError);
}

TEST_CASE("refit reproduces the stored verdict bit-identically") {
  ExperimentContext ctx;
  ctx.lambdas = {8, 16, 32};
  const std::vector<ScanResult> rs = run_initial_closeness(ctx);
  REQUIRE(rs.size() == 1);
  const ScanResult again = refit(rs[0]);
  CHECK(again.slope == rs[0].slope);
  CHECK(again.intercept == rs[0].intercept);
  CHECK(again.fit_residual == rs[0].fit_residual);
  CHECK(again.verdict == rs[0].verdict);
}

TEST_CASE("initial closeness slope is negative and within its bound") {
  ExperimentContext ctx;
  ctx.lambdas = {8, 16, 32, 64};
  const ScanResult r = run_initial_closeness(ctx)[0];
  CHECK(r.verdict == "pass");
  CHECK(r.slope < 0.0);
  CHECK(r.slope <= r.expected + r.tol);
  // omega = omega' makes the difference identically zero
  ExperimentContext same = ctx;
  same.omega_prime = same.omega;
  ApproxParams a = same.params(8.0);
  const SeparableSum diff =
      compress(add(build_u_ap(a, 0.0).full(), scale(build_u_ap(a, 0.0).full(), -1.0)));
  CHECK(diff.size() == 0);
}

TEST_CASE("residual scan requires enough points") {
  ExperimentContext ctx;
  ctx.lambdas = {8};
  CHECK_THROWS_AS(run_residual_scan(ctx), ConstraintError);
}

TEST_CASE("sobolev audit: exact p=2, bounded ratios, deterministic fields") {
  ExperimentContext ctx;
  SobolevOptions opt;
  opt.draws = 4;
  opt.resolutions = {64, 128};
  const auto rs = run_sobolev_audit(ctx, opt);
  REQUIRE(rs.size() == 3);
  for (const auto& r : rs) {
    if (r.id == "sobolev/p2-exact") CHECK(r.verdict == "pass");
    if (r.id == "sobolev/anisotropic-rescale") CHECK(r.verdict == "pass");
    for (const auto& p : r.points) CHECK(std::isfinite(p.value));
  }
  const Field2D a = random_smooth_field(64, 2.0 * M_PI, 8.0, 5);
  const Field2D b = random_smooth_field(64, 2.0 * M_PI, 8.0, 5);
  CHECK(a.values == b.values);
  const Field2D c = random_smooth_field(64, 2.0 * M_PI, 8.0, 6);
  CHECK(a.values != c.values);
}

TEST_CASE("divergence scan: ratio points near the trig envelope") {
  ExperimentContext ctx;
  ctx.lambdas = {64, 128};
  const auto rs = run_divergence(ctx);
  REQUIRE(rs.size() == 2);
  const ScanResult& ratio = rs[0];
  CHECK(ratio.id == "divergence/lower-bound");
  for (const auto& p : ratio.points) CHECK(p.value <= 0.05);
  const ScanResult& t0 = rs[1];
  for (const auto& p : t0.points) CHECK(p.value <= 1.0);
}

TEST_CASE("results directory: CSVs are byte-identical across reruns") {
  ExperimentContext ctx;
  ctx.lambdas = {8, 16};
  const std::string dir = "/tmp/kpi_results_test";
  std::filesystem::remove_all(dir);
  const auto rs = run_initial_closeness(ctx);
  write_results(dir, rs, "echo", "initial-closeness");
  std::ifstream f1(dir + "/initial-closeness_X-difference.csv");
  std::string first((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const auto rs2 = run_initial_closeness(ctx);
  write_results(dir, rs2, "echo", "initial-closeness");
  std::ifstream f2(dir + "/initial-closeness_X-difference.csv");
  std::string second((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(first == second);
  CHECK(first.find("series,x,value") == 0);
}

TEST_CASE("coverage accounting over manifests") {
  const std::string dir = "/tmp/kpi_coverage_test";
  std::filesystem::remove_all(dir);
  CHECK(coverage_gaps(dir).size() == coverage_keys().size());

  ExperimentContext ctx;
  ctx.lambdas = {8, 16, 32};
  write_results(dir, run_initial_closeness(ctx), "echo", "initial-closeness");
  const auto gaps = coverage_gaps(dir);
  CHECK(gaps.size() == coverage_keys().size() - 1);  // thm1-initial now covered
  for (const auto& g : gaps) CHECK(g != "thm1-initial");
}

#include "kpi/bump.hpp"

#include <cmath>
#include <fstream>

#include "doctest.h"
#include "oracle.hpp"

using namespace kpi;

TEST_CASE("canonical bump plateau, support and symmetric transition") {
  CHECK(canonical_bump(0, 0.5) == 1.0);
  CHECK(canonical_bump(0, -0.5) == 1.0);
  CHECK(canonical_bump(0, 2.5) == 0.0);
  CHECK(canonical_bump(0, 1.5) == doctest::Approx(0.5).epsilon(1e-12));
  // antisymmetric about 1.5 on the transition
  for (double d : {0.1, 0.3, 0.45})
    CHECK(canonical_bump(0, 1.5 + d) + canonical_bump(0, 1.5 - d) ==
          doctest::Approx(1.0).epsilon(1e-12));
  // infinitely smooth by construction: values stay within [0, 1]
  for (int i = 0; i <= 400; ++i) {
    const double v = canonical_bump(0, -2.5 + i * 0.0125);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("bump derivatives match finite differences") {
  auto f = [](double x) { return canonical_bump(0, x); };
  for (double x : {1.2, 1.5, 1.8, -1.3, -1.7}) {
    CHECK(canonical_bump(1, x) == doctest::Approx(oracle::fd(f, x, 1)).epsilon(1e-7));
    CHECK(canonical_bump(2, x) == doctest::Approx(oracle::fd(f, x, 2, 1e-4)).epsilon(1e-6));
  }
}

TEST_CASE("mollifier mass matches Simpson oracle") {
  const double ref =
      oracle::simpson([](double s) { return s * s >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - s * s)); },
                      -1.0, 1.0, 40000);
  CHECK(mollifier_mass() == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("c_lambda formula and floor alignment") {
  ApproxParams p;
  p.lambda = 1.0;
  CHECK(c_lambda(p) == doctest::Approx(20.0 * M_PI).epsilon(1e-15));

  p.alpha = 0.6;
  p.beta = 1.21;
  p.lambda = 2.0;
  CHECK(c_lambda_integer(p) == 30);
  CHECK(c_lambda(p) == doctest::Approx(2.0 * M_PI * 30.0 / std::pow(2.0, 1.6)).epsilon(1e-15));
  CHECK(c_lambda(p) == doctest::Approx(62.1817).epsilon(1e-4));

  // lambda lambda^alpha c_lambda / (2 pi) is the floor integer exactly
  p = ApproxParams{};
  for (double L : {1.0, 3.0, 7.5, 64.0}) {
    p.lambda = L;
    const double n = L * std::pow(L, p.alpha) * c_lambda(p) / (2.0 * M_PI);
    CHECK(n == doctest::Approx(static_cast<double>(c_lambda_integer(p))).epsilon(1e-12));
  }

  // c_lambda <= 20 pi, approaching it within integer plateaus
  double prev = 0.0;
  for (double L : {100.0, 200.0, 400.0, 800.0}) {
    p.lambda = L;
    const double c = c_lambda(p);
    CHECK(c <= 20.0 * M_PI + 1e-12);
    CHECK(c >= prev - 1e-3);
    prev = c;
  }
}

TEST_CASE("psi_lambda: value at zero, zero mean, disjoint-copy L2") {
  ApproxParams p = default_params(4.0, 1.0);
  const Profile1D psi = make_psi_lambda(p);
  CHECK(psi.p->value(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  const double scale = sampled_sup(*psi.p, 0) * psi.support.width();
  CHECK(std::fabs(psi.moment0) <= 1e-10 * scale);

  // ||psi||^2 = (1 + 4 + 1) ||phi(./lambda^alpha)||^2 by disjoint supports
  const double h = std::pow(p.lambda, p.alpha);
  auto one = [&](double x) {
    const double v = canonical_bump(0, x / h);
    return v * v;
  };
  const double copy2 = oracle::simpson(one, -2.0 * h, 2.0 * h, 20000);
  auto psisq = [&](double x) {
    const double v = psi.p->value(x);
    return v * v;
  };
  const double total = oracle::simpson(psisq, psi.support.lo, psi.support.hi, 400000);
  CHECK(total == doctest::Approx(6.0 * copy2).epsilon(1e-8));
}

TEST_CASE("psi_tilde: both moments vanish and the product identity holds") {
  for (double L : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    ApproxParams p = default_params(L, 1.0);
    const Profile1D pt = make_psi_tilde(p);
    const double scale = sampled_sup(*pt.p, 0) * pt.support.width();
    CHECK(std::fabs(pt.moment0) <= 1e-10 * scale);
    CHECK(std::fabs(pt.moment1) <= 1e-10 * scale * pt.support.width());
  }
  // psi psi~ == psi from lambda0 = 1 on; report it
  const double lambda0 = absorption_threshold({1.0, 2.0, 4.0, 8.0, 16.0},
                                              default_params(8.0, 1.0).alpha);
  MESSAGE("absorption threshold lambda0 = ", lambda0);
  CHECK(lambda0 == 1.0);

  // per-copy support length ratio psi~ vs psi is the factor 2 dilation
  ApproxParams p = default_params(8.0, 1.0);
  const auto first_copy_width = [](const Profile1D& f) { return f.p->support_set().back().width(); };
  CHECK(first_copy_width(make_psi_tilde(p)) ==
        doctest::Approx(2.0 * first_copy_width(make_psi_lambda(p))).epsilon(1e-12));
}

TEST_CASE("phi_lambda and phi_tilde dilations") {
  ApproxParams p = default_params(3.0, 0.5);
  const double hb = std::pow(p.lambda, p.beta);
  const Profile1D pl = make_phi_lambda(p);
  const Profile1D pt = make_phi_tilde(p);
  CHECK(pl.p->value(hb) == 1.0);
  const double v = pt.p->value(3.0 * hb);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
  // ||phi_lambda||^2 = lambda^beta ||phi||^2
  auto sq = [&](const Profile1D& f, double a, double b) {
    return oracle::simpson([&](double x) { const double w = f.p->value(x); return w * w; }, a, b,
                           40000);
  };
  Profile1D unit;
  unit.p = make_phi();
  CHECK(sq(pl, -2.0 * hb, 2.0 * hb) ==
        doctest::Approx(hb * sq(unit, -2.0, 2.0)).epsilon(1e-10));
  // absorption geometry: plateau of phi~ covers supp phi_lambda
  CHECK(covers(pt.p->plateau_set(), pl.p->support_set()));
}

TEST_CASE("oscillatory moments vanish for psi and not for a single bump") {
  ApproxParams p;
  p.alpha = 0.6;
  p.beta = 1.3;
  p.lambda = 4.0;
  const Profile1D psi = make_psi_lambda(p);
  const double peak = sampled_sup(*psi.p, 0);
  for (double g : {0.0, M_PI / 3.0}) {
    auto [m0, m1] = check_moments(psi, p.lambda, g);
    CHECK(std::fabs(m0) / peak <= 1e-9);
    CHECK(std::fabs(m1) / peak <= 1e-9);
  }
  // negative control: one copy alone has a visible oscillatory integral
  Profile1D single;
  single.p = std::make_shared<ScaledBump>(std::pow(p.lambda, p.alpha), 0.0);
  single.support = single.p->support();
  auto [m0, m1] = check_moments(single, p.lambda, 0.0);
  CHECK(std::fabs(m0) > 1e-6);
  (void)m1;
}

TEST_CASE("antiderivatives: support, sup bounds, inverse of derivative") {
  ApproxParams p = default_params(4.0, 1.0);
  const Profile1D pt = make_psi_tilde(p);
  const Profile1D anti = antiderivative(pt, 1);

  // vanishes outside supp psi~
  CHECK(std::fabs(anti.p->value(pt.support.hi + 1.0)) <= 1e-9);
  CHECK(std::fabs(anti.p->value(pt.support.lo - 1.0)) == 0.0);

  // |dx^-1 f| <= 2R sup|f| with R = half the support width
  const double R = 0.5 * pt.support.width();
  const double supf = sampled_sup(*pt.p, 0);
  CHECK(sampled_sup(*anti.p, 0) <= 2.0 * R * supf * (1.0 + 1e-9));

  // order 2 bound 4R^2 sup|f|
  const Profile1D anti2 = antiderivative(pt, 2);
  CHECK(sampled_sup(*anti2.p, 0) <= 4.0 * R * R * supf * (1.0 + 1e-9));

  // antiderivative of the derivative returns the profile (pointwise)
  for (double frac : {0.1, 0.37, 0.52, 0.8}) {
    const double x = pt.support.lo + frac * pt.support.width();
    CHECK(anti.p->deriv(1, x) == doctest::Approx(pt.p->value(x)).epsilon(1e-10));
  }

  // nonvanishing mean is rejected
  Profile1D bad = make_phi_lambda(p);
  CHECK_THROWS_AS(antiderivative(bad, 1), MomentError);
}

TEST_CASE("ApproxParams validation names the violated inequality") {
  ApproxParams p;
  p.alpha = 0.4;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("1/2<alpha"), ConstraintError);
  p = ApproxParams{};
  p.beta = 0.9;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("1<beta"), ConstraintError);
  p = ApproxParams{};
  p.alpha = 0.9;
  p.beta = 1.2;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("alpha+beta<2"), ConstraintError);
  p = ApproxParams{};
  p.lambda = 0.5;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("lambda>=1"), ConstraintError);
  p = ApproxParams{};
  p.omega = 1.5;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("|omega|<=1"), ConstraintError);
}

TEST_CASE("profile CSV dump format") {
  const std::string path = "/tmp/kpi_test_profile.csv";
  dump_profile_csv(path, *make_phi(), -2.0, 2.0, 8);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,value");
  std::string line;
  std::getline(in, line);
  CHECK(line.find(',') != std::string::npos);
  CHECK(line.find('e') != std::string::npos);  // 17-digit scientific cells
}

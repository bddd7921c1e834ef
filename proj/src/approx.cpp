#include "kpi/approx.hpp"

#include <cmath>

namespace kpi {

namespace {

double amplitude(const ApproxParams& p) {
  return std::pow(p.lambda, -1.0 - 0.5 * (p.alpha + p.beta));
}

// mirror a build-time factor (profile orders are zero): x -> -x
Factor1D mirror_osc(const Factor1D& f, ProfilePtr mirrored_profile) {
  return make_factor(std::move(mirrored_profile), f.order, f.osc.mu, -f.osc.base, -f.osc.turns);
}

}  // namespace

ApproxSolution build_u_ap(const ApproxParams& p, double t, bool mirror) {
  p.validate();
  ApproxSolution u;
  u.params = p;
  u.t = t;
  const Phase ph{p.lambda, p.omega, t};
  const double A = amplitude(p);
  const double mu_x = ph.carrier_x(), mu_y = ph.carrier_y(), tau = ph.time_phase();

  const Profile1D psi = make_psi_lambda(p, mirror);
  const Profile1D psit = make_psi_tilde(p, mirror);
  const Profile1D phl = make_phi_lambda(p);
  const Profile1D pht = make_phi_tilde(p);

  // cos(Phi) = cos(mu_x x + tau) cos(mu_y y) - sin(..) sin(..); sin = cos(. + 3pi/2).
  // The mirrored construction u(-t,-x,-y) keeps this exact structure with the
  // x-profiles reflected (comb pointing right), since Phi(-t,-x,-y) = -Phi.
  u.high.add_term(-A, make_factor(psi.p, 0, mu_x, tau, 0), make_factor(phl.p, 0, mu_y, 0.0, 0));
  u.high.add_term(A, make_factor(psi.p, 0, mu_x, tau, 3), make_factor(phl.p, 0, mu_y, 0.0, 3));
  u.low.add_term(-p.omega / p.lambda, make_factor(psit.p, 0), make_factor(pht.p, 0));
  return u;
}

SeparableSum residual(const ApproxParams& p, double t, const ResidualOptions& opt) {
  const ApproxSolution u = build_u_ap(p, t, opt.mirror);
  const double tau_rate = 4.0 * p.lambda * p.lambda * p.lambda + p.omega;

  // dt u_ap: phases advance at tau_rate inside the high part only
  SeparableSum dt_u;
  for (const auto& term : u.high.terms) {
    dt_u.add_term(term.coeff * tau_rate,
                  make_factor(term.fx.profile, term.fx.order, term.fx.osc.mu, term.fx.osc.base,
                              term.fx.osc.turns + 1),
                  term.fy);
  }

  const SeparableSum full = u.full();
  const SeparableSum lin_x = d_axis(full, Axis::X, 3);
  const SeparableSum lin_y =
      scale(d_inv_x(d_axis(full, Axis::Y, 2), 1, opt.ibp_depth), opt.dispersion_sign);

  const SeparableSum dx_high = d_axis(u.high, Axis::X, 1);
  const SeparableSum dx_low = d_axis(u.low, Axis::X, 1);
  SeparableSum nonlin = multiply(u.high, dx_high);
  nonlin = add(nonlin, multiply(u.high, dx_low));
  if (!opt.drop_omega_pairing) nonlin = add(nonlin, multiply(u.low, dx_high));
  nonlin = add(nonlin, multiply(u.low, dx_low));

  SeparableSum g = add(add(dt_u, add(lin_x, lin_y)), nonlin);
  return compress(g);
}

double estimate_I(const ApproxParams& p, double t, const ResidualOptions& opt) {
  return l2_norm(residual(p, t, opt));
}

double estimate_II(const ApproxParams& p, double t, bool mirror) {
  const ApproxSolution u = build_u_ap(p, t, mirror);
  return l2_norm(d_inv_x(d_axis(u.full(), Axis::Y, 1), 1));
}

double estimate_III(const ApproxParams& p, double t, bool mirror) {
  const ApproxSolution u = build_u_ap(p, t, mirror);
  return l2_norm(d_inv_x(d_axis(u.full(), Axis::Y, 2), 2));
}

double estimate_IV(const ApproxParams& p1, const ApproxParams& p2, double t) {
  if (p1.lambda != p2.lambda || p1.alpha != p2.alpha || p1.beta != p2.beta)
    throw ParamMismatchError("estimate_IV: parameter sets differ in more than omega");
  const ApproxSolution u1 = build_u_ap(p1, t);
  const ApproxSolution u2 = build_u_ap(p2, t);
  const SeparableSum diff = compress(add(u1.full(), scale(u2.full(), -1.0)));
  return l2_norm(d_axis(diff, Axis::X, 1));
}

double x_norm_sum(const SeparableSum& u) {
  return l2_norm(u) + l2_norm(d_axis(u, Axis::X, 1)) + l2_norm(d_inv_x(d_axis(u, Axis::Y, 1), 1));
}

double z_norm_sum(const SeparableSum& u) {
  return l2_norm(u) + l2_norm(d_axis(u, Axis::X, 2)) + l2_norm(d_inv_x(d_axis(u, Axis::Y, 2), 2));
}

double f_functional_sum(const SeparableSum& u) {
  const SeparableSum uxx = d_axis(u, Axis::X, 2);
  const SeparableSum uy = d_axis(u, Axis::Y, 1);
  const SeparableSum m2yy = d_inv_x(d_axis(u, Axis::Y, 2), 2);
  const SeparableSum m1y = d_inv_x(uy, 1);
  double f = 1.5 * inner(uxx, uxx);
  f += 5.0 * inner(uy, uy);
  f += 5.0 / 6.0 * inner(m2yy, m2yy);
  f -= 5.0 / 6.0 * integral_of_product({&u, &u, &m2yy});
  f -= 5.0 / 6.0 * integral_of_product({&u, &m1y, &m1y});
  f += 5.0 / 4.0 * integral_of_product({&u, &u, &uxx});
  f += 5.0 / 24.0 * integral_of_product({&u, &u, &u, &u});
  return f;
}

double l2_norm_1d(const Factor1D& f) {
  const std::vector<double> v = x_product_integrals({f}, {{0, 0}});
  return std::sqrt(std::max(0.0, v[0]));
}

std::pair<double, double> velocity_cancellation_coefficient(const ApproxParams& p, double t) {
  const ApproxSolution u = build_u_ap(p, t);
  const SeparableSum lin =
      add(d_axis(u.high, Axis::X, 3), scale(d_inv_x(d_axis(u.high, Axis::Y, 2), 1), -1.0));
  // the pair lives on fx = (psi, order 1, mu=lambda, base=tau, turns 0|2),
  // fy = (phi, order 0, mu_y, turns 0|2); one copy has magnitude 3 A lambda^2
  const double A = amplitude(p);
  const double one_copy = 3.0 * A * p.lambda * p.lambda;
  const Phase ph{p.lambda, p.omega, t};
  double worst = 0.0;
  for (const auto& term : lin.terms) {
    if (term.fx.order == 1 && term.fy.order == 0 && term.fx.osc.mu == ph.carrier_x() &&
        term.fy.osc.mu == ph.carrier_y()) {
      worst = std::max(worst, std::fabs(term.coeff));
    }
  }
  // compress first: matching keys cancel; any survivor shows up in `lin` compressed
  const SeparableSum c = compress(lin);
  double residual_coeff = 0.0;
  for (const auto& term : c.terms) {
    if (term.fx.order == 1 && term.fy.order == 0 && term.fx.osc.mu == ph.carrier_x() &&
        term.fy.osc.mu == ph.carrier_y() && term.fx.profile->key() == u.high.terms[0].fx.profile->key()) {
      residual_coeff = std::max(residual_coeff, std::fabs(term.coeff));
    }
  }
  return {residual_coeff, std::max(worst, one_copy)};
}

std::vector<CancellationRow> cancellation_ledger(const ApproxParams& p, double t) {
  std::vector<CancellationRow> rows;
  const double a = p.alpha, b = p.beta, L = p.lambda;
  const ApproxSolution u = build_u_ap(p, t);
  const double A = amplitude(p);
  const Phase ph{p.lambda, p.omega, t};
  const double tau = ph.time_phase();

  auto push = [&](const std::string& name, double norm, double power) {
    rows.push_back({name, L, norm, power});
  };

  // (2): linear operator on the low part
  {
    const SeparableSum low_lin =
        add(d_axis(u.low, Axis::X, 3), scale(d_inv_x(d_axis(u.low, Axis::Y, 2), 1), -1.0));
    push("eq2_low_linear", l2_norm(low_lin),
         -1.0 + 0.5 * (a + b) + std::max(a - 2.0 * b, -3.0 * a));
  }

  // (3): quadratic term minus its displayed leading part
  {
    const SeparableSum full = u.full();
    SeparableSum quad = multiply(full, d_axis(full, Axis::X, 1));
    // leading term: -omega A psi phi sin(Phi); sin(X+Y) = sinX cosY + cosX sinY
    SeparableSum lead;
    const Profile1D psi = make_psi_lambda(p);
    const Profile1D phl = make_phi_lambda(p);
    lead.add_term(-p.omega * A, make_factor(psi.p, 0, ph.carrier_x(), tau, 3),
                  make_factor(phl.p, 0, ph.carrier_y(), 0.0, 0));
    lead.add_term(-p.omega * A, make_factor(psi.p, 0, ph.carrier_x(), tau, 0),
                  make_factor(phl.p, 0, ph.carrier_y(), 0.0, 3));
    push("eq3_quadratic_remainder", l2_norm(compress(add(quad, scale(lead, -1.0)))),
         -2.0 - 0.5 * (a - b));
  }

  // Leibniz remainders of dx^{-1} dy^2 on the high part, term by term.
  // dy^2(F cos) pieces applied to the four x-terms of Eq. (4).
  {
    const SeparableSum dxinv_dyy_high = d_inv_x(d_axis(u.high, Axis::Y, 2), 1);
    // u.high carries -A, so the displayed leading part flips sign:
    // +3L^{2-(a+b)/2} psi phi sin + 3L^{1-(a+b)/2} psi' phi cos
    SeparableSum lead;
    const Profile1D psi = make_psi_lambda(p);
    const Profile1D phl = make_phi_lambda(p);
    const double c2 = 3.0 * std::pow(L, 2.0 - 0.5 * (a + b));
    const double c1 = 3.0 * std::pow(L, 1.0 - 0.5 * (a + b));
    lead.add_term(c2, make_factor(psi.p, 0, ph.carrier_x(), tau, 3),
                  make_factor(phl.p, 0, ph.carrier_y(), 0.0, 0));
    lead.add_term(c2, make_factor(psi.p, 0, ph.carrier_x(), tau, 0),
                  make_factor(phl.p, 0, ph.carrier_y(), 0.0, 3));
    lead.add_term(c1, make_factor(psi.p, 1, ph.carrier_x(), tau, 0),
                  make_factor(phl.p, 0, ph.carrier_y(), 0.0, 0));
    lead.add_term(-c1, make_factor(psi.p, 1, ph.carrier_x(), tau, 3),
                  make_factor(phl.p, 0, ph.carrier_y(), 0.0, 3));
    push("dxinv_dyy_high_remainder", l2_norm(compress(add(dxinv_dyy_high, scale(lead, -1.0)))),
         std::max(-b, -2.0 * a));
  }

  // (mar1)/(mar2): 1-D x-norms from the proof of (III)
  {
    const Profile1D psi = make_psi_lambda(p);
    push("mar1_psi_cos", std::pow(L, -2.0) * l2_norm_1d(make_factor(psi.p, 0, L, tau, 0)),
         -2.0 + 0.5 * a);
    push("mar2_dpsi_sin", std::pow(L, -3.0) * l2_norm_1d(make_factor(psi.p, 1, L, tau, 3)),
         -2.0 + 0.5 * a);
  }

  // (dx): dx u_ap minus its displayed leading part
  {
    SeparableSum dxu = d_axis(u.full(), Axis::X, 1);
    SeparableSum lead;
    const Profile1D psi = make_psi_lambda(p);
    const Profile1D phl = make_phi_lambda(p);
    const double c = std::pow(L, -0.5 * (a + b));
    lead.add_term(c, make_factor(psi.p, 0, ph.carrier_x(), tau, 3),
                  make_factor(phl.p, 0, ph.carrier_y(), 0.0, 0));
    lead.add_term(c, make_factor(psi.p, 0, ph.carrier_x(), tau, 0),
                  make_factor(phl.p, 0, ph.carrier_y(), 0.0, 3));
    push("dx_remainder", l2_norm(compress(add(dxu, scale(lead, -1.0)))), -1.0 + 0.5 * (b - a));
  }

  return rows;
}

}  // namespace kpi

#pragma once

#include <string>
#include <vector>

#include "kpi/separable.hpp"

namespace kpi {

// Phi_lambda(t, x, y, omega) = 4 lambda^3 t + lambda x + sqrt(3) lambda^2 y + omega t
struct Phase {
  double lambda = 1.0;
  double omega = 0.0;
  double t = 0.0;

  double carrier_x() const { return lambda; }
  double carrier_y() const { return std::sqrt(3.0) * lambda * lambda; }
  double time_phase() const { return (4.0 * lambda * lambda * lambda + omega) * t; }
};

// u_ap = high + low, high = -lambda^{-1-(a+b)/2} psi phi cos(Phi),
// low = -lambda^{-1} omega psi~ phi~.
struct ApproxSolution {
  ApproxParams params;
  double t = 0.0;
  SeparableSum high;
  SeparableSum low;
  SeparableSum full() const { return add(high, low); }
};

struct ResidualOptions {
  bool drop_omega_pairing = false;  // negative control: omit low * dx(high)
  double dispersion_sign = -1.0;    // -1 = KP-I; +1 flips d_x^{-1} d_y^2 (KP-II toggle)
  int ibp_depth = 3;
  bool mirror = false;  // build the (x,y) -> (-x,-y) reflected construction
};

ApproxSolution build_u_ap(const ApproxParams& p, double t, bool mirror = false);

// G = (dt + dx^3 - dx^{-1} dy^2) u_ap + u_ap dx(u_ap), assembled exactly.
SeparableSum residual(const ApproxParams& p, double t, const ResidualOptions& opt = {});

double estimate_I(const ApproxParams& p, double t, const ResidualOptions& opt = {});
double estimate_II(const ApproxParams& p, double t, bool mirror = false);
double estimate_III(const ApproxParams& p, double t, bool mirror = false);
// ||dx(u_ap,w1 - u_ap,w2)(t)||; params must agree except omega.
double estimate_IV(const ApproxParams& p1, const ApproxParams& p2, double t);

double x_norm_sum(const SeparableSum& u);
double z_norm_sum(const SeparableSum& u);
double f_functional_sum(const SeparableSum& u);

double l2_norm_1d(const Factor1D& f);

// the coefficient of the 3 lambda^{1-(a+b)/2} psi' phi cos(Phi) pair after
// assembling (dx^3 - dx^{-1} dy^2) u_ap: zero when the zero-velocity
// cancellation fires. Returns (residual coefficient, magnitude of one copy).
std::pair<double, double> velocity_cancellation_coefficient(const ApproxParams& p, double t);

// One displayed o(lambda^{-1}) piece of the Lemma 2 proof.
struct CancellationRow {
  std::string name;
  double lambda = 0.0;
  double norm = 0.0;           // measured L2 (or 1-D L2) norm
  double claimed_power = 0.0;  // proof bound: norm <= C * lambda^claimed_power
};

std::vector<CancellationRow> cancellation_ledger(const ApproxParams& p, double t);

}  // namespace kpi

#pragma once

#include <string>
#include <vector>

#include "kpi/spectral.hpp"

namespace kpi {

struct Diagnostics {
  double t = 0.0;
  double n_mass = 0.0;
  double energy = 0.0;
  double f_value = 0.0;
  double x_norm = 0.0;
  double z_norm = 0.0;
  std::vector<std::pair<std::string, double>> components;  // named integrals of E and F
};

double mass(const Field2D& u);
double energy(const Field2D& u, double mean_tol = 1e-10);

// The seven integrals of F with their displayed coefficients.
std::vector<std::pair<std::string, double>> f_breakdown(const Field2D& u,
                                                        double mean_tol = 1e-10);
double f_functional(const Field2D& u, double mean_tol = 1e-10);

double x_norm(const Field2D& u, double mean_tol = 1e-10);
double z_norm(const Field2D& u, double mean_tol = 1e-10);
double ys_norm(const Field2D& u, double s, double mean_tol = 1e-10);

// ||u||_p on the 2x zero-padded render (p in [2, 6]).
double lp_norm(const Field2D& u, double p);

// ||u||_p / (||u||^{(6-p)/2p} ||u_x||^{(p-2)/p} ||dx^{-1}u_y||^{(p-2)/2p});
// throws DegenerateRatioError when a right-hand factor vanishes.
double sobolev_ratio(const Field2D& u, double p);

Diagnostics diagnostics(const Field2D& u, double t, bool with_f = true);

}  // namespace kpi

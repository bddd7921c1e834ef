#pragma once

#include <string>
#include <vector>

#include "kpi/bump.hpp"
#include "kpi/grid.hpp"

namespace kpi {

// cos(mu x + base + turns*pi/2); the quarter-turn count is kept exact so terms
// produced along different operator paths merge and cancel bitwise.
struct Osc {
  double mu = 0.0;
  double base = 0.0;
  int turns = 0;
};

struct Factor1D {
  ProfilePtr profile;
  int order = 0;  // derivative order applied to the profile
  Osc osc;

  double eval(double x) const;
  Interval support() const { return profile->support(); }
  IntervalSet support_set() const { return profile->support_set(); }
  double osc_total() const { return osc.mu + profile->osc_scale(); }
  double smooth_scale() const { return profile->smooth_scale(); }
  const std::string& key() const { return key_; }
  void rebuild_key();

 private:
  std::string key_;
};

Factor1D make_factor(ProfilePtr p, int order = 0, double mu = 0.0, double base = 0.0,
                     int turns = 0);

struct Term {
  double coeff = 0.0;
  Factor1D fx;
  Factor1D fy;
};

struct SeparableSum {
  std::vector<Term> terms;

  std::size_t size() const { return terms.size(); }
  // Folds zero-frequency oscillations into the coefficient and drops exact zeros.
  void add_term(double c, Factor1D fx, Factor1D fy);
  double eval(double x, double y) const;
};

SeparableSum add(const SeparableSum& a, const SeparableSum& b);
SeparableSum scale(const SeparableSum& a, double c);
SeparableSum multiply(const SeparableSum& a, const SeparableSum& b);

// Merges structurally identical terms; drops merged coefficients below
// rel_tol * (largest merged magnitude) as exact cancellations.
SeparableSum compress(const SeparableSum& a, double rel_tol = 1e-12);

enum class Axis { X, Y };

SeparableSum d_axis(const SeparableSum& s, Axis axis, int order);
// Antiderivative in x: pure envelopes go through cumulative profiles, oscillatory
// factors through the depth-`ibp_depth` integration-by-parts expansion.
SeparableSum d_inv_x(const SeparableSum& s, int order, int ibp_depth = 3);
SeparableSum multiply_profile(const SeparableSum& s, Axis axis, const ProfilePtr& p);

// L2 inner product / norm over R^2 via 1-D factor integrals (x: shared
// oscillation-aware Gauss panels evaluated factor-batched; y: product-to-sum
// plus Filon for the carrier-sum frequencies).
double inner(const SeparableSum& a, const SeparableSum& b);
double l2_norm(const SeparableSum& a);

// integral of the pointwise product of k sums (k <= 4): cubic/quartic functionals.
double integral_of_product(const std::vector<const SeparableSum*>& sums);

// sup |sum| scanned on an oscillation-resolving sample grid of the bounding box.
double sup_norm_estimate(const SeparableSum& s, std::size_t nx = 8192, std::size_t ny = 129);

Field2D render(const SeparableSum& s, const Grid2D& grid);

std::string to_json(const SeparableSum& s);

// ---- low-level integral engines (exposed for tests) ----

// Values of integral over R of products of the listed factors, one per request.
std::vector<double> x_product_integrals(const std::vector<Factor1D>& factors,
                                        const std::vector<std::vector<int>>& products);
double y_product_integral(const std::vector<Factor1D>& factors);

}  // namespace kpi

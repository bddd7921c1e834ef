#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kpi/errors.hpp"
#include "kpi/quadrature.hpp"

namespace kpi {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool intersects(const Interval& o) const { return lo < o.hi && o.lo < hi; }
};

using IntervalSet = std::vector<Interval>;  // disjoint, sorted

IntervalSet merge_intervals(IntervalSet v);
bool covers(const IntervalSet& cover, const IntervalSet& pieces);
bool intersects(const IntervalSet& a, const IntervalSet& b);

// Canonical cutoff: 1 on [-1,1], 0 outside [-2,2], transition by the
// normalized mollifier integral so phi(1.5) = 0.5 exactly by symmetry.
double canonical_bump(int k, double x);  // k-th derivative
double mollifier_mass();                 // int_{-1}^{1} exp(-1/(1-s^2)) ds

// Smooth compactly supported 1-D building block.
class Profile {
 public:
  virtual ~Profile() = default;
  virtual double deriv(int k, double x) const = 0;
  double value(double x) const { return deriv(0, x); }
  virtual Interval support() const = 0;
  virtual IntervalSet support_set() const { return {support()}; }
  virtual IntervalSet plateau_set() const { return {}; }  // where the profile == 1
  virtual double smooth_scale() const = 0;
  virtual double osc_scale() const { return 0.0; }  // internal oscillation, rad/length
  virtual const std::string& key() const = 0;
};

using ProfilePtr = std::shared_ptr<const Profile>;

// phi((x - center)/width), width > 0.
class ScaledBump final : public Profile {
 public:
  ScaledBump(double width, double center);
  double deriv(int k, double x) const override;
  Interval support() const override { return {center_ - 2 * width_, center_ + 2 * width_}; }
  IntervalSet plateau_set() const override { return {{center_ - width_, center_ + width_}}; }
  double smooth_scale() const override { return width_; }
  const std::string& key() const override { return key_; }
  double width() const { return width_; }
  double center() const { return center_; }

 private:
  double width_, center_;
  std::string key_;
};

// Linear combination sum_i c_i P_i; an explicit plateau set may be declared by
// a builder that knows the copies' geometry.
class ComboProfile final : public Profile {
 public:
  ComboProfile(std::vector<std::pair<double, ProfilePtr>> terms, std::string name,
               IntervalSet plateau = {});
  double deriv(int k, double x) const override;
  Interval support() const override { return hull_; }
  IntervalSet support_set() const override { return support_; }
  IntervalSet plateau_set() const override { return plateau_; }
  double smooth_scale() const override { return smooth_; }
  double osc_scale() const override { return osc_; }
  const std::string& key() const override { return key_; }
  const std::vector<std::pair<double, ProfilePtr>>& terms() const { return terms_; }

 private:
  std::vector<std::pair<double, ProfilePtr>> terms_;
  Interval hull_;
  IntervalSet support_, plateau_;
  double smooth_, osc_;
  std::string key_;
};

// A^{(da)} * B^{(db)} with derivatives by the Leibniz rule.
class ProductProfile final : public Profile {
 public:
  ProductProfile(ProfilePtr a, int da, ProfilePtr b, int db);
  double deriv(int k, double x) const override;
  Interval support() const override { return supp_; }
  IntervalSet support_set() const override { return supp_set_; }
  double smooth_scale() const override { return smooth_; }
  double osc_scale() const override { return osc_; }
  const std::string& key() const override { return key_; }

 private:
  ProfilePtr a_, b_;
  int da_, db_;
  Interval supp_;
  IntervalSet supp_set_;
  double smooth_, osc_;
  std::string key_;
};

// Antiderivative from -infinity of a zero-mean profile; compactly supported.
class CumulativeProfile final : public Profile {
 public:
  explicit CumulativeProfile(ProfilePtr inner, double moment_tol = 1e-9);
  double deriv(int k, double x) const override;
  Interval support() const override { return supp_; }
  double smooth_scale() const override { return inner_->smooth_scale(); }
  double osc_scale() const override { return inner_->osc_scale(); }
  const std::string& key() const override { return key_; }
  const ProfilePtr& inner() const { return inner_; }

 private:
  ProfilePtr inner_;
  Interval supp_;
  quad::PanelTable table_;
  std::string key_;
};

// I(x) = int_{-inf}^x P^{(d)}(s) cos(mu s + theta) ds; requires the full-line
// integral to vanish so that I is compactly supported.
class OscCumulativeProfile final : public Profile {
 public:
  OscCumulativeProfile(ProfilePtr inner, int d, double mu, double theta, double moment_tol = 1e-7);
  double deriv(int k, double x) const override;
  Interval support() const override { return supp_; }
  double smooth_scale() const override { return inner_->smooth_scale(); }
  double osc_scale() const override { return mu_ + inner_->osc_scale(); }
  const std::string& key() const override { return key_; }

 private:
  ProfilePtr inner_;
  int d_;
  double mu_, theta_;
  Interval supp_;
  quad::PanelTable table_;
  std::string key_;
};

// ---- oscillatory profile integrals ----

// int P^{(d)}(x) x^pow cos(mu x + theta) dx over the support (pow in {0, 1}).
double profile_osc_integral(const Profile& p, int d, int pow, double mu, double theta);

// Scan sup |P^{(d)}| over the support (tolerance scales).
double sampled_sup(const Profile& p, int d, std::size_t samples = 4096);

// ---- the paper's parameter block and named profiles ----

struct ApproxParams {
  double lambda = 8.0;
  double omega = 1.0;
  double alpha = (4.0 / 3.0 - 0.1) / 2.0;
  double beta = 4.0 / 3.0 - 0.1;

  void validate() const;  // throws ConstraintError naming the violated inequality
  double delta() const { return 2.0 * alpha - 1.0 < beta - 1.0 ? 2.0 * alpha - 1.0 : beta - 1.0; }
};

ApproxParams default_params(double lambda = 8.0, double omega = 1.0);

// c_lambda = 2*pi*[10*lambda^(1+alpha)]/lambda^(1+alpha).
long long c_lambda_integer(const ApproxParams& p);
double c_lambda(const ApproxParams& p);

struct Profile1D {
  ProfilePtr p;
  Interval support;
  double moment0 = 0.0;  // int P
  double moment1 = 0.0;  // int x P
};

ProfilePtr make_phi();
Profile1D make_psi_lambda(const ApproxParams& p, bool mirror = false);
Profile1D make_psi_tilde(const ApproxParams& p, bool mirror = false);
Profile1D make_phi_lambda(const ApproxParams& p);
Profile1D make_phi_tilde(const ApproxParams& p);

// The two oscillatory moment integrals of the construction.
std::pair<double, double> check_moments(const Profile1D& f, double lambda, double gamma);

// Order 1 or 2 antiderivative; gates on the recorded moments.
Profile1D antiderivative(const Profile1D& f, int order, double tol = 1e-8);

// Smallest lambda in `lambdas` from which psi*psi_tilde == psi holds to `tol`
// (sup over samples); returns +inf if none.
double absorption_threshold(const std::vector<double>& lambdas, double alpha, double tol = 1e-12);

// Two-column CSV dump (x,value) with 17-digit precision.
void dump_profile_csv(const std::string& path, const Profile& p, double lo, double hi,
                      std::size_t n);

}  // namespace kpi

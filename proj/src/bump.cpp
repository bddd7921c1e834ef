#include "kpi/bump.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace kpi {

namespace {

using Poly = std::vector<double>;  // ascending coefficients

Poly poly_deriv(const Poly& p) {
  if (p.size() <= 1) return {0.0};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
  return d;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly poly_axpy(Poly a, const Poly& b, double s) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
  return a;
}

double poly_eval(const Poly& p, double x) {
  double r = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

// m^{(k)}(s) = N_k(s) / (1-s^2)^{2k} * m(s) with
// N_{k+1} = N_k' D^2 + 4 k s N_k D - 2 s N_k, D = 1 - s^2.
constexpr int kMaxMollifierDeriv = 12;

const std::vector<Poly>& mollifier_polys() {
  static const std::vector<Poly> polys = [] {
    std::vector<Poly> n;
    const Poly D = {1.0, 0.0, -1.0};
    const Poly D2 = poly_mul(D, D);
    const Poly s = {0.0, 1.0};
    n.push_back({1.0});
    for (int k = 0; k < kMaxMollifierDeriv; ++k) {
      Poly next = poly_mul(poly_deriv(n[k]), D2);
      next = poly_axpy(next, poly_mul(s, poly_mul(n[k], D)), 4.0 * k);
      next = poly_axpy(next, poly_mul(s, n[k]), -2.0);
      n.push_back(next);
    }
    return n;
  }();
  return polys;
}

double mollifier(double s) {
  const double d = 1.0 - s * s;
  if (d <= 0.0) return 0.0;
  return std::exp(-1.0 / d);
}

double mollifier_deriv(int k, double s) {
  const double d = 1.0 - s * s;
  if (d <= 0.0) return 0.0;
  const double m = std::exp(-1.0 / d);
  if (m == 0.0 || k == 0) return m;
  return poly_eval(mollifier_polys()[k], s) / std::pow(d, 2 * k) * m;
}

double compute_mollifier_mass() {
  double s = 0.0;
  const auto& rule = quad::gl12();
  const int n = 256;
  for (int i = 0; i < n; ++i)
    s += quad::gl_panel(mollifier, -1.0 + 2.0 * i / n, -1.0 + 2.0 * (i + 1) / n, rule);
  return s;
}

// Normalized cumulative integral of the mollifier: 0 at -1, 1 at +1.
const quad::PanelTable& step_table() {
  static const quad::PanelTable t(
      [](double s) { return mollifier(s) / mollifier_mass(); }, -1.0, 1.0, 1024, 10);
  return t;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double mollifier_mass() {
  static const double m = compute_mollifier_mass();
  return m;
}

double canonical_bump(int k, double x) {
  const double ax = std::fabs(x);
  if (ax >= 2.0) return 0.0;
  if (ax <= 1.0) return k == 0 ? 1.0 : 0.0;
  const double sgn = (x < 0.0 && k % 2 == 1) ? -1.0 : 1.0;
  const double u = 3.0 - 2.0 * ax;  // in (-1, 1)
  if (k == 0) return step_table().eval(u);
  double v = mollifier_deriv(k - 1, u) / mollifier_mass();
  // chain rule: d/dx S(3-2x) contributes (-2)^k
  double scale = 1.0;
  for (int i = 0; i < k; ++i) scale *= -2.0;
  return sgn * scale * v;
}

IntervalSet merge_intervals(IntervalSet v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

bool covers(const IntervalSet& cover, const IntervalSet& pieces) {
  for (const auto& p : pieces) {
    bool ok = false;
    for (const auto& c : cover)
      if (c.contains(p)) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

bool intersects(const IntervalSet& a, const IntervalSet& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (x.intersects(y)) return true;
  return false;
}

// ---- ScaledBump ----

ScaledBump::ScaledBump(double width, double center) : width_(width), center_(center) {
  if (!(width > 0.0)) throw ConstraintError("ScaledBump: width must be positive");
  key_ = "bump(w=" + fmt(width_) + ",c=" + fmt(center_) + ")";
}

double ScaledBump::deriv(int k, double x) const {
  const double u = (x - center_) / width_;
  double v = canonical_bump(k, u);
  if (v == 0.0) return 0.0;
  return v / std::pow(width_, k);
}

// ---- ComboProfile ----

ComboProfile::ComboProfile(std::vector<std::pair<double, ProfilePtr>> terms, std::string name,
                           IntervalSet plateau)
    : terms_(std::move(terms)), plateau_(std::move(plateau)) {
  if (terms_.empty()) throw ConstraintError("ComboProfile: empty combination");
  IntervalSet s;
  smooth_ = terms_[0].second->smooth_scale();
  osc_ = 0.0;
  std::ostringstream k;
  k << "combo:" << name << "[";
  for (const auto& [c, p] : terms_) {
    for (const auto& iv : p->support_set()) s.push_back(iv);
    smooth_ = std::min(smooth_, p->smooth_scale());
    osc_ = std::max(osc_, p->osc_scale());
    k << fmt(c) << "*" << p->key() << ";";
  }
  k << "]";
  key_ = k.str();
  support_ = merge_intervals(std::move(s));
  hull_ = {support_.front().lo, support_.back().hi};
}

double ComboProfile::deriv(int k, double x) const {
  double v = 0.0;
  for (const auto& [c, p] : terms_) v += c * p->deriv(k, x);
  return v;
}

// ---- ProductProfile ----

ProductProfile::ProductProfile(ProfilePtr a, int da, ProfilePtr b, int db)
    : a_(std::move(a)), b_(std::move(b)), da_(da), db_(db) {
  IntervalSet s;
  for (const auto& x : a_->support_set())
    for (const auto& y : b_->support_set())
      if (x.intersects(y)) s.push_back({std::max(x.lo, y.lo), std::min(x.hi, y.hi)});
  supp_set_ = merge_intervals(std::move(s));
  if (supp_set_.empty()) {
    supp_ = {0.0, 0.0};
    supp_set_ = {supp_};
  } else {
    supp_ = {supp_set_.front().lo, supp_set_.back().hi};
  }
  smooth_ = std::min(a_->smooth_scale(), b_->smooth_scale());
  osc_ = a_->osc_scale() + b_->osc_scale();
  key_ = "prod(" + a_->key() + "#" + std::to_string(da_) + "," + b_->key() + "#" +
         std::to_string(db_) + ")";
}

double ProductProfile::deriv(int k, double x) const {
  // Leibniz
  double sum = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) binom = binom * (k - j + 1) / j;
    const double fa = a_->deriv(da_ + j, x);
    if (fa != 0.0) sum += binom * fa * b_->deriv(db_ + k - j, x);
  }
  return sum;
}

// ---- CumulativeProfile ----

CumulativeProfile::CumulativeProfile(ProfilePtr inner, double moment_tol) : inner_(std::move(inner)) {
  supp_ = inner_->support();
  const double scale = sampled_sup(*inner_, 0) * supp_.width();
  const double m0 = profile_osc_integral(*inner_, 0, 0, 0.0, 0.0);
  if (std::fabs(m0) > moment_tol * scale)
    throw MomentError("antiderivative ill-posed: nonvanishing mean " + fmt(m0) + " (scale " +
                      fmt(scale) + ")");
  const double w = quad::panel_width(inner_->osc_scale(), inner_->smooth_scale());
  const std::size_t n =
      std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(supp_.width() / w)));
  const Profile& f = *inner_;
  table_ = quad::PanelTable([&f](double x) { return f.value(x); }, supp_.lo, supp_.hi, n, 10);
  key_ = "cum(" + inner_->key() + ")";
}

double CumulativeProfile::deriv(int k, double x) const {
  if (k == 0) return table_.eval(x);
  return inner_->deriv(k - 1, x);
}

// ---- OscCumulativeProfile ----

OscCumulativeProfile::OscCumulativeProfile(ProfilePtr inner, int d, double mu, double theta,
                                           double moment_tol)
    : inner_(std::move(inner)), d_(d), mu_(mu), theta_(theta) {
  supp_ = inner_->support();
  const double scale = sampled_sup(*inner_, d_) * supp_.width();
  const double m = profile_osc_integral(*inner_, d_, 0, mu_, theta_);
  if (std::fabs(m) > moment_tol * scale)
    throw MomentError("oscillatory antiderivative ill-posed: full-line integral " + fmt(m) +
                      " (scale " + fmt(scale) + ")");
  const double w = quad::panel_width(mu_ + inner_->osc_scale(), inner_->smooth_scale());
  const std::size_t n =
      std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(supp_.width() / w)));
  const Profile& f = *inner_;
  const int dd = d_;
  const double m_ = mu_, t_ = theta_;
  table_ = quad::PanelTable(
      [&f, dd, m_, t_](double x) { return f.deriv(dd, x) * std::cos(m_ * x + t_); }, supp_.lo,
      supp_.hi, n, 10);
  key_ = "osccum(" + inner_->key() + "#" + std::to_string(d_) + ",mu=" + fmt(mu_) +
         ",th=" + fmt(theta_) + ")";
}

double OscCumulativeProfile::deriv(int k, double x) const {
  if (k == 0) return table_.eval(x);
  // d^{k-1}/dx^{k-1} of P^{(d)}(x) cos(mu x + theta)
  double sum = 0.0;
  double binom = 1.0;
  const int n = k - 1;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) binom = binom * (n - j + 1) / j;
    const double fa = inner_->deriv(d_ + j, x);
    if (fa == 0.0) continue;
    const int r = n - j;
    sum += binom * fa * std::pow(mu_, r) * std::cos(mu_ * x + theta_ + r * M_PI_2);
  }
  return sum;
}

// ---- integrals / sups ----

double profile_osc_integral(const Profile& p, int d, int pow, double mu, double theta) {
  double total = 0.0;
  for (const auto& iv : p.support_set()) {
    total += quad::integrate(
        [&](double x) {
          double v = p.deriv(d, x);
          if (v == 0.0) return 0.0;
          if (pow == 1) v *= x;
          return v * std::cos(mu * x + theta);
        },
        iv.lo, iv.hi, mu + p.osc_scale(), p.smooth_scale());
  }
  return total;
}

double sampled_sup(const Profile& p, int d, std::size_t samples) {
  double m = 0.0;
  for (const auto& iv : p.support_set()) {
    for (std::size_t i = 0; i <= samples; ++i) {
      const double x = iv.lo + iv.width() * static_cast<double>(i) / samples;
      m = std::max(m, std::fabs(p.deriv(d, x)));
    }
  }
  return m;
}

// ---- parameters ----

void ApproxParams::validate() const {
  std::ostringstream e;
  if (!(0.5 < alpha)) {
    e << "1/2<alpha violated (alpha=" << alpha << ")";
  } else if (!(alpha < 1.0)) {
    e << "alpha<1 violated (alpha=" << alpha << ")";
  } else if (!(1.0 < beta)) {
    e << "1<beta violated (beta=" << beta << ")";
  } else if (!(alpha + beta < 2.0)) {
    e << "alpha+beta<2 violated (alpha+beta=" << alpha + beta << ")";
  } else if (!(lambda >= 1.0)) {
    e << "lambda>=1 violated (lambda=" << lambda << ")";
  } else if (!(std::fabs(omega) <= 1.0)) {
    e << "|omega|<=1 violated (omega=" << omega << ")";
  } else {
    return;
  }
  throw ConstraintError(e.str());
}

ApproxParams default_params(double lambda, double omega) {
  ApproxParams p;
  p.lambda = lambda;
  p.omega = omega;
  p.validate();
  return p;
}

long long c_lambda_integer(const ApproxParams& p) {
  return static_cast<long long>(std::floor(10.0 * std::pow(p.lambda, 1.0 + p.alpha)));
}

double c_lambda(const ApproxParams& p) {
  return 2.0 * M_PI * static_cast<double>(c_lambda_integer(p)) / std::pow(p.lambda, 1.0 + p.alpha);
}

// ---- named profiles ----

ProfilePtr make_phi() { return std::make_shared<ScaledBump>(1.0, 0.0); }

namespace {

Profile1D finish_profile(ProfilePtr p) {
  Profile1D out;
  out.p = p;
  out.support = p->support();
  out.moment0 = profile_osc_integral(*p, 0, 0, 0.0, 0.0);
  out.moment1 = profile_osc_integral(*p, 0, 1, 0.0, 0.0);
  return out;
}

}  // namespace

Profile1D make_psi_lambda(const ApproxParams& p, bool mirror) {
  p.validate();
  const double h = std::pow(p.lambda, p.alpha);
  const double T = (mirror ? -1.0 : 1.0) * c_lambda(p) * h;
  std::vector<std::pair<double, ProfilePtr>> terms = {
      {1.0, std::make_shared<ScaledBump>(h, 0.0)},
      {-2.0, std::make_shared<ScaledBump>(h, -T)},
      {1.0, std::make_shared<ScaledBump>(h, -2.0 * T)},
  };
  return finish_profile(std::make_shared<ComboProfile>(std::move(terms), "psi"));
}

Profile1D make_psi_tilde(const ApproxParams& p, bool mirror) {
  p.validate();
  const double h = std::pow(p.lambda, p.alpha);
  const double T = (mirror ? -1.0 : 1.0) * c_lambda(p) * h;
  // Five copies of phi(./2h): weights (1,1,1) cover the three psi pieces with
  // value 1, the two -3/2 copies at half pitch cancel both moments.
  std::vector<std::pair<double, ProfilePtr>> terms = {
      {1.0, std::make_shared<ScaledBump>(2.0 * h, 0.0)},
      {-1.5, std::make_shared<ScaledBump>(2.0 * h, -0.5 * T)},
      {1.0, std::make_shared<ScaledBump>(2.0 * h, -T)},
      {-1.5, std::make_shared<ScaledBump>(2.0 * h, -1.5 * T)},
      {1.0, std::make_shared<ScaledBump>(2.0 * h, -2.0 * T)},
  };
  IntervalSet plateau = {{-2.0 * T - 2.0 * h, -2.0 * T + 2.0 * h},
                         {-T - 2.0 * h, -T + 2.0 * h},
                         {-2.0 * h, 2.0 * h}};
  if (mirror) {
    for (auto& iv : plateau) iv = {-iv.hi, -iv.lo};
    std::reverse(plateau.begin(), plateau.end());
  }
  return finish_profile(
      std::make_shared<ComboProfile>(std::move(terms), "psi_tilde", std::move(plateau)));
}

Profile1D make_phi_lambda(const ApproxParams& p) {
  p.validate();
  return finish_profile(std::make_shared<ScaledBump>(std::pow(p.lambda, p.beta), 0.0));
}

Profile1D make_phi_tilde(const ApproxParams& p) {
  p.validate();
  return finish_profile(std::make_shared<ScaledBump>(2.0 * std::pow(p.lambda, p.beta), 0.0));
}

std::pair<double, double> check_moments(const Profile1D& f, double lambda, double gamma) {
  return {profile_osc_integral(*f.p, 0, 0, lambda, gamma),
          profile_osc_integral(*f.p, 0, 1, lambda, gamma)};
}

Profile1D antiderivative(const Profile1D& f, int order, double tol) {
  if (order != 1 && order != 2) throw ConstraintError("antiderivative: order must be 1 or 2");
  const double scale = sampled_sup(*f.p, 0) * f.support.width();
  if (std::fabs(f.moment0) > tol * scale)
    throw MomentError("antiderivative ill-posed: moment0 = " + fmt(f.moment0));
  if (order == 2 && std::fabs(f.moment1) > tol * scale * f.support.width())
    throw MomentError("antiderivative ill-posed: moment1 = " + fmt(f.moment1));
  ProfilePtr q = std::make_shared<CumulativeProfile>(f.p, tol);
  if (order == 2) q = std::make_shared<CumulativeProfile>(q, tol);
  return finish_profile(q);
}

double absorption_threshold(const std::vector<double>& lambdas, double alpha, double tol) {
  std::vector<double> ls = lambdas;
  std::sort(ls.begin(), ls.end());
  double lambda0 = std::numeric_limits<double>::infinity();
  for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
    ApproxParams p;
    p.alpha = alpha;
    p.beta = 2.0 * alpha;
    if (!(p.beta > 1.0)) p.beta = 1.01;
    p.lambda = *it;
    const Profile1D psi = make_psi_lambda(p);
    const Profile1D psit = make_psi_tilde(p);
    double sup = 0.0;
    for (const auto& iv : psi.p->support_set()) {
      const std::size_t n = 2048;
      for (std::size_t i = 0; i <= n; ++i) {
        const double x = iv.lo + iv.width() * static_cast<double>(i) / n;
        const double a = psi.p->value(x);
        sup = std::max(sup, std::fabs(a * psit.p->value(x) - a));
      }
    }
    if (sup <= tol)
      lambda0 = *it;
    else
      break;
  }
  return lambda0;
}

void dump_profile_csv(const std::string& path, const Profile& p, double lo, double hi,
                      std::size_t n) {
  std::ofstream out(path);
  out << "x,value\n";
  char buf[96];
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / n;
    std::snprintf(buf, sizeof(buf), "%.17e,%.17e\n", x, p.value(x));
    out << buf;
  }
}

}  // namespace kpi

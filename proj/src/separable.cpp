#include "kpi/separable.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace kpi {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int wrap4(int t) { return ((t % 4) + 4) % 4; }

Osc canonical_osc(double mu, double base, int turns) {
  Osc o;
  if (mu < 0.0) {
    mu = -mu;
    base = -base;
    turns = -turns;
  }
  o.mu = mu;
  o.base = base;
  o.turns = wrap4(turns);
  return o;
}

// cos(z + turns*pi/2) without adding the quarter turns in floating point.
double osc_branch(double z, int turns) {
  switch (turns) {
    case 0: return std::cos(z);
    case 1: return -std::sin(z);
    case 2: return -std::cos(z);
    default: return std::sin(z);
  }
}

double phase_eff(const Osc& o) { return o.base + o.turns * M_PI_2; }

// Shared cache for cumulative profiles: the same antiderivative factor is
// requested several times while assembling a residual.
ProfilePtr cached_cumulative(const ProfilePtr& inner) {
  static std::mutex mu;
  static std::unordered_map<std::string, ProfilePtr> cache;
  const std::string key = "cum(" + inner->key() + ")";
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  ProfilePtr p = std::make_shared<CumulativeProfile>(inner);
  if (cache.size() > 128) cache.clear();
  cache.emplace(key, p);
  return p;
}

ProfilePtr cached_osccum(const ProfilePtr& inner, int d, double mu_, double theta) {
  static std::mutex mu;
  static std::unordered_map<std::string, ProfilePtr> cache;
  const std::string key = "osccum(" + inner->key() + "#" + std::to_string(d) + ",mu=" + fmt(mu_) +
                          ",th=" + fmt(theta) + ")";
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  ProfilePtr p = std::make_shared<OscCumulativeProfile>(inner, d, mu_, theta);
  if (cache.size() > 128) cache.clear();
  cache.emplace(key, p);
  return p;
}

}  // namespace

void Factor1D::rebuild_key() {
  key_ = profile->key() + "#" + std::to_string(order);
  if (osc.mu != 0.0 || osc.base != 0.0 || osc.turns != 0)
    key_ += "@(" + fmt(osc.mu) + "," + fmt(osc.base) + "," + std::to_string(osc.turns) + ")";
}

double Factor1D::eval(double x) const {
  double v = profile->deriv(order, x);
  if (v == 0.0) return 0.0;
  if (osc.mu == 0.0 && osc.base == 0.0 && osc.turns == 0) return v;
  return v * osc_branch(osc.mu * x + osc.base, osc.turns);
}

Factor1D make_factor(ProfilePtr p, int order, double mu, double base, int turns) {
  Factor1D f;
  f.profile = std::move(p);
  f.order = order;
  // peel cumulative wrappers under differentiation so keys stay canonical
  while (f.order >= 1) {
    auto cum = std::dynamic_pointer_cast<const CumulativeProfile>(f.profile);
    if (!cum) break;
    f.profile = cum->inner();
    f.order -= 1;
  }
  f.osc = canonical_osc(mu, base, turns);
  f.rebuild_key();
  return f;
}

void SeparableSum::add_term(double c, Factor1D fx, Factor1D fy) {
  if (c == 0.0) return;
  for (Factor1D* f : {&fx, &fy}) {
    // fold constant oscillations into the coefficient
    if (f->osc.mu == 0.0 && (f->osc.base != 0.0 || f->osc.turns != 0)) {
      c *= osc_branch(f->osc.base, f->osc.turns);
      f->osc = Osc{};
      f->rebuild_key();
    } else if (f->osc.turns >= 2) {
      // cos(z + pi) = -cos(z): keep turns in {0,1} so equal terms share keys
      f->osc.turns -= 2;
      c = -c;
      f->rebuild_key();
    }
  }
  if (c == 0.0) return;
  terms.push_back({c, std::move(fx), std::move(fy)});
}

double SeparableSum::eval(double x, double y) const {
  double s = 0.0;
  for (const auto& t : terms) {
    const double vx = t.fx.eval(x);
    if (vx == 0.0) continue;
    s += t.coeff * vx * t.fy.eval(y);
  }
  return s;
}

SeparableSum add(const SeparableSum& a, const SeparableSum& b) {
  SeparableSum out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return out;
}

SeparableSum scale(const SeparableSum& a, double c) {
  SeparableSum out;
  if (c == 0.0) return out;
  out.terms.reserve(a.terms.size());
  for (const auto& t : a.terms) out.terms.push_back({t.coeff * c, t.fx, t.fy});
  return out;
}

namespace {

// P1^{(d1)} osc1 * P2^{(d2)} osc2 -> up to two factors (product-to-sum),
// with plateau absorption and disjoint-support elimination.
struct FactorProducts {
  double coeffs[2] = {0.0, 0.0};
  Factor1D f[2];
  int n = 0;
};

FactorProducts factor_multiply(const Factor1D& a, const Factor1D& b) {
  FactorProducts out;
  if (!intersects(a.support_set(), b.support_set())) return out;

  ProfilePtr prof;
  int order = 0;
  // absorption: a profile that is identically 1 on the other's support
  if (b.order == 0 && covers(b.profile->plateau_set(), a.profile->support_set())) {
    prof = a.profile;
    order = a.order;
  } else if (a.order == 0 && covers(a.profile->plateau_set(), b.profile->support_set())) {
    prof = b.profile;
    order = b.order;
  } else if (b.order >= 1 && covers(b.profile->plateau_set(), a.profile->support_set())) {
    return out;  // derivative of a plateau vanishes on supp(a)
  } else if (a.order >= 1 && covers(a.profile->plateau_set(), b.profile->support_set())) {
    return out;
  } else {
    prof = std::make_shared<ProductProfile>(a.profile, a.order, b.profile, b.order);
    order = 0;
  }

  const bool a_osc = a.osc.mu != 0.0 || a.osc.base != 0.0 || a.osc.turns != 0;
  const bool b_osc = b.osc.mu != 0.0 || b.osc.base != 0.0 || b.osc.turns != 0;
  if (!a_osc && !b_osc) {
    out.coeffs[0] = 1.0;
    out.f[0] = make_factor(prof, order);
    out.n = 1;
    return out;
  }
  if (!a_osc || !b_osc) {
    const Osc& o = a_osc ? a.osc : b.osc;
    out.coeffs[0] = 1.0;
    out.f[0] = make_factor(prof, order, o.mu, o.base, o.turns);
    out.n = 1;
    return out;
  }
  // cos A cos B = (cos(A-B) + cos(A+B)) / 2
  out.coeffs[0] = 0.5;
  out.f[0] = make_factor(prof, order, a.osc.mu - b.osc.mu, a.osc.base - b.osc.base,
                         a.osc.turns - b.osc.turns);
  out.coeffs[1] = 0.5;
  out.f[1] = make_factor(prof, order, a.osc.mu + b.osc.mu, a.osc.base + b.osc.base,
                         a.osc.turns + b.osc.turns);
  out.n = 2;
  return out;
}

}  // namespace

SeparableSum multiply(const SeparableSum& a, const SeparableSum& b) {
  SeparableSum out;
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      const FactorProducts px = factor_multiply(ta.fx, tb.fx);
      if (px.n == 0) continue;
      const FactorProducts py = factor_multiply(ta.fy, tb.fy);
      if (py.n == 0) continue;
      for (int i = 0; i < px.n; ++i)
        for (int j = 0; j < py.n; ++j)
          out.add_term(ta.coeff * tb.coeff * px.coeffs[i] * py.coeffs[j], px.f[i], py.f[j]);
    }
  }
  return out;
}

SeparableSum compress(const SeparableSum& a, double rel_tol) {
  struct Slot {
    double sum = 0.0;
    double maxmag = 0.0;
    const Term* rep = nullptr;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Slot> slots;
  for (const auto& t : a.terms) {
    const std::string key = t.fx.key() + "||" + t.fy.key();
    auto [it, fresh] = slots.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.sum += t.coeff;
    it->second.maxmag = std::max(it->second.maxmag, std::fabs(t.coeff));
    it->second.rep = &t;
  }
  SeparableSum out;
  for (const auto& key : order) {
    const Slot& s = slots[key];
    if (s.maxmag == 0.0 || std::fabs(s.sum) <= rel_tol * s.maxmag) continue;
    out.terms.push_back({s.sum, s.rep->fx, s.rep->fy});
  }
  return out;
}

namespace {

// d/dx [P^{(d)} cos(mu x + th)] = P^{(d+1)} cos(.) + mu P^{(d)} cos(. + pi/2)
void d_factor(const Factor1D& f, std::vector<std::pair<double, Factor1D>>& out) {
  out.push_back({1.0, make_factor(f.profile, f.order + 1, f.osc.mu, f.osc.base, f.osc.turns)});
  if (f.osc.mu != 0.0)
    out.push_back(
        {f.osc.mu, make_factor(f.profile, f.order, f.osc.mu, f.osc.base, f.osc.turns + 1)});
}

// one antiderivative of P^{(d)} cos(mu x + th)
void d_inv_factor(const Factor1D& f, int ibp_depth, std::vector<std::pair<double, Factor1D>>& out) {
  if (f.osc.mu == 0.0) {
    if (f.order >= 1) {
      out.push_back({1.0, make_factor(f.profile, f.order - 1)});
    } else {
      out.push_back({1.0, make_factor(cached_cumulative(f.profile), 0)});
    }
    return;
  }
  // recursion: anti(P,d,th) = mu^{-1} (P,d,th-pi/2) - mu^{-1} anti(P,d+1,th-pi/2)
  double c = 1.0;
  int d = f.order;
  int turns = f.osc.turns;
  const double mu = f.osc.mu;
  for (int k = 0; k < ibp_depth; ++k) {
    c /= mu;
    turns -= 1;
    out.push_back({c, make_factor(f.profile, d, mu, f.osc.base, turns)});
    c = -c;
    d += 1;
  }
  const double theta = f.osc.base + wrap4(turns) * M_PI_2;
  out.push_back({c, make_factor(cached_osccum(f.profile, d, mu, theta), 0)});
}

}  // namespace

SeparableSum d_axis(const SeparableSum& s, Axis axis, int order) {
  SeparableSum cur = s;
  for (int k = 0; k < order; ++k) {
    SeparableSum next;
    std::vector<std::pair<double, Factor1D>> parts;
    for (const auto& t : cur.terms) {
      parts.clear();
      d_factor(axis == Axis::X ? t.fx : t.fy, parts);
      for (auto& [c, f] : parts) {
        if (axis == Axis::X)
          next.add_term(t.coeff * c, f, t.fy);
        else
          next.add_term(t.coeff * c, t.fx, f);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

SeparableSum d_inv_x(const SeparableSum& s, int order, int ibp_depth) {
  SeparableSum cur = s;
  for (int k = 0; k < order; ++k) {
    SeparableSum next;
    std::vector<std::pair<double, Factor1D>> parts;
    for (const auto& t : cur.terms) {
      parts.clear();
      d_inv_factor(t.fx, ibp_depth, parts);
      for (auto& [c, f] : parts) next.add_term(t.coeff * c, f, t.fy);
    }
    cur = std::move(next);
  }
  return cur;
}

SeparableSum multiply_profile(const SeparableSum& s, Axis axis, const ProfilePtr& p) {
  SeparableSum out;
  const Factor1D pf = make_factor(p, 0);
  for (const auto& t : s.terms) {
    const Factor1D& target = axis == Axis::X ? t.fx : t.fy;
    const FactorProducts pr = factor_multiply(target, pf);
    for (int i = 0; i < pr.n; ++i) {
      if (axis == Axis::X)
        out.add_term(t.coeff * pr.coeffs[i], pr.f[i], t.fy);
      else
        out.add_term(t.coeff * pr.coeffs[i], t.fx, pr.f[i]);
    }
  }
  return out;
}

// ---- x-side dense batched integrals ----

std::vector<double> x_product_integrals(const std::vector<Factor1D>& factors,
                                        const std::vector<std::vector<int>>& products) {
  std::vector<double> out(products.size(), 0.0);
  if (factors.empty() || products.empty()) return out;

  std::vector<char> used(factors.size(), 0);
  double osc_max = 0.0;
  for (const auto& pr : products) {
    double o = 0.0;
    for (int id : pr) {
      used[id] = 1;
      o += factors[id].osc_total();
    }
    osc_max = std::max(osc_max, o);
  }
  double lo = 0.0, hi = 0.0, smooth = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (!used[i]) continue;
    const Interval h = factors[i].support();
    if (first) {
      lo = h.lo;
      hi = h.hi;
      smooth = factors[i].smooth_scale();
      first = false;
    } else {
      lo = std::min(lo, h.lo);
      hi = std::max(hi, h.hi);
      smooth = std::min(smooth, factors[i].smooth_scale());
    }
  }
  if (first || !(hi > lo)) return out;

  const double width = quad::panel_width(osc_max, smooth);
  const std::size_t n_panels =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
  const auto& rule = quad::gl12();
  const std::size_t npts = rule.x.size();
  const double h = (hi - lo) / static_cast<double>(n_panels);

  const std::size_t block_panels = 8192;
  std::vector<double> nodes(block_panels * npts), weights(block_panels * npts);
  std::vector<std::vector<double>> vals(factors.size());
  std::vector<char> nonzero(factors.size(), 0);
  for (std::size_t i = 0; i < factors.size(); ++i)
    if (used[i]) vals[i].resize(block_panels * npts);

  for (std::size_t p0 = 0; p0 < n_panels; p0 += block_panels) {
    const std::size_t pb = std::min(block_panels, n_panels - p0);
    const std::size_t nn = pb * npts;
    for (std::size_t p = 0; p < pb; ++p) {
      const double a = lo + h * static_cast<double>(p0 + p);
      const double c = a + 0.5 * h, hw = 0.5 * h;
      for (std::size_t q = 0; q < npts; ++q) {
        nodes[p * npts + q] = c + hw * rule.x[q];
        weights[p * npts + q] = hw * rule.w[q];
      }
    }
    const double blo = lo + h * static_cast<double>(p0);
    const double bhi = lo + h * static_cast<double>(p0 + pb);
    for (std::size_t i = 0; i < factors.size(); ++i) {
      if (!used[i]) continue;
      const Interval s = factors[i].support();
      if (s.hi <= blo || s.lo >= bhi) {
        nonzero[i] = 0;
        continue;
      }
      nonzero[i] = 1;
      double* v = vals[i].data();
      const Factor1D& f = factors[i];
      for (std::size_t k = 0; k < nn; ++k) v[k] = f.eval(nodes[k]);
    }
    for (std::size_t j = 0; j < products.size(); ++j) {
      const auto& pr = products[j];
      bool live = true;
      for (int id : pr)
        if (!nonzero[id]) {
          live = false;
          break;
        }
      if (!live) continue;
      double acc = 0.0;
      if (pr.size() == 2) {
        const double* v0 = vals[pr[0]].data();
        const double* v1 = vals[pr[1]].data();
        for (std::size_t k = 0; k < nn; ++k) acc += weights[k] * v0[k] * v1[k];
      } else {
        for (std::size_t k = 0; k < nn; ++k) {
          double prod = weights[k];
          for (int id : pr) prod *= vals[id][k];
          acc += prod;
        }
      }
      out[j] += acc;
    }
  }
  return out;
}

// ---- y-side: product-to-sum + Filon ----

namespace {

struct OscPiece {
  double coeff = 1.0;
  double nu = 0.0;
  double base = 0.0;
  int turns = 0;
};

double legendre(int k, double x) {
  if (k == 0) return 1.0;
  double pm = 1.0, pc = x;
  for (int n = 1; n < k; ++n) {
    const double pn = ((2.0 * n + 1.0) * x * pc - n * pm) / (n + 1.0);
    pm = pc;
    pc = pn;
  }
  return pc;
}

// j_k(w) for k = 0..kmax, upward recurrence (valid for w >> kmax).
void sph_bessel_up(double w, int kmax, double* j) {
  const double s = std::sin(w), c = std::cos(w);
  j[0] = s / w;
  if (kmax >= 1) j[1] = s / (w * w) - c / w;
  for (int k = 1; k < kmax; ++k) j[k + 1] = (2.0 * k + 1.0) / w * j[k] - j[k - 1];
}

// int env(y) cos(nu y + theta) dy over [a, b] by Legendre-Filon panels.
template <typename Env>
double filon_osc_integral(Env&& env, double a, double b, double nu, double theta,
                          double smooth_scale) {
  constexpr int kDeg = 10;
  const double pw = smooth_scale / 8.0;
  const std::size_t n =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((b - a) / pw)));
  const double h = (b - a) / static_cast<double>(n);
  const auto& rule = quad::gl12();
  double total = 0.0;
  double q[kDeg + 1], jb[kDeg + 1], pk[kDeg + 1];
  for (std::size_t p = 0; p < n; ++p) {
    const double pa = a + h * p, pb = pa + h;
    const double c = 0.5 * (pa + pb), hw = 0.5 * h;
    const double w = nu * hw;
    if (std::fabs(w) < 25.0) {
      total += quad::integrate([&](double y) { return env(y) * std::cos(nu * y + theta); }, pa, pb,
                               std::fabs(nu), smooth_scale);
      continue;
    }
    for (int k = 0; k <= kDeg; ++k) q[k] = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double e = env(c + hw * rule.x[i]);
      if (e == 0.0) continue;
      for (int k = 0; k <= kDeg; ++k) q[k] += rule.w[i] * e * legendre(k, rule.x[i]);
    }
    for (int k = 0; k <= kDeg; ++k) q[k] *= (2.0 * k + 1.0) / 2.0;
    sph_bessel_up(std::fabs(w), kDeg, jb);
    const double thc = nu * c + theta;
    const double sgn = w < 0.0 ? -1.0 : 1.0;  // j_k odd/even handled via trig branch
    pk[0] = std::cos(thc);
    pk[1] = -std::sin(thc) * sgn;
    pk[2] = -std::cos(thc);
    pk[3] = std::sin(thc) * sgn;
    double s = 0.0;
    for (int k = 0; k <= kDeg; ++k) s += q[k] * 2.0 * jb[k] * pk[k % 4];
    total += hw * s;
  }
  return total;
}

double osc_env_integral(const std::vector<const Factor1D*>& env, const IntervalSet& domain,
                        double nu, double base, int turns) {
  if (nu < 0.0) {
    nu = -nu;
    base = -base;
    turns = -turns;
  }
  turns = wrap4(turns);
  const double theta = base + turns * M_PI_2;
  double smooth = env.empty() ? 1.0 : env[0]->smooth_scale();
  for (const auto* f : env) smooth = std::min(smooth, f->smooth_scale());
  auto env_val = [&](double y) {
    double v = 1.0;
    for (const auto* f : env) {
      v *= f->profile->deriv(f->order, y);
      if (v == 0.0) return 0.0;
    }
    return v;
  };
  double total = 0.0;
  for (const auto& iv : domain) {
    if (!(iv.hi > iv.lo)) continue;
    if (nu * iv.width() <= 400.0) {
      total += quad::integrate([&](double y) { return env_val(y) * std::cos(nu * y + theta); },
                               iv.lo, iv.hi, nu, smooth);
    } else {
      total += filon_osc_integral(env_val, iv.lo, iv.hi, nu, theta, smooth);
    }
  }
  return total;
}

IntervalSet intersect_sets(const IntervalSet& a, const IntervalSet& b) {
  IntervalSet out;
  for (const auto& x : a)
    for (const auto& y : b)
      if (x.intersects(y)) out.push_back({std::max(x.lo, y.lo), std::min(x.hi, y.hi)});
  return merge_intervals(std::move(out));
}

}  // namespace

double y_product_integral(const std::vector<Factor1D>& factors) {
  if (factors.empty()) return 0.0;
  IntervalSet domain = factors[0].support_set();
  for (std::size_t i = 1; i < factors.size(); ++i)
    domain = intersect_sets(domain, factors[i].support_set());
  if (domain.empty()) return 0.0;

  std::vector<OscPiece> pieces{OscPiece{}};
  std::vector<const Factor1D*> env;
  for (const auto& f : factors) {
    env.push_back(&f);
    const Osc& o = f.osc;
    if (o.mu == 0.0 && o.base == 0.0 && o.turns == 0) continue;
    if (o.mu == 0.0) {
      const double cst = osc_branch(o.base, o.turns);
      for (auto& p : pieces) p.coeff *= cst;
      continue;
    }
    std::vector<OscPiece> next;
    next.reserve(pieces.size() * 2);
    for (const auto& p : pieces) {
      next.push_back({p.coeff * 0.5, p.nu + o.mu, p.base + o.base, p.turns + o.turns});
      next.push_back({p.coeff * 0.5, p.nu - o.mu, p.base - o.base, p.turns - o.turns});
    }
    pieces = std::move(next);
  }
  double total = 0.0;
  for (const auto& p : pieces) {
    if (p.coeff == 0.0) continue;
    total += p.coeff * osc_env_integral(env, domain, p.nu, p.base, p.turns);
  }
  return total;
}

// ---- 2-D inner products ----

namespace {

struct FactorRegistry {
  std::vector<Factor1D> factors;
  std::unordered_map<std::string, int> ids;
  int intern(const Factor1D& f) {
    auto it = ids.find(f.key());
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(factors.size());
    factors.push_back(f);
    ids.emplace(f.key(), id);
    return id;
  }
};

}  // namespace

double inner(const SeparableSum& a, const SeparableSum& b) {
  if (a.terms.empty() || b.terms.empty()) return 0.0;
  FactorRegistry xreg, yreg;
  std::vector<int> ax(a.terms.size()), ay(a.terms.size());
  std::vector<int> bx(b.terms.size()), by(b.terms.size());
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    ax[i] = xreg.intern(a.terms[i].fx);
    ay[i] = yreg.intern(a.terms[i].fy);
  }
  for (std::size_t j = 0; j < b.terms.size(); ++j) {
    bx[j] = xreg.intern(b.terms[j].fx);
    by[j] = yreg.intern(b.terms[j].fy);
  }

  std::unordered_map<long long, double> ycache;
  auto ypair = [&](int i, int j) {
    const long long key = static_cast<long long>(std::min(i, j)) * 100000 + std::max(i, j);
    auto it = ycache.find(key);
    if (it != ycache.end()) return it->second;
    const double v = y_product_integral({yreg.factors[i], yreg.factors[j]});
    ycache.emplace(key, v);
    return v;
  };

  std::unordered_map<long long, int> xslot;
  std::vector<std::vector<int>> xproducts;
  struct Contrib {
    int xprod;
    double cy;
  };
  std::vector<Contrib> contribs;
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    for (std::size_t j = 0; j < b.terms.size(); ++j) {
      const double cy = ypair(ay[i], by[j]);
      if (cy == 0.0) continue;
      const double cc = a.terms[i].coeff * b.terms[j].coeff * cy;
      if (cc == 0.0) continue;
      const long long key =
          static_cast<long long>(std::min(ax[i], bx[j])) * 100000 + std::max(ax[i], bx[j]);
      auto [it, fresh] = xslot.try_emplace(key, static_cast<int>(xproducts.size()));
      if (fresh) xproducts.push_back({ax[i], bx[j]});
      contribs.push_back({it->second, cc});
    }
  }
  const std::vector<double> xvals = x_product_integrals(xreg.factors, xproducts);
  double total = 0.0;
  for (const auto& c : contribs) total += c.cy * xvals[c.xprod];
  return total;
}

double l2_norm(const SeparableSum& a) {
  const double v = inner(a, a);
  return std::sqrt(std::max(0.0, v));
}

double integral_of_product(const std::vector<const SeparableSum*>& sums) {
  if (sums.empty()) return 0.0;
  for (const auto* s : sums)
    if (s->terms.empty()) return 0.0;

  FactorRegistry xreg, yreg;
  std::unordered_map<std::string, double> ycache;
  std::unordered_map<std::string, int> xslot;
  std::vector<std::vector<int>> xproducts;
  struct Contrib {
    int xprod;
    double cy;
  };
  std::vector<Contrib> contribs;

  std::vector<std::size_t> idx(sums.size(), 0);
  while (true) {
    double coeff = 1.0;
    std::vector<int> xs, ys;
    for (std::size_t k = 0; k < sums.size(); ++k) {
      const Term& t = sums[k]->terms[idx[k]];
      coeff *= t.coeff;
      xs.push_back(xreg.intern(t.fx));
      ys.push_back(yreg.intern(t.fy));
    }
    if (coeff != 0.0) {
      std::sort(ys.begin(), ys.end());
      std::string ykey;
      for (int id : ys) ykey += std::to_string(id) + ",";
      auto yit = ycache.find(ykey);
      double cy;
      if (yit != ycache.end()) {
        cy = yit->second;
      } else {
        std::vector<Factor1D> yf;
        for (int id : ys) yf.push_back(yreg.factors[id]);
        cy = y_product_integral(yf);
        ycache.emplace(ykey, cy);
      }
      if (cy != 0.0) {
        std::sort(xs.begin(), xs.end());
        std::string xkey;
        for (int id : xs) xkey += std::to_string(id) + ",";
        auto [it, fresh] = xslot.try_emplace(xkey, static_cast<int>(xproducts.size()));
        if (fresh) xproducts.push_back(xs);
        contribs.push_back({it->second, coeff * cy});
      }
    }
    // next multi-index
    std::size_t k = 0;
    for (; k < sums.size(); ++k) {
      if (++idx[k] < sums[k]->terms.size()) break;
      idx[k] = 0;
    }
    if (k == sums.size()) break;
  }
  const std::vector<double> xvals = x_product_integrals(xreg.factors, xproducts);
  double total = 0.0;
  for (const auto& c : contribs) total += c.cy * xvals[c.xprod];
  return total;
}

namespace {

bool bounding_box(const SeparableSum& s, Interval& bx, Interval& by) {
  bool first = true;
  for (const auto& t : s.terms) {
    const Interval hx = t.fx.support(), hy = t.fy.support();
    if (first) {
      bx = hx;
      by = hy;
      first = false;
    } else {
      bx.lo = std::min(bx.lo, hx.lo);
      bx.hi = std::max(bx.hi, hx.hi);
      by.lo = std::min(by.lo, hy.lo);
      by.hi = std::max(by.hi, hy.hi);
    }
  }
  return !first;
}

}  // namespace

double sup_norm_estimate(const SeparableSum& s, std::size_t nx, std::size_t ny) {
  Interval bx, by;
  if (!bounding_box(s, bx, by)) return 0.0;
  double m = 0.0;
  for (std::size_t j = 0; j <= ny; ++j) {
    const double y = by.lo + by.width() * static_cast<double>(j) / static_cast<double>(ny);
    for (std::size_t i = 0; i <= nx; ++i) {
      const double x = bx.lo + bx.width() * static_cast<double>(i) / static_cast<double>(nx);
      m = std::max(m, std::fabs(s.eval(x, y)));
    }
  }
  return m;
}

Field2D render(const SeparableSum& s, const Grid2D& grid) {
  Interval bx, by;
  Field2D out(grid);
  if (!bounding_box(s, bx, by)) return out;
  const double x0 = grid.gx.origin, x1 = grid.gx.origin + grid.gx.length;
  const double y0 = grid.gy.origin, y1 = grid.gy.origin + grid.gy.length;
  if (bx.lo < x0 || bx.hi > x1 || by.lo < y0 || by.hi > y1)
    throw SupportOverflowError("render: sum support [" + fmt(bx.lo) + "," + fmt(bx.hi) + "]x[" +
                               fmt(by.lo) + "," + fmt(by.hi) + "] exceeds grid box");
  const std::size_t nx = grid.gx.n, ny = grid.gy.n;
  std::vector<double> vx(nx), vy(ny);
  for (const auto& t : s.terms) {
    for (std::size_t i = 0; i < nx; ++i) vx[i] = t.fx.eval(grid.gx.point(i));
    for (std::size_t j = 0; j < ny; ++j) vy[j] = t.fy.eval(grid.gy.point(j));
    for (std::size_t j = 0; j < ny; ++j) {
      const double cy = t.coeff * vy[j];
      if (cy == 0.0) continue;
      double* row = &out.values[j * nx];
      for (std::size_t i = 0; i < nx; ++i) row[i] += cy * vx[i];
    }
  }
  return out;
}

std::string to_json(const SeparableSum& s) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& t : s.terms) {
    auto fac = [](const Factor1D& f) {
      return nlohmann::json{{"profile", f.profile->key()},
                            {"order", f.order},
                            {"mu", f.osc.mu},
                            {"base", f.osc.base},
                            {"turns", f.osc.turns},
                            {"support", {f.support().lo, f.support().hi}}};
    };
    j.push_back({{"coeff", t.coeff}, {"fx", fac(t.fx)}, {"fy", fac(t.fy)}});
  }
  return j.dump(2);
}

}  // namespace kpi

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace kpi::quad {

// Gauss-Legendre rules on [-1, 1].
struct GLRule {
  std::vector<double> x;
  std::vector<double> w;
};

const GLRule& gl8();
const GLRule& gl12();

// Integrate f over [a, b] with one GL-12 panel.
template <typename F>
double gl_panel(F&& f, double a, double b, const GLRule& rule) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(c + h * rule.x[i]);
  return s * h;
}

// Panel width resolving both an oscillation (rad/length) and an envelope scale.
// Oscillatory phase per panel is kept below ~2 rad so GL-12 is exact to machine
// precision. The envelope divisor 64 resolves the sharp shoulder of high-order
// mollifier derivatives near the support edge.
inline double panel_width(double osc_rad_per_len, double smooth_scale) {
  double w = smooth_scale / 64.0;
  if (osc_rad_per_len > 0.0) w = std::min(w, 2.0 / osc_rad_per_len);
  return w;
}

// Composite GL-12 with oscillation-aware uniform panels over [a, b].
template <typename F>
double integrate(F&& f, double a, double b, double osc_rad_per_len, double smooth_scale) {
  if (!(b > a)) return 0.0;
  const double w = panel_width(osc_rad_per_len, smooth_scale);
  const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((b - a) / w)));
  const GLRule& rule = gl12();
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += gl_panel(f, a + h * k, a + h * (k + 1), rule);
  return s;
}

// Chebyshev-Lobatto interpolation table of the antiderivative of an integrand,
// on uniform panels; the backbone of cumulative-profile evaluation.
class PanelTable {
 public:
  PanelTable() = default;
  // Builds F(x) = base + int_lo^x f, clamping to the accumulated constants
  // outside [lo, hi].
  PanelTable(const std::function<double(double)>& f, double lo, double hi, std::size_t n_panels,
             int degree = 10);

  double eval(double x) const;
  double left_value() const { return left_; }
  double right_value() const { return right_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_ = 0.0, hi_ = 1.0, dx_ = 1.0;
  double left_ = 0.0, right_ = 0.0;
  int deg_ = 0;
  std::size_t n_ = 0;
  std::vector<double> coeff_;  // (deg_+1) Chebyshev coefficients per panel
};

}  // namespace kpi::quad

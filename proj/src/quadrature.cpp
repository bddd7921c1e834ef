#include "kpi/quadrature.hpp"

#include <cassert>
#include <cmath>

namespace kpi::quad {

const GLRule& gl8() {
  static const GLRule r = [] {
    GLRule g;
    const double xs[] = {0.18343464249564978, 0.52553240991632899, 0.79666647741362673,
                         0.96028985649753618};
    const double ws[] = {0.36268378337836177, 0.31370664587788705, 0.22238103445337434,
                         0.10122853629037669};
    for (int i = 3; i >= 0; --i) {
      g.x.push_back(-xs[i]);
      g.w.push_back(ws[i]);
    }
    for (int i = 0; i < 4; ++i) {
      g.x.push_back(xs[i]);
      g.w.push_back(ws[i]);
    }
    return g;
  }();
  return r;
}

const GLRule& gl12() {
  static const GLRule r = [] {
    GLRule g;
    const double xs[] = {0.12523340851146891, 0.36783149899818018, 0.58731795428661748,
                         0.76990267419430469, 0.9041172563704748,  0.98156063424671924};
    const double ws[] = {0.24914704581340269, 0.23349253653835464, 0.20316742672306565,
                         0.16007832854334611, 0.10693932599531888, 0.047175336386512022};
    for (int i = 5; i >= 0; --i) {
      g.x.push_back(-xs[i]);
      g.w.push_back(ws[i]);
    }
    for (int i = 0; i < 6; ++i) {
      g.x.push_back(xs[i]);
      g.w.push_back(ws[i]);
    }
    return g;
  }();
  return r;
}

PanelTable::PanelTable(const std::function<double(double)>& f, double lo, double hi,
                       std::size_t n_panels, int degree) {
  lo_ = lo;
  hi_ = hi;
  n_ = n_panels == 0 ? 1 : n_panels;
  deg_ = degree;
  dx_ = (hi - lo) / static_cast<double>(n_);
  const int d = deg_;
  const int nc = d + 2;  // antiderivative picks up one extra mode
  coeff_.assign(n_ * nc, 0.0);

  std::vector<double> node(d + 1), fs(d + 1), c(d + 1), cap(nc);
  for (int j = 0; j <= d; ++j) node[j] = std::cos(M_PI * j / d);

  double running = 0.0;
  left_ = 0.0;
  for (std::size_t p = 0; p < n_; ++p) {
    const double a = lo_ + dx_ * p;
    const double ctr = a + 0.5 * dx_, h = 0.5 * dx_;
    for (int j = 0; j <= d; ++j) fs[j] = f(ctr + h * node[j]);
    // Chebyshev coefficients via DCT-I
    for (int k = 0; k <= d; ++k) {
      double s = 0.5 * (fs[0] + (k % 2 == 0 ? fs[d] : -fs[d]));
      for (int j = 1; j < d; ++j) s += fs[j] * std::cos(M_PI * j * k / d);
      c[k] = 2.0 * s / d;
    }
    c[0] *= 0.5;
    c[d] *= 0.5;
    // antiderivative coefficients, anchored so the panel starts at `running`
    for (int m = 1; m <= d + 1; ++m) {
      const double cm1 = (m - 1 == 0) ? 2.0 * c[0] : c[m - 1];
      const double cp1 = (m + 1 <= d) ? c[m + 1] : 0.0;
      cap[m] = h * (cm1 - cp1) / (2.0 * m);
    }
    double at_left = 0.0;
    for (int m = 1; m <= d + 1; ++m) at_left += (m % 2 == 0 ? cap[m] : -cap[m]);
    cap[0] = running - at_left;
    double at_right = 0.0;
    for (int m = 0; m <= d + 1; ++m) at_right += cap[m];
    running = at_right;
    for (int m = 0; m < nc; ++m) coeff_[p * nc + m] = cap[m];
  }
  right_ = running;
}

double PanelTable::eval(double x) const {
  if (coeff_.empty()) return 0.0;
  if (x <= lo_) return left_;
  if (x >= hi_) return right_;
  std::size_t p = static_cast<std::size_t>((x - lo_) / dx_);
  if (p >= n_) p = n_ - 1;
  const double a = lo_ + dx_ * p;
  double s = 2.0 * (x - a) / dx_ - 1.0;
  if (s < -1.0) s = -1.0;
  if (s > 1.0) s = 1.0;
  const int nc = deg_ + 2;
  const double* c = &coeff_[p * nc];
  // Clenshaw
  double b1 = 0.0, b2 = 0.0;
  for (int k = nc - 1; k >= 1; --k) {
    const double b0 = 2.0 * s * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return s * b1 - b2 + c[0];
}

}  // namespace kpi::quad

#include "kpi/functionals.hpp"

#include <cmath>

#include "kpi/errors.hpp"

namespace kpi {

namespace {

double grid_mean_product(const std::vector<const Field2D*>& fields) {
  const Field2D& f0 = *fields[0];
  double s = 0.0;
  for (std::size_t i = 0; i < f0.values.size(); ++i) {
    double p = 1.0;
    for (const Field2D* f : fields) p *= f->values[i];
    s += p;
  }
  return s / static_cast<double>(f0.values.size());
}

}  // namespace

double mass(const Field2D& u) {
  double s = 0.0;
  for (double v : u.values) s += v * v;
  return s * u.grid.gx.spacing() * u.grid.gy.spacing();
}

double energy(const Field2D& u, double mean_tol) {
  const SpectralField hat = fft(u);
  require_zero_x_mean(hat, mean_tol);
  const double ux2 = std::pow(l2_norm(dx(hat, 1)), 2);
  const double my2 = std::pow(l2_norm(dx_inv(dy(hat, 1), 1, mean_tol)), 2);
  const Field2D fine = upsample(ifft(dealias(hat)), 2);
  const double cube = grid_mean_product({&fine, &fine, &fine}) * u.grid.gx.length *
                      u.grid.gy.length;
  return 0.5 * (ux2 + my2 - cube / 3.0);
}

std::vector<std::pair<std::string, double>> f_breakdown(const Field2D& u, double mean_tol) {
  const SpectralField hat = fft(u);
  require_zero_x_mean(hat, mean_tol);
  const double box = u.grid.gx.length * u.grid.gy.length;

  const double uxx2 = std::pow(l2_norm(dx(hat, 2)), 2);
  const double uy2 = std::pow(l2_norm(dy(hat, 1)), 2);
  const SpectralField m2yy_hat = dx_inv(dy(hat, 2), 2, mean_tol);
  const double m2yy2 = std::pow(l2_norm(m2yy_hat), 2);

  // cubic and quartic integrals on the 2x zero-padded grid
  const Field2D uf = upsample(ifft(dealias(hat)), 2);
  const Field2D m2yyf = upsample(ifft(dealias(m2yy_hat)), 2);
  const Field2D m1yf = upsample(ifft(dealias(dx_inv(dy(hat, 1), 1, mean_tol))), 2);
  const Field2D uxxf = upsample(ifft(dealias(dx(hat, 2))), 2);

  std::vector<std::pair<std::string, double>> parts;
  parts.emplace_back("3/2 int u_xx^2", 1.5 * uxx2);
  parts.emplace_back("5 int u_y^2", 5.0 * uy2);
  parts.emplace_back("5/6 int (dx^-2 u_yy)^2", 5.0 / 6.0 * m2yy2);
  parts.emplace_back("-5/6 int u^2 dx^-2 u_yy",
                     -5.0 / 6.0 * grid_mean_product({&uf, &uf, &m2yyf}) * box);
  parts.emplace_back("-5/6 int u (dx^-1 u_y)^2",
                     -5.0 / 6.0 * grid_mean_product({&uf, &m1yf, &m1yf}) * box);
  parts.emplace_back("5/4 int u^2 u_xx", 5.0 / 4.0 * grid_mean_product({&uf, &uf, &uxxf}) * box);
  parts.emplace_back("5/24 int u^4", 5.0 / 24.0 * grid_mean_product({&uf, &uf, &uf, &uf}) * box);
  return parts;
}

double f_functional(const Field2D& u, double mean_tol) {
  double f = 0.0;
  for (const auto& [name, v] : f_breakdown(u, mean_tol)) f += v;
  return f;
}

double x_norm(const Field2D& u, double mean_tol) {
  const SpectralField hat = fft(u);
  require_zero_x_mean(hat, mean_tol);
  return l2_norm(hat) + l2_norm(dx(hat, 1)) + l2_norm(dx_inv(dy(hat, 1), 1, mean_tol));
}

double z_norm(const Field2D& u, double mean_tol) {
  const SpectralField hat = fft(u);
  require_zero_x_mean(hat, mean_tol);
  return l2_norm(hat) + l2_norm(dx(hat, 2)) + l2_norm(dx_inv(dy(hat, 2), 2, mean_tol));
}

double ys_norm(const Field2D& u, double s, double mean_tol) {
  const SpectralField hat = fft(u);
  require_zero_x_mean(hat, mean_tol);
  return l2_norm(hat) + l2_norm(dx_abs(hat, s)) + l2_norm(dx_inv(dy(hat, 1), 1, mean_tol));
}

double lp_norm(const Field2D& u, double p) {
  const Field2D fine = upsample(ifft(dealias(fft(u))), 2);
  double s = 0.0;
  for (double v : fine.values) s += std::pow(std::fabs(v), p);
  s *= fine.grid.gx.spacing() * fine.grid.gy.spacing();
  return std::pow(s, 1.0 / p);
}

double sobolev_ratio(const Field2D& u, double p) {
  if (!(p >= 2.0 && p <= 6.0)) throw ConstraintError("sobolev_ratio: p must lie in [2, 6]");
  const SpectralField hat = fft(u);
  require_zero_x_mean(hat, 1e-8);
  const double l2 = l2_norm(hat);
  const double ux = l2_norm(dx(hat, 1));
  const double m1y = l2_norm(dx_inv(dy(hat, 1), 1, 1e-8));
  if (l2 == 0.0 || ux == 0.0 || m1y == 0.0)
    throw DegenerateRatioError("sobolev_ratio: vanishing right-hand factor");
  // p = 2: the exponents collapse and both sides are the L2 norm
  if (p == 2.0) return l2 / l2;
  const double rhs = std::pow(l2, (6.0 - p) / (2.0 * p)) * std::pow(ux, (p - 2.0) / p) *
                     std::pow(m1y, (p - 2.0) / (2.0 * p));
  return lp_norm(u, p) / rhs;
}

Diagnostics diagnostics(const Field2D& u, double t, bool with_f) {
  Diagnostics d;
  d.t = t;
  d.n_mass = mass(u);
  const SpectralField hat = fft(u);
  require_zero_x_mean(hat);
  const double ux2 = std::pow(l2_norm(dx(hat, 1)), 2);
  const double my2 = std::pow(l2_norm(dx_inv(dy(hat, 1), 1)), 2);
  const Field2D fine = upsample(ifft(dealias(hat)), 2);
  double cube = 0.0;
  for (double v : fine.values) cube += v * v * v;
  cube = cube / static_cast<double>(fine.values.size()) * u.grid.gx.length * u.grid.gy.length;
  d.components.emplace_back("1/2 int u_x^2", 0.5 * ux2);
  d.components.emplace_back("1/2 int (dx^-1 u_y)^2", 0.5 * my2);
  d.components.emplace_back("-1/6 int u^3", -cube / 6.0);
  d.energy = 0.5 * (ux2 + my2) - cube / 6.0;
  d.x_norm = l2_norm(hat) + std::sqrt(ux2) + std::sqrt(my2);
  d.z_norm = l2_norm(hat) + l2_norm(dx(hat, 2)) + l2_norm(dx_inv(dy(hat, 2), 2));
  if (with_f) {
    for (const auto& part : f_breakdown(u)) {
      d.f_value += part.second;
      d.components.push_back(part);
    }
  }
  return d;
}

}  // namespace kpi

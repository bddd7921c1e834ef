#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "kpi/grid.hpp"

namespace kpi {

// p(xi, eta) = xi^3 + eta^2/xi, the KP-I dispersion symbol.
double kp_symbol(double xi, double eta);
// grad p = (3 xi^2 - eta^2/xi^2, 2 eta/xi).
std::pair<double, double> kp_group_velocity(double xi, double eta);

// Half-spectrum (r2c layout) Fourier coefficients of a real field; the
// Hermitian partners coeffs(-kx,-ky) = conj(coeffs(kx,ky)) are implicit.
struct SpectralField {
  Grid2D grid;
  std::vector<std::complex<double>> coeffs;  // [jy * (nx/2+1) + kx]

  SpectralField() = default;
  explicit SpectralField(const Grid2D& g) : grid(g), coeffs(g.gy.n * (g.gx.n / 2 + 1)) {}

  std::size_t nxh() const { return grid.gx.n / 2 + 1; }
  std::complex<double>& at(std::size_t kx, std::size_t jy) { return coeffs[jy * nxh() + kx]; }
  const std::complex<double>& at(std::size_t kx, std::size_t jy) const {
    return coeffs[jy * nxh() + kx];
  }

  double xi(std::size_t kx) const { return 2.0 * M_PI * static_cast<double>(kx) / grid.gx.length; }
  long ky_of(std::size_t jy) const {
    const long n = static_cast<long>(grid.gy.n);
    const long j = static_cast<long>(jy);
    return j <= n / 2 ? j : j - n;
  }
  double eta(std::size_t jy) const {
    return 2.0 * M_PI * static_cast<double>(ky_of(jy)) / grid.gy.length;
  }

  // full-spectrum accessor by integer mode pair (any sign), Hermitian symmetry applied
  std::complex<double> coeff(long kx, long ky) const;

  double max_abs() const;
  double zero_column_max() const;  // max |coeffs| over the xi = 0 column
};

SpectralField fft(const Field2D& f);    // normalized; Nyquist rows/columns zeroed
Field2D ifft(const SpectralField& f);

SpectralField dx(const SpectralField& f, int order);
SpectralField dy(const SpectralField& f, int order);
SpectralField dx_inv(const SpectralField& f, int order, double mean_tol = 1e-10);
SpectralField dx_abs(const SpectralField& f, double s);  // |xi|^s multiplier
SpectralField linear_propagator(const SpectralField& f, double t, double mean_tol = 1e-10);
SpectralField dealias(const SpectralField& f);

void require_zero_x_mean(const SpectralField& f, double mean_tol = 1e-10);

double l2_norm(const SpectralField& f);  // Parseval-side L2 over the box

// Zero-padded spectral interpolation onto a (factor*nx, factor*ny) grid.
Field2D upsample(const Field2D& f, std::size_t factor);

}  // namespace kpi

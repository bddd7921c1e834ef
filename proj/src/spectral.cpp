#include "kpi/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "kpi/errors.hpp"

namespace kpi {

double kp_symbol(double xi, double eta) {
  if (xi == 0.0) throw ZeroXFrequencyError("kp_symbol: xi = 0");
  return xi * xi * xi + eta * eta / xi;
}

std::pair<double, double> kp_group_velocity(double xi, double eta) {
  if (xi == 0.0) throw ZeroXFrequencyError("kp_group_velocity: xi = 0");
  return {3.0 * xi * xi - eta * eta / (xi * xi), 2.0 * eta / xi};
}

std::complex<double> SpectralField::coeff(long kx, long ky) const {
  const long nx = static_cast<long>(grid.gx.n), ny = static_cast<long>(grid.gy.n);
  bool conj = false;
  if (kx < 0) {
    kx = -kx;
    ky = -ky;
    conj = true;
  }
  if (kx > nx / 2) return {0.0, 0.0};
  long jy = ((ky % ny) + ny) % ny;
  const std::complex<double> c = at(static_cast<std::size_t>(kx), static_cast<std::size_t>(jy));
  return conj ? std::conj(c) : c;
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs) m = std::max(m, std::abs(c));
  return m;
}

double SpectralField::zero_column_max() const {
  double m = 0.0;
  for (std::size_t jy = 0; jy < grid.gy.n; ++jy) m = std::max(m, std::abs(at(0, jy)));
  return m;
}

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

void zero_nyquist(SpectralField& f) {
  const std::size_t nx = f.grid.gx.n, ny = f.grid.gy.n;
  for (std::size_t jy = 0; jy < ny; ++jy) f.at(nx / 2, jy) = 0.0;
  for (std::size_t kx = 0; kx < f.nxh(); ++kx) f.at(kx, ny / 2) = 0.0;
}

}  // namespace

SpectralField fft(const Field2D& f) {
  SpectralField out(f.grid);
  const std::size_t nx = f.grid.gx.n, ny = f.grid.gy.n;
  std::vector<double> in = f.values;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_plan plan = fftw_plan_dft_r2c_2d(static_cast<int>(ny), static_cast<int>(nx), in.data(),
                                          reinterpret_cast<fftw_complex*>(out.coeffs.data()),
                                          FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / (static_cast<double>(nx) * static_cast<double>(ny));
  for (auto& c : out.coeffs) c *= scale;
  zero_nyquist(out);
  return out;
}

Field2D ifft(const SpectralField& f) {
  Field2D out(f.grid);
  const std::size_t nx = f.grid.gx.n, ny = f.grid.gy.n;
  std::vector<std::complex<double>> tmp = f.coeffs;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_plan plan = fftw_plan_dft_c2r_2d(static_cast<int>(ny), static_cast<int>(nx),
                                          reinterpret_cast<fftw_complex*>(tmp.data()),
                                          out.values.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  return out;
}

namespace {

// multiply every mode by g(xi, eta); kx = 0 column handled by caller
template <typename G>
SpectralField apply_multiplier(const SpectralField& f, G&& g) {
  SpectralField out = f;
  const std::size_t ny = f.grid.gy.n;
  for (std::size_t jy = 0; jy < ny; ++jy) {
    const double eta = f.eta(jy);
    for (std::size_t kx = 0; kx < f.nxh(); ++kx) {
      out.at(kx, jy) *= g(f.xi(kx), eta, kx == 0);
    }
  }
  return out;
}

std::complex<double> ipow(int order) {
  switch (((order % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

SpectralField dx(const SpectralField& f, int order) {
  const std::complex<double> rot = ipow(order);
  return apply_multiplier(f, [&](double xi, double, bool) {
    return rot * std::pow(xi, order);
  });
}

SpectralField dy(const SpectralField& f, int order) {
  const std::complex<double> rot = ipow(order);
  return apply_multiplier(f, [&](double, double eta, bool) {
    return rot * std::pow(eta, order);
  });
}

void require_zero_x_mean(const SpectralField& f, double mean_tol) {
  const double zc = f.zero_column_max();
  const double m = f.max_abs();
  if (zc > mean_tol * m && m > 0.0)
    throw ZeroMeanError("x-mean is not numerically zero: zero-column max " + std::to_string(zc) +
                        " vs field max " + std::to_string(m));
}

SpectralField dx_inv(const SpectralField& f, int order, double mean_tol) {
  require_zero_x_mean(f, mean_tol);
  const std::complex<double> rot = ipow(-order);
  return apply_multiplier(f, [&](double xi, double, bool zero) -> std::complex<double> {
    if (zero) return 0.0;
    return rot * std::pow(xi, -order);
  });
}

SpectralField dx_abs(const SpectralField& f, double s) {
  return apply_multiplier(f, [&](double xi, double, bool zero) -> std::complex<double> {
    if (zero) return 0.0;
    return std::pow(std::fabs(xi), s);
  });
}

SpectralField linear_propagator(const SpectralField& f, double t, double mean_tol) {
  require_zero_x_mean(f, mean_tol);
  return apply_multiplier(f, [&](double xi, double eta, bool zero) -> std::complex<double> {
    if (zero) return 1.0;  // zero modes carry no mass (gated above)
    const double phase = t * kp_symbol(xi, eta);
    return {std::cos(phase), std::sin(phase)};
  });
}

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  const double kx_cut = static_cast<double>(f.grid.gx.n) / 3.0;
  const double ky_cut = static_cast<double>(f.grid.gy.n) / 3.0;
  for (std::size_t jy = 0; jy < f.grid.gy.n; ++jy) {
    const bool ky_out = std::fabs(static_cast<double>(f.ky_of(jy))) > ky_cut;
    for (std::size_t kx = 0; kx < f.nxh(); ++kx) {
      if (ky_out || static_cast<double>(kx) > kx_cut) out.at(kx, jy) = 0.0;
    }
  }
  return out;
}

double l2_norm(const SpectralField& f) {
  const std::size_t nx = f.grid.gx.n;
  double s = 0.0;
  for (std::size_t jy = 0; jy < f.grid.gy.n; ++jy) {
    for (std::size_t kx = 0; kx < f.nxh(); ++kx) {
      const double w = (kx == 0 || kx == nx / 2) ? 1.0 : 2.0;
      s += w * std::norm(f.at(kx, jy));
    }
  }
  return std::sqrt(s * f.grid.gx.length * f.grid.gy.length);
}

Field2D upsample(const Field2D& f, std::size_t factor) {
  if (factor <= 1) return f;
  const SpectralField hat = fft(f);
  const Grid2D big{Grid1D(f.grid.gx.n * factor, f.grid.gx.length, f.grid.gx.origin),
                   Grid1D(f.grid.gy.n * factor, f.grid.gy.length, f.grid.gy.origin)};
  SpectralField bighat(big);
  const long ny = static_cast<long>(f.grid.gy.n);
  for (std::size_t jy = 0; jy < f.grid.gy.n; ++jy) {
    const long ky = hat.ky_of(jy);
    const std::size_t jy_big = static_cast<std::size_t>(((ky % static_cast<long>(big.gy.n)) +
                                                         static_cast<long>(big.gy.n)) %
                                                        static_cast<long>(big.gy.n));
    for (std::size_t kx = 0; kx < hat.nxh(); ++kx) bighat.at(kx, jy_big) = hat.at(kx, jy);
  }
  (void)ny;
  return ifft(bighat);
}

}  // namespace kpi

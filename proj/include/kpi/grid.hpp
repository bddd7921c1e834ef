#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "kpi/errors.hpp"

namespace kpi {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Uniform periodic grid on [origin, origin + length).
struct Grid1D {
  std::size_t n = 0;
  double length = 0.0;
  double origin = 0.0;

  Grid1D() = default;
  Grid1D(std::size_t n_, double length_, double origin_) : n(n_), length(length_), origin(origin_) {
    if (n < 8 || !is_power_of_two(n)) throw ConstraintError("Grid1D: n must be a power of two >= 8");
    if (!(length > 0.0)) throw ConstraintError("Grid1D: length must be positive");
  }

  double spacing() const { return length / static_cast<double>(n); }
  double point(std::size_t i) const { return origin + spacing() * static_cast<double>(i); }
};

struct Grid2D {
  Grid1D gx;
  Grid1D gy;

  Grid2D() = default;
  Grid2D(Grid1D gx_, Grid1D gy_) : gx(gx_), gy(gy_) {}

  std::size_t size() const { return gx.n * gy.n; }
};

// Real samples of u(x, y), row-major with y outer and x inner.
struct Field2D {
  Grid2D grid;
  std::vector<double> values;

  Field2D() = default;
  explicit Field2D(const Grid2D& g) : grid(g), values(g.size(), 0.0) {}

  double& at(std::size_t ix, std::size_t iy) { return values[iy * grid.gx.n + ix]; }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * grid.gx.n + ix]; }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
  }

  // Trapezoid = rectangle rule on a periodic grid: spectrally accurate.
  double integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.gx.spacing() * grid.gy.spacing();
  }

  double l2_norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s * grid.gx.spacing() * grid.gy.spacing());
  }
};

}  // namespace kpi

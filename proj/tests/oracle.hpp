#pragma once

// Test-side oracles, independent of the library's quadrature paths.

#include <cmath>
#include <functional>

namespace oracle {

// Composite Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Centered finite difference of given order (1 or 2).
inline double fd(const std::function<double(double)>& f, double x, int order, double h = 1e-5) {
  if (order == 1) return (f(x + h) - f(x - h)) / (2.0 * h);
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace oracle

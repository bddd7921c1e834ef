#pragma once

#include <cstddef>
#include <vector>

#include "kpi/errors.hpp"

namespace kpi {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::size_t n = 0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

// Least squares on (log x, log y); requires >= 2 positive points.
LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kpi

#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "displab/errors.hpp"

namespace displab::detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares straight line through (x_i, y_i).
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw validation_error("fit_line: need at least two matching points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw validation_error("fit_line: degenerate abscissae");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (out.intercept + out.slope * x[i]);
    ss += r * r;
    out.max_residual = std::max(out.max_residual, std::abs(r));
  }
  out.rms_residual = std::sqrt(ss / n);
  return out;
}

}  // namespace displab::detail

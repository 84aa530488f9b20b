#pragma once

#include <cmath>
#include <utility>

#include "displab/errors.hpp"

namespace displab::detail {

/// Newton iteration safeguarded by a sign-change bracket [a,b]:
/// steps leaving the bracket, or not shrinking it fast enough, fall back to
/// bisection.  Requires f(a) and f(b) of opposite sign (either may be zero).
template <class F, class DF>
double newton_bisect(F&& f, DF&& df, double a, double b, double fa, double fb,
                     double xtol, double ftol, int max_iter = 200) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw numerical_error("newton_bisect: no sign change in bracket");
  double x = 0.5 * (a + b);
  for (int it = 0; it < max_iter; ++it) {
    double fx = f(x);
    if (std::abs(fx) < ftol || 0.5 * (b - a) < xtol) return x;
    if ((fx > 0) == (fa > 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    double d = df(x);
    double step = (d != 0.0) ? fx / d : 0.0;
    double cand = x - step;
    if (!(cand > a && cand < b)) cand = 0.5 * (a + b);
    x = cand;
  }
  return x;
}

/// Plain bisection on a sign-change bracket.
template <class F>
double bisect(F&& f, double a, double b, double xtol, int max_iter = 200) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw numerical_error("bisect: no sign change in bracket");
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

/// Golden-section search for the maximizer of f on [a,b].
template <class F>
double golden_max(F&& f, double a, double b, double xtol, int max_iter = 400) {
  const double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace displab::detail

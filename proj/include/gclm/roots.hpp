#pragma once

// Scalar bracketing helpers.

#include <algorithm>
#include <cmath>

namespace gclm::detail {

template <class F>
double bisect(F&& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <class F>
double golden_min(F&& f, double a, double b, int iters = 200) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-16 * std::max(1.0, std::abs(a)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace gclm::detail

#pragma once

// Cooper-Verner 11-stage explicit Runge-Kutta method of order 8.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace gclm::rk8 {

inline constexpr int kStages = 11;

struct Tableau {
  std::array<std::array<double, kStages>, kStages> a{};
  std::array<double, kStages> b{};
  std::array<double, kStages> c{};
};

inline const Tableau& cooper_verner() {
  static const Tableau t = [] {
    Tableau r;
    const double s = std::sqrt(21.0);
    auto& a = r.a;
    a[1][0] = 1.0 / 2.0;
    a[2][0] = 1.0 / 4.0;
    a[2][1] = 1.0 / 4.0;
    a[3][0] = 1.0 / 7.0;
    a[3][1] = (-7.0 - 3.0 * s) / 98.0;
    a[3][2] = (21.0 + 5.0 * s) / 49.0;
    a[4][0] = (11.0 + s) / 84.0;
    a[4][2] = (18.0 + 4.0 * s) / 63.0;
    a[4][3] = (21.0 - s) / 252.0;
    a[5][0] = (5.0 + s) / 48.0;
    a[5][2] = (9.0 + s) / 36.0;
    a[5][3] = (-231.0 + 14.0 * s) / 360.0;
    a[5][4] = (63.0 - 7.0 * s) / 80.0;
    a[6][0] = (10.0 - s) / 42.0;
    a[6][2] = (-432.0 + 92.0 * s) / 315.0;
    a[6][3] = (633.0 - 145.0 * s) / 90.0;
    a[6][4] = (-504.0 + 115.0 * s) / 70.0;
    a[6][5] = (63.0 - 13.0 * s) / 35.0;
    a[7][0] = 1.0 / 14.0;
    a[7][4] = (14.0 - 3.0 * s) / 126.0;
    a[7][5] = (13.0 - 3.0 * s) / 63.0;
    a[7][6] = 1.0 / 9.0;
    a[8][0] = 1.0 / 32.0;
    a[8][4] = (91.0 - 21.0 * s) / 576.0;
    a[8][5] = 11.0 / 72.0;
    a[8][6] = (-385.0 - 75.0 * s) / 1152.0;
    a[8][7] = (63.0 + 13.0 * s) / 128.0;
    a[9][0] = 1.0 / 14.0;
    a[9][4] = 1.0 / 9.0;
    a[9][5] = (-733.0 - 147.0 * s) / 2205.0;
    a[9][6] = (515.0 + 111.0 * s) / 504.0;
    a[9][7] = (-51.0 - 11.0 * s) / 56.0;
    a[9][8] = (132.0 + 28.0 * s) / 245.0;
    a[10][4] = (-42.0 + 7.0 * s) / 18.0;
    a[10][5] = (-18.0 + 28.0 * s) / 45.0;
    a[10][6] = (-273.0 - 53.0 * s) / 72.0;
    a[10][7] = (301.0 + 53.0 * s) / 72.0;
    a[10][8] = (28.0 - 28.0 * s) / 45.0;
    a[10][9] = (49.0 - 7.0 * s) / 18.0;
    r.b = {1.0 / 20.0, 0, 0, 0, 0, 0, 0, 49.0 / 180.0, 16.0 / 45.0, 49.0 / 180.0, 1.0 / 20.0};
    r.c = {0.0,
           0.5,
           0.5,
           (7.0 + s) / 14.0,
           (7.0 + s) / 14.0,
           0.5,
           (7.0 - s) / 14.0,
           (7.0 - s) / 14.0,
           0.5,
           (7.0 + s) / 14.0,
           1.0};
    return r;
  }();
  return t;
}

namespace detail {
inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(const std::complex<double>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}
}  // namespace detail

// One step for any indexable container of double or complex<double>.
// rhs(t, y, dydt) writes the derivative; returns nullopt on a nonfinite stage.
template <class Vec, class Rhs>
std::optional<Vec> step(const Vec& y, double t, double h, Rhs&& rhs) {
  const Tableau& tb = cooper_verner();
  const std::size_t n = y.size();
  std::array<Vec, kStages> k;
  Vec stage = y;
  for (int i = 0; i < kStages; ++i) {
    if (i > 0) {
      for (std::size_t m = 0; m < n; ++m) {
        auto acc = y[m];
        for (int j = 0; j < i; ++j)
          if (tb.a[i][j] != 0.0) acc += (h * tb.a[i][j]) * k[j][m];
        stage[m] = acc;
      }
    }
    k[i] = y;
    rhs(t + tb.c[i] * h, stage, k[i]);
    for (std::size_t m = 0; m < n; ++m)
      if (!detail::finite(k[i][m])) return std::nullopt;
  }
  Vec out = y;
  for (std::size_t m = 0; m < n; ++m) {
    auto acc = y[m];
    for (int i = 0; i < kStages; ++i)
      if (tb.b[i] != 0.0) acc += (h * tb.b[i]) * k[i][m];
    out[m] = acc;
    if (!detail::finite(acc)) return std::nullopt;
  }
  return out;
}

}  // namespace gclm::rk8

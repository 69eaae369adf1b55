#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gclm/error.hpp"
#include "gclm/fft.hpp"

namespace gclm {

enum class Domain { Circle, CompactifiedLine };

inline const char* to_string(Domain d) { return d == Domain::Circle ? "circle" : "line"; }

// Real field on x_j = -pi + j*pi/N, j = 0..2N-1, held as the full complex spectrum
// w_k, k = -N..N-1, in FFT order (k >= 0 first). On the line the grid variable is q,
// with x = tan(q/2).
class SpectralField {
 public:
  SpectralField() = default;

  SpectralField(std::size_t n, Domain d) : n_(n), domain_(d), c_(2 * n) { check_size(n); }

  static SpectralField from_coefficients(std::span<const cplx> fft_order, Domain d) {
    SpectralField f(fft_order.size() / 2, d);
    std::copy(fft_order.begin(), fft_order.end(), f.c_.begin());
    return f;
  }

  static SpectralField from_values(std::span<const double> v, Domain d) {
    SpectralField f(v.size() / 2, d);
    AlignedVector<cplx> g(v.begin(), v.end());
    f.load_grid(g);
    return f;
  }

  // g(grid coordinate) -> value; coordinates are x on the circle and q on the line.
  template <class F>
  static SpectralField sample(std::size_t n, Domain d, F&& g) {
    SpectralField f(n, d);
    AlignedVector<cplx> buf(2 * n);
    for (std::size_t j = 0; j < 2 * n; ++j) buf[j] = g(f.grid_point(j));
    f.load_grid(buf);
    return f;
  }

  std::size_t n() const { return n_; }
  std::size_t size() const { return c_.size(); }
  Domain domain() const { return domain_; }
  double spacing() const { return std::numbers::pi / static_cast<double>(n_); }
  double grid_point(std::size_t j) const {
    return -std::numbers::pi + static_cast<double>(j) * spacing();
  }

  static long wavenumber(std::size_t m, std::size_t size) {
    const auto half = static_cast<long>(size / 2);
    const auto mm = static_cast<long>(m);
    return mm < half ? mm : mm - static_cast<long>(size);
  }
  long wavenumber(std::size_t m) const { return wavenumber(m, size()); }
  std::size_t index_of(long k) const {
    const auto s = static_cast<long>(size());
    return static_cast<std::size_t>(k >= 0 ? k : k + s);
  }

  cplx coeff(long k) const { return c_[index_of(k)]; }
  void set_coeff(long k, cplx v) { c_[index_of(k)] = v; }
  std::span<cplx> coeffs() { return c_; }
  std::span<const cplx> coeffs() const { return c_; }

  // Grid values with the (-1)^k phase of the shifted grid folded in.
  void grid_complex(std::span<cplx> out) const { spectrum_to_grid(c_, out); }

  std::vector<double> values() const {
    AlignedVector<cplx> g(size());
    grid_complex(g);
    std::vector<double> v(size());
    for (std::size_t j = 0; j < size(); ++j) v[j] = g[j].real();
    return v;
  }

  static void spectrum_to_grid(std::span<const cplx> c, std::span<cplx> out) {
    AlignedVector<cplx> tmp(c.begin(), c.end());
    for (std::size_t m = 1; m < tmp.size(); m += 2) tmp[m] = -tmp[m];
    fft_backward(tmp, out);
  }

  static void grid_to_spectrum(std::span<const cplx> g, std::span<cplx> out) {
    fft_forward(g, out);
    const double s = 1.0 / static_cast<double>(g.size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] *= (m % 2 ? -s : s);
  }

  void load_grid(std::span<const cplx> g) { grid_to_spectrum(g, c_); }

  // Zero-padding splits the Nyquist coefficient between +-N, keeping grid values exact.
  SpectralField resized(std::size_t new_n) const {
    SpectralField f(new_n, domain_);
    const long n_old = static_cast<long>(n_), n_new = static_cast<long>(new_n);
    if (new_n >= n_) {
      for (long k = -n_old + 1; k < n_old; ++k) f.set_coeff(k, coeff(k));
      if (new_n > n_) {
        f.set_coeff(-n_old, 0.5 * coeff(-n_old));
        f.set_coeff(n_old, 0.5 * coeff(-n_old));
      } else {
        f.set_coeff(-n_old, coeff(-n_old));
      }
    } else {
      for (long k = -n_new + 1; k < n_new; ++k) f.set_coeff(k, coeff(k));
      f.set_coeff(-n_new, coeff(-n_new) + coeff(n_new));
    }
    return f;
  }

  void enforce_symmetry() {
    const long n = static_cast<long>(n_);
    c_[0] = c_[0].real();
    for (long k = 1; k < n; ++k) {
      const cplx avg = 0.5 * (coeff(k) + std::conj(coeff(-k)));
      set_coeff(k, avg);
      set_coeff(-k, std::conj(avg));
    }
    set_coeff(-n, coeff(-n).real());
  }

  double symmetry_defect() const {
    const long n = static_cast<long>(n_);
    double d = std::abs(c_[0].imag()) + std::abs(coeff(-n).imag());
    for (long k = 1; k < n; ++k) d = std::max(d, std::abs(coeff(k) - std::conj(coeff(-k))));
    return d / std::max(max_abs_coeff(), 1e-300);
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
  }

  // max |w_k| over |k| > (1 - band) N relative to max |w_k|.
  double tail_ratio(double band = 0.125) const {
    const double mx = max_abs_coeff();
    if (mx == 0.0) return 0.0;
    const double cut = (1.0 - band) * static_cast<double>(n_);
    double t = 0.0;
    for (std::size_t m = 0; m < size(); ++m)
      if (static_cast<double>(std::abs(wavenumber(m))) > cut) t = std::max(t, std::abs(c_[m]));
    return t / mx;
  }

  bool all_finite() const {
    return std::all_of(c_.begin(), c_.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
  }

 private:
  static void check_size(std::size_t n) {
    if (n < 8 || !std::has_single_bit(n))
      throw Error(ErrorCode::InvalidArgument,
                  "grid size N must be a power of two >= 8, got " + std::to_string(n));
  }

  std::size_t n_ = 0;
  Domain domain_ = Domain::Circle;
  AlignedVector<cplx> c_;
};

}  // namespace gclm

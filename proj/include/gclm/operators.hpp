#pragma once

// Spectral multipliers, velocity recovery and norms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gclm/error.hpp"
#include "gclm/spectral_field.hpp"

namespace gclm {

inline constexpr double kJacobianGuard = 1e-10;

struct NormReport {
  double l2 = 0.0;
  double linf = 0.0;
  double b0 = 0.0;
  double b0_tail = 0.0;  // part of b0 carried by the top 12.5% band
  double mean = 0.0;
  double kinetic_energy = 0.0;
  bool energy_truncated = false;  // line only: integrand not decayed at |q| = pi(1-1/N)
};

namespace detail {

inline double sgn(long k) { return k > 0 ? 1.0 : (k < 0 ? -1.0 : 0.0); }

template <class Symbol>
SpectralField apply_symbol(const SpectralField& f, Symbol&& s) {
  SpectralField out(f.n(), f.domain());
  auto in = f.coeffs();
  auto o = out.coeffs();
  for (std::size_t m = 0; m < f.size(); ++m) o[m] = s(f.wavenumber(m)) * in[m];
  return out;
}

inline double pow_abs_k(long k, double sigma) {
  if (sigma == 0.0) return 1.0;
  const double ak = static_cast<double>(std::abs(k));
  if (sigma == 1.0) return ak;
  if (sigma == 2.0) return ak * ak;
  return std::pow(ak, sigma);
}

// sum_k c_k (-1)^k, i.e. the value at q = -pi.
inline cplx value_at_minus_pi(std::span<const cplx> c) {
  cplx s = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) s += (m % 2 ? -c[m] : c[m]);
  return s;
}

}  // namespace detail

// -i sgn(k); the Nyquist mode is dropped since the odd symbol is not defined there.
inline SpectralField hilbert(const SpectralField& f) {
  const long n = static_cast<long>(f.n());
  return detail::apply_symbol(f, [n](long k) {
    return k == -n ? cplx(0.0) : cplx(0.0, -detail::sgn(k));
  });
}

// |k|^sigma with |0|^0 = 1.
inline SpectralField lambda_sigma(const SpectralField& f, double sigma) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_sigma: sigma must be >= 0");
  return detail::apply_symbol(f, [sigma](long k) { return cplx(detail::pow_abs_k(k, sigma)); });
}

inline SpectralField derivative(const SpectralField& f, int order = 1) {
  const long n = static_cast<long>(f.n());
  return detail::apply_symbol(f, [n, order](long k) {
    if (k == -n && order % 2 == 1) return cplx(0.0);
    return std::pow(cplx(0.0, static_cast<double>(k)), order);
  });
}

// Constant C with H^q w + C vanishing at q = +-pi; k-space form of
// -(1/2pi) int w(q) tan(q/2) dq.
inline double line_hilbert_constant(const SpectralField& f) {
  double c = 0.0;
  const long n = static_cast<long>(f.n());
  for (long k = 1; k < n; ++k) c += (k % 2 ? 2.0 : -2.0) * f.coeff(k).imag();
  return c;
}

// Hilbert transform on the real line expressed in q: H^q w + C.
inline SpectralField line_hilbert(const SpectralField& f) {
  SpectralField h = hilbert(f);
  h.set_coeff(0, h.coeff(0) + line_hilbert_constant(f));
  return h;
}

// [(1+cos q) d/dq H^q]^sigma, which is Lambda^sigma in x.
inline SpectralField line_dissipation(const SpectralField& f, int sigma) {
  if (sigma < 0 || sigma > 2)
    throw Error(ErrorCode::InvalidArgument, "line_dissipation: sigma must be 0, 1 or 2");
  SpectralField out = f;
  for (int s = 0; s < sigma; ++s) {
    SpectralField d = derivative(hilbert(out));
    auto c = d.coeffs();
    std::vector<cplx> src(c.begin(), c.end());
    // multiplication by 1 + cos q = 1 + (e^{iq} + e^{-iq})/2 is a three-term stencil in k
    auto nd = SpectralField(f.n(), f.domain());
    const long n = static_cast<long>(f.n());
    for (long k = -n; k < n; ++k) {
      cplx v = src[d.index_of(k)];
      if (k - 1 >= -n) v += 0.5 * src[d.index_of(k - 1)];
      if (k + 1 < n) v += 0.5 * src[d.index_of(k + 1)];
      nd.set_coeff(k, v);
    }
    out = nd;
  }
  return out;
}

namespace detail {

// Velocity on the line: (1+cos q) u_q = H^q w + C, u(+-pi) = 0.
inline SpectralField line_velocity(const SpectralField& f) {
  const std::size_t M = f.size();
  const long n = static_cast<long>(f.n());
  SpectralField h = line_hilbert(f);
  AlignedVector<cplx> g(M);
  h.grid_complex(g);
  // limit of h/(1+cos q) where the Jacobian vanishes: h''/(-cos q)
  auto h2 = derivative(h, 2);
  AlignedVector<cplx> h2g;
  for (std::size_t j = 0; j < M; ++j) {
    const double q = f.grid_point(j);
    const double w = 1.0 + std::cos(q);
    if (w >= kJacobianGuard) {
      g[j] = g[j].real() / w;
    } else {
      if (h2g.empty()) {
        h2g.resize(M);
        h2.grid_complex(h2g);
      }
      g[j] = h2g[j].real() / (-std::cos(q));
    }
  }
  SpectralField u(f.n(), f.domain());
  SpectralField::grid_to_spectrum(g, u.coeffs());
  auto c = u.coeffs();
  for (std::size_t m = 0; m < M; ++m) {
    const long k = u.wavenumber(m);
    c[m] = (k == 0 || k == -n) ? cplx(0.0) : c[m] / cplx(0.0, static_cast<double>(k));
  }
  c[0] = -detail::value_at_minus_pi(c).real();
  return u;
}

}  // namespace detail

// Circle: u_k = -w_k/|k|, u_0 = 0. Line: see detail::line_velocity.
inline SpectralField velocity_from_omega(const SpectralField& f) {
  if (f.domain() == Domain::CompactifiedLine) return detail::line_velocity(f);
  const long n = static_cast<long>(f.n());
  return detail::apply_symbol(f, [n](long k) {
    return (k == 0 || k == -n) ? cplx(0.0) : cplx(-1.0 / static_cast<double>(std::abs(k)));
  });
}

namespace detail {

// int g^2 dx on the line via the q-trapezoid with weight 1/(1+cos q);
// at q = -pi the weight times g^2 tends to 2 g_q^2.
inline double line_square_integral(const SpectralField& g, bool* truncated) {
  const std::size_t M = g.size();
  const auto v = g.values();
  const cplx gq = value_at_minus_pi(derivative(g).coeffs());
  std::vector<double> integrand(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double w = 1.0 + std::cos(g.grid_point(j));
    integrand[j] = w >= kJacobianGuard ? v[j] * v[j] / w : 2.0 * gq.real() * gq.real();
  }
  double s = 0.0, mx = 0.0;
  for (double x : integrand) {
    s += x;
    mx = std::max(mx, x);
  }
  if (truncated) {
    const double edge = std::max(integrand[1], integrand[M - 1]);
    *truncated = mx > 0.0 && edge > 1e-8 * mx;
  }
  return s * g.spacing();
}

}  // namespace detail

inline NormReport norms(const SpectralField& f) {
  NormReport r;
  const auto c = f.coeffs();
  const double cut = 0.875 * static_cast<double>(f.n());
  for (std::size_t m = 0; m < f.size(); ++m) {
    const double a = std::abs(c[m]);
    r.b0 += a;
    if (static_cast<double>(std::abs(f.wavenumber(m))) > cut) r.b0_tail += a;
  }
  r.mean = c[0].real();
  for (double v : f.values()) r.linf = std::max(r.linf, std::abs(v));

  const SpectralField u = velocity_from_omega(f);
  if (f.domain() == Domain::Circle) {
    double s2 = 0.0, e2 = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) {
      s2 += std::norm(c[m]);
      e2 += std::norm(u.coeffs()[m]);
    }
    r.l2 = std::sqrt(2.0 * std::numbers::pi * s2);
    r.kinetic_energy = 2.0 * std::numbers::pi * e2;
  } else {
    r.l2 = std::sqrt(std::max(0.0, detail::line_square_integral(f, nullptr)));
    r.kinetic_energy = std::max(0.0, detail::line_square_integral(u, &r.energy_truncated));
  }
  return r;
}

}  // namespace gclm

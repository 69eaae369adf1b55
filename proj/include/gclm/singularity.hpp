#pragma once

// Closest complex singularity from the asymptotic Fourier decay
//   log|w_k| = log C - delta k - p log k.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gclm/error.hpp"
#include "gclm/spectral_field.hpp"

namespace gclm {

enum class WindowPolicy { Default, Early, Explicit };  // [N/4,N/3], [N/5,N/4], [k_lo,k_hi]

struct FitWindow {
  WindowPolicy policy = WindowPolicy::Default;
  std::size_t k_lo = 0;
  std::size_t k_hi = 0;
  std::size_t min_modes = 16;
  double floor_rel = 1e-13;

  static FitWindow explicit_range(std::size_t lo, std::size_t hi) {
    FitWindow w;
    w.policy = WindowPolicy::Explicit;
    w.k_lo = lo;
    w.k_hi = hi;
    return w;
  }

  std::pair<std::size_t, std::size_t> resolve(std::size_t n) const {
    switch (policy) {
      case WindowPolicy::Default: return {n / 4, n / 3};
      case WindowPolicy::Early: return {n / 5, n / 4};
      case WindowPolicy::Explicit: return {k_lo, k_hi};
    }
    return {n / 4, n / 3};
  }
};

struct DecayFit {
  double c_amp = 0.0;
  double delta = 0.0;
  double p = 0.0;
  std::size_t k_lo = 0;
  std::size_t k_hi = 0;
  double rms_residual = 0.0;
  std::size_t n_used = 0;
};

// Fit on magnitudes indexed by wavenumber: mag[k], k = 0..size-1.
inline DecayFit fit_decay_magnitudes(std::span<const double> mag, std::size_t k_lo,
                                     std::size_t k_hi, std::size_t min_modes = 16,
                                     double floor_rel = 1e-13) {
  if (k_lo < 1 || k_hi <= k_lo || k_hi >= mag.size())
    throw Error(ErrorCode::InvalidArgument,
                "fit window [" + std::to_string(k_lo) + "," + std::to_string(k_hi) + "] invalid");
  const double mx = *std::max_element(mag.begin(), mag.end());
  const double floor = floor_rel * mx;
  std::vector<std::size_t> ks;
  for (std::size_t k = k_lo; k <= k_hi; ++k)
    if (mag[k] > floor && std::isfinite(mag[k])) ks.push_back(k);
  if (ks.size() < std::max<std::size_t>(min_modes, 3))
    throw Error(ErrorCode::SpectrumTooClean,
                std::to_string(ks.size()) + " modes above floor in window, need " +
                    std::to_string(min_modes));
  Eigen::MatrixXd A(ks.size(), 3);
  Eigen::VectorXd y(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double k = static_cast<double>(ks[i]);
    A(i, 0) = 1.0;
    A(i, 1) = -k;
    A(i, 2) = -std::log(k);
    y(i) = std::log(mag[ks[i]]);
  }
  const Eigen::Vector3d x = A.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd r = A * x - y;
  DecayFit f;
  f.c_amp = std::exp(x(0));
  f.delta = x(1);
  f.p = x(2);
  f.k_lo = k_lo;
  f.k_hi = k_hi;
  f.rms_residual = std::sqrt(r.squaredNorm() / static_cast<double>(ks.size()));
  f.n_used = ks.size();
  return f;
}

inline std::vector<double> positive_magnitudes(const SpectralField& f) {
  std::vector<double> mag(f.n());
  for (std::size_t k = 0; k < f.n(); ++k) mag[k] = std::abs(f.coeff(static_cast<long>(k)));
  return mag;
}

inline DecayFit fit_fourier_decay(const SpectralField& f, const FitWindow& w = {}) {
  const auto [lo, hi] = w.resolve(f.n());
  const auto mag = positive_magnitudes(f);
  return fit_decay_magnitudes(mag, lo, hi, w.min_modes, w.floor_rel);
}

enum class RealPartBranch { Zero, PlusMinusPi };

// Real part of the closest singularity from the mean phase advance of w_{k+1} conj(w_k)
// across the fit window.
inline double singularity_real_part(const SpectralField& f, const FitWindow& w = {}) {
  const auto [lo, hi] = w.resolve(f.n());
  cplx s = 0.0;
  for (std::size_t k = std::max<std::size_t>(lo, 1); k < hi; ++k) {
    const auto kk = static_cast<long>(k);
    s += f.coeff(kk + 1) * std::conj(f.coeff(kk));
  }
  return -std::arg(s);
}

inline RealPartBranch classify_branch(double re_qc) {
  return std::abs(re_qc) < 0.5 * std::numbers::pi ? RealPartBranch::Zero
                                                  : RealPartBranch::PlusMinusPi;
}

// q-space distance to physical distance: tanh(delta/2) near q = 0, coth(delta/2) near
// q = +-pi; identity on the circle.
inline double delta_to_x(double delta, RealPartBranch branch, Domain d = Domain::CompactifiedLine) {
  if (d == Domain::Circle) return delta;
  const double t = std::tanh(0.5 * delta);
  return branch == RealPartBranch::Zero ? t : 1.0 / t;
}

}  // namespace gclm

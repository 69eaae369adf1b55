#pragma once

// Similarity-exponent fits from time series and critical-amplitude bisection.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gclm/dynamics.hpp"
#include "gclm/error.hpp"
#include "gclm/roots.hpp"

namespace gclm {

struct CollapseFit {
  double t_c = 0.0;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = 0.0;
  double c_amp = 0.0;
  double alpha_residual = std::numeric_limits<double>::quiet_NaN();
  double beta_residual = 0.0;
  double window_fraction = 0.25;
  std::size_t n_used = 0;
};

struct CollapseFitOptions {
  double window_fraction = 0.25;
  double min_growth = 1e4;        // required max|w| growth when the run did not stop on collapse
  bool require_signal = true;
};

namespace detail {

struct LineFit {
  double intercept = 0.0, slope = 0.0, rms = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    r2 += r * r;
  }
  f.rms = std::sqrt(r2 / n);
  return f;
}

}  // namespace detail

// log M = log C - beta log(t_c - t) by variable projection over t_c, then
// log delta_x = log C' + alpha log(t_c - t).
inline CollapseFit fit_collapse(std::span<const double> t, std::span<const double> max_abs,
                                std::span<const double> delta_x, bool stopped_on_collapse,
                                const CollapseFitOptions& opt = {}) {
  if (t.size() != max_abs.size() || t.size() != delta_x.size())
    throw Error(ErrorCode::InvalidArgument, "fit_collapse: column lengths differ");
  if (!(opt.window_fraction > 0.0 && opt.window_fraction <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "fit_collapse: window_fraction must be in (0, 1]");
  if (t.size() < 8) throw Error(ErrorCode::NoCollapseSignal, "fit_collapse: fewer than 8 samples");
  const double m0 = max_abs.front();
  const double mmax = *std::max_element(max_abs.begin(), max_abs.end());
  if (opt.require_signal && !stopped_on_collapse && !(mmax >= opt.min_growth * m0))
    throw Error(ErrorCode::NoCollapseSignal,
                "max|w| grew by " + std::to_string(mmax / m0) + ", no collapse stop");

  const std::size_t n = t.size();
  const std::size_t n_win = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(opt.window_fraction * n)));
  const std::size_t i0 = n - std::min(n, n_win);
  std::vector<double> tw(t.begin() + i0, t.end()), lm;
  for (std::size_t i = i0; i < n; ++i) lm.push_back(std::log(max_abs[i]));
  const double t_last = tw.back();
  const double span = std::max(tw.back() - tw.front(), 1e-300);

  auto residual_at = [&](double s, detail::LineFit* out) {
    const double tc = t_last + std::exp(s);
    std::vector<double> x(tw.size());
    for (std::size_t i = 0; i < tw.size(); ++i) x[i] = std::log(tc - tw[i]);
    const auto f = detail::fit_line(x, lm);
    if (out) *out = f;
    return f.rms;
  };

  // seed: last doubling time of max|w|
  double seed_gap = span;
  for (std::size_t i = n - 1; i > 0; --i)
    if (max_abs[i - 1] <= 0.5 * max_abs.back()) {
      seed_gap = std::max(t_last - t[i - 1], 1e-300);
      break;
    }
  const double s_lo = std::log(std::max(span, seed_gap) * 1e-10);
  const double s_hi = std::log(std::max(span, seed_gap) * 1e2);
  const int grid = 400;
  double best_s = std::log(seed_gap), best_r = residual_at(best_s, nullptr);
  for (int i = 0; i <= grid; ++i) {
    const double s = s_lo + (s_hi - s_lo) * i / grid;
    const double r = residual_at(s, nullptr);
    if (r < best_r) {
      best_r = r;
      best_s = s;
    }
  }
  const double h = (s_hi - s_lo) / grid;
  const double s_star = detail::golden_min([&](double s) { return residual_at(s, nullptr); },
                                           best_s - h, best_s + h);
  detail::LineFit lf;
  residual_at(s_star, &lf);

  CollapseFit cf;
  cf.t_c = t_last + std::exp(s_star);
  cf.beta = -lf.slope;
  cf.c_amp = std::exp(lf.intercept);
  cf.beta_residual = lf.rms;
  cf.window_fraction = opt.window_fraction;
  cf.n_used = tw.size();
  if (opt.require_signal && !(cf.beta > 0.0))
    throw Error(ErrorCode::NoCollapseSignal, "fitted beta = " + std::to_string(cf.beta) + " is not positive");

  std::vector<double> xa, ya;
  for (std::size_t i = i0; i < n; ++i)
    if (std::isfinite(delta_x[i]) && delta_x[i] > 0.0) {
      xa.push_back(std::log(cf.t_c - t[i]));
      ya.push_back(std::log(delta_x[i]));
    }
  if (xa.size() >= 3) {
    const auto af = detail::fit_line(xa, ya);
    cf.alpha = af.slope;
    cf.alpha_residual = af.rms;
  }
  return cf;
}

inline CollapseFit fit_collapse(const TimeSeries& ts, const CollapseFitOptions& opt = {}) {
  const auto t = ts.times();
  const auto m = ts.max_abs_omega();
  const auto d = ts.delta_x();
  // a nonfinite or rejected last sample carries no information for the fit
  std::size_t n = t.size();
  while (n > 0 && !(std::isfinite(m[n - 1]) && m[n - 1] > 0.0)) --n;
  return fit_collapse(std::span(t).first(n), std::span(m).first(n), std::span(d).first(n),
                      ts.terminal_status != TerminalStatus::ReachedTEnd, opt);
}

// ------------------------------------------------------------ critical amplitude

enum class ProbeOutcome { NoBlowUp, BlowUp, Inconclusive };

inline const char* to_string(ProbeOutcome o) {
  switch (o) {
    case ProbeOutcome::NoBlowUp: return "no_blowup";
    case ProbeOutcome::BlowUp: return "blowup";
    case ProbeOutcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

// Binary oracle for one probe run.
inline ProbeOutcome classify_probe(const TimeSeries& ts) {
  if (ts.terminal_status != TerminalStatus::ReachedTEnd) return ProbeOutcome::BlowUp;
  const auto& s = ts.samples;
  const double m0 = s.front().max_abs_omega;
  const double m1 = s.back().max_abs_omega;
  const std::size_t n = ts.final_field.n();
  if (m1 >= 1e4 * m0 && std::isfinite(s.back().delta_x) &&
      s.back().delta_x < 10.0 * std::numbers::pi / static_cast<double>(n))
    return ProbeOutcome::BlowUp;
  const double half = 0.5 * ts.t_final;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& smp : s) {
    if (smp.t < half) continue;
    if (smp.max_abs_omega > prev * (1.0 + 1e-12)) return ProbeOutcome::Inconclusive;
    prev = smp.max_abs_omega;
  }
  return ProbeOutcome::NoBlowUp;
}

struct CriticalAmplitude {
  double a_param = 0.0, sigma = 0.0, nu = 0.0;
  double A_no_blowup = 0.0, A_blowup = 0.0;
  std::vector<std::pair<double, ProbeOutcome>> probes;
};

using ProbeFn = std::function<ProbeOutcome(double)>;

// Bisection on A; Inconclusive probes count on the blow-up side.
inline CriticalAmplitude critical_amplitude(const ProbeFn& probe, double A_lo, double A_hi, double tol,
                                            const GclmParams& p = {}) {
  if (!(A_lo < A_hi) || !(tol > 0.0))
    throw Error(ErrorCode::InvalidArgument, "critical_amplitude: need A_lo < A_hi and tol > 0");
  CriticalAmplitude r;
  r.a_param = p.a;
  r.sigma = p.sigma;
  r.nu = p.nu;
  auto run = [&](double A) {
    const ProbeOutcome o = probe(A);
    r.probes.emplace_back(A, o);
    return o;
  };
  const auto lo = run(A_lo);
  const auto hi = run(A_hi);
  if (lo != ProbeOutcome::NoBlowUp || hi == ProbeOutcome::NoBlowUp)
    throw Error(ErrorCode::BadBracket, std::string("critical_amplitude: outcomes at bracket ends are ") +
                                           to_string(lo) + " and " + to_string(hi));
  double a = A_lo, b = A_hi;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (run(mid) == ProbeOutcome::NoBlowUp)
      a = mid;
    else
      b = mid;
  }
  r.A_no_blowup = a;
  r.A_blowup = b;
  return r;
}

inline SpectralField two_mode_data(double A, std::size_t n) {
  return SpectralField::sample(n, Domain::Circle,
                               [A](double x) { return -A * (std::sin(x) + 0.5 * std::sin(2.0 * x)); });
}

inline CriticalAmplitude critical_amplitude(const std::function<SpectralField(double)>& data,
                                            const GclmParams& p, const RunControls& rc, double A_lo,
                                            double A_hi, double tol) {
  return critical_amplitude(
      [&](double A) { return classify_probe(simulate(data(A), p, rc)); }, A_lo, A_hi, tol, p);
}

}  // namespace gclm

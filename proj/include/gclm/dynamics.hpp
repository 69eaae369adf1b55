#pragma once

// gCLM right-hand sides, RK8 stepping, adaptive dt and the rewind/refine loop.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "gclm/error.hpp"
#include "gclm/operators.hpp"
#include "gclm/params.hpp"
#include "gclm/rk8.hpp"
#include "gclm/singularity.hpp"
#include "gclm/spectral_field.hpp"

namespace gclm {

struct RunControls {
  double t_end = 1.0;
  int sample_every = 1;
  double cfl = 1.0 / 16.0;
  std::size_t n0 = 256;
  std::size_t n_max = std::size_t{1} << 17;
  double tail_tol = 1e-12;
  double collapse_delta_factor = 5.0;
  double dt_max = 1e-2;
  // At n_max: stop with ResolutionCapHit once the tail band exceeds this.
  double cap_tail_tol = 1e-3;
  // Halve N when all |k| > N/2 sit below coarsen_tol * max; 0 disables.
  double coarsen_tol = 0.0;
  FitWindow fit_window{};
};

struct SimState {
  SpectralField field;
  double time = 0.0;
  GclmParams params;
  double cfl = 1.0 / 16.0;
  long step_count = 0;
  int refine_count = 0;
};

enum class TerminalStatus { ReachedTEnd, CollapseDetected, ResolutionCapHit };

inline const char* to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::ReachedTEnd: return "ReachedTEnd";
    case TerminalStatus::CollapseDetected: return "CollapseDetected";
    case TerminalStatus::ResolutionCapHit: return "ResolutionCapHit";
  }
  return "?";
}

struct Sample {
  double t = 0.0;
  double max_abs_omega = 0.0;
  double delta = std::numeric_limits<double>::quiet_NaN();
  double delta_x = std::numeric_limits<double>::quiet_NaN();
  double p_fit = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
  NormReport norms;
  std::size_t n_modes = 0;
  double dt = 0.0;
};

struct TimeSeries {
  std::vector<Sample> samples;
  TerminalStatus terminal_status = TerminalStatus::ReachedTEnd;
  double t_final = 0.0;
  long step_count = 0;
  int refine_count = 0;
  SpectralField final_field;

  std::vector<double> times() const { return column(&Sample::t); }
  std::vector<double> max_abs_omega() const { return column(&Sample::max_abs_omega); }
  std::vector<double> delta_x() const { return column(&Sample::delta_x); }
  std::vector<double> column(double Sample::*m) const {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.*m);
    return v;
  }
};

// Pseudo-spectral evaluation with reusable buffers. Real field pairs share one complex
// transform: ifft(f + i g) yields f and g as real and imaginary parts.
class RhsEvaluator {
 public:
  struct Extrema {
    double advect = 0.0;   // max |u| (line: max |(1+cos q) u|)
    double stretch = 0.0;  // max |u_x|
    double omega = 0.0;    // max |w|
    double diss = 0.0;     // max |nu Lambda^sigma w| (line)
  };

  RhsEvaluator(std::size_t n, Domain d, const GclmParams& p) : domain_(d), p_(p) {
    p_.validate(d);
    resize(n);
  }

  std::size_t n() const { return n_; }

  void resize(std::size_t n) {
    if (n == n_) return;
    n_ = n;
    const std::size_t M = 2 * n;
    for (auto* b : {&s1_, &s2_, &s3_, &g1_, &g2_, &g3_, &g4_}) b->assign(M, cplx(0.0));
    jac_.assign(M, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
      const double q = -std::numbers::pi + static_cast<double>(j) * std::numbers::pi / static_cast<double>(n);
      jac_[j] = 1.0 + std::cos(q);
    }
  }

  void operator()(std::span<const cplx> w, std::span<cplx> out) { eval(w, out, nullptr); }

  Extrema extrema(std::span<const cplx> w) {
    Extrema e;
    AlignedVector<cplx> tmp(w.size());
    eval(w, tmp, &e);
    return e;
  }

 private:
  long k_of(std::size_t m) const { return SpectralField::wavenumber(m, 2 * n_); }
  static double phase(std::size_t m) { return m % 2 ? -1.0 : 1.0; }

  void to_grid(AlignedVector<cplx>& spec, AlignedVector<cplx>& grid) { fft_backward(spec, grid); }
  void to_spec(AlignedVector<cplx>& grid, std::span<cplx> out) {
    fft_forward(grid, out);
    const double s = 1.0 / static_cast<double>(grid.size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] *= phase(m) * s;
  }

  void eval(std::span<const cplx> w, std::span<cplx> out, Extrema* ex) {
    resize(w.size() / 2);
    if (domain_ == Domain::Circle)
      eval_circle(w, out, ex);
    else
      eval_line(w, out, ex);
  }

  void eval_circle(std::span<const cplx> w, std::span<cplx> out, Extrema* ex) {
    const std::size_t M = w.size();
    const long N = static_cast<long>(n_);
    const bool adv = p_.a != 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      const long k = k_of(m);
      const double sk = (k > 0) - (k < 0);
      const cplx hw = k == -N ? cplx(0.0) : cplx(0.0, -sk) * w[m];
      s1_[m] = phase(m) * (w[m] + cplx(0.0, 1.0) * hw);
      if (adv) {
        const cplx u = (k == 0 || k == -N) ? cplx(0.0) : -w[m] / static_cast<double>(std::abs(k));
        const cplx wx = k == -N ? cplx(0.0) : cplx(0.0, static_cast<double>(k)) * w[m];
        s2_[m] = phase(m) * (u + cplx(0.0, 1.0) * wx);
      }
    }
    to_grid(s1_, g1_);
    if (adv) to_grid(s2_, g2_);
    for (std::size_t j = 0; j < M; ++j) {
      const double om = g1_[j].real(), hw = g1_[j].imag();
      double v = (om + p_.omega_av) * hw;
      if (adv) v -= p_.a * g2_[j].real() * g2_[j].imag();
      g3_[j] = v;
      if (ex) {
        ex->stretch = std::max(ex->stretch, std::abs(hw));
        ex->omega = std::max(ex->omega, std::abs(om));
        if (adv) ex->advect = std::max(ex->advect, std::abs(g2_[j].real()));
      }
    }
    to_spec(g3_, out);
    if (p_.nu != 0.0) {
      for (std::size_t m = 0; m < M; ++m)
        out[m] -= p_.nu * detail::pow_abs_k(k_of(m), p_.sigma) * w[m];
    }
  }

  void eval_line(std::span<const cplx> w, std::span<cplx> out, Extrema* ex) {
    const std::size_t M = w.size();
    const long N = static_cast<long>(n_);
    const bool adv = p_.a != 0.0;
    const int sigma = static_cast<int>(p_.sigma);
    const cplx I(0.0, 1.0);
    double C = 0.0;
    for (long k = 1; k < N; ++k) C += (k % 2 ? 2.0 : -2.0) * w[static_cast<std::size_t>(k)].imag();

    for (std::size_t m = 0; m < M; ++m) {
      const long k = k_of(m);
      const double sk = (k > 0) - (k < 0);
      const bool nyq = k == -N;
      const cplx hw = nyq ? cplx(0.0) : cplx(0.0, -sk) * w[m];
      s1_[m] = phase(m) * (w[m] + I * hw);
      const cplx dh = nyq ? cplx(0.0) : static_cast<double>(std::abs(k)) * w[m];
      const cplx wq = nyq ? cplx(0.0) : cplx(0.0, static_cast<double>(k)) * w[m];
      s2_[m] = phase(m) * (dh + I * wq);
    }
    to_grid(s1_, g1_);  // w, H^q w
    to_grid(s2_, g2_);  // d_q H^q w, w_q

    // dissipation in g4_ (grid, real)
    if (sigma >= 1) {
      for (std::size_t j = 0; j < M; ++j) g4_[j] = jac_[j] * g2_[j].real();
      if (sigma == 2) {
        to_spec(g4_, s3_);
        for (std::size_t m = 0; m < M; ++m) {
          const long k = k_of(m);
          s3_[m] = k == -N ? cplx(0.0) : phase(m) * static_cast<double>(std::abs(k)) * s3_[m];
        }
        to_grid(s3_, g4_);
        for (std::size_t j = 0; j < M; ++j) g4_[j] = jac_[j] * g4_[j].real();
      }
    }

    if (adv) {
      // g = h / (1 + cos q); at vanishing Jacobian use h''/(-cos q)
      for (std::size_t j = 0; j < M; ++j) {
        if (jac_[j] >= kJacobianGuard) {
          g3_[j] = (g1_[j].imag() + C) / jac_[j];
        } else {
          const double q = -std::numbers::pi + static_cast<double>(j) * std::numbers::pi / static_cast<double>(N);
          cplx h2 = 0.0;
          for (std::size_t m = 0; m < M; ++m) {
            const long k = k_of(m);
            if (k == -N) continue;
            const double sk = (k > 0) - (k < 0);
            h2 += -static_cast<double>(k * k) * cplx(0.0, -sk) * w[m] *
                  std::exp(cplx(0.0, static_cast<double>(k) * q));
          }
          g3_[j] = h2.real() / (-std::cos(q));
        }
      }
      to_spec(g3_, s3_);
      for (std::size_t m = 0; m < M; ++m) {
        const long k = k_of(m);
        s3_[m] = (k == 0 || k == -N) ? cplx(0.0) : s3_[m] / cplx(0.0, static_cast<double>(k));
      }
      s3_[0] = -detail::value_at_minus_pi(s3_).real();
      for (std::size_t m = 0; m < M; ++m) s3_[m] *= phase(m);
      to_grid(s3_, g3_);  // u
    }

    for (std::size_t j = 0; j < M; ++j) {
      const double om = g1_[j].real();
      const double h = g1_[j].imag() + C;
      const double diss = sigma == 0 ? om : g4_[j].real();
      double v = om * h - p_.nu * diss;
      if (adv) v -= p_.a * jac_[j] * g3_[j].real() * g2_[j].imag();
      if (ex) {
        ex->omega = std::max(ex->omega, std::abs(om));
        ex->stretch = std::max(ex->stretch, std::abs(h));
        ex->diss = std::max(ex->diss, std::abs(p_.nu * diss));
        if (adv) ex->advect = std::max(ex->advect, std::abs(jac_[j] * g3_[j].real()));
      }
      g1_[j] = v;
    }
    to_spec(g1_, out);
  }

  Domain domain_;
  GclmParams p_;
  std::size_t n_ = 0;
  AlignedVector<cplx> s1_, s2_, s3_, g1_, g2_, g3_, g4_;
  std::vector<double> jac_;
};

inline SpectralField rhs_periodic(const SpectralField& f, const GclmParams& p) {
  if (f.domain() != Domain::Circle)
    throw Error(ErrorCode::InvalidArgument, "rhs_periodic: field must live on the circle");
  RhsEvaluator ev(f.n(), f.domain(), p);
  SpectralField out(f.n(), f.domain());
  ev(f.coeffs(), out.coeffs());
  return out;
}

inline SpectralField rhs_realline(const SpectralField& f, const GclmParams& p) {
  if (f.domain() != Domain::CompactifiedLine)
    throw Error(ErrorCode::InvalidArgument, "rhs_realline: field must live on the compactified line");
  RhsEvaluator ev(f.n(), f.domain(), p);
  SpectralField out(f.n(), f.domain());
  ev(f.coeffs(), out.coeffs());
  return out;
}

inline SpectralField rhs(const SpectralField& f, const GclmParams& p) {
  return f.domain() == Domain::Circle ? rhs_periodic(f, p) : rhs_realline(f, p);
}

// One RK8 step of the spectral coefficients; nullopt signals a nonfinite stage.
template <class Rhs>
std::optional<SimState> rk8_step(const SimState& s, double dt, Rhs&& f) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "rk8_step: dt must be > 0");
  AlignedVector<cplx> y(s.field.coeffs().begin(), s.field.coeffs().end());
  auto next = rk8::step(y, s.time, dt, [&](double, const AlignedVector<cplx>& yi, AlignedVector<cplx>& k) {
    f(std::span<const cplx>(yi), std::span<cplx>(k));
  });
  if (!next) return std::nullopt;
  SimState out = s;
  out.field = SpectralField::from_coefficients(*next, s.field.domain());
  out.time = s.time + dt;
  out.step_count = s.step_count + 1;
  return out;
}

inline std::optional<SimState> rk8_step(const SimState& s, double dt) {
  RhsEvaluator ev(s.field.n(), s.field.domain(), s.params);
  return rk8_step(s, dt, ev);
}

inline double dt_from_extrema(const RhsEvaluator::Extrema& e, Domain d, std::size_t n,
                              const GclmParams& p, double cfl, double dt_max) {
  const double dx = std::numbers::pi / static_cast<double>(n);
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double num, double den) {
    if (den > 0.0 && std::isfinite(den)) best = std::min(best, num / den);
  };
  consider(dx, std::abs(p.a) * e.advect);
  consider(1.0, e.stretch);
  if (p.nu > 0.0) {
    if (d == Domain::Circle) {
      consider(std::pow(dx, p.sigma), p.nu);
    } else {
      if (p.sigma > 0.0) consider(e.omega, e.diss);
      // explicit stability of the stiff term: the line operator reaches |k| (1+cos q) <= 2N
      consider(std::pow(0.5 * dx, p.sigma), p.nu);
    }
  }
  if (!std::isfinite(best)) return dt_max;
  return cfl * best;
}

inline double adaptive_dt(const SimState& s, double dt_max = RunControls{}.dt_max) {
  RhsEvaluator ev(s.field.n(), s.field.domain(), s.params);
  return dt_from_extrema(ev.extrema(s.field.coeffs()), s.field.domain(), s.field.n(), s.params,
                         s.cfl, dt_max);
}

enum class RefineDecision { Keep, RewindAndDouble };

inline RefineDecision maybe_refine(const SimState& state, const SimState& /*prev*/,
                                   double tail_tol = RunControls{}.tail_tol) {
  return state.field.tail_ratio() > tail_tol ? RefineDecision::RewindAndDouble
                                             : RefineDecision::Keep;
}

namespace detail {

inline void fill_fit(Sample& smp, const SpectralField& f, const FitWindow& w) {
  try {
    const DecayFit fit = fit_fourier_decay(f, w);
    smp.delta = fit.delta;
    smp.p_fit = fit.p;
    smp.fit_residual = fit.rms_residual;
    smp.delta_x = f.domain() == Domain::Circle
                      ? fit.delta
                      : delta_to_x(fit.delta, classify_branch(singularity_real_part(f, w)));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SpectrumTooClean && e.code() != ErrorCode::InvalidArgument) throw;
  }
}

inline Sample make_sample(const SimState& s, const FitWindow& w, double dt) {
  Sample smp;
  smp.t = s.time;
  smp.norms = norms(s.field);
  smp.max_abs_omega = smp.norms.linf;
  smp.n_modes = s.field.n();
  smp.dt = dt;
  fill_fit(smp, s.field, w);
  return smp;
}

}  // namespace detail

using SampleObserver = std::function<void(const SimState&, const Sample&)>;

inline TimeSeries simulate(const SpectralField& init, const GclmParams& params,
                           const RunControls& rc, const SampleObserver& observer = {}) {
  params.validate(init.domain());
  if (!init.all_finite()) throw Error(ErrorCode::InvalidArgument, "simulate: initial data not finite");
  if (!(rc.t_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulate: t_end must be > 0");
  if (rc.sample_every < 1) throw Error(ErrorCode::InvalidArgument, "simulate: sample_every must be >= 1");

  SimState st{init, 0.0, params, rc.cfl, 0, 0};
  RhsEvaluator ev(st.field.n(), st.field.domain(), params);
  TimeSeries ts;
  double last_dt = 0.0;
  auto record = [&](double dt) {
    Sample smp = detail::make_sample(st, rc.fit_window, dt);
    ts.samples.push_back(smp);
    if (observer) observer(st, smp);
  };
  record(0.0);

  TerminalStatus status = TerminalStatus::ReachedTEnd;
  while (st.time < rc.t_end) {
    double dt = dt_from_extrema(ev.extrema(st.field.coeffs()), st.field.domain(), st.field.n(),
                                params, st.cfl, rc.dt_max);
    if (st.time + dt >= rc.t_end || rc.t_end - (st.time + dt) < 1e-12 * rc.t_end)
      dt = rc.t_end - st.time;
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      status = TerminalStatus::CollapseDetected;
      break;
    }
    auto next = rk8_step(st, dt, ev);
    if (!next) {
      status = TerminalStatus::CollapseDetected;
      break;
    }
    const double tail = next->field.tail_ratio();
    if (tail > rc.tail_tol) {
      if (2 * st.field.n() <= rc.n_max) {
        st.field = st.field.resized(2 * st.field.n());
        ++st.refine_count;
        ev.resize(st.field.n());
        continue;
      }
      if (tail > rc.cap_tail_tol) {
        status = TerminalStatus::ResolutionCapHit;
        break;
      }
    }
    next->refine_count = st.refine_count;
    st = std::move(*next);
    last_dt = dt;

    if (st.field.n() * 2 > rc.n_max) {
      Sample probe;
      detail::fill_fit(probe, st.field, rc.fit_window);
      if (std::isfinite(probe.delta) && probe.delta < rc.collapse_delta_factor * st.field.spacing()) {
        status = TerminalStatus::CollapseDetected;
        break;
      }
    }
    if (rc.coarsen_tol > 0.0 && st.field.n() > rc.n0 && st.step_count % 16 == 0 &&
        st.field.tail_ratio(0.5) < rc.coarsen_tol) {
      st.field = st.field.resized(st.field.n() / 2);
      ev.resize(st.field.n());
    }
    if (st.step_count % rc.sample_every == 0 || st.time >= rc.t_end) record(dt);
  }
  if (ts.samples.back().t < st.time) record(last_dt);
  ts.terminal_status = status;
  ts.t_final = st.time;
  ts.step_count = st.step_count;
  ts.refine_count = st.refine_count;
  ts.final_field = st.field;
  return ts;
}

}  // namespace gclm

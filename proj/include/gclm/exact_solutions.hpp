#pragma once

// Pole-dynamics exact solutions: closed forms, ODE reductions, classifiers and
// limiting self-similar profiles.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gclm/error.hpp"
#include "gclm/rk8.hpp"
#include "gclm/roots.hpp"
#include "gclm/spectral_field.hpp"

namespace gclm {

enum class Family {
  Schochet_a0s2,
  DoublePole_aHalf_s1,
  OnePair_a0s1,
  TwoPair_a0s1,
  OnePair_a0s0,
  PeriodicPole_a0s0,
};

inline const char* to_string(Family f) {
  switch (f) {
    case Family::Schochet_a0s2: return "schochet";
    case Family::DoublePole_aHalf_s1: return "doublepole";
    case Family::OnePair_a0s1: return "onepair_s1";
    case Family::TwoPair_a0s1: return "twopair_s1";
    case Family::OnePair_a0s0: return "onepair_s0";
    case Family::PeriodicPole_a0s0: return "periodic_s0";
  }
  return "?";
}

enum class SolutionKind { Global, Steady, Collapse };

inline const char* to_string(SolutionKind k) {
  switch (k) {
    case SolutionKind::Global: return "Global";
    case SolutionKind::Steady: return "Steady";
    case SolutionKind::Collapse: return "Collapse";
  }
  return "?";
}

struct Classification {
  SolutionKind kind = SolutionKind::Global;
  double t_c = std::numeric_limits<double>::infinity();
  double x_c = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline const cplx kI{0.0, 1.0};

// sqrt(rad(t)) followed continuously from r0 = sqrt(rad(0)) along [0, t].
template <class Rad>
cplx continuous_sqrt(Rad&& rad, double t, cplx r0, int steps = 512) {
  cplx r = r0;
  for (int i = 1; i <= steps; ++i) {
    const cplx s = std::sqrt(rad(t * i / steps));
    r = std::abs(s - r) <= std::abs(s + r) ? s : -s;
  }
  return r;
}

inline void require_before_collapse(double t, double t_c) {
  if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "advance: t must be >= 0");
  if (t >= t_c)
    throw Error(ErrorCode::PastCollapse,
                "t = " + std::to_string(t) + " is not before t_c = " + std::to_string(t_c));
}

}  // namespace detail

// ---------------------------------------------------------------- Schochet (a=0, sigma=2)

struct SchochetState {
  cplx x1_0{0.0, -1.0}, x2_0{0.0, -2.0};
  double nu = 1.0;
  int k_sign = +1;                  // K+ or K-
  bool published_constant = false;  // use 12(6 +- sqrt6) instead of 24(3 +- sqrt6)
  double t = 0.0;
  cplx x1, x2, r;  // r = x1 - x2, continuous in t
  double t_c = detail::kInf;

  double K() const {
    const double s6 = std::sqrt(6.0) * k_sign;
    return published_constant ? 12.0 * (6.0 + s6) : 24.0 * (3.0 + s6);
  }
  cplx amp_a() const { return -K() * nu * detail::kI / r; }
  cplx amp_b() const { return -12.0 * nu * detail::kI; }
};

// ------------------------------------------------------ double pole (a=1/2, sigma=1)

struct DoublePoleState {
  double v0 = 1.0;  // v_c(0)
  double w0 = 3.0;  // omega_{-2}(0)
  double x0 = 0.0;
  double nu = 1.0;
  double t = 0.0;
  double v = 1.0, w = 3.0;
  double t_c = detail::kInf;

  double omega_ratio() const { return w / v; }  // Omega
};

// ------------------------------------------------ one pair (a=0, sigma=1) and (a=0, sigma=0)

struct OnePairState {
  Family family = Family::OnePair_a0s1;
  cplx w0{-2.0, 0.0}, v0{1.0, 0.0};
  double nu = 1.0;
  double t = 0.0;
  cplx w, v;
  double t_c = detail::kInf;
};

// ----------------------------------------------------------- two pairs (a=0, sigma=1)

struct TwoPairState {
  cplx w1_0{-2.0, 0.0}, w2_0{2.0, 0.0}, v1_0{0.1, 0.0}, v2_0{0.9, 0.0};
  double nu = 1.0;
  // Limit of coalescing pairs: w0(x) = 2iA[(x-iV)^-2 - (x+iV)^-2].
  bool double_pole_limit = false;
  double amp = 0.0, v_lim = 0.0;
  double t = 0.0;
  cplx w1, w2, v1, v2;
  double t_c = detail::kInf;

  cplx c0() const { return double_pole_limit ? cplx(0.0) : w1_0 + w2_0; }
  cplx c1() const { return w1_0 - w2_0; }
};

// ------------------------------------------------------ periodic pole (a=0, sigma=0)

struct PeriodicState {
  cplx w0{-1.0, 0.0}, v0{1.0, 0.0};
  double nu = 1.0;
  double t = 0.0;
  cplx w, v;
  double t_c = detail::kInf;
};

using PoleFamilyState =
    std::variant<SchochetState, DoublePoleState, OnePairState, TwoPairState, PeriodicState>;

inline Family family_of(const PoleFamilyState& s) {
  struct V {
    Family operator()(const SchochetState&) const { return Family::Schochet_a0s2; }
    Family operator()(const DoublePoleState&) const { return Family::DoublePole_aHalf_s1; }
    Family operator()(const OnePairState& o) const { return o.family; }
    Family operator()(const TwoPairState&) const { return Family::TwoPair_a0s1; }
    Family operator()(const PeriodicState&) const { return Family::PeriodicPole_a0s0; }
  };
  return std::visit(V{}, s);
}

inline Domain domain_of(const PoleFamilyState& s) {
  return family_of(s) == Family::PeriodicPole_a0s0 ? Domain::Circle : Domain::CompactifiedLine;
}

struct FamilyModel {
  double a, sigma;
};

inline FamilyModel model_of(Family f) {
  switch (f) {
    case Family::Schochet_a0s2: return {0.0, 2.0};
    case Family::DoublePole_aHalf_s1: return {0.5, 1.0};
    case Family::OnePair_a0s1: return {0.0, 1.0};
    case Family::TwoPair_a0s1: return {0.0, 1.0};
    case Family::OnePair_a0s0: return {0.0, 0.0};
    case Family::PeriodicPole_a0s0: return {0.0, 0.0};
  }
  return {0.0, 0.0};
}

inline double viscosity_of(const PoleFamilyState& s) {
  return std::visit([](const auto& st) { return st.nu; }, s);
}

inline double time_of(const PoleFamilyState& s) {
  return std::visit([](const auto& st) { return st.t; }, s);
}

// ================================================================= closed forms

namespace detail {

inline void schochet_at(SchochetState& s, double t) {
  const cplx r0 = s.x1_0 - s.x2_0;
  const cplx r02 = r0 * r0;
  const double slope = 5.0 / 3.0 * s.K() * s.nu;
  s.r = continuous_sqrt([&](double tt) { return r02 - slope * tt; }, t, r0);
  const cplx sum = s.x1_0 + s.x2_0;
  s.x1 = 0.5 * (sum + s.r);
  s.x2 = 0.5 * (sum - s.r);
  s.t = t;
}

// Omega, v system: Omega' = (Omega/v)(Omega/2 - nu), v' = nu - Omega/4.
inline std::array<double, 2> doublepole_rhs(const std::array<double, 2>& y, double nu) {
  const double om = y[0], v = y[1];
  return {om / v * (0.5 * om - nu), nu - 0.25 * om};
}

inline std::array<double, 2> doublepole_integrate(std::array<double, 2> y, double t0, double t1,
                                                  double nu, double rtol = 1e-12) {
  auto f = [nu](double, const std::array<double, 2>& yy, std::array<double, 2>& k) {
    k = doublepole_rhs(yy, nu);
  };
  double t = t0;
  double h = std::min(1e-3, t1 - t0);
  while (t < t1) {
    if (t + h > t1) h = t1 - t;
    auto big = rk8::step(y, t, h, f);
    auto half = rk8::step(y, t, 0.5 * h, f);
    std::optional<std::array<double, 2>> two;
    if (half) two = rk8::step(*half, t + 0.5 * h, 0.5 * h, f);
    if (!big || !two) {
      h *= 0.25;
      if (h < 1e-300) throw Error(ErrorCode::PastCollapse, "double-pole ODE hit a singularity");
      continue;
    }
    double err = 0.0;
    for (int i = 0; i < 2; ++i)
      err = std::max(err, std::abs((*two)[i] - (*big)[i]) / (std::abs((*two)[i]) + 1e-300));
    if (err <= rtol) {
      t += h;
      for (int i = 0; i < 2; ++i) y[i] = (*two)[i] + ((*two)[i] - (*big)[i]) / 255.0;
    }
    const double fac = err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(rtol / err, 1.0 / 9.0), 0.2, 4.0);
    h *= fac;
  }
  return y;
}

// Implicit first integral with P = Omega/nu: F(P) = sqrt(P-2)/(2P) + atan(sqrt((P-2)/2))/(2 sqrt2).
inline double doublepole_F(double P) {
  const double r = std::sqrt(P - 2.0);
  return r / (2.0 * P) + std::atan(r / std::sqrt(2.0)) / (2.0 * std::sqrt(2.0));
}

inline void onepair_at(OnePairState& s, double t) {
  if (s.family == Family::OnePair_a0s1) {
    s.w = s.w0;
    s.v = (s.w0 + s.nu) * t + s.v0;
  } else if (s.nu == 0.0) {
    s.w = s.w0;
    s.v = s.w0 * t + s.v0;
  } else {
    s.w = s.w0 * std::exp(-s.nu * t);
    s.v = s.w0 * (-std::expm1(-s.nu * t)) / s.nu + s.v0;
  }
  s.t = t;
}

struct TwoPairValues {
  cplx w1, w2, v1, v2, dv1, dv2;
  cplx sq = 1.0;  // sqrt(Q) on the tracked branch
};

inline cplx twopair_radicand(const TwoPairState& s, double t) {
  const cplx c0 = s.c0(), c1 = s.c1(), D0 = s.v1_0 - s.v2_0;
  return 1.0 + 2.0 * c1 * t / D0 + c0 * c0 * t * t / (D0 * D0);
}

// Closed form for both c0 != 0 and c0 = 0: with D0 = v1(0)-v2(0) and
// Q = 1 + 2 c1 t/D0 + c0^2 t^2/D0^2, D = D0 sqrt(Q). Given the branch at a nearby
// earlier time the root is continued from it, otherwise followed from t = 0.
inline TwoPairValues twopair_values(const TwoPairState& s, double t,
                                    std::optional<cplx> near_sq = std::nullopt) {
  TwoPairValues r;
  const double nu = s.nu;
  if (s.double_pole_limit) {
    const double A = s.amp, V = s.v_lim;
    const double rt = std::sqrt(2.0 * A * t);
    r.w1 = t > 0.0 ? -std::sqrt(A / (2.0 * t)) : -detail::kInf;
    r.w2 = -r.w1;
    r.v1 = nu * t - rt + V;
    r.v2 = nu * t + rt + V;
    r.dv1 = nu + r.w1;
    r.dv2 = nu + r.w2;
    return r;
  }
  const cplx c0 = s.c0(), c1 = s.c1();
  const cplx D0 = s.v1_0 - s.v2_0, S0 = s.v1_0 + s.v2_0;
  cplx sq;
  if (near_sq) {
    sq = std::sqrt(twopair_radicand(s, t));
    if (std::abs(sq + *near_sq) < std::abs(sq - *near_sq)) sq = -sq;
  } else {
    sq = continuous_sqrt([&](double tt) { return twopair_radicand(s, tt); }, t, cplx(1.0),
                         t == 0.0 ? 1 : 256);
  }
  r.sq = sq;
  r.w1 = 0.5 * c0 + 0.5 * (c1 + c0 * c0 * t / D0) / sq;
  r.w2 = c0 - r.w1;
  r.v1 = (0.5 * c0 + nu) * t + 0.5 * D0 * sq + 0.5 * S0;
  r.v2 = -r.v1 + (2.0 * nu + c0) * t + S0;
  r.dv1 = nu + r.w1;
  r.dv2 = nu + r.w2;
  return r;
}

inline void twopair_at(TwoPairState& s, double t) {
  const auto r = twopair_values(s, t);
  s.w1 = r.w1;
  s.w2 = r.w2;
  s.v1 = r.v1;
  s.v2 = r.v2;
  s.t = t;
}

inline void periodic_at(PeriodicState& s, double t) {
  s.t = t;
  if (s.w0 == cplx(0.0)) {
    s.w = 0.0;
    s.v = s.v0;
    return;
  }
  if (s.nu == 0.0) {
    const cplx b = s.w0 / (1.0 + s.v0);
    const cplx d = 1.0 - b * t;
    s.w = s.w0 / (d * d);
    s.v = (s.v0 + b * t) / d;
    return;
  }
  const cplx E = 1.0 - s.nu * (1.0 + s.v0) / s.w0;  // e^{nu t0}
  const double e = std::exp(-s.nu * t);
  const double om = -std::expm1(-s.nu * t);
  const cplx a = 1.0 - 1.0 / E;
  const cplx den = 1.0 - e / E;
  const cplx ratio = a / den;
  s.w = s.w0 * e * ratio * ratio;
  s.v = s.w0 / s.nu * a * om / den + s.v0;
}

}  // namespace detail

// ================================================================= classification

namespace detail {

inline Classification classify_schochet(const SchochetState& s0) {
  const cplx S = s0.x1_0 + s0.x2_0;
  const cplx r0 = s0.x1_0 - s0.x2_0;
  const cplx R02 = r0 * r0;
  // collapse when one pole is real: R(t_c) = +-w, Im w = -Im S, Im w^2 = Im R0^2
  const cplx w(-R02.imag() / (2.0 * S.imag()), -S.imag());
  const double kn = s0.K() * s0.nu;
  const double tc = (3.0 * (R02 - w * w) / (5.0 * kn)).real();
  Classification c;
  if (!(tc > 0.0) || kn == 0.0) return c;
  SchochetState s = s0;
  schochet_at(s, tc);
  const cplx hit = std::abs(s.x1.imag()) <= std::abs(s.x2.imag()) ? s.x1 : s.x2;
  c.kind = SolutionKind::Collapse;
  c.t_c = tc;
  c.x_c = hit.real();
  c.alpha = 1.0;
  c.beta = 2.0;
  return c;
}

inline Classification classify_doublepole(const DoublePoleState& s) {
  Classification c;
  const double om = s.w0 / s.v0;
  if (s.nu == 0.0) {
    if (om > 0.0) {
      c.kind = SolutionKind::Collapse;
      c.t_c = 4.0 * s.v0 / (3.0 * om);
    } else if (om == 0.0) {
      c.kind = SolutionKind::Steady;
    }
  } else {
    const double tol = 1e-14 * std::max(1.0, 2.0 * s.nu);
    if (std::abs(om - 2.0 * s.nu) <= tol) {
      c.kind = SolutionKind::Steady;
      return c;
    }
    if (om < 2.0 * s.nu) return c;
    const double P0 = om / s.nu;
    const double c1 = std::sqrt(P0 - 2.0) / (2.0 * s.v0 * P0);
    c.kind = SolutionKind::Collapse;
    c.t_c = (std::numbers::pi / (4.0 * std::sqrt(2.0)) - doublepole_F(P0)) / (c1 * s.nu);
  }
  if (c.kind == SolutionKind::Collapse) {
    c.x_c = s.x0;
    c.alpha = 1.0 / 3.0;
    c.beta = 1.0;
  }
  return c;
}

inline Classification classify_onepair(const OnePairState& s) {
  Classification c;
  const double rw = s.w0.real(), iw = s.w0.imag(), rv = s.v0.real(), iv = s.v0.imag();
  if (s.family == Family::OnePair_a0s1) {
    if (s.w0 == cplx(-s.nu, 0.0)) {
      c.kind = SolutionKind::Steady;
      return c;
    }
    if (rw + s.nu >= 0.0) return c;
    c.t_c = -rv / (rw + s.nu);
    c.x_c = iw * rv / (rw + s.nu) - iv;
  } else {
    if (s.nu == 0.0) {
      if (rw >= 0.0) return c;
      c.t_c = rv / (-rw);
    } else {
      if (rw >= -s.nu * rv) return c;
      c.t_c = -std::log1p(s.nu * rv / rw) / s.nu;
    }
    c.x_c = iw / rw * rv - iv;
  }
  c.kind = SolutionKind::Collapse;
  c.alpha = 1.0;
  c.beta = 1.0;
  return c;
}

// First time Re v_j(t) = 0 by scanning, bisection and a tangency check.
inline Classification classify_twopair(const TwoPairState& s) {
  Classification c;
  if (s.double_pole_limit) {
    const double A = s.amp, V = s.v_lim, nu = s.nu;
    const double crit = 2.0 * nu * V;
    if (A < crit * (1.0 - 1e-14)) return c;
    c.kind = SolutionKind::Collapse;
    c.x_c = 0.0;
    if (A <= crit * (1.0 + 1e-14)) {
      c.t_c = V / nu;
      c.alpha = c.beta = 2.0;
    } else {
      const double d = A - nu * V;
      c.t_c = (d - std::sqrt(d * d - nu * nu * V * V)) / (nu * nu);
      c.alpha = c.beta = 1.0;
    }
    return c;
  }
  auto pick = [](int j, const TwoPairValues& r, bool deriv) {
    return (deriv ? (j == 0 ? r.dv1 : r.dv2) : (j == 0 ? r.v1 : r.v2)).real();
  };
  const double scale = std::max({std::abs(s.v1_0), std::abs(s.v2_0), 1e-300});
  struct Event {
    double t;
    bool tangential;
  };
  auto first_event = [&](int j) -> std::optional<Event> {
    const double slope_scale = s.nu + std::abs(j == 0 ? s.w1_0 : s.w2_0) + 1.0;
    double lo = 0.0, hi = 1.0;
    const int samples = 2048;
    cplx sq = 1.0;
    double tp = 0.0, fp = pick(j, twopair_values(s, 0.0), false);
    double tpp = tp, fpp = fp;
    cplx sq_p = sq, sq_pp = sq;
    while (lo < 1e6) {
      for (int i = 1; i <= samples; ++i) {
        const double ti = lo + (hi - lo) * i / samples;
        const auto ri = twopair_values(s, ti, sq);
        sq = ri.sq;
        const double fi = pick(j, ri, false);
        // local closed form continued from a branch value just before the bracket
        auto local = [&](cplx ref, bool deriv) {
          return [&, ref, deriv](double tt) { return pick(j, twopair_values(s, tt, ref), deriv); };
        };
        auto tangent = [&](double a, double b, cplx ref) {
          const auto dv = local(ref, true);
          if (dv(a) < 0.0 && dv(b) > 0.0) return bisect(dv, a, b);
          return golden_min(local(ref, false), a, b);
        };
        if (fi <= 0.0) {
          const double tr = bisect(local(sq_p, false), tp, ti);
          if (std::abs(local(sq_p, true)(tr)) < 1e-6 * slope_scale)
            return Event{tangent(tpp, ti, sq_pp), true};
          return Event{tr, false};
        }
        if (fp < fpp && fp <= fi) {
          const auto f = local(sq_pp, false);
          const double tm = golden_min(f, tpp, ti);
          const double fm = f(tm);
          if (fm <= 1e-12 * scale) {
            if (fm < 0.0 && std::abs(local(sq_pp, true)(tm)) > 1e-6 * slope_scale)
              return Event{bisect(f, tpp, tm), false};
            return Event{tangent(tpp, ti, sq_pp), true};
          }
        }
        tpp = tp;
        fpp = fp;
        sq_pp = sq_p;
        tp = ti;
        fp = fi;
        sq_p = sq;
      }
      lo = hi;
      hi *= 2.0;
    }
    return std::nullopt;
  };
  const auto e1 = first_event(0);
  const auto e2 = first_event(1);
  if (!e1 && !e2) return c;
  if (e1 && e2 && std::abs(e1->t - e2->t) <= 1e-9 * std::max(1.0, e1->t)) {
    const auto r = twopair_values(s, e1->t);
    if (std::abs(r.v1 - r.v2) <= 1e-8 * scale)
      throw Error(ErrorCode::HigherOrderUnknown,
                  "both pole pairs reach the real axis together at t = " + std::to_string(e1->t));
  }
  const bool first_is_1 = e1 && (!e2 || e1->t <= e2->t);
  const Event ev = first_is_1 ? *e1 : *e2;
  const auto r = twopair_values(s, ev.t);
  c.kind = SolutionKind::Collapse;
  c.t_c = ev.t;
  c.x_c = -(first_is_1 ? r.v1 : r.v2).imag();
  c.alpha = c.beta = ev.tangential ? 2.0 : 1.0;
  return c;
}

inline double periodic_crossing_indicator(const PeriodicState& s0, double t) {
  PeriodicState s = s0;
  periodic_at(s, t);
  if (!std::isfinite(s.v.real()) || !std::isfinite(s.v.imag())) return 0.0;
  return s.v.real() / (1.0 + std::norm(s.v));
}

inline Classification classify_periodic(const PeriodicState& s) {
  Classification c;
  const double nu = s.nu;
  const cplx w = s.w0, v = s.v0;
  if (w == cplx(0.0)) {
    c.kind = SolutionKind::Steady;
    return c;
  }
  const bool real = w.imag() == 0.0 && v.imag() == 0.0;
  auto finish = [&](double tc, double xc) {
    c.kind = SolutionKind::Collapse;
    c.t_c = tc;
    c.x_c = xc;
    c.alpha = c.beta = 1.0;
    return c;
  };
  if (real) {
    const double w0 = w.real(), v0 = v.real();
    if (nu == 0.0) {
      if (w0 < 0.0) return finish(-v0 * (1.0 + v0) / w0, 0.0);
      return finish((1.0 + v0) / w0, std::numbers::pi);
    }
    const double lo = -nu * v0 * (1.0 + v0), hi = nu * (1.0 + v0);
    if (w0 < lo) return finish(std::log(w0 / (w0 - lo)) / nu, 0.0);
    if (w0 > hi) return finish(std::log(w0 / (w0 - hi)) / nu, std::numbers::pi);
    return c;
  }
  if (nu == 0.0) {
    const double rw = w.real(), iw = w.imag(), rv = v.real(), iv = v.imag();
    const double a2 = std::norm(w);
    const double X = rw * (1.0 + iv * iv - rv * rv) - 2.0 * iw * iv * rv;
    const double tc = (X + std::sqrt(4.0 * a2 * rv * (std::norm(v) + 1.0 + 2.0 * rv) + X * X)) / (2.0 * a2);
    PeriodicState st = s;
    periodic_at(st, tc);
    const double xc = std::isfinite(std::abs(st.v)) && std::abs(st.v) < 1e12
                          ? 2.0 * std::atan(-st.v.imag())
                          : std::numbers::pi;
    return finish(tc, xc);
  }
  // nu > 0, complex data: Re(v)/(1+|v|^2) changes sign at Re v = 0 and at v = infinity
  const double horizon = 60.0 / nu;
  const int samples = 20000;
  double tp = 0.0, fp = periodic_crossing_indicator(s, 0.0);
  for (int i = 1; i <= samples; ++i) {
    const double ti = horizon * i / samples;
    const double fi = periodic_crossing_indicator(s, ti);
    if (fi <= 0.0) {
      const double tc = bisect([&](double tt) { return periodic_crossing_indicator(s, tt); }, tp, ti);
      PeriodicState st = s;
      periodic_at(st, tc);
      const double xc = std::abs(st.v) < 1e8 ? 2.0 * std::atan(-st.v.imag()) : std::numbers::pi;
      return finish(tc, xc);
    }
    tp = ti;
    fp = fi;
  }
  (void)fp;
  return c;
}

}  // namespace detail

// ================================================================= factories

inline SchochetState make_schochet(cplx x1_0, cplx x2_0, double nu = 1.0, int k_sign = +1,
                                   bool published_constant = false) {
  if (!(x1_0.imag() < 0.0) || !(x2_0.imag() < 0.0))
    throw Error(ErrorCode::InvalidArgument, "schochet: x1(0), x2(0) must lie in the lower half-plane");
  if (x1_0 == x2_0) throw Error(ErrorCode::InvalidArgument, "schochet: x1(0) and x2(0) must differ");
  if (k_sign != 1 && k_sign != -1) throw Error(ErrorCode::InvalidArgument, "schochet: k_sign must be +1 or -1");
  SchochetState s;
  s.x1_0 = x1_0;
  s.x2_0 = x2_0;
  s.nu = nu;
  s.k_sign = k_sign;
  s.published_constant = published_constant;
  detail::schochet_at(s, 0.0);
  s.t_c = detail::classify_schochet(s).t_c;
  return s;
}

inline DoublePoleState make_doublepole(double v0, double w0, double x0 = 0.0, double nu = 1.0) {
  if (!(v0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "doublepole: v_c(0) must be > 0");
  DoublePoleState s;
  s.v0 = s.v = v0;
  s.w0 = s.w = w0;
  s.x0 = x0;
  s.nu = nu;
  s.t_c = detail::classify_doublepole(s).t_c;
  return s;
}

inline OnePairState make_onepair(Family f, cplx w0, cplx v0, double nu = 1.0) {
  if (f != Family::OnePair_a0s1 && f != Family::OnePair_a0s0)
    throw Error(ErrorCode::InvalidArgument, "make_onepair: family must be a one-pair family");
  if (!(v0.real() > 0.0)) throw Error(ErrorCode::InvalidArgument, "onepair: Re v_c(0) must be > 0");
  OnePairState s;
  s.family = f;
  s.w0 = w0;
  s.v0 = v0;
  s.nu = nu;
  detail::onepair_at(s, 0.0);
  s.t_c = detail::classify_onepair(s).t_c;
  return s;
}

inline TwoPairState make_twopair(cplx w1, cplx w2, cplx v1, cplx v2, double nu = 1.0) {
  if (!(v1.real() > 0.0) || !(v2.real() > 0.0))
    throw Error(ErrorCode::InvalidArgument, "twopair: Re v_c,j(0) must be > 0");
  if (v1 == v2) throw Error(ErrorCode::InvalidArgument, "twopair: v_c,1(0) and v_c,2(0) must differ");
  TwoPairState s;
  s.w1_0 = w1;
  s.w2_0 = w2;
  s.v1_0 = v1;
  s.v2_0 = v2;
  s.nu = nu;
  detail::twopair_at(s, 0.0);
  s.t_c = detail::classify_twopair(s).t_c;
  return s;
}

inline TwoPairState make_twopair_double_pole_limit(double amp, double v_lim, double nu = 1.0) {
  if (!(amp > 0.0) || !(v_lim > 0.0))
    throw Error(ErrorCode::InvalidArgument, "twopair limit: A and V_c must be > 0");
  TwoPairState s;
  s.double_pole_limit = true;
  s.amp = amp;
  s.v_lim = v_lim;
  s.v1_0 = s.v2_0 = v_lim;
  s.nu = nu;
  s.t = 0.0;
  s.w1 = s.w2 = 0.0;  // only the combined double pole is defined at t = 0
  s.v1 = s.v2 = v_lim;
  s.t_c = detail::classify_twopair(s).t_c;
  return s;
}

inline PeriodicState make_periodic(cplx w0, cplx v0, double nu = 1.0) {
  if (!(v0.real() > 0.0)) throw Error(ErrorCode::InvalidArgument, "periodic: Re v_c(0) must be > 0");
  PeriodicState s;
  s.w0 = w0;
  s.v0 = v0;
  s.nu = nu;
  detail::periodic_at(s, 0.0);
  s.t_c = detail::classify_periodic(s).t_c;
  return s;
}

// ================================================================= operations

inline Classification classify(const PoleFamilyState& st) {
  struct V {
    Classification operator()(const SchochetState& s) const { return detail::classify_schochet(s); }
    Classification operator()(const DoublePoleState& s) const { return detail::classify_doublepole(s); }
    Classification operator()(const OnePairState& s) const { return detail::classify_onepair(s); }
    Classification operator()(const TwoPairState& s) const { return detail::classify_twopair(s); }
    Classification operator()(const PeriodicState& s) const { return detail::classify_periodic(s); }
  };
  return std::visit(V{}, st);
}

inline PoleFamilyState advance(const PoleFamilyState& st, double t) {
  struct V {
    double t;
    PoleFamilyState operator()(SchochetState s) const {
      detail::require_before_collapse(t, s.t_c);
      detail::schochet_at(s, t);
      return s;
    }
    PoleFamilyState operator()(DoublePoleState s) const {
      detail::require_before_collapse(t, s.t_c);
      std::array<double, 2> y{s.w / s.v, s.v};
      double t0 = s.t;
      if (t < s.t) {
        y = {s.w0 / s.v0, s.v0};
        t0 = 0.0;
      }
      if (t > t0) y = detail::doublepole_integrate(y, t0, t, s.nu);
      s.v = y[1];
      s.w = y[0] * y[1];
      s.t = t;
      return s;
    }
    PoleFamilyState operator()(OnePairState s) const {
      detail::require_before_collapse(t, s.t_c);
      detail::onepair_at(s, t);
      return s;
    }
    PoleFamilyState operator()(TwoPairState s) const {
      detail::require_before_collapse(t, s.t_c);
      if (s.double_pole_limit && t == 0.0) {
        s.t = 0.0;
        return s;
      }
      detail::twopair_at(s, t);
      return s;
    }
    PoleFamilyState operator()(PeriodicState s) const {
      detail::require_before_collapse(t, s.t_c);
      detail::periodic_at(s, t);
      return s;
    }
  };
  return std::visit(V{t}, st);
}

inline double evaluate_periodic(const PeriodicState& s, double x) {
  using detail::kI;
  const double c = std::cos(0.5 * x), sn = std::sin(0.5 * x);
  return 2.0 * std::real(s.w * (c / (sn - kI * s.v * c) - 1.0 / (-kI - kI * s.v)));
}

// Vorticity at real x (line families) or x in [-pi, pi] (periodic family).
inline double evaluate(const PoleFamilyState& st, double x) {
  using detail::kI;
  struct V {
    double x;
    double operator()(const SchochetState& s) const {
      const cplx A = s.amp_a(), B = s.amp_b();
      const cplx d1 = x - s.x1, d2 = x - s.x2;
      return std::real(A / d1 + B / (d1 * d1) - A / d2 + B / (d2 * d2));
    }
    double operator()(const DoublePoleState& s) const {
      const cplx d = x - s.x0 - kI * s.v;
      return 2.0 * std::real(kI * s.w / (d * d));
    }
    double operator()(const OnePairState& s) const { return 2.0 * std::real(s.w / (x - kI * s.v)); }
    double operator()(const TwoPairState& s) const {
      if (s.double_pole_limit && s.t == 0.0) {
        const cplx d = x - kI * s.v_lim;
        return 2.0 * std::real(2.0 * kI * s.amp / (d * d));
      }
      return 2.0 * std::real(s.w1 / (x - kI * s.v1) + s.w2 / (x - kI * s.v2));
    }
    double operator()(const PeriodicState& s) const { return evaluate_periodic(s, x); }
  };
  return std::visit(V{x}, st);
}

// Value at grid coordinate: q on the compactified line (x = tan(q/2)), x on the circle.
inline double evaluate_grid(const PoleFamilyState& st, double g) {
  if (domain_of(st) == Domain::Circle) return evaluate(st, g);
  if (std::abs(g) >= std::numbers::pi) return 0.0;
  return evaluate(st, std::tan(0.5 * g));
}

inline SpectralField sample_field(const PoleFamilyState& st, std::size_t n) {
  return SpectralField::sample(n, domain_of(st), [&](double g) { return evaluate_grid(st, g); });
}

// All poles of the real vorticity in the complex x-plane (conjugate pairs included).
inline std::vector<cplx> poles(const PoleFamilyState& st) {
  using detail::kI;
  struct V {
    std::vector<cplx> operator()(const SchochetState& s) const {
      return {s.x1, s.x2, std::conj(s.x1), std::conj(s.x2)};
    }
    std::vector<cplx> operator()(const DoublePoleState& s) const {
      return {s.x0 + kI * s.v, s.x0 - kI * s.v};
    }
    std::vector<cplx> operator()(const OnePairState& s) const {
      return {kI * s.v, std::conj(kI * s.v)};
    }
    std::vector<cplx> operator()(const TwoPairState& s) const {
      return {kI * s.v1, std::conj(kI * s.v1), kI * s.v2, std::conj(kI * s.v2)};
    }
    std::vector<cplx> operator()(const PeriodicState& s) const {
      const cplx z = 2.0 * kI * std::atanh(s.v);
      return {z, std::conj(z)};
    }
  };
  return std::visit(V{}, st);
}

// Distance from the real axis of the closest pole.
inline double closest_pole_distance(const PoleFamilyState& st) {
  double d = detail::kInf;
  for (const cplx& p : poles(st)) d = std::min(d, std::abs(p.imag()));
  return d;
}

struct ExactNorms {
  double linf = detail::kNaN;
  double l2 = detail::kNaN;
  double b0 = detail::kNaN;
};

inline ExactNorms exact_norms(const PoleFamilyState& st) {
  struct V {
    ExactNorms operator()(const SchochetState&) const { return {}; }
    ExactNorms operator()(const DoublePoleState& s) const {
      const double om = s.w / s.v;
      return {3.0 * std::sqrt(3.0) / 4.0 * std::abs(om) / s.v,
              std::sqrt(std::numbers::pi) * std::abs(om) / std::sqrt(s.v), detail::kNaN};
    }
    ExactNorms operator()(const OnePairState& s) const {
      const double rv = s.v.real();
      return {(std::abs(s.w) + std::abs(s.w.imag())) / rv,
              std::sqrt(2.0 * std::numbers::pi) * std::abs(s.w) / std::sqrt(rv), detail::kNaN};
    }
    ExactNorms operator()(const TwoPairState& s) const {
      ExactNorms n;
      if (s.v1.imag() == 0.0 && s.v2.imag() == 0.0 && !(s.double_pole_limit && s.t == 0.0)) {
        const double a = s.v1.real(), b = s.v2.real();
        const double cross = s.w1.real() * s.w2.real() + s.w1.imag() * s.w2.imag();
        n.l2 = std::sqrt(2.0 * std::numbers::pi) *
               std::sqrt(std::norm(s.w1) / a + std::norm(s.w2) / b + 4.0 * cross / (a + b));
      }
      return n;
    }
    ExactNorms operator()(const PeriodicState& s) const {
      ExactNorms n;
      const double rv = s.v.real(), iv = s.v.imag();
      const double den = iv * iv + (1.0 + rv) * (1.0 + rv);
      n.l2 = 2.0 * std::sqrt(std::numbers::pi) * std::abs(s.w) / std::sqrt(rv * den);
      n.b0 = std::abs(s.w) / rv * (std::sqrt((iv * iv + (1.0 - rv) * (1.0 - rv)) / den) + 1.0);
      if (s.w.imag() == 0.0 && iv == 0.0) {
        n.linf = std::abs(s.w.real()) / rv;
        return n;
      }
      // no closed form for complex data: dense scan plus golden refinement
      auto g = [&](double x) { return -std::abs(evaluate_periodic(s, x)); };
      const int m = 8192;
      const double h = 2.0 * std::numbers::pi / m;
      int best = 0;
      for (int j = 1; j < m; ++j)
        if (g(-std::numbers::pi + j * h) < g(-std::numbers::pi + best * h)) best = j;
      const double xb = -std::numbers::pi + best * h;
      n.linf = -g(detail::golden_min(g, xb - h, xb + h));
      return n;
    }
  };
  return std::visit(V{}, st);
}

// Limiting profile f with tau^beta w(x_c + tau^alpha xi, t_c - tau) -> f(xi).
inline double similarity_profile(const PoleFamilyState& st, double xi, const Classification& c) {
  using detail::kI;
  if (c.kind != SolutionKind::Collapse)
    throw Error(ErrorCode::NotCollapsing, "similarity_profile: state does not collapse");
  struct V {
    double xi;
    const Classification& c;
    double operator()(const SchochetState& s0) const {
      SchochetState s = s0;
      detail::schochet_at(s, c.t_c);
      const bool first = std::abs(s.x1.imag()) <= std::abs(s.x2.imag());
      const cplx dr = -5.0 * s.K() * s.nu / (6.0 * s.r);  // dR/dt
      const cplx xdot = first ? 0.5 * dr : -0.5 * dr;
      const cplx d = xi + xdot;
      return std::real(-12.0 * kI * s.nu / (d * d));
    }
    double operator()(const DoublePoleState& s) const {
      double vt;
      if (s.nu == 0.0) {
        const double k = s.v0 * std::sqrt(s.w0 / s.v0);
        vt = std::cbrt(0.75 * k * k);
      } else {
        const double P0 = s.w0 / s.v0 / s.nu;
        const double k = s.v0 * P0 / std::sqrt(P0 - 2.0);
        vt = std::cbrt(0.75 * k * k * s.nu);
      }
      const double d = xi * xi + vt * vt;
      return -16.0 * vt * vt * vt * xi / (3.0 * d * d);
    }
    double operator()(const OnePairState& s0) const {
      OnePairState s = s0;
      detail::onepair_at(s, c.t_c);
      const cplx xp = s0.family == Family::OnePair_a0s1 ? -kI * (s.w0 + s.nu) : -kI * s.w;
      return 2.0 * std::real(s.w / (xi - xp));
    }
    double operator()(const TwoPairState& s) const {
      const auto r = detail::twopair_values(s, c.t_c);
      const bool first = std::abs(r.v1.real()) <= std::abs(r.v2.real());
      const cplx w = first ? r.w1 : r.w2;
      if (c.alpha == 1.0) {
        const cplx dv = first ? r.dv1 : r.dv2;
        return 2.0 * std::real(w / (xi + kI * dv));
      }
      const double h = 1e-4 * std::max(c.t_c, 1e-3);
      auto vj = [&](double t) {
        const auto q = detail::twopair_values(s, t);
        return first ? q.v1 : q.v2;
      };
      const cplx d2 = (vj(c.t_c + h) - 2.0 * vj(c.t_c) + vj(c.t_c - h)) / (h * h);
      return 2.0 * std::real(w / (xi - 0.5 * kI * d2));
    }
    double operator()(const PeriodicState& s0) const {
      PeriodicState s = s0;
      const double pi = std::numbers::pi;
      if (std::abs(c.x_c) < 0.5 * pi || std::abs(std::abs(c.x_c) - pi) > 1e-12) {
        detail::periodic_at(s, c.t_c);
        const double sec2 = 1.0 + s.v.imag() * s.v.imag();
        const cplx g = 2.0 * s.w / sec2;
        return 2.0 * std::real(g / (xi + kI * g));
      }
      // pole leaves through infinity: V = lim tau^2 w_{-1}
      const double tau = 1e-6 * std::max(c.t_c, 1e-3);
      detail::periodic_at(s, c.t_c - tau);
      const cplx V = s.w * tau * tau;
      return 2.0 * std::real(-2.0 * kI / (2.0 + kI * V * xi));
    }
  };
  return std::visit(V{xi, c}, st);
}

inline double similarity_profile(const PoleFamilyState& st, double xi) {
  return similarity_profile(st, xi, classify(st));
}

}  // namespace gclm

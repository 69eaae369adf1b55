#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gclm/collapse.hpp"

using namespace gclm;

namespace {

struct Series {
  std::vector<double> t, m, d;
};

// geometric approach to t_c with 200 samples
Series planted(double tc, double alpha, double beta, double C = 2.0, double D = 0.3) {
  Series s;
  for (int i = 0; i < 200; ++i) {
    const double t = tc * (1.0 - std::pow(10.0, -6.0 * i / 199.0));
    s.t.push_back(t);
    s.m.push_back(C / std::pow(tc - t, beta));
    s.d.push_back(D * std::pow(tc - t, alpha));
  }
  return s;
}

}  // namespace

TEST(FitCollapse, RecoversSimplePoleModel) {
  const auto s = planted(1.5, 1.0, 1.0);
  const auto f = fit_collapse(s.t, s.m, s.d, false);
  EXPECT_NEAR(f.t_c, 1.5, 1e-6);
  EXPECT_NEAR(f.beta, 1.0, 1e-6);
  EXPECT_NEAR(f.alpha, 1.0, 1e-6);
  EXPECT_NEAR(f.c_amp, 2.0, 1e-5);
  EXPECT_EQ(f.n_used, 50u);
}

TEST(FitCollapse, RecoversOtherExponents) {
  for (auto [a, b] : {std::pair{1.0 / 3.0, 1.0}, {2.0, 2.0}, {1.0, 2.0}}) {
    const auto s = planted(0.7, a, b, 5.0, 0.1);
    const auto f = fit_collapse(s.t, s.m, s.d, true);
    EXPECT_NEAR(f.t_c, 0.7, 1e-6) << a << " " << b;
    EXPECT_NEAR(f.alpha, a, 1e-6);
    EXPECT_NEAR(f.beta, b, 1e-6);
  }
}

TEST(FitCollapse, DecimationInvariant) {
  const auto s = planted(0.9, 1.0 / 3.0, 1.0);
  Series h;
  for (std::size_t i = 0; i < s.t.size(); i += 2) {
    h.t.push_back(s.t[i]);
    h.m.push_back(s.m[i]);
    h.d.push_back(s.d[i]);
  }
  const auto a = fit_collapse(s.t, s.m, s.d, true);
  const auto b = fit_collapse(h.t, h.m, h.d, true);
  EXPECT_NEAR(a.alpha, b.alpha, 1e-3);
  EXPECT_NEAR(a.beta, b.beta, 1e-3);
}

TEST(FitCollapse, NoSignalOnDecay) {
  Series s;
  for (int i = 0; i < 100; ++i) {
    s.t.push_back(0.1 * i);
    s.m.push_back(std::exp(-0.1 * i));
    s.d.push_back(1.0);
  }
  try {
    fit_collapse(s.t, s.m, s.d, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoCollapseSignal);
  }
  // a collapse stop with a decaying amplitude still has no positive beta
  EXPECT_THROW(fit_collapse(s.t, s.m, s.d, true), Error);
}

TEST(CriticalAmplitude, StepFunctionBisection) {
  int calls = 0;
  auto probe = [&](double A) {
    ++calls;
    return A >= 2.0 ? ProbeOutcome::BlowUp : ProbeOutcome::NoBlowUp;
  };
  const auto r = critical_amplitude(probe, 1.0, 3.0, 0.01);
  EXPECT_LT(r.A_no_blowup, 2.0);
  EXPECT_GE(r.A_blowup, 2.0);
  EXPECT_LE(r.A_blowup - r.A_no_blowup, 0.01);
  EXPECT_GT(r.A_no_blowup, 1.99);
  EXPECT_LE(calls, static_cast<int>(std::ceil(std::log2(2.0 / 0.01))) + 2);
  EXPECT_EQ(r.probes.size(), static_cast<std::size_t>(calls));
}

TEST(CriticalAmplitude, BadBracket) {
  auto all_blow = [](double) { return ProbeOutcome::BlowUp; };
  try {
    critical_amplitude(all_blow, 1.0, 3.0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadBracket);
  }
  auto none = [](double) { return ProbeOutcome::NoBlowUp; };
  EXPECT_THROW(critical_amplitude(none, 1.0, 3.0, 0.1), Error);
}

TEST(CriticalAmplitude, InconclusiveCountsAsBlowUp) {
  auto probe = [](double A) { return A > 1.5 ? ProbeOutcome::Inconclusive : ProbeOutcome::NoBlowUp; };
  const auto r = critical_amplitude(probe, 1.0, 2.0, 0.05);
  EXPECT_LE(r.A_no_blowup, 1.5);
  EXPECT_GT(r.A_blowup, 1.5);
}

TEST(ClassifyProbe, SmallDataDecays) {
  RunControls rc;
  rc.t_end = 5.0;
  rc.n0 = 32;
  rc.dt_max = 0.05;
  rc.sample_every = 4;
  const auto ts = simulate(two_mode_data(0.1, 32), GclmParams{0.0, 1.0, 1.0, 0.0}, rc);
  EXPECT_EQ(classify_probe(ts), ProbeOutcome::NoBlowUp);
}

TEST(ClassifyProbe, GrowthWithoutStopIsInconclusive) {
  TimeSeries ts;
  ts.final_field = SpectralField(16, Domain::Circle);
  for (int i = 0; i <= 10; ++i) {
    Sample s;
    s.t = i;
    s.max_abs_omega = 1.0 + i;
    ts.samples.push_back(s);
  }
  ts.t_final = 10.0;
  EXPECT_EQ(classify_probe(ts), ProbeOutcome::Inconclusive);
  ts.terminal_status = TerminalStatus::ResolutionCapHit;
  EXPECT_EQ(classify_probe(ts), ProbeOutcome::BlowUp);
}

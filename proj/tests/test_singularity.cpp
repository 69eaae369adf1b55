#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gclm/aaa.hpp"
#include "gclm/exact_solutions.hpp"
#include "gclm/singularity.hpp"

using namespace gclm;
using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  return x;
}

const cd* nearest(const std::vector<cd>& ps, cd target) {
  const cd* best = nullptr;
  for (const auto& p : ps)
    if (!best || std::abs(p - target) < std::abs(*best - target)) best = &p;
  return best;
}

}  // namespace

TEST(DecayFit, ExactOnPlantedModel) {
  std::vector<double> mag(256);
  for (std::size_t k = 1; k < mag.size(); ++k) mag[k] = 5.0 * std::exp(-0.3 * k) * std::pow(k, -2.0);
  mag[0] = 5.0;
  const auto f = fit_decay_magnitudes(mag, 16, 60);
  EXPECT_NEAR(f.c_amp, 5.0, 1e-10);
  EXPECT_NEAR(f.delta, 0.3, 1e-10);
  EXPECT_NEAR(f.p, 2.0, 1e-10);
  EXPECT_LT(f.rms_residual, 1e-10);
  EXPECT_EQ(f.n_used, 45u);
}

TEST(DecayFit, SpectrumTooCleanOnTrigPolynomial) {
  auto f = SpectralField::sample(64, Domain::Circle, [](double x) { return std::sin(x) + 0.5 * std::cos(3 * x); });
  try {
    fit_fourier_decay(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpectrumTooClean);
  }
}

TEST(DecayFit, PeriodicSimplePoleDistanceAndExponent) {
  const double delta = 0.12;
  auto s = make_periodic(-0.5, std::tanh(0.5 * delta), 0.0);
  const auto f = sample_field(s, 512);
  const auto d = fit_fourier_decay(f);
  EXPECT_NEAR(d.delta, closest_pole_distance(s), 0.01 * delta);
  EXPECT_NEAR(d.p, 0.0, 0.05);
  const auto e = fit_fourier_decay(f, FitWindow{WindowPolicy::Early});
  EXPECT_NEAR(e.delta, d.delta, 0.02 * d.delta);
  EXPECT_EQ(classify_branch(singularity_real_part(f)), RealPartBranch::Zero);
}

TEST(DecayFit, PoleNearPiSelectsCothBranch) {
  // real v > 0 with w > 0 sits at x = 0 too; shift the pole to Re x = pi via complex v
  auto s = make_periodic(0.5, 1.0 / std::tanh(0.15), 0.0);
  const auto p = poles(s);
  ASSERT_NEAR(std::abs(std::abs(p[0].real()) - kPi), 0.0, 1e-12);
  const auto f = sample_field(s, 256);
  EXPECT_EQ(classify_branch(singularity_real_part(f)), RealPartBranch::PlusMinusPi);
}

TEST(DecayFit, LineDoublePoleMapsBackToX) {
  auto s = make_doublepole(0.1, 0.2, 0.0, 1.0);
  const auto f = sample_field(s, 256);
  const auto d = fit_fourier_decay(f);
  EXPECT_NEAR(d.delta, 2.0 * std::atanh(0.1), 0.01 * 2.0 * std::atanh(0.1));
  EXPECT_NEAR(d.p, -1.0, 0.05);
  const auto branch = classify_branch(singularity_real_part(f));
  EXPECT_EQ(branch, RealPartBranch::Zero);
  EXPECT_NEAR(delta_to_x(d.delta, branch), 0.1, 1e-3);
}

TEST(DeltaToX, Examples) {
  EXPECT_NEAR(delta_to_x(0.2, RealPartBranch::Zero), 0.0996679946249558, 1e-15);
  EXPECT_NEAR(delta_to_x(0.2, RealPartBranch::PlusMinusPi), 10.033311132253990, 1e-12);
  EXPECT_NEAR(delta_to_x(1e-9, RealPartBranch::Zero), 5e-10, 1e-20);
  EXPECT_EQ(delta_to_x(0.37, RealPartBranch::PlusMinusPi, Domain::Circle), 0.37);
}

TEST(Aaa, LorentzianPolesAndResidues) {
  const auto x = linspace(-5, 5, 200);
  std::vector<double> f;
  for (double xi : x) f.push_back(1.0 / (xi * xi + 1.0));
  const auto r = aaa_approximate(x, f);
  EXPECT_TRUE(r.converged);
  ASSERT_EQ(r.poles.size(), 2u);
  const cd I{0, 1};
  const cd* up = nearest(r.poles, I);
  const cd* dn = nearest(r.poles, -I);
  EXPECT_LT(std::abs(*up - I), 1e-8);
  EXPECT_LT(std::abs(*dn + I), 1e-8);
  EXPECT_LT(std::abs(r.residues[up - r.poles.data()] - (-0.5 * I)), 1e-8);
  EXPECT_LT(std::abs(r.residues[dn - r.poles.data()] - (0.5 * I)), 1e-8);
  for (std::size_t j = 0; j < r.support_points.size(); ++j)
    EXPECT_EQ(r(r.support_points[j]), cd(r.values[j]));
}

TEST(Aaa, PlantedComplexPole) {
  const cd v(0.3, 0.1), I(0, 1);
  auto s = make_onepair(Family::OnePair_a0s1, 1.0, v, 1.0);
  const auto x = linspace(-4, 4, 400);
  std::vector<double> f;
  for (double xi : x) f.push_back(evaluate(s, xi));
  const auto r = aaa_approximate(x, f);
  EXPECT_LT(std::abs(*nearest(r.poles, I * v) - I * v), 1e-6);
  EXPECT_LT(std::abs(*nearest(r.poles, std::conj(I * v)) - std::conj(I * v)), 1e-6);
}

TEST(Aaa, ConstantHasNoPoles) {
  const auto x = linspace(-1, 1, 50);
  std::vector<double> f(x.size(), 1.0);
  const auto r = aaa_approximate(x, f);
  EXPECT_EQ(r.degree(), 0u);
  EXPECT_TRUE(r.poles.empty());
  EXPECT_NEAR(r(0.123).real(), 1.0, 1e-15);
}

TEST(Aaa, RealDataGivesConjugatePairs) {
  const auto x = linspace(-3, 3, 300);
  std::vector<double> f;
  for (double xi : x) f.push_back(std::tanh(2 * xi) + 1.0 / ((xi - 0.5) * (xi - 0.5) + 0.04));
  const auto r = aaa_approximate(x, f);
  for (const auto& p : r.poles) {
    if (std::abs(p.imag()) < 1e-10) continue;
    EXPECT_LT(std::abs(*nearest(r.poles, std::conj(p)) - std::conj(p)), 1e-8) << p;
  }
}

TEST(Aaa, DegreeCapReportsNonConverged) {
  const auto x = linspace(-1, 1, 300);
  std::vector<double> f;
  for (double xi : x) f.push_back(std::abs(xi));
  const auto r = aaa_approximate(x, f, AaaOptions{1e-14, 5, 1e-13});
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.degree(), 5u);
  EXPECT_GT(r.max_error, 0.0);
}

TEST(Aaa, RejectsBadInput) {
  std::vector<double> x{0, 1, 2}, f{0, 1, 2};
  EXPECT_THROW(aaa_approximate(x, f), Error);
}

TEST(Aaa, SchochetPoleSumFromField) {
  auto s = make_schochet({0.0, -1.0}, {0.0, -2.0});
  const auto st = advance(s, 0.5 * classify(s).t_c);
  const auto f = sample_field(st, 256);
  const auto r = aaa_of_field(f);
  cd sum = 0.0;
  int lower = 0;
  for (const auto& p : r.poles)
    if (p.imag() < -0.05 && std::abs(p) < 10) {
      sum += p;
      ++lower;
    }
  // double poles come back as close pairs: sum of the four lower poles = 2 (x1 + x2)
  EXPECT_EQ(lower, 4);
  EXPECT_LT(std::abs(sum - 2.0 * cd(0.0, -3.0)), 1e-4);
}

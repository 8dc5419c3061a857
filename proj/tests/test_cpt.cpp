#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "trimer/cpt.hpp"

namespace {

using namespace trimer;
using trimer::testing::Rng;

constexpr double kThird = 1.0 / 3.0;

CouplingRatio eta(double v) { return CouplingRatio::finite(v); }

TEST(DarkStateSingle, NoCouplingNoConversion) {
  for (auto path : {ReactionPath::AA, ReactionPath::AB}) {
    const auto s = dark_state_single(eta(0.0), path);
    EXPECT_EQ(s.n_g, 0.0);
    EXPECT_NEAR(s.n_a, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(s.n_b, kThird, 1e-15);
    EXPECT_EQ(s.n_d, 0.0);
  }
}

TEST(DarkStateSingle, InfiniteLimitIsIdealYield) {
  for (auto path : {ReactionPath::AA, ReactionPath::AB}) {
    const auto s = dark_state_single(CouplingRatio::infinite(), path);
    EXPECT_NEAR(s.n_g, kThird, 1e-15);
    EXPECT_EQ(s.n_a, 0.0);
    EXPECT_EQ(s.n_b, 0.0);
  }
}

TEST(DarkStateSingle, UnitRatioValues) {
  const auto aa = dark_state_single(eta(1.0), ReactionPath::AA);
  EXPECT_NEAR(aa.n_g, 4.0 / 15.0, 1e-15);
  EXPECT_NEAR(aa.n_a, 2.0 / 15.0, 1e-15);
  EXPECT_NEAR(aa.n_b, 1.0 / 15.0, 1e-15);
  const auto ab = dark_state_single(eta(1.0), ReactionPath::AB);
  EXPECT_NEAR(ab.n_g, 1.0 / 6.0, 1e-15);
  EXPECT_LT(ab.n_g, aa.n_g);
}

TEST(DarkStateSingle, NegativeRatioIsDomainError) {
  EXPECT_THROW(CouplingRatio::finite(-0.1), DomainError);
  EXPECT_THROW(CouplingRatio::finite(std::nan("")), DomainError);
  EXPECT_THROW(CouplingRatio::from_rates(-1.0, 1.0), DomainError);
}

TEST(DarkStateSingle, InvariantsOverRandomRatios) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double e = rng.log_uniform(1e-3, 1e3);
    for (auto path : {ReactionPath::AA, ReactionPath::AB}) {
      const auto s = dark_state_single(eta(e), path);
      EXPECT_GE(s.n_g, 0.0);
      EXPECT_LE(s.n_g, kThird);
      EXPECT_NEAR(s.n_a + s.n_b + 3.0 * s.n_g, 1.0, 1e-12);
      EXPECT_NEAR(s.n_a, 2.0 / 3.0 - 2.0 * s.n_g, 1e-12);
      EXPECT_NEAR(s.n_b, kThird - s.n_g, 1e-12);
      const Complex a = s.amplitudes[Species::AtomA];
      const Complex b = s.amplitudes[Species::AtomB];
      const Complex g = s.amplitudes[Species::Trimer];
      if (path == ReactionPath::AA) {
        EXPECT_NEAR(std::abs(e * a * a - b * g), 0.0, 1e-12);
      } else {
        EXPECT_NEAR(std::abs(e * a * b - std::conj(a) * g), 0.0, 1e-12);
      }
      EXPECT_EQ(s.amplitudes[Species::DimerAA], Complex(0.0));
      EXPECT_EQ(s.amplitudes[Species::DimerAB], Complex(0.0));
    }
  }
}

TEST(DarkStateSingle, MonotoneInEta) {
  for (auto path : {ReactionPath::AA, ReactionPath::AB}) {
    double prev = -1.0;
    for (int k = -300; k <= 300; ++k) {
      const double ng = dark_state_single(eta(std::pow(10.0, k / 100.0)), path).n_g;
      EXPECT_GT(ng, prev);
      prev = ng;
    }
  }
}

TEST(DarkStateSingle, AgreesWithStationarityRootFind) {
  Rng rng(20260101);
  for (int i = 0; i < 1000; ++i) {
    const double e = rng.log_uniform(1e-3, 1e3);
    const long double x_aa = trimer::testing::single_path_oracle(e, true);
    const long double x_ab = trimer::testing::single_path_oracle(e, false);
    EXPECT_NEAR(dark_state_single(eta(e), ReactionPath::AA).n_g, static_cast<double>(x_aa), 1e-12) << e;
    EXPECT_NEAR(dark_state_single(eta(e), ReactionPath::AB).n_g, static_cast<double>(x_ab), 1e-12) << e;
  }
}

TEST(DarkStateDual, Examples) {
  const auto s = dark_state_dual(eta(1.0), eta(1.0));
  EXPECT_NEAR(s.n_g, 0.2, 1e-15);
  EXPECT_NEAR(s.n_a, 0.2, 1e-15);
  EXPECT_NEAR(s.n_b, 0.2, 1e-15);
  EXPECT_NEAR(s.n_a + s.n_b + 3.0 * s.n_g, 1.0, 1e-15);
  EXPECT_EQ(dark_state_dual(eta(1.0), eta(0.0)).n_g, 0.0);
  EXPECT_NEAR(dark_state_dual(eta(1.0), eta(2.0)).n_g, 4.0 / 15.0, 1e-15);
}

TEST(DarkStateDual, DegenerateFirstChannelIsError) {
  EXPECT_THROW(dark_state_dual(eta(0.0), eta(1.0)), DomainError);
}

TEST(DarkStateDual, LargeSecondRatioApproachesIdealYield) {
  for (double e1 : {0.1, 0.5, 1.0, 7.0}) {
    EXPECT_NEAR(dark_state_dual(eta(e1), eta(1e6)).n_g, kThird, 1e-5);
    EXPECT_NEAR(dark_state_dual(eta(e1), CouplingRatio::infinite()).n_g, kThird, 1e-15);
  }
}

TEST(DarkStateDual, RelationsAndOracle) {
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    const double e1 = rng.log_uniform(1e-3, 1e3);
    const double e2 = rng.log_uniform(1e-3, 1e3);
    const auto s = dark_state_dual(eta(e1), eta(e2));
    const auto o = trimer::testing::dual_path_oracle(e1, e2);
    EXPECT_NEAR(s.n_g, static_cast<double>(o.n_g), 1e-12);
    EXPECT_NEAR(s.n_a, static_cast<double>(o.n_a), 1e-12);
    EXPECT_NEAR(s.n_b, static_cast<double>(o.n_b), 1e-12);
    EXPECT_NEAR(s.n_a + s.n_b + 3.0 * s.n_g, 1.0, 1e-12);
    const Complex a = s.amplitudes[Species::AtomA];
    const Complex b = s.amplitudes[Species::AtomB];
    const Complex g = s.amplitudes[Species::Trimer];
    // relations divided by Omega: eta1 a^2 = b g and eta2 b = g
    EXPECT_NEAR(std::abs(e1 * a * a - b * g), 0.0, 1e-12 * std::max(1.0, e1));
    EXPECT_NEAR(std::abs(e2 * b - g), 0.0, 1e-12 * std::max(1.0, e2));
  }
}

TEST(ChannelRatio, Examples) {
  EXPECT_DOUBLE_EQ(channel_ratio(1.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(channel_ratio(2.0, 2.0), 1.0);
  EXPECT_NEAR(channel_ratio(0.05, 0.15), 3.0, 1e-15);
  EXPECT_THROW(channel_ratio(0.0, 1.0), DomainError);
  try {
    channel_ratio(1.0, -1.0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("R < 0"), std::string::npos);
  }
}

TEST(ResonanceDetuning, CollisionlessIsMinusDelta) {
  ModelParams p;
  p.chi = CollisionMatrix::uniform(0.0);
  p.delta = 1.7;
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto sol = dark_state_single(eta(rng.log_uniform(1e-2, 1e2)), ReactionPath::AA);
    EXPECT_DOUBLE_EQ(resonance_detuning(p, sol), -1.7);
  }
  p.channel = Channel::Dual;
  EXPECT_DOUBLE_EQ(resonance_detuning(p, dark_state_dual(eta(1.0), eta(2.0))), -1.7);
}

TEST(ResonanceDetuning, SodiumRubidiumCollisionValues) {
  ModelParams p;
  p.delta = 0.0;
  DarkStateSolution atoms;
  atoms.n_a = 2.0 / 3.0;
  atoms.n_g = 0.0;
  const double expect_atoms = (4 * 0.3125 - 2 * 0.0938 + 4 * 0.4214 + 0.5303 - 0.0938) * (2.0 / 3.0);
  EXPECT_NEAR(resonance_detuning(p, atoms), expect_atoms, 1e-14);
  EXPECT_NEAR(resonance_detuning(p, atoms), 2.1230, 5e-5);
  DarkStateSolution trimers;
  trimers.n_a = 0.0;
  trimers.n_g = kThird;
  EXPECT_NEAR(resonance_detuning(p, trimers), 2.0 * (2 * 0.0938 + 0.0938 - 0.0938) * kThird, 1e-15);
  EXPECT_NEAR(resonance_detuning(p, trimers), 0.12507, 5e-6);
}

// For single-path dark states (N_b = N_a / 2) the written condition is the
// phase-matching condition of the A2-path source term.
TEST(ResonanceDetuning, EqualsPhaseMatchingForSinglePath) {
  ModelParams p;
  p.delta = -3.0;
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto sol = dark_state_single(eta(rng.log_uniform(1e-3, 1e3)), ReactionPath::AA);
    std::array<double, kSpeciesCount> pops{sol.n_a, sol.n_b, 0.0, 0.0, sol.n_g};
    const auto mu = p.chi.frequency_shifts(pops);
    const double phase_match = -p.delta + 2 * mu[0] + mu[1] - mu[4];
    EXPECT_NEAR(resonance_detuning(p, sol), phase_match, 1e-13);
  }
}

TEST(DualResonanceFit, ResidualVanishes) {
  ModelParams p;
  p.channel = Channel::Dual;
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const auto sol = dark_state_dual(eta(rng.log_uniform(1e-2, 1e2)), eta(rng.log_uniform(1e-2, 1e2)));
    EXPECT_NEAR(dual_resonance_fit(p, sol).residual_norm, 0.0, 1e-13);
  }
}

TEST(CptReferenceCurve, PeakValueAndLimit) {
  ModelParams p;
  const auto curve = cpt_reference_curve(p, 0.0, 200.0, 0.5);
  EXPECT_NEAR(curve.front().eta1.value(), 0.05, 1e-15);
  EXPECT_NEAR(curve.front().n_gs, kThird * 0.01 / 1.01, 1e-15);
  EXPECT_NEAR(curve.front().n_gs, 3.3003e-3, 5e-8);
  EXPECT_NEAR(curve.back().n_gs, kThird, 1e-4);
  EXPECT_EQ(curve.back().t, 200.0);
  for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_GE(curve[i].n_gs, curve[i - 1].n_gs);
}

TEST(CptReferenceCurve, ConstantPulseGivesConstantCurve) {
  ModelParams p;
  p.omega1 = PulseSchedule::constant(4.0);
  const auto curve = cpt_reference_curve(p, 0.0, 10.0, 1.0);
  for (const auto& c : curve) EXPECT_EQ(c.n_gs, curve.front().n_gs);
}

TEST(CptReferenceCurve, VanishingPulseIsLimitNotDivision) {
  ModelParams p;
  p.omega1 = PulseSchedule::constant(0.0);
  const auto curve = cpt_reference_curve(p, 0.0, 1.0, 0.5);
  for (const auto& c : curve) {
    EXPECT_TRUE(c.eta1.is_infinite());
    EXPECT_NEAR(c.n_gs, kThird, 1e-15);
  }
}

TEST(SampleTimes, EndsExactlyAtWindowEnd) {
  const auto ts = sample_times(0.0, 1.0, 0.3);
  ASSERT_EQ(ts.size(), 5u);
  EXPECT_EQ(ts.back(), 1.0);
  EXPECT_THROW(sample_times(1.0, 0.0, 0.1), ConfigurationError);
  EXPECT_THROW(sample_times(0.0, 1.0, 0.0), ConfigurationError);
}

}  // namespace

#include "magicsim/spin_state.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "magicsim/constants.hpp"

using namespace magicsim;
using constants::pi;

namespace {

CouplingMatrix zero_j(int n) {
  CouplingMatrix j;
  j.j = Eigen::MatrixXd::Zero(n, n);
  return j;
}

TEST(SpinState, GroundAndBasisConstruction) {
  const auto s = SpinState::ground(3);
  EXPECT_EQ(s.amplitudes.size(), 8u);
  EXPECT_EQ(s.amplitudes[0], std::complex<double>(1.0, 0.0));
  const auto b = SpinState::basis(3, 0b101u);
  EXPECT_EQ(b.amplitudes[5], std::complex<double>(1.0, 0.0));
  EXPECT_NEAR(b.norm_sq(), 1.0, 1e-15);
}

TEST(SpinState, QubitGuard) {
  EXPECT_THROW(SpinState::ground(0), ValidationError);
  EXPECT_THROW(SpinState::ground(13), ValidationError);
}

TEST(ApplyRotation, PiPulseFlipsDownToUp) {
  auto s = apply_rotation(SpinState::ground(1), 0, pi, 0.0);
  EXPECT_NEAR(std::norm(s.amplitudes[1]), 1.0, 1e-14);
  // Global phase convention: -i |up>.
  EXPECT_NEAR(s.amplitudes[1].imag(), -1.0, 1e-14);
}

TEST(ApplyRotation, HalfPiPulseSuperposition) {
  auto s = apply_rotation(SpinState::ground(1), 0, 0.5 * pi, 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(s.amplitudes[0].real(), r, 1e-14);
  EXPECT_NEAR(s.amplitudes[0].imag(), 0.0, 1e-14);
  EXPECT_NEAR(s.amplitudes[1].real(), 0.0, 1e-14);
  EXPECT_NEAR(s.amplitudes[1].imag(), -r, 1e-14);
}

TEST(ApplyRotation, TwoHalfPiPulsesComposeToPi) {
  auto once = apply_rotation(SpinState::ground(2), 1, pi, 0.3);
  auto twice = apply_rotation(
      apply_rotation(SpinState::ground(2), 1, 0.5 * pi, 0.3), 1, 0.5 * pi, 0.3);
  for (int k = 0; k < 4; ++k)
    EXPECT_NEAR(std::abs(once.amplitudes[k] - twice.amplitudes[k]), 0.0, 1e-14);
}

TEST(ApplyRotation, OutOfRangeTarget) {
  EXPECT_THROW(apply_rotation(SpinState::ground(2), 2, pi, 0.0),
               ValidationError);
}

TEST(Crosstalk, DisabledMatchesIdealRotation) {
  CrosstalkModel off;
  auto a = apply_rotation(SpinState::ground(2), 0, 0.7, 0.2);
  auto b = apply_rotation_with_crosstalk(SpinState::ground(2), 0, 0.7, 0.2,
                                         hz_2pi(60e3), off);
  for (int k = 0; k < 4; ++k)
    EXPECT_EQ(a.amplitudes[k], b.amplitudes[k]);
}

TEST(Crosstalk, DegenerateNeighborGetsFullRotation) {
  CrosstalkModel x{true, {1e9, 1e9}};
  auto s = apply_rotation_with_crosstalk(SpinState::ground(2), 0, pi, 0.0,
                                         hz_2pi(60e3), x);
  // Both ions flipped: basis 0b11.
  EXPECT_NEAR(std::norm(s.amplitudes[3]), 1.0, 1e-12);
}

TEST(Crosstalk, PaperDetuningKeepsNeighborBelowBound) {
  const double rabi = hz_2pi(60e3);
  const double delta = hz_2pi(3e6);
  CrosstalkModel x{true, {1e9, 1e9 + delta}};
  auto s = apply_rotation_with_crosstalk(SpinState::ground(2), 0, pi, 0.0,
                                         rabi, x);
  const std::array<int, 1> neighbor{1};
  const double p = measure_populations(s, neighbor)[1];
  const double bound = rabi * rabi / (rabi * rabi + delta * delta);
  EXPECT_LE(p, 4e-4);
  EXPECT_LE(p, bound);
}

TEST(EvolveFree, ZeroTimeIsIdentity) {
  auto in = apply_rotation(SpinState::ground(2), 0, 0.4, 1.1);
  auto out = evolve_free(in, zero_j(2), 0.0);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(in.amplitudes[k], out.amplitudes[k]);
}

TEST(EvolveFree, ConditionalPhaseAdvancesBlochAngle) {
  // Ion 0 in a superposition, ion 1 pinned up; J tau = pi shifts the
  // relative phase of ion 0 by pi compared with no evolution.
  CouplingMatrix j = zero_j(2);
  const double tau = 1e-3;
  j.j(0, 1) = j.j(1, 0) = pi / tau;
  auto prep = apply_rotation(SpinState::basis(2, 0b10u), 0, 0.5 * pi, 0.0);
  auto evolved = evolve_free(prep, j, tau);
  const auto ratio_before = prep.amplitudes[3] / prep.amplitudes[2];
  const auto ratio_after = evolved.amplitudes[3] / evolved.amplitudes[2];
  EXPECT_NEAR(std::abs(ratio_after + ratio_before), 0.0, 1e-12);
}

TEST(EvolveFree, NoisePhaseFlipsSingleIon) {
  auto prep = apply_rotation(SpinState::ground(1), 0, 0.5 * pi, 0.0);
  const std::array<double, 1> phases{pi};
  auto out = evolve_free(prep, zero_j(1), 1.0, phases);
  const auto ratio_before = prep.amplitudes[1] / prep.amplitudes[0];
  const auto ratio_after = out.amplitudes[1] / out.amplitudes[0];
  EXPECT_NEAR(std::abs(ratio_after + ratio_before), 0.0, 1e-12);
}

TEST(EvolveFree, WaitAdditivity) {
  CouplingMatrix j = zero_j(3);
  j.j(0, 1) = j.j(1, 0) = 200.0;
  j.j(1, 2) = j.j(2, 1) = 150.0;
  j.j(0, 2) = j.j(2, 0) = 90.0;
  auto in = apply_rotation(
      apply_rotation(SpinState::ground(3), 0, 0.5 * pi, 0.0), 2, 0.5 * pi, 0.7);
  auto split = evolve_free(evolve_free(in, j, 1.3e-3), j, 0.9e-3);
  auto whole = evolve_free(in, j, 2.2e-3);
  for (int k = 0; k < 8; ++k)
    EXPECT_NEAR(std::abs(split.amplitudes[k] - whole.amplitudes[k]), 0.0, 1e-13);
}

TEST(EvolveFree, NormPreservedUnderRandomProgram) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  CouplingMatrix j = zero_j(4);
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      j.j(a, b) = j.j(b, a) = angle(rng) * 100.0;
  auto s = SpinState::ground(4);
  for (int step = 0; step < 60; ++step) {
    if (rng() & 1)
      s = apply_rotation(s, static_cast<int>(rng() % 4), angle(rng), angle(rng));
    else
      s = evolve_free(s, j, angle(rng) * 1e-3);
    EXPECT_NEAR(s.norm_sq(), 1.0, 1e-12);
  }
}

TEST(MeasurePopulations, BasisStateMarginals) {
  const auto s = SpinState::ground(3);
  const std::array<int, 2> subset{0, 2};
  const auto p = measure_populations(s, subset);
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1] + p[2] + p[3], 0.0);
}

TEST(MeasurePopulations, BellPairMarginals) {
  // Entangle ions 0 and 2 by hand: (|00> + |11>)/sqrt(2) on the pair.
  auto s = SpinState::ground(3);
  s.amplitudes[0] = 1.0 / std::sqrt(2.0);
  s.amplitudes[0b101] = 1.0 / std::sqrt(2.0);
  const std::array<int, 2> subset{0, 2};
  const auto p = measure_populations(s, subset);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[3], 0.5, 1e-15);
  EXPECT_EQ(p[1], 0.0);
  EXPECT_EQ(p[2], 0.0);
}

TEST(MeasurePopulations, TwoThirdsPiPulse) {
  auto s = apply_rotation(SpinState::ground(1), 0, 2.0 * pi / 3.0, 0.0);
  const std::array<int, 1> subset{0};
  EXPECT_NEAR(measure_populations(s, subset)[1], 0.75, 1e-14);
}

TEST(MeasurePopulations, ProbabilitiesSumToOne) {
  auto s = apply_rotation(
      apply_rotation(SpinState::ground(3), 0, 1.1, 0.3), 2, 2.0, 1.9);
  const std::array<int, 2> subset{1, 2};
  const auto p = measure_populations(s, subset);
  double total = 0;
  for (double v : p) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(MeasurePopulations, EmptySubsetRejected) {
  EXPECT_THROW(measure_populations(SpinState::ground(2), {}), ValidationError);
}

}  // namespace

#include "magicsim/coupling.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "magicsim/constants.hpp"
#include "magicsim/field_map.hpp"
#include "magicsim/fringe.hpp"
#include "magicsim/ion_crystal.hpp"

using namespace magicsim;

namespace {

TrapConfig paper_trap(int n = 3) { return {hz_2pi(123.5e3), hz_2pi(502e3), n}; }

// The per-ion gradients quoted alongside the calculated J values.
IonFrequencies caption_gradients() {
  IonFrequencies f;
  f.omega = {0, 0, 0};
  f.gradient_at_ion = {16.8, 18.7, 18.9};
  return f;
}

TEST(KappaMatrix, ZeroGradientGivesZero) {
  const auto species = IonSpecies::yb171();
  const auto modes = axial_normal_modes(paper_trap(), species);
  IonFrequencies f{{0, 0, 0}, {0.0, 0.0, 0.0}};
  EXPECT_EQ(kappa_matrix(modes, f, species).kappa.cwiseAbs().maxCoeff(), 0.0);
}

TEST(KappaMatrix, SingleIonClosedForm) {
  const auto species = IonSpecies::yb171();
  const auto trap = paper_trap(1);
  const auto modes = axial_normal_modes(trap, species);
  IonFrequencies f{{0}, {19.0}};
  const auto k = kappa_matrix(modes, f, species);
  const double dz =
      std::sqrt(constants::hbar / (2.0 * species.mass * trap.nu_axial));
  const double expected = dz * species.g_factor * constants::bohr_magneton *
                          19.0 / constants::hbar / trap.nu_axial;
  EXPECT_NEAR(k.kappa(0, 0), expected, 1e-15 * expected);
}

TEST(KappaMatrix, ScalesAsTrapFrequencyToMinusThreeHalves) {
  const auto species = IonSpecies::yb171();
  IonFrequencies f{{0, 0}, {19.0, 19.0}};
  const auto k1 =
      kappa_matrix(axial_normal_modes(paper_trap(2), species), f, species);
  auto trap = paper_trap(2);
  trap.nu_axial *= 4.0;
  const auto k2 =
      kappa_matrix(axial_normal_modes(trap, species), f, species);
  for (int mode = 0; mode < 2; ++mode)
    for (int l = 0; l < 2; ++l)
      EXPECT_NEAR(k2.kappa(mode, l) / k1.kappa(mode, l), 0.125, 1e-12);
}

TEST(JMatrix, PaperCalculatedValues) {
  const auto species = IonSpecies::yb171();
  const auto modes = axial_normal_modes(paper_trap(), species);
  const auto j = j_matrix(modes, caption_gradients(), species);
  EXPECT_NEAR(to_hz_2pi(j.j(0, 1)), 32.9, 0.02 * 32.9);
  EXPECT_NEAR(to_hz_2pi(j.j(1, 2)), 37.0, 0.02 * 37.0);
  EXPECT_NEAR(to_hz_2pi(j.j(0, 2)), 23.9, 0.02 * 23.9);
}

TEST(JMatrix, SymmetricZeroDiagonalPositive) {
  const auto species = IonSpecies::yb171();
  const auto modes = axial_normal_modes(paper_trap(), species);
  const auto freqs = ion_frequencies(modes, {3.4e-4, 6.2e-5, 19.0}, species);
  const auto j = j_matrix(modes, freqs, species);
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(j.j(a, a), 0.0);
    for (int b = 0; b < 3; ++b) {
      EXPECT_EQ(j.j(a, b), j.j(b, a));
      if (a != b) EXPECT_GT(j.j(a, b), 0.0);
    }
  }
}

TEST(JMatrix, TwoIonClosedForm) {
  // J = (g_F mu_B b)^2 / (6 m hbar nu1^2) from the c.m. + stretch sum.
  const auto species = IonSpecies::yb171();
  const auto trap = paper_trap(2);
  const double b = 19.0;
  const auto j = j_matrix_uniform_gradient(trap, species, b);
  const double num = species.g_factor * constants::bohr_magneton * b;
  const double expected = num * num / (6.0 * species.mass * constants::hbar *
                                       trap.nu_axial * trap.nu_axial);
  EXPECT_NEAR(j.j(0, 1), expected, 1e-10 * expected);
}

TEST(JMatrix, ZeroGradientGivesZero) {
  const auto species = IonSpecies::yb171();
  const auto j = j_matrix_uniform_gradient(paper_trap(2), species, 0.0);
  EXPECT_EQ(j.j.cwiseAbs().maxCoeff(), 0.0);
}

TEST(JMatrix, InvariantUnderModeRowSignFlips) {
  const auto species = IonSpecies::yb171();
  auto modes = axial_normal_modes(paper_trap(), species);
  const auto freqs = ion_frequencies(modes, {3.4e-4, 6.2e-5, 19.0}, species);
  const auto j0 = j_matrix(modes, freqs, species);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    auto flipped = modes;
    for (int mode = 0; mode < 3; ++mode)
      if (rng() & 1) flipped.mode_matrix.row(mode) *= -1.0;
    const auto j1 = j_matrix(flipped, freqs, species);
    EXPECT_LT((j1.j - j0.j).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(JMatrix, ExactInverseSquareTrapFrequencyScaling) {
  const auto species = IonSpecies::yb171();
  const double b = 19.0;
  const auto j1 = j_matrix_uniform_gradient(paper_trap(3), species, b);
  for (double c : {0.5, 2.0, 3.7}) {
    auto trap = paper_trap(3);
    trap.nu_axial *= c;
    const auto j2 = j_matrix_uniform_gradient(trap, species, b);
    for (int a = 0; a < 3; ++a)
      for (int bb = a + 1; bb < 3; ++bb)
        EXPECT_NEAR(j2.j(a, bb) * c * c / j1.j(a, bb), 1.0, 1e-12);
  }
}

TEST(JMatrix, QuadraticGradientScaling) {
  const auto species = IonSpecies::yb171();
  const auto j1 = j_matrix_uniform_gradient(paper_trap(3), species, 19.0);
  const auto j2 = j_matrix_uniform_gradient(paper_trap(3), species, 38.0);
  for (int a = 0; a < 3; ++a)
    for (int bb = a + 1; bb < 3; ++bb)
      EXPECT_NEAR(j2.j(a, bb) / j1.j(a, bb), 4.0, 1e-12);
}

TEST(JMatrix, UniformGradientSymmetryAndPaperOrdering) {
  const auto species = IonSpecies::yb171();
  const auto modes = axial_normal_modes(paper_trap(), species);
  IonFrequencies uniform{{0, 0, 0}, {19.0, 19.0, 19.0}};
  const auto ju = j_matrix(modes, uniform, species);
  EXPECT_NEAR(ju.j(0, 1) / ju.j(1, 2), 1.0, 1e-12);

  const auto j = j_matrix(modes, caption_gradients(), species);
  EXPECT_GT(j.j(1, 2), j.j(0, 1));  // nonuniform gradient ordering
  EXPECT_GT(j.j(0, 1), j.j(0, 2));
}

TEST(TrapScan, LogLogSlopeIsMinusTwo) {
  const auto species = IonSpecies::yb171();
  std::vector<double> nus;
  for (int k = 0; k < 25; ++k)
    nus.push_back(hz_2pi(60e3) *
                  std::pow(400.0 / 60.0, k / 24.0));
  const auto rows = j_vs_trap_scan(nus, 19.0, 2, species);

  // Least-squares slope of ln J against ln nu.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(rows.size());
  for (const auto& row : rows) {
    const double x = std::log(row.nu_axial);
    const double y = std::log(row.j.j(0, 1));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_NEAR(slope, -2.0, 1e-9);
}

TEST(TrapScan, MatchesTwoIonClosedForm) {
  const auto species = IonSpecies::yb171();
  const auto rows = j_vs_trap_scan({hz_2pi(123.5e3)}, 19.0, 2, species);
  const double num = species.g_factor * constants::bohr_magneton * 19.0;
  const double nu = hz_2pi(123.5e3);
  const double expected =
      num * num / (6.0 * species.mass * constants::hbar * nu * nu);
  EXPECT_NEAR(rows[0].j.j(0, 1) / expected, 1.0, 0.05);
}

TEST(TrapScan, RejectsEmptyAndNonPositive) {
  const auto species = IonSpecies::yb171();
  EXPECT_THROW(j_vs_trap_scan({}, 19.0, 2, species), ValidationError);
  EXPECT_THROW(j_vs_trap_scan({-1.0}, 19.0, 2, species), ValidationError);
}

}  // namespace

#ifndef MAGICSIM_COUPLING_HPP_
#define MAGICSIM_COUPLING_HPP_

// Gradient-induced spin-spin coupling of a linear chain. The per-mode
// coupling is kappa(n, l) = dz_n (g_F mu_B b_l / hbar) / nu_n * S(n, l)
// with dz_n = sqrt(hbar / (2 m nu_n)), and the pair couplings are
// J_ij = sum_n nu_n kappa(n, i) kappa(n, j), in rad/s.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "magicsim/constants.hpp"
#include "magicsim/errors.hpp"
#include "magicsim/field_map.hpp"
#include "magicsim/ion_crystal.hpp"

namespace magicsim {

struct KappaMatrix {
  Eigen::MatrixXd kappa;  // (mode n, ion l), dimensionless
};

struct CouplingMatrix {
  Eigen::MatrixXd j;  // rad/s, symmetric, zero diagonal

  int n_ions() const { return static_cast<int>(j.rows()); }
};

inline KappaMatrix kappa_matrix(const CrystalModes& modes,
                                const IonFrequencies& freqs,
                                const IonSpecies& species) {
  const int n = static_cast<int>(modes.mode_freqs.size());
  if (static_cast<int>(freqs.gradient_at_ion.size()) != n)
    throw ValidationError("coupling.gradients", "dimension mismatch");
  KappaMatrix out;
  out.kappa.resize(n, n);
  for (int mode = 0; mode < n; ++mode) {
    const double nu = modes.mode_freqs[mode];
    const double dz = std::sqrt(constants::hbar / (2.0 * species.mass * nu));
    for (int l = 0; l < n; ++l) {
      const double dw_dz = species.g_factor * constants::bohr_magneton *
                           freqs.gradient_at_ion[l] / constants::hbar;
      out.kappa(mode, l) = dz * dw_dz / nu * modes.mode_matrix(mode, l);
    }
  }
  return out;
}

// Symmetric J table; independent of the eigenvector sign convention since
// every term is quadratic in a mode row.
inline CouplingMatrix j_matrix(const CrystalModes& modes,
                               const IonFrequencies& freqs,
                               const IonSpecies& species) {
  const KappaMatrix k = kappa_matrix(modes, freqs, species);
  const int n = static_cast<int>(modes.mode_freqs.size());
  CouplingMatrix out;
  out.j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int jj = i + 1; jj < n; ++jj) {
      double sum = 0;
      for (int mode = 0; mode < n; ++mode)
        sum += modes.mode_freqs[mode] * k.kappa(mode, i) * k.kappa(mode, jj);
      out.j(i, jj) = sum;
      out.j(jj, i) = sum;
    }
  }
  return out;
}

// Convenience for uniform gradients (trap-potential scans, two-ion checks).
inline CouplingMatrix j_matrix_uniform_gradient(const TrapConfig& trap,
                                                const IonSpecies& species,
                                                double gradient) {
  const CrystalModes modes = axial_normal_modes(trap, species);
  IonFrequencies freqs;
  freqs.omega.assign(trap.n_ions, species.hyperfine_splitting);
  freqs.gradient_at_ion.assign(trap.n_ions, gradient);
  return j_matrix(modes, freqs, species);
}

struct TrapScanRow {
  double nu_axial;   // rad/s
  CouplingMatrix j;
};

// One J matrix per axial frequency, uniform gradient. For a uniform
// gradient every entry scales exactly as nu_axial^-2.
inline std::vector<TrapScanRow> j_vs_trap_scan(
    const std::vector<double>& nu_axial_values, double gradient, int n_ions,
    const IonSpecies& species, double nu_radial = 0) {
  if (nu_axial_values.empty())
    throw ValidationError("scan.nu_axial_values", "must be nonempty");
  std::vector<TrapScanRow> rows;
  rows.reserve(nu_axial_values.size());
  for (double nu : nu_axial_values) {
    if (!(nu > 0))
      throw ValidationError("scan.nu_axial_values", "must all be > 0");
    TrapConfig trap{nu, nu_radial > 0 ? nu_radial : 100.0 * nu, n_ions};
    rows.push_back({nu, j_matrix_uniform_gradient(trap, species, gradient)});
  }
  return rows;
}

}  // namespace magicsim

#endif  // MAGICSIM_COUPLING_HPP_

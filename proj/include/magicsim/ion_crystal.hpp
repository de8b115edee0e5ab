#ifndef MAGICSIM_ION_CRYSTAL_HPP_
#define MAGICSIM_ION_CRYSTAL_HPP_

// Equilibrium geometry and axial normal modes of a linear ion chain in a
// harmonic trap. Everything is a pure function of the trap and species
// values, so calls are safe from any thread.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "magicsim/constants.hpp"
#include "magicsim/errors.hpp"

namespace magicsim {

struct IonSpecies {
  double mass = 0;                // kg
  double g_factor = 0;            // Lande g_F
  double hyperfine_splitting = 0; // rad/s

  static IonSpecies yb171() {
    return {constants::yb171_mass, constants::yb171_g_factor,
            constants::yb171_hyperfine};
  }

  void validate() const {
    if (!(mass > 0)) throw ValidationError("species.mass", "must be > 0");
  }
};

struct TrapConfig {
  double nu_axial = 0;   // rad/s
  double nu_radial = 0;  // rad/s
  int n_ions = 0;

  void validate() const {
    if (!(nu_axial > 0)) throw ValidationError("trap.nu_axial", "must be > 0");
    if (!(nu_radial > 0)) throw ValidationError("trap.nu_radial", "must be > 0");
    if (n_ions < 1) throw ValidationError("trap.n_ions", "must be >= 1");
  }
};

struct CrystalModes {
  std::vector<double> positions;   // m, ascending, charge center at 0
  std::vector<double> mode_freqs;  // rad/s, ascending; lowest = nu_axial
  Eigen::MatrixXd mode_matrix;     // S(n, l): mode n, ion l; rows orthonormal
};

// Length unit of the dimensionless chain problem:
// l = (e^2 / (4 pi eps0 m nu_axial^2))^(1/3)
inline double chain_length_scale(const TrapConfig& trap, const IonSpecies& species) {
  return std::cbrt(constants::coulomb_energy_scale /
                   (species.mass * trap.nu_axial * trap.nu_axial));
}

namespace detail {

// Gradient of the dimensionless potential sum(u_i^2)/2 + sum_{i<j} 1/|u_i-u_j|.
inline Eigen::VectorXd chain_gradient(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  Eigen::VectorXd g = u;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = u[i] - u[j];
      g[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
    }
  }
  return g;
}

// Dimensionless Hessian; also the axial mode matrix of the chain.
inline Eigen::MatrixXd chain_hessian(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double inv_d3 = 1.0 / std::pow(std::abs(u[i] - u[j]), 3);
      diag += 2.0 * inv_d3;
      h(i, j) = -2.0 * inv_d3;
    }
    h(i, i) = diag;
  }
  return h;
}

// Damped Newton solve of the force balance, from a uniformly spaced guess.
inline Eigen::VectorXd solve_chain_equilibrium(int n) {
  if (n == 1) return Eigen::VectorXd::Zero(1);

  const double d0 = 2.018 / std::pow(n, 0.559);  // typical spacing, good init
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = (i - 0.5 * (n - 1)) * d0;

  constexpr int max_iter = 200;
  constexpr double tol = 1e-12;
  Eigen::VectorXd g = chain_gradient(u);
  for (int iter = 0; iter < max_iter; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() < tol) return u;
    const Eigen::VectorXd step = chain_hessian(u).ldlt().solve(-g);
    double scale = 1.0;
    for (int k = 0; k < 40; ++k) {
      Eigen::VectorXd trial = u + scale * step;
      std::sort(trial.begin(), trial.end());  // keep the ordering invariant
      Eigen::VectorXd gt = chain_gradient(trial);
      if (gt.norm() < g.norm()) {
        u = trial;
        g = gt;
        break;
      }
      scale *= 0.5;
      if (k == 39) throw NumericError("chain equilibrium: line search stalled");
    }
  }
  if (chain_gradient(u).lpNorm<Eigen::Infinity>() < tol) return u;
  throw NumericError("chain equilibrium: Newton iteration cap reached");
}

}  // namespace detail

// Equilibrium z positions in meters, ascending, centered on the trap axis.
inline std::vector<double> equilibrium_positions(const TrapConfig& trap,
                                                 const IonSpecies& species) {
  trap.validate();
  species.validate();
  Eigen::VectorXd u = detail::solve_chain_equilibrium(trap.n_ions);
  u.array() -= u.mean();  // charge center exactly at 0
  const double scale = chain_length_scale(trap, species);
  std::vector<double> z(u.size());
  for (int i = 0; i < u.size(); ++i) z[i] = u[i] * scale;
  return z;
}

// Axial normal modes: frequencies nu_axial * sqrt(eigenvalue) and the
// orthonormal mode matrix S(n, l). Sign convention: the largest-magnitude
// entry of each row is positive, so downstream tables are reproducible.
inline CrystalModes axial_normal_modes(const TrapConfig& trap,
                                       const IonSpecies& species) {
  trap.validate();
  species.validate();
  const Eigen::VectorXd u = detail::solve_chain_equilibrium(trap.n_ions);
  const Eigen::MatrixXd hess = detail::chain_hessian(u);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
  if (eig.info() != Eigen::Success)
    throw NumericError("axial modes: eigensolver failed");

  CrystalModes modes;
  const int n = trap.n_ions;
  modes.mode_freqs.resize(n);
  modes.mode_matrix.resize(n, n);
  const double scale = chain_length_scale(trap, species);
  modes.positions.resize(n);
  const double mean = u.mean();
  for (int l = 0; l < n; ++l) modes.positions[l] = (u[l] - mean) * scale;

  for (int k = 0; k < n; ++k) {
    const double lambda = eig.eigenvalues()[k];
    if (lambda <= 0)
      throw NumericError("axial modes: non-positive Hessian eigenvalue");
    modes.mode_freqs[k] = trap.nu_axial * std::sqrt(lambda);
    Eigen::VectorXd row = eig.eigenvectors().col(k);
    int imax = 0;
    for (int l = 1; l < n; ++l)
      if (std::abs(row[l]) > std::abs(row[imax])) imax = l;
    if (row[imax] < 0) row = -row;
    modes.mode_matrix.row(k) = row.transpose();
  }
  return modes;
}

// Closed-form minimum inter-ion spacing of an N-ion chain,
// d_min = l * 2.018 / N^0.559.
inline double min_spacing(const TrapConfig& trap, const IonSpecies& species) {
  trap.validate();
  species.validate();
  if (trap.n_ions < 2)
    throw ValidationError("trap.n_ions", "min_spacing needs >= 2 ions");
  return chain_length_scale(trap, species) * 2.018 /
         std::pow(trap.n_ions, 0.559);
}

// Linear-chain criterion: the chain stays linear (no zigzag) while
// nu_radial / nu_axial exceeds the critical anisotropy 0.73 N^0.86.
inline bool linear_chain_stable(const TrapConfig& trap) {
  trap.validate();
  if (trap.n_ions == 1) return true;
  return trap.nu_radial / trap.nu_axial >
         0.73 * std::pow(trap.n_ions, 0.86);
}

}  // namespace magicsim

#endif  // MAGICSIM_ION_CRYSTAL_HPP_

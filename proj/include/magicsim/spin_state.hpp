#ifndef MAGICSIM_SPIN_STATE_HPP_
#define MAGICSIM_SPIN_STATE_HPP_

// N-qubit state vector and the primitive operations on it: single-qubit
// rotations, off-resonant crosstalk rotations, diagonal free evolution
// under the J matrix plus accumulated noise phases, and Born-rule
// marginals. Basis convention: bit l of the amplitude index is the state
// of ion l, 0 = down, 1 = up.

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "magicsim/coupling.hpp"
#include "magicsim/errors.hpp"

namespace magicsim {

inline constexpr int kMaxQubits = 12;

struct SpinState {
  int n_qubits = 0;
  std::vector<std::complex<double>> amplitudes;

  static SpinState ground(int n) {
    if (n < 1 || n > kMaxQubits)
      throw ValidationError("state.n_qubits", "must be in [1, 12]");
    SpinState s;
    s.n_qubits = n;
    s.amplitudes.assign(std::size_t{1} << n, {0.0, 0.0});
    s.amplitudes[0] = 1.0;
    return s;
  }

  // Basis state from per-ion bits (bit l set = ion l up).
  static SpinState basis(int n, unsigned bits) {
    SpinState s = ground(n);
    s.amplitudes[0] = 0.0;
    s.amplitudes[bits] = 1.0;
    return s;
  }

  double norm_sq() const {
    double total = 0;
    for (const auto& a : amplitudes) total += std::norm(a);
    return total;
  }
};

namespace detail {

struct Mat2 {
  std::complex<double> m00, m01, m10, m11;
};

// R(theta, phi) = exp(-i theta/2 (cos phi sx + sin phi sy))
inline Mat2 rotation_gate(double theta, double phase) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const std::complex<double> i(0.0, 1.0);
  return {c, -i * s * std::exp(-i * phase), -i * s * std::exp(i * phase), c};
}

// Exact two-level propagator in the rotating frame of the drive, detuning
// delta = omega_ion - omega_drive:
// U = exp(-i t/2 (Omega cos phi sx + Omega sin phi sy + delta sz))
// with sz = +1 for up, matching the free-evolution phase convention.
inline Mat2 offresonant_gate(double rabi, double delta, double t, double phase) {
  const double eff = std::hypot(rabi, delta);
  if (eff == 0) return {1.0, 0.0, 0.0, 1.0};
  const double c = std::cos(0.5 * eff * t);
  const double s = std::sin(0.5 * eff * t);
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> off = -i * s * (rabi / eff);
  return {c + i * s * (delta / eff), off * std::exp(-i * phase),
          off * std::exp(i * phase), c - i * s * (delta / eff)};
}

inline void apply_single_qubit(SpinState& state, int target, const Mat2& u) {
  const std::size_t bit = std::size_t{1} << target;
  const std::size_t dim = state.amplitudes.size();
  for (std::size_t idx = 0; idx < dim; ++idx) {
    if (idx & bit) continue;
    auto& a0 = state.amplitudes[idx];
    auto& a1 = state.amplitudes[idx | bit];
    const auto b0 = u.m00 * a0 + u.m01 * a1;
    const auto b1 = u.m10 * a0 + u.m11 * a1;
    a0 = b0;
    a1 = b1;
  }
}

}  // namespace detail

struct CrosstalkModel {
  bool enabled = false;
  std::vector<double> omega;  // rad/s resonance per ion, required if enabled

  void validate(int n_ions) const {
    if (enabled && static_cast<int>(omega.size()) != n_ions)
      throw ValidationError("crosstalk.omega", "needs one frequency per ion");
  }
};

inline SpinState apply_rotation(SpinState state, int target, double theta,
                                double phase) {
  if (target < 0 || target >= state.n_qubits)
    throw ValidationError("rotation.target", "ion index out of range");
  detail::apply_single_qubit(state, target, detail::rotation_gate(theta, phase));
  return state;
}

// Driven ion gets the ideal rotation; every other ion sees the same tone
// off-resonantly for the full pulse duration t = theta / Omega.
inline SpinState apply_rotation_with_crosstalk(SpinState state, int driven,
                                               double theta, double phase,
                                               double rabi,
                                               const CrosstalkModel& xtalk) {
  if (!xtalk.enabled) return apply_rotation(std::move(state), driven, theta, phase);
  xtalk.validate(state.n_qubits);
  if (driven < 0 || driven >= state.n_qubits)
    throw ValidationError("rotation.target", "ion index out of range");
  if (!(rabi > 0))
    throw ValidationError("rotation.rabi", "must be > 0 with crosstalk on");

  detail::apply_single_qubit(state, driven, detail::rotation_gate(theta, phase));
  const double t = theta / rabi;
  for (int k = 0; k < state.n_qubits; ++k) {
    if (k == driven) continue;
    const double delta = xtalk.omega[k] - xtalk.omega[driven];
    detail::apply_single_qubit(state, k,
                               detail::offresonant_gate(rabi, delta, t, phase));
  }
  return state;
}

// Diagonal free evolution: each basis state |s> picks up
// exp(i/2 sum_{i<j} J_ij s_i s_j tau) * exp(-i/2 sum_i s_i theta_i)
// with s = +1 (up) / -1 (down) and theta_i the accumulated noise phase of
// ion i over the interval. Exact, no time discretization of the J term.
inline SpinState evolve_free(SpinState state, const CouplingMatrix& j,
                             double tau,
                             std::span<const double> noise_phases = {}) {
  if (tau < 0) throw ValidationError("evolve.tau", "must be >= 0");
  const int n = state.n_qubits;
  if (j.n_ions() != n)
    throw ValidationError("evolve.j", "J matrix dimension mismatch");
  if (!noise_phases.empty() && static_cast<int>(noise_phases.size()) != n)
    throw ValidationError("evolve.noise_phases", "dimension mismatch");

  const std::size_t dim = state.amplitudes.size();
  std::vector<double> sign(n);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    for (int l = 0; l < n; ++l) sign[l] = (idx >> l) & 1 ? 1.0 : -1.0;
    double phase = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        phase += 0.5 * j.j(a, b) * sign[a] * sign[b] * tau;
    if (!noise_phases.empty())
      for (int a = 0; a < n; ++a) phase -= 0.5 * sign[a] * noise_phases[a];
    state.amplitudes[idx] *= std::exp(std::complex<double>(0.0, phase));
  }
  return state;
}

// Born-rule marginal over the given ions. Outcome index bit k corresponds
// to subset[k] being up.
inline std::vector<double> measure_populations(const SpinState& state,
                                               std::span<const int> subset) {
  if (subset.empty())
    throw ValidationError("measure.subset", "must be nonempty");
  for (int ion : subset)
    if (ion < 0 || ion >= state.n_qubits)
      throw ValidationError("measure.subset", "ion index out of range");
  std::vector<double> probs(std::size_t{1} << subset.size(), 0.0);
  for (std::size_t idx = 0; idx < state.amplitudes.size(); ++idx) {
    std::size_t outcome = 0;
    for (std::size_t k = 0; k < subset.size(); ++k)
      if ((idx >> subset[k]) & 1) outcome |= std::size_t{1} << k;
    probs[outcome] += std::norm(state.amplitudes[idx]);
  }
  return probs;
}

}  // namespace magicsim

#endif  // MAGICSIM_SPIN_STATE_HPP_

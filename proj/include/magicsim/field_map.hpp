#ifndef MAGICSIM_FIELD_MAP_HPP_
#define MAGICSIM_FIELD_MAP_HPP_

// Static magnetic field along the trap axis, per-ion gradients and qubit
// resonance frequencies, the off-resonant addressing bound, and the
// microwave-probe spectrum.

#include <cmath>
#include <vector>

#include "magicsim/constants.hpp"
#include "magicsim/errors.hpp"
#include "magicsim/ion_crystal.hpp"

namespace magicsim {

struct FieldParams {
  double b_parallel0 = 0;  // T, longitudinal bias at the center ion
  double b_perp0 = 0;      // T, radial bias
  double grad_pm = 0;      // T/m, permanent-magnet gradient

  void validate() const {
    if (grad_pm < 0) throw ValidationError("field.grad_pm", "must be >= 0");
    if (b_perp0 < 0) throw ValidationError("field.b_perp0", "must be >= 0");
  }
};

struct IonFrequencies {
  std::vector<double> omega;            // rad/s, qubit splitting per ion
  std::vector<double> gradient_at_ion;  // T/m, field slope at each ion
};

// |B|(z) = sqrt((B_par + b_pm z)^2 + B_perp^2)
inline double field_magnitude(double z, const FieldParams& f) {
  return std::hypot(f.b_parallel0 + f.grad_pm * z, f.b_perp0);
}

// d|B|/dz = b_pm (B_par + b_pm z) / |B|; strictly below b_pm when B_perp > 0.
inline double field_gradient(double z, const FieldParams& f) {
  const double b = field_magnitude(z, f);
  if (b <= 0) throw NumericError("field_gradient: zero field magnitude");
  return f.grad_pm * (f.b_parallel0 + f.grad_pm * z) / b;
}

// Qubit splittings from the linear Zeeman shift of the field-sensitive state:
// omega_l = omega_hf + g_F mu_B |B|(z_l) / hbar.
inline IonFrequencies ion_frequencies(const CrystalModes& modes,
                                      const FieldParams& f,
                                      const IonSpecies& species) {
  f.validate();
  IonFrequencies out;
  out.omega.reserve(modes.positions.size());
  out.gradient_at_ion.reserve(modes.positions.size());
  const double zeeman = species.g_factor * constants::bohr_magneton / constants::hbar;
  for (double z : modes.positions) {
    out.omega.push_back(species.hyperfine_splitting +
                        zeeman * field_magnitude(z, f));
    out.gradient_at_ion.push_back(field_gradient(z, f));
  }
  return out;
}

// Upper bound on the probability of exciting a neighbor at distance d:
// Omega^2 / (Omega^2 + (g_F mu_B b d / hbar)^2).
inline double addressing_error(double rabi, double gradient, double spacing,
                               const IonSpecies& species) {
  if (!(spacing > 0))
    throw ValidationError("addressing.spacing", "must be > 0");
  const double detuning =
      species.g_factor * constants::bohr_magneton * gradient * spacing /
      constants::hbar;
  return rabi * rabi / (rabi * rabi + detuning * detuning);
}

struct SpectrumPoint {
  double drive;               // rad/s
  std::vector<double> p_ion;  // excitation probability per ion
  double total;               // expected bright-ion count
};

// Rabi flopping of each ion under a square probe pulse:
// P = (Omega/Omega')^2 sin^2(Omega' t / 2), Omega' = sqrt(Omega^2 + delta^2).
inline std::vector<SpectrumPoint> microwave_spectrum(
    const IonFrequencies& freqs, double rabi, double pulse_len,
    const std::vector<double>& drive) {
  if (!(pulse_len > 0))
    throw ValidationError("spectrum.pulse_len", "must be > 0");
  std::vector<SpectrumPoint> table;
  table.reserve(drive.size());
  for (double wd : drive) {
    SpectrumPoint pt{wd, {}, 0.0};
    pt.p_ion.reserve(freqs.omega.size());
    for (double wl : freqs.omega) {
      const double delta = wd - wl;
      const double eff = std::hypot(rabi, delta);
      const double p = eff > 0 ? (rabi * rabi) / (eff * eff) *
                                     std::pow(std::sin(0.5 * eff * pulse_len), 2)
                               : 0.0;
      pt.p_ion.push_back(p);
      pt.total += p;
    }
    table.push_back(std::move(pt));
  }
  return table;
}

}  // namespace magicsim

#endif  // MAGICSIM_FIELD_MAP_HPP_

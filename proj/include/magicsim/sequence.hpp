#ifndef MAGICSIM_SEQUENCE_HPP_
#define MAGICSIM_SEQUENCE_HPP_

// Timed pulse sequences and their interpreter. Rotations are instantaneous
// for J-coupling and noise (pulse times are microseconds against
// millisecond free evolutions); their theta/Omega duration is used only by
// the crosstalk physics. Waits advance the noise clock and apply the exact
// diagonal J propagator.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "magicsim/constants.hpp"
#include "magicsim/errors.hpp"
#include "magicsim/noise.hpp"
#include "magicsim/spin_state.hpp"

namespace magicsim {

struct PulseStep {
  enum class Kind { rotation, wait, simultaneous_rotation };
  Kind kind = Kind::wait;
  std::vector<int> ions;  // one entry for rotation, the set for simultaneous
  double theta = 0;       // rad
  double phase = 0;       // rad
  double rabi = 0;        // rad/s; 0 means "unspecified" (ideal pulses only)
  double duration = 0;    // s, wait only

  static PulseStep rotation(int ion, double theta, double phase, double rabi = 0) {
    return {Kind::rotation, {ion}, theta, phase, rabi, 0.0};
  }
  static PulseStep wait(double duration) {
    return {Kind::wait, {}, 0.0, 0.0, 0.0, duration};
  }
  static PulseStep simultaneous(std::vector<int> ions, double theta,
                                double phase, double rabi = 0) {
    return {Kind::simultaneous_rotation, std::move(ions), theta, phase, rabi, 0.0};
  }
};

struct PulseSequence {
  std::vector<PulseStep> steps;

  // Wall-clock of free evolution; the noise/J clock.
  double total_wait() const {
    double t = 0;
    for (const auto& s : steps)
      if (s.kind == PulseStep::Kind::wait) t += s.duration;
    return t;
  }

  // Waits plus the physical durations of pulses with a known Rabi rate.
  double total_duration() const {
    double t = total_wait();
    for (const auto& s : steps)
      if (s.kind != PulseStep::Kind::wait && s.rabi > 0) t += s.theta / s.rabi;
    return t;
  }

  void validate(int n_ions) const {
    for (const auto& s : steps) {
      if (s.kind == PulseStep::Kind::wait) {
        if (s.duration < 0)
          throw ValidationError("sequence.wait", "duration must be >= 0");
        continue;
      }
      if (s.ions.empty())
        throw ValidationError("sequence.rotation", "needs at least one ion");
      for (int ion : s.ions)
        if (ion < 0 || ion >= n_ions)
          throw ValidationError("sequence.rotation", "ion index out of range");
      if (s.theta < 0)
        throw ValidationError("sequence.rotation", "theta must be >= 0");
    }
  }
};

// --- JSON wire format (explicit SI units in the key names) -----------------

inline nlohmann::ordered_json to_json(const PulseSequence& seq) {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& s : seq.steps) {
    nlohmann::ordered_json step;
    switch (s.kind) {
      case PulseStep::Kind::rotation:
        step["type"] = "rotation";
        step["ion"] = s.ions[0];
        step["theta_rad"] = s.theta;
        step["phase_rad"] = s.phase;
        step["rabi_rad_per_s"] = s.rabi;
        break;
      case PulseStep::Kind::wait:
        step["type"] = "wait";
        step["duration_s"] = s.duration;
        break;
      case PulseStep::Kind::simultaneous_rotation:
        step["type"] = "simultaneous_rotation";
        step["ions"] = s.ions;
        step["theta_rad"] = s.theta;
        step["phase_rad"] = s.phase;
        step["rabi_rad_per_s"] = s.rabi;
        break;
    }
    steps.push_back(std::move(step));
  }
  nlohmann::ordered_json doc;
  doc["steps"] = std::move(steps);
  doc["total_duration_s"] = seq.total_duration();
  return doc;
}

inline PulseSequence sequence_from_json(const nlohmann::json& doc) {
  PulseSequence seq;
  for (const auto& step : doc.at("steps")) {
    const std::string type = step.at("type").get<std::string>();
    PulseStep s;
    if (type == "rotation") {
      s = PulseStep::rotation(step.at("ion").get<int>(),
                              step.at("theta_rad").get<double>(),
                              step.at("phase_rad").get<double>(),
                              step.value("rabi_rad_per_s", 0.0));
    } else if (type == "wait") {
      s = PulseStep::wait(step.at("duration_s").get<double>());
    } else if (type == "simultaneous_rotation") {
      s = PulseStep::simultaneous(step.at("ions").get<std::vector<int>>(),
                                  step.at("theta_rad").get<double>(),
                                  step.at("phase_rad").get<double>(),
                                  step.value("rabi_rad_per_s", 0.0));
    } else {
      throw ValidationError("sequence.type", "unknown step type: " + type);
    }
    seq.steps.push_back(std::move(s));
  }
  return seq;
}

// --- Echo-Ramsey builders ---------------------------------------------------

// Built-in echo phase patterns. The experiment's own self-correcting pattern
// is not public, so callers pick one of these or pass an explicit list.
inline std::vector<double> echo_pattern(const std::string& name) {
  if (name == "uniform") return {0.0};
  if (name == "alternating") return {0.0, constants::pi};
  if (name == "xy4")
    return {0.0, 0.5 * constants::pi, 0.0, 0.5 * constants::pi};
  throw ValidationError("experiment.echo_pattern",
                        "unknown pattern: " + name);
}

struct EchoConfig {
  int n_pulses = 0;
  std::vector<double> phases = {0.0};  // cycled over the pulse train
  bool target_only = false;            // diagnostic: drop the partner pulses
  double rabi = 0;                     // rad/s for pulse-duration physics

  void validate() const {
    if (n_pulses < 0)
      throw ValidationError("experiment.echo_pulses", "must be >= 0");
    if (n_pulses > 0) {
      if (phases.empty() ||
          (n_pulses % static_cast<int>(phases.size()) != 0 &&
           static_cast<int>(phases.size()) != n_pulses))
        throw ValidationError(
            "experiment.echo_pattern",
            "pattern length must divide or equal the pulse count");
    }
  }
};

// Phase of the opening pi/2 pulse. Fixed so that with the rotation and
// evolution conventions above, the closing pi/2 at phase 3*pi/2 turns the
// conditional pi phase into a controlled NOT with the usual truth table.
inline constexpr double kRamseyOpeningPhase = constants::pi;

// Ramsey on ion j with an echo train applied simultaneously to ions i and
// j between the pi/2 pulses (uniform spacing: tau/2n, tau/n, ..., tau/2n).
// The simultaneous pulses keep J_ij active while any coupling to a
// spectator, and slow collective dephasing, refocus.
inline PulseSequence build_echo_ramsey(int ion_i, int ion_j, double tau,
                                       const EchoConfig& echo,
                                       double final_phase,
                                       bool control_up = false) {
  if (ion_i == ion_j)
    throw ValidationError("experiment.pair", "ions must differ");
  if (tau < 0) throw ValidationError("experiment.tau", "must be >= 0");
  echo.validate();

  PulseSequence seq;
  if (control_up)
    seq.steps.push_back(PulseStep::rotation(ion_i, constants::pi, 0.0, echo.rabi));
  seq.steps.push_back(PulseStep::rotation(ion_j, 0.5 * constants::pi,
                                          kRamseyOpeningPhase, echo.rabi));
  const int n = echo.n_pulses;
  if (n == 0) {
    seq.steps.push_back(PulseStep::wait(tau));
  } else {
    seq.steps.push_back(PulseStep::wait(0.5 * tau / n));
    for (int k = 0; k < n; ++k) {
      const double phase = echo.phases[k % echo.phases.size()];
      if (echo.target_only) {
        seq.steps.push_back(
            PulseStep::rotation(ion_j, constants::pi, phase, echo.rabi));
      } else {
        seq.steps.push_back(PulseStep::simultaneous({ion_i, ion_j},
                                                    constants::pi, phase,
                                                    echo.rabi));
      }
      seq.steps.push_back(PulseStep::wait(k + 1 == n ? 0.5 * tau / n : tau / n));
    }
  }
  seq.steps.push_back(
      PulseStep::rotation(ion_j, 0.5 * constants::pi, final_phase, echo.rabi));
  return seq;
}

// CNOT core: echo-Ramsey on (control, target) closed at phase 3*pi/2.
// tau is chosen by the caller, pi/(2 J) for the full conditional phase.
inline PulseSequence build_cnot(int control, int target, double tau,
                                const EchoConfig& echo) {
  return build_echo_ramsey(control, target, tau, echo, 1.5 * constants::pi,
                           /*control_up=*/false);
}

// --- Interpreter ------------------------------------------------------------

// Run with a caller-supplied noise realization (the trajectory covers the
// cumulative wait clock starting at 0).
inline SpinState run_sequence(SpinState state, const PulseSequence& seq,
                              const CouplingMatrix& j,
                              const NoiseTrajectory& noise_traj,
                              const NoiseModel& noise,
                              const CrosstalkModel& crosstalk) {
  seq.validate(state.n_qubits);
  crosstalk.validate(state.n_qubits);
  const int n = state.n_qubits;
  std::vector<double> phases(n, 0.0);
  double clock = 0;

  for (const auto& step : seq.steps) {
    switch (step.kind) {
      case PulseStep::Kind::wait: {
        if (!noise_traj.empty()) {
          const double integral =
              noise_traj.phase_integral(clock, clock + step.duration);
          for (int ion = 0; ion < n; ++ion)
            phases[ion] = noise.weight(ion) * integral;
          state = evolve_free(std::move(state), j, step.duration, phases);
        } else {
          state = evolve_free(std::move(state), j, step.duration);
        }
        clock += step.duration;
        break;
      }
      case PulseStep::Kind::rotation: {
        state = apply_rotation_with_crosstalk(std::move(state), step.ions[0],
                                              step.theta, step.phase,
                                              step.rabi, crosstalk);
        break;
      }
      case PulseStep::Kind::simultaneous_rotation: {
        for (int ion : step.ions)
          state = apply_rotation(std::move(state), ion, step.theta, step.phase);
        if (crosstalk.enabled) {
          if (!(step.rabi > 0))
            throw ValidationError("rotation.rabi",
                                  "must be > 0 with crosstalk on");
          const double t = step.theta / step.rabi;
          for (int k = 0; k < n; ++k) {
            bool driven = false;
            for (int ion : step.ions) driven |= (ion == k);
            if (driven) continue;
            for (int ion : step.ions) {
              const double delta = crosstalk.omega[k] - crosstalk.omega[ion];
              detail::apply_single_qubit(
                  state, k, detail::offresonant_gate(step.rabi, delta, t,
                                                     step.phase));
            }
          }
        }
        break;
      }
    }
  }
  return state;
}

// Run with a fresh noise realization derived from the seed.
inline SpinState run_sequence(SpinState state, const PulseSequence& seq,
                              const CouplingMatrix& j, const NoiseModel& noise,
                              const CrosstalkModel& crosstalk,
                              std::uint64_t seed) {
  NoiseTrajectory traj;
  if (noise.enabled())
    traj = sample_noise_trajectory(noise, seq.total_wait(), seed);
  return run_sequence(std::move(state), seq, j, traj, noise, crosstalk);
}

}  // namespace magicsim

#endif  // MAGICSIM_SEQUENCE_HPP_

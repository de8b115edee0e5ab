#ifndef MAGICSIM_EXPERIMENTS_HPP_
#define MAGICSIM_EXPERIMENTS_HPP_

// The measurement protocols, end to end: Ramsey J extraction from fringe
// phase differences, CNOT truth tables, parity scans with Bell-fidelity
// evaluation, and plain-Ramsey visibility for noise calibration. Every
// experiment is a pure function of (inputs, seed); stochastic paths derive
// per-shot seeds deterministically.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "magicsim/constants.hpp"
#include "magicsim/coupling.hpp"
#include "magicsim/detection.hpp"
#include "magicsim/errors.hpp"
#include "magicsim/fringe.hpp"
#include "magicsim/noise.hpp"
#include "magicsim/sequence.hpp"
#include "magicsim/spin_state.hpp"

namespace magicsim {

struct ExperimentOptions {
  NoiseModel noise;                       // Kind::none -> deterministic
  CrosstalkModel crosstalk;
  std::optional<DetectionModel> detection;
  int n_repeats = 0;       // 0 -> exact probabilities, no shot sampling
  int n_trajectories = 1;  // noise averaging in exact mode
  std::uint64_t seed = 0;
};

namespace detail {

// P(up) of `ion` in the final state.
inline double p_up(const SpinState& state, int ion) {
  const std::array<int, 1> subset{ion};
  return measure_populations(state, subset)[1];
}

// Exact detection transform for a single-ion readout when `base` other
// bright ions are known to be present: the ion reads up when the
// classified bright count exceeds base.
inline double detected_p_up(double p_true, int base,
                            const DetectionModel& model) {
  const Eigen::Matrix3d m = classification_matrix(model);
  auto read_up = [&](int truth) {
    double p = 0;
    for (int cls = base + 1; cls < 3; ++cls) p += m(cls, truth);
    return p;
  };
  return p_true * read_up(base + 1) + (1.0 - p_true) * read_up(base);
}

// Mean of a fringe observable over OU trajectories (exact probabilities).
template <typename Eval>
inline double trajectory_average(const NoiseModel& noise, double duration,
                                 int n_traj, std::uint64_t seed, Eval&& eval) {
  if (!noise.enabled()) return eval(NoiseTrajectory{});
  double sum = 0;
  for (int t = 0; t < n_traj; ++t)
    sum += eval(sample_noise_trajectory(noise, duration, derive_seed(seed, t)));
  return sum / n_traj;
}

}  // namespace detail

struct JMeasurement {
  double j_estimate = 0;  // rad/s
  double delta_phi = 0;   // rad, wrapped to (-pi, pi]
  bool wrap_risk = false;
  FringeFit fit_down, fit_up;
  std::vector<std::array<double, 3>> fringe;  // phi, P(control down), P(control up)
};

// Ramsey fringes of ion j with the control ion i prepared down and up; the
// coupling follows from the fringe phase difference, J = dphi / (2 tau).
inline JMeasurement measure_j(const CouplingMatrix& j, int ion_i, int ion_j,
                              double tau, const EchoConfig& echo,
                              std::span<const double> phis,
                              const ExperimentOptions& opt) {
  if (!(tau > 0)) throw ValidationError("experiment.tau", "must be > 0");
  if (phis.size() < 4)
    throw ValidationError("experiment.phi_grid", "need at least 4 phases");
  const int n = j.n_ions();

  JMeasurement out;
  out.fringe.resize(phis.size());
  std::uint64_t shot_counter = 0;

  for (int prep_up = 0; prep_up < 2; ++prep_up) {
    std::vector<std::pair<double, double>> samples;
    samples.reserve(phis.size());
    for (std::size_t f = 0; f < phis.size(); ++f) {
      const double phi = phis[f];
      auto run_exact = [&](const NoiseTrajectory& traj) {
        const PulseSequence seq = build_echo_ramsey(
            ion_i, ion_j, tau, echo, phi, prep_up == 1);
        const SpinState fin = run_sequence(SpinState::ground(n), seq, j, traj,
                                           opt.noise, opt.crosstalk);
        return detail::p_up(fin, ion_j);
      };

      double p;
      if (opt.n_repeats <= 0) {
        p = detail::trajectory_average(opt.noise, tau, opt.n_trajectories,
                                       opt.seed, run_exact);
        if (opt.detection)
          p = detail::detected_p_up(p, prep_up, *opt.detection);
      } else {
        int ups = 0;
        for (int r = 0; r < opt.n_repeats; ++r) {
          const std::uint64_t shot_seed = derive_seed(opt.seed, shot_counter++);
          NoiseTrajectory traj;
          if (opt.noise.enabled())
            traj = sample_noise_trajectory(opt.noise, tau, shot_seed);
          const double p_true = run_exact(traj);
          detail::GaussianRng rng(derive_seed(shot_seed, 0xD37EULL));
          bool up = rng.uniform() < p_true;
          if (opt.detection) {
            const int cls = detect_bright_count(prep_up + (up ? 1 : 0),
                                                *opt.detection, rng);
            up = cls > prep_up;
          }
          ups += up ? 1 : 0;
        }
        p = static_cast<double>(ups) / opt.n_repeats;
      }
      samples.emplace_back(phi, p);
      out.fringe[f][0] = phi;
      out.fringe[f][1 + prep_up] = p;
    }
    (prep_up ? out.fit_up : out.fit_down) = fit_sinusoid(samples);
  }

  // An odd echo-pulse count leaves both spins in the flipped frame, which
  // inverts the sign of the fitted fringe-phase difference.
  const double frame = echo.n_pulses % 2 == 0 ? 1.0 : -1.0;
  out.delta_phi = wrap_phase(frame * (out.fit_up.phase - out.fit_down.phase));
  out.wrap_risk = std::abs(out.delta_phi) > constants::pi - 0.1;
  out.j_estimate = out.delta_phi / (2.0 * tau);
  return out;
}

struct CnotResult {
  // Prep order (control, target): dd, ud, du, uu.
  std::array<FringeFit, 4> fits;
  std::array<std::vector<std::pair<double, double>>, 4> fringes;
  // Wrapped fitted phase differences between control-up and control-down
  // fringes, per target prep.
  double phase_shift_target_down = 0;
  double phase_shift_target_up = 0;
  // truth_table(prep, outcome), outcome index = control + 2*target.
  Eigen::Matrix4d truth_table;
};

namespace detail {

inline PulseSequence cnot_sequence(int control, int target, double tau,
                                   const EchoConfig& echo, double phi,
                                   bool prep_control_up, bool prep_target_up) {
  PulseSequence seq =
      build_echo_ramsey(control, target, tau, echo, phi, prep_control_up);
  if (prep_target_up) {
    const auto at = seq.steps.begin() + (prep_control_up ? 1 : 0);
    seq.steps.insert(at,
                     PulseStep::rotation(target, constants::pi, 0.0, echo.rabi));
  }
  return seq;
}

// Sampled two-ion readout through the photon-count model. Returns the
// recorded outcome index control + 2*target; a count classified as one
// bright ion keeps the sampled pattern when the truth had one bright ion
// and otherwise picks an odd pattern at random.
inline int detect_pair_outcome(int true_outcome, const DetectionModel& model,
                               GaussianRng& rng) {
  const int bright = (true_outcome & 1) + ((true_outcome >> 1) & 1);
  const int cls = detect_bright_count(bright, model, rng);
  if (cls == 0) return 0;          // read as down-down
  if (cls == 2) return 3;          // read as up-up
  if (bright == 1) return true_outcome;
  return rng.uniform() < 0.5 ? 1 : 2;
}

}  // namespace detail

// Four Ramsey fringes of the target (one per computational prep) plus the
// truth table at phi = 3 pi / 2.
inline CnotResult cnot_truth_table(const CouplingMatrix& j, int control,
                                   int target, double tau,
                                   const EchoConfig& echo,
                                   std::span<const double> phis,
                                   const ExperimentOptions& opt) {
  if (!(tau > 0)) throw ValidationError("experiment.tau", "must be > 0");
  const int n = j.n_ions();
  CnotResult out;
  std::uint64_t shot_counter = 0;

  for (int prep = 0; prep < 4; ++prep) {
    const bool prep_c = prep & 1;
    const bool prep_t = prep & 2;
    std::vector<std::pair<double, double>> samples;
    for (double phi : phis) {
      auto run_exact = [&](const NoiseTrajectory& traj) {
        const PulseSequence seq =
            detail::cnot_sequence(control, target, tau, echo, phi, prep_c, prep_t);
        const SpinState fin = run_sequence(SpinState::ground(n), seq, j, traj,
                                           opt.noise, opt.crosstalk);
        return detail::p_up(fin, target);
      };
      double p;
      if (opt.n_repeats <= 0) {
        p = detail::trajectory_average(opt.noise, tau, opt.n_trajectories,
                                       opt.seed, run_exact);
        if (opt.detection)
          p = detail::detected_p_up(p, prep_c ? 1 : 0, *opt.detection);
      } else {
        int ups = 0;
        for (int r = 0; r < opt.n_repeats; ++r) {
          const std::uint64_t shot_seed = derive_seed(opt.seed, shot_counter++);
          NoiseTrajectory traj;
          if (opt.noise.enabled())
            traj = sample_noise_trajectory(opt.noise, tau, shot_seed);
          const double p_true = run_exact(traj);
          detail::GaussianRng rng(derive_seed(shot_seed, 0xD37EULL));
          bool up = rng.uniform() < p_true;
          if (opt.detection) {
            const int cls = detect_bright_count((prep_c ? 1 : 0) + (up ? 1 : 0),
                                                *opt.detection, rng);
            up = cls > (prep_c ? 1 : 0);
          }
          ups += up ? 1 : 0;
        }
        p = static_cast<double>(ups) / opt.n_repeats;
      }
      samples.emplace_back(phi, p);
    }
    out.fits[prep] = fit_sinusoid(samples);
    out.fringes[prep] = std::move(samples);
  }
  out.phase_shift_target_down =
      wrap_phase(out.fits[1].phase - out.fits[0].phase);
  out.phase_shift_target_up = wrap_phase(out.fits[3].phase - out.fits[2].phase);

  // Truth table at the CNOT working point.
  const double phi_gate = 1.5 * constants::pi;
  const std::array<int, 2> pair{control, target};
  for (int prep = 0; prep < 4; ++prep) {
    const bool prep_c = prep & 1;
    const bool prep_t = prep & 2;
    auto run_probs = [&](const NoiseTrajectory& traj) {
      const PulseSequence seq = detail::cnot_sequence(control, target, tau,
                                                      echo, phi_gate, prep_c,
                                                      prep_t);
      const SpinState fin = run_sequence(SpinState::ground(n), seq, j, traj,
                                         opt.noise, opt.crosstalk);
      return measure_populations(fin, pair);
    };
    std::array<double, 4> row{0, 0, 0, 0};
    if (opt.n_repeats <= 0) {
      if (opt.noise.enabled()) {
        for (int t = 0; t < opt.n_trajectories; ++t) {
          const auto probs = run_probs(sample_noise_trajectory(
              opt.noise, tau, derive_seed(opt.seed, t)));
          for (int o = 0; o < 4; ++o) row[o] += probs[o] / opt.n_trajectories;
        }
      } else {
        const auto probs = run_probs(NoiseTrajectory{});
        for (int o = 0; o < 4; ++o) row[o] = probs[o];
      }
    } else {
      for (int r = 0; r < opt.n_repeats; ++r) {
        const std::uint64_t shot_seed = derive_seed(opt.seed, shot_counter++);
        NoiseTrajectory traj;
        if (opt.noise.enabled())
          traj = sample_noise_trajectory(opt.noise, tau, shot_seed);
        const auto probs = run_probs(traj);
        detail::GaussianRng rng(derive_seed(shot_seed, 0xD37EULL));
        const double u = rng.uniform();
        int outcome = 3;
        double acc = 0;
        for (int o = 0; o < 4; ++o) {
          acc += probs[o];
          if (u < acc) {
            outcome = o;
            break;
          }
        }
        if (opt.detection)
          outcome = detail::detect_pair_outcome(outcome, *opt.detection, rng);
        row[outcome] += 1.0 / opt.n_repeats;
      }
    }
    for (int o = 0; o < 4; ++o) out.truth_table(prep, o) = row[o];
  }
  return out;
}

struct BellVerdict {
  double fidelity = 0;
  bool entangled = false;
};

// F = (Pi_z + 1)/4 + V/2; F > 1/2 witnesses entanglement.
inline BellVerdict bell_fidelity(double pi_z, double visibility) {
  if (pi_z < -1 || pi_z > 1)
    throw ValidationError("parity.pi_z", "must be in [-1, 1]");
  if (visibility < 0 || visibility > 1)
    throw ValidationError("parity.visibility", "must be in [0, 1]");
  BellVerdict v;
  v.fidelity = 0.25 * (pi_z + 1.0) + 0.5 * visibility;
  v.entangled = v.fidelity > 0.5;
  return v;
}

struct ParityResult {
  double pi_z = 0;
  double visibility = 0;
  double fidelity = 0;
  bool entangled = false;
  FringeFit fit;
  std::vector<std::pair<double, double>> samples;  // (phi, Pi)
};

namespace detail {

inline double parity_of(const std::array<double, 4>& p) {
  return p[0] + p[3] - p[1] - p[2];
}

// Parity through the count classifier: even classes (0 or 2 bright ions)
// count +1, the odd class -1.
inline double detected_parity(const std::vector<double>& probs,
                              const DetectionModel& model) {
  const Eigen::Matrix3d m = classification_matrix(model);
  double pi = 0;
  for (int outcome = 0; outcome < 4; ++outcome) {
    const int bright = (outcome & 1) + ((outcome >> 1) & 1);
    pi += probs[outcome] * (m(0, bright) - m(1, bright) + m(2, bright));
  }
  return pi;
}

}  // namespace detail

// Prepare (down + up)/sqrt(2) on the control, run the CNOT core, then read
// the parity directly (Pi_z) and after joint pi/2 analysis pulses over the
// phi grid. The parity oscillates as cos(2 phi) for the Bell pair.
inline ParityResult parity_scan(const CouplingMatrix& j, int control,
                                int target, double tau, const EchoConfig& echo,
                                std::span<const double> phis,
                                const ExperimentOptions& opt) {
  if (!(tau > 0)) throw ValidationError("experiment.tau", "must be > 0");
  const int n = j.n_ions();
  const std::array<int, 2> pair{control, target};
  std::uint64_t shot_counter = 0;

  auto make_sequence = [&](std::optional<double> analysis_phi) {
    PulseSequence seq = build_cnot(control, target, tau, echo);
    seq.steps.insert(seq.steps.begin(),
                     PulseStep::rotation(control, 0.5 * constants::pi,
                                         0.5 * constants::pi, echo.rabi));
    if (analysis_phi)
      seq.steps.push_back(PulseStep::simultaneous(
          {control, target}, 0.5 * constants::pi, *analysis_phi, echo.rabi));
    return seq;
  };

  auto measure_parity = [&](std::optional<double> analysis_phi) {
    const PulseSequence seq = make_sequence(analysis_phi);
    auto run_probs = [&](const NoiseTrajectory& traj) {
      const SpinState fin = run_sequence(SpinState::ground(n), seq, j, traj,
                                         opt.noise, opt.crosstalk);
      return measure_populations(fin, pair);
    };
    if (opt.n_repeats <= 0) {
      std::vector<double> probs(4, 0.0);
      if (opt.noise.enabled()) {
        for (int t = 0; t < opt.n_trajectories; ++t) {
          const auto p = run_probs(sample_noise_trajectory(
              opt.noise, tau, derive_seed(opt.seed, t)));
          for (int o = 0; o < 4; ++o) probs[o] += p[o] / opt.n_trajectories;
        }
      } else {
        probs = run_probs(NoiseTrajectory{});
      }
      if (opt.detection) return detail::detected_parity(probs, *opt.detection);
      return detail::parity_of({probs[0], probs[1], probs[2], probs[3]});
    }
    double pi_sum = 0;
    for (int r = 0; r < opt.n_repeats; ++r) {
      const std::uint64_t shot_seed = derive_seed(opt.seed, shot_counter++);
      NoiseTrajectory traj;
      if (opt.noise.enabled())
        traj = sample_noise_trajectory(opt.noise, tau, shot_seed);
      const auto probs = run_probs(traj);
      detail::GaussianRng rng(derive_seed(shot_seed, 0xD37EULL));
      const double u = rng.uniform();
      int outcome = 3;
      double acc = 0;
      for (int o = 0; o < 4; ++o) {
        acc += probs[o];
        if (u < acc) {
          outcome = o;
          break;
        }
      }
      if (opt.detection)
        outcome = detail::detect_pair_outcome(outcome, *opt.detection, rng);
      pi_sum += (outcome == 0 || outcome == 3) ? 1.0 : -1.0;
    }
    return pi_sum / opt.n_repeats;
  };

  ParityResult out;
  out.pi_z = measure_parity(std::nullopt);
  out.samples.reserve(phis.size());
  for (double phi : phis) out.samples.emplace_back(phi, measure_parity(phi));
  out.fit = fit_sinusoid(out.samples, constants::pi);
  out.visibility = std::min(out.fit.amplitude, 1.0);
  const BellVerdict verdict =
      bell_fidelity(std::clamp(out.pi_z, -1.0, 1.0), out.visibility);
  out.fidelity = verdict.fidelity;
  out.entangled = verdict.entangled;
  return out;
}

// --- Plain-Ramsey visibility and noise calibration --------------------------

// Trajectory-averaged single-ion Ramsey fringe visibility at free-evolution
// time tau (no echo). Visibility is twice the fitted amplitude: the ideal
// fringe is (1 - cos(phi - x)) / 2.
inline double ramsey_visibility(double tau, const NoiseModel& noise,
                                int n_trajectories, std::uint64_t seed,
                                int n_phi = 12) {
  CouplingMatrix none;
  none.j = Eigen::MatrixXd::Zero(1, 1);
  PulseSequence seq;
  seq.steps.push_back(PulseStep::rotation(0, 0.5 * constants::pi,
                                          kRamseyOpeningPhase));
  seq.steps.push_back(PulseStep::wait(tau));
  seq.steps.push_back(PulseStep::rotation(0, 0.5 * constants::pi, 0.0));

  std::vector<std::pair<double, double>> samples(n_phi);
  for (int f = 0; f < n_phi; ++f)
    samples[f] = {constants::two_pi * f / n_phi, 0.0};

  auto add = [&](const NoiseTrajectory& traj, double w) {
    for (auto& [phi, p] : samples) {
      PulseSequence s = seq;
      s.steps.back().phase = phi;
      const SpinState fin = run_sequence(SpinState::ground(1), s, none, traj,
                                         noise, CrosstalkModel{});
      p += w * detail::p_up(fin, 0);
    }
  };
  if (noise.enabled()) {
    for (int t = 0; t < n_trajectories; ++t)
      add(sample_noise_trajectory(noise, tau, derive_seed(seed, t)),
          1.0 / n_trajectories);
  } else {
    add(NoiseTrajectory{}, 1.0);
  }
  return 2.0 * fit_sinusoid(samples).amplitude;
}

// Free-evolution time where the plain-Ramsey visibility crosses 1/e.
inline double find_coherence_time(const NoiseModel& noise, int n_trajectories,
                                  std::uint64_t seed, double t_lo = 20e-6,
                                  double t_hi = 2e-3) {
  const double target = std::exp(-1.0);
  auto vis = [&](double tau) {
    return ramsey_visibility(tau, noise, n_trajectories, seed);
  };
  while (vis(t_hi) > target) t_hi *= 2.0;
  for (int it = 0; it < 24; ++it) {
    const double mid = 0.5 * (t_lo + t_hi);
    (vis(mid) > target ? t_lo : t_hi) = mid;
  }
  return 0.5 * (t_lo + t_hi);
}

// Bisect the OU sigma until the plain-Ramsey visibility at coherence_time
// equals 1/e. Deterministic for a fixed seed and trajectory count.
inline double calibrate_noise_sigma(double coherence_time, NoiseModel model,
                                    int n_trajectories, std::uint64_t seed) {
  const double target = std::exp(-1.0);
  double lo = 0.0, hi = 4.0 / coherence_time;
  model.kind = NoiseModel::Kind::ornstein_uhlenbeck;
  auto vis = [&](double sigma) {
    model.sigma = sigma;
    return ramsey_visibility(coherence_time, model, n_trajectories, seed);
  };
  while (vis(hi) > target) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (vis(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace magicsim

#endif  // MAGICSIM_EXPERIMENTS_HPP_

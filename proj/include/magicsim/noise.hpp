#ifndef MAGICSIM_NOISE_HPP_
#define MAGICSIM_NOISE_HPP_

// Collective dephasing noise: a single Ornstein-Uhlenbeck detuning shared
// by all ions (per-ion weights default to 1). Trajectories are sampled with
// the exact discrete OU update and integrated by trapezoid, deterministic
// per seed. The RNG is mt19937_64 with a hand-rolled Box-Muller transform,
// so trajectories are bit-identical across platforms.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "magicsim/errors.hpp"

namespace magicsim {

struct NoiseModel {
  enum class Kind { none, ornstein_uhlenbeck };
  Kind kind = Kind::none;
  double sigma = 0;              // rad/s, stationary std of the detuning
  double tau_c = 5e-3;           // s, correlation time
  double dt = 5e-6;              // s, trajectory step
  std::vector<double> weights;   // per-ion sensitivity, default all 1

  bool enabled() const { return kind == Kind::ornstein_uhlenbeck && sigma > 0; }

  void validate() const {
    if (kind == Kind::none) return;
    if (sigma < 0) throw ValidationError("noise.sigma", "must be >= 0");
    if (!(tau_c > 0)) throw ValidationError("noise.tau_c", "must be > 0");
    if (!(dt > 0)) throw ValidationError("noise.dt", "must be > 0");
    if (dt > tau_c / 10.0)
      throw ValidationError("noise.dt", "must be <= tau_c / 10");
  }

  double weight(int ion) const {
    return ion < static_cast<int>(weights.size()) ? weights[ion] : 1.0;
  }
};

// splitmix64 step; used to derive independent per-trajectory seeds.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // in (0, 1)
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace detail

// Piecewise record of one detuning realization on a uniform grid, with the
// running trapezoidal integral for fast phase queries.
class NoiseTrajectory {
 public:
  NoiseTrajectory() = default;
  NoiseTrajectory(double dt, std::vector<double> values)
      : dt_(dt), values_(std::move(values)) {
    cumulative_.resize(values_.size(), 0.0);
    for (std::size_t k = 1; k < values_.size(); ++k)
      cumulative_[k] =
          cumulative_[k - 1] + 0.5 * dt_ * (values_[k - 1] + values_[k]);
  }

  bool empty() const { return values_.size() < 2; }
  double duration() const {
    return empty() ? 0.0 : dt_ * static_cast<double>(values_.size() - 1);
  }
  const std::vector<double>& values() const { return values_; }
  double dt() const { return dt_; }

  // Linear interpolation of the detuning (clamped beyond the grid).
  double value_at(double t) const {
    if (empty()) return 0.0;
    if (t <= 0) return values_.front();
    const double x = t / dt_;
    const auto k = static_cast<std::size_t>(x);
    if (k + 1 >= values_.size()) return values_.back();
    const double f = x - static_cast<double>(k);
    return values_[k] * (1.0 - f) + values_[k + 1] * f;
  }

  // Integral of the interpolated detuning over [t0, t1]: the accumulated
  // dephasing angle of a unit-weight ion.
  double phase_integral(double t0, double t1) const {
    if (empty()) return 0.0;
    return antiderivative(t1) - antiderivative(t0);
  }

 private:
  double antiderivative(double t) const {
    if (t <= 0) return 0.0;
    const double tmax = duration();
    double extra = 0.0;
    if (t >= tmax) {  // constant extrapolation past the end
      extra = (t - tmax) * values_.back();
      t = tmax;
    }
    const double x = t / dt_;
    auto k = static_cast<std::size_t>(x);
    if (k >= values_.size() - 1) k = values_.size() - 2;
    const double f = t - static_cast<double>(k) * dt_;
    const double v0 = values_[k];
    const double slope = (values_[k + 1] - v0) / dt_;
    return cumulative_[k] + v0 * f + 0.5 * slope * f * f + extra;
  }

  double dt_ = 0;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

// Stationary draw, then x_{k+1} = x_k e^(-dt/tau_c) + sigma
// sqrt(1 - e^(-2 dt/tau_c)) xi_k. Deterministic per seed.
inline NoiseTrajectory sample_noise_trajectory(const NoiseModel& model,
                                               double duration,
                                               std::uint64_t seed) {
  model.validate();
  if (!model.enabled() || duration <= 0) return {};
  const auto n_steps = static_cast<std::size_t>(std::ceil(duration / model.dt)) + 1;
  detail::GaussianRng rng(seed);
  std::vector<double> values(n_steps + 1);
  const double decay = std::exp(-model.dt / model.tau_c);
  const double kick = model.sigma * std::sqrt(1.0 - decay * decay);
  values[0] = model.sigma * rng.normal();
  for (std::size_t k = 1; k < values.size(); ++k)
    values[k] = values[k - 1] * decay + kick * rng.normal();
  return NoiseTrajectory(model.dt, std::move(values));
}

}  // namespace magicsim

#endif  // MAGICSIM_NOISE_HPP_

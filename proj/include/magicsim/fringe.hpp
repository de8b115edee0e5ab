#ifndef MAGICSIM_FRINGE_HPP_
#define MAGICSIM_FRINGE_HPP_

// Closed-form least-squares fit of offset + amplitude * cos(2 pi x / period
// - phase). Linear in (offset, a, b) with a = A cos(phase), b = A sin(phase),
// so the normal equations solve it exactly.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "magicsim/constants.hpp"
#include "magicsim/errors.hpp"

namespace magicsim {

struct FringeFit {
  double amplitude = 0;     // >= 0
  double phase = 0;         // (-pi, pi]
  double offset = 0;
  double rms_residual = 0;
};

inline double wrap_phase(double phi) {
  phi = std::fmod(phi, constants::two_pi);
  if (phi > constants::pi) phi -= constants::two_pi;
  if (phi <= -constants::pi) phi += constants::two_pi;
  return phi;
}

inline FringeFit fit_sinusoid(std::span<const std::pair<double, double>> samples,
                              double period = constants::two_pi) {
  if (samples.size() < 4)
    throw ValidationError("fit.samples", "need at least 4 samples");
  if (!(period > 0)) throw ValidationError("fit.period", "must be > 0");
  double xmin = samples[0].first, xmax = samples[0].first;
  for (const auto& [x, y] : samples) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  // Uniform grids usually stop one step short of the full period.
  const double span_slack = period / static_cast<double>(samples.size());
  if (xmax - xmin + span_slack * 1.0000001 < period)
    throw ValidationError("fit.samples", "must span at least one period");

  const double k = constants::two_pi / period;
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d aty = Eigen::Vector3d::Zero();
  for (const auto& [x, y] : samples) {
    const Eigen::Vector3d row(1.0, std::cos(k * x), std::sin(k * x));
    ata += row * row.transpose();
    aty += row * y;
  }
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(ata);
  if (!lu.isInvertible())
    throw NumericError("fit_sinusoid: degenerate design matrix");
  const Eigen::Vector3d coef = lu.solve(aty);

  FringeFit fit;
  fit.offset = coef[0];
  fit.amplitude = std::hypot(coef[1], coef[2]);
  fit.phase = fit.amplitude > 0 ? wrap_phase(std::atan2(coef[2], coef[1])) : 0.0;
  double ss = 0;
  for (const auto& [x, y] : samples) {
    const double model =
        coef[0] + coef[1] * std::cos(k * x) + coef[2] * std::sin(k * x);
    ss += (y - model) * (y - model);
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(samples.size()));
  return fit;
}

}  // namespace magicsim

#endif  // MAGICSIM_FRINGE_HPP_

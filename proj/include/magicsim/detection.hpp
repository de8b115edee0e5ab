#ifndef MAGICSIM_DETECTION_HPP_
#define MAGICSIM_DETECTION_HPP_

// Photon-counting readout of an ion pair with a non-imaging detector. The
// count of a shot with k bright ions is Poisson with mean lambda_k;
// thresholds map counts back to a bright-ion class. calibrate_detection
// fits the three means and two thresholds to target correct-classification
// rates using exact Poisson CDFs.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "magicsim/errors.hpp"
#include "magicsim/noise.hpp"

namespace magicsim {

struct DetectionModel {
  double lambda_dark = 0;  // mean counts, 0 bright ions
  double lambda_one = 0;   // 1 bright ion
  double lambda_two = 0;   // 2 bright ions
  int threshold_low = 0;   // count <= low      -> class 0
  int threshold_high = 0;  // low < count <= high -> class 1, else class 2
  bool calibration_warning = false;
  double calibration_deviation = 0;

  double lambda(int bright) const {
    return bright <= 0 ? lambda_dark : bright == 1 ? lambda_one : lambda_two;
  }

  int classify(int count) const {
    if (count <= threshold_low) return 0;
    if (count <= threshold_high) return 1;
    return 2;
  }

  void validate() const {
    if (!(lambda_dark < lambda_one && lambda_one < lambda_two))
      throw ValidationError("detection.lambda", "means must be increasing");
    if (threshold_low > threshold_high)
      throw ValidationError("detection.thresholds", "low must be <= high");
  }
};

namespace detail {

inline double poisson_cdf(int k, double lambda) {
  if (k < 0) return 0.0;
  if (lambda <= 0) return 1.0;
  double term = std::exp(-lambda);
  double sum = term;
  for (int i = 1; i <= k; ++i) {
    term *= lambda / i;
    sum += term;
  }
  return sum < 1.0 ? sum : 1.0;
}

inline int sample_poisson(double lambda, GaussianRng& rng) {
  if (lambda <= 0) return 0;
  // CDF inversion; fine for the photon-count means used here.
  const double u = rng.uniform();
  double term = std::exp(-lambda);
  double sum = term;
  int k = 0;
  while (u > sum && k < 4096) {
    ++k;
    term *= lambda / k;
    sum += term;
  }
  return k;
}

}  // namespace detail

// M(classified, true): column-stochastic by construction (each true class
// is classified as exactly one of 0/1/2).
inline Eigen::Matrix3d classification_matrix(const DetectionModel& model) {
  Eigen::Matrix3d m;
  for (int truth = 0; truth < 3; ++truth) {
    const double lam = model.lambda(truth);
    const double p0 = detail::poisson_cdf(model.threshold_low, lam);
    const double p01 = detail::poisson_cdf(model.threshold_high, lam);
    m(0, truth) = p0;
    m(1, truth) = p01 - p0;
    m(2, truth) = 1.0 - p01;
  }
  return m;
}

// One sampled readout: Poisson count for the true bright number, then
// threshold classification.
inline int detect_bright_count(int true_bright, const DetectionModel& model,
                               detail::GaussianRng& rng) {
  return model.classify(detail::sample_poisson(model.lambda(true_bright), rng));
}

namespace detail {

// P(class 0 | truth 0) is decreasing in lambda, P(class 2 | truth 2)
// increasing, so both invert by bisection. The class-1 window probability
// is unimodal in lambda.
inline double solve_decreasing(int threshold, double target) {
  double lo = 0.0, hi = 1.0;
  while (poisson_cdf(threshold, hi) > target && hi < 1e6) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (poisson_cdf(threshold, mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double window_prob(int t_low, int t_high, double lam) {
  return poisson_cdf(t_high, lam) - poisson_cdf(t_low, lam);
}

}  // namespace detail

// Deterministic search for a model hitting the three target rates
// (correctly-classified fraction for 0, 1, 2 bright ions). Scans integer
// thresholds, solves each mean by bisection, and keeps the first strictly
// best combination. Infeasible targets return the best effort with a
// warning flag.
inline DetectionModel calibrate_detection(
    std::array<double, 3> targets = {0.985, 0.889, 0.852}) {
  for (double r : targets)
    if (!(r > 0 && r < 1))
      throw ValidationError("detection.targets", "rates must be in (0, 1)");

  DetectionModel best;
  double best_dev = 1e30;
  for (int t_low = 0; t_low <= 8; ++t_low) {
    for (int t_high = t_low + 1; t_high <= 60; ++t_high) {
      const double lam0 = detail::solve_decreasing(t_low, targets[0]);
      // P(count > t_high) = 1 - cdf(t_high) should equal targets[2]
      const double lam2 = detail::solve_decreasing(t_high, 1.0 - targets[2]);

      // Locate the window maximum by golden-section, then bisect on the
      // rising edge toward the physically sensible middle mean.
      double a = lam0, b = std::max(lam2, lam0 + 1.0);
      for (int it = 0; it < 200; ++it) {
        const double m1 = a + 0.381966011250105 * (b - a);
        const double m2 = b - 0.381966011250105 * (b - a);
        if (detail::window_prob(t_low, t_high, m1) <
            detail::window_prob(t_low, t_high, m2))
          a = m1;
        else
          b = m2;
      }
      const double lam_peak = 0.5 * (a + b);
      const double peak = detail::window_prob(t_low, t_high, lam_peak);

      double lam1;
      double dev1 = 0;
      if (peak < targets[1]) {
        lam1 = lam_peak;
        dev1 = targets[1] - peak;
      } else {
        // Two roots; prefer the one nearer the midpoint of the outer means.
        const double mid = 0.5 * (lam0 + lam2);
        double lo = lam_peak, hi = std::max(4.0 * lam2, lam_peak + 1.0);
        for (int it = 0; it < 200; ++it) {
          const double m = 0.5 * (lo + hi);
          (detail::window_prob(t_low, t_high, m) > targets[1] ? lo : hi) = m;
        }
        const double upper_root = 0.5 * (lo + hi);
        lo = 0.0;
        hi = lam_peak;
        for (int it = 0; it < 200; ++it) {
          const double m = 0.5 * (lo + hi);
          (detail::window_prob(t_low, t_high, m) < targets[1] ? lo : hi) = m;
        }
        const double lower_root = 0.5 * (lo + hi);
        lam1 = std::abs(lower_root - mid) <= std::abs(upper_root - mid)
                   ? lower_root
                   : upper_root;
      }
      if (!(lam0 < lam1 && lam1 < lam2)) continue;

      DetectionModel model{lam0, lam1, lam2, t_low, t_high};
      const Eigen::Matrix3d m = classification_matrix(model);
      const double dev = std::max({std::abs(m(0, 0) - targets[0]),
                                   std::abs(m(1, 1) - targets[1]),
                                   std::abs(m(2, 2) - targets[2]), dev1});
      if (dev < best_dev - 1e-15) {
        best_dev = dev;
        best = model;
      }
    }
  }
  if (best_dev > 1e29)
    throw NumericError("calibrate_detection: no feasible model found");
  best.calibration_deviation = best_dev;
  best.calibration_warning = best_dev > 0.005;
  return best;
}

}  // namespace magicsim

#endif  // MAGICSIM_DETECTION_HPP_

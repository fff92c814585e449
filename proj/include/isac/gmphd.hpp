#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isac/common.hpp"

namespace isac {

/// One weighted Gaussian of the multi-object intensity over [range; speed].
struct GaussianComponent {
  double weight = 0.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
};

using Intensity = std::vector<GaussianComponent>;

inline double total_weight(const Intensity& v) {
  double s = 0.0;
  for (const auto& c : v) s += c.weight;
  return s;
}

struct MotionModel {
  Eigen::Matrix2d F = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
  double p_survival = 0.99;

  /// Range/speed constant-velocity model with white-noise-acceleration
  /// process noise of the given strength.
  static MotionModel constant_velocity(double dt, double sigma_accel,
                                       double p_survival = 0.99);
};

struct MeasurementModel {
  Eigen::Matrix2d H = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d R =
      (Eigen::Matrix2d() << 0.25, 0.0, 0.0, 0.04).finished();
  double p_detect = 0.9;
  double clutter_density = 1e-4;  // per (m * m/s) of the gated region
  // Static reflectors concentrate extra clutter on the zero-Doppler line;
  // modelled as a Gaussian ridge in speed on top of the uniform density.
  double zero_doppler_density = 0.0;  // expected ridge count per scan per m
  double zero_doppler_sigma_mps = 0.01;
};

/// Clutter intensity evaluated at a measurement.
double clutter_intensity_at(const MeasurementModel& meas,
                            const Eigen::Vector2d& z);

struct PhdConfig {
  double prune_threshold = 1e-5;  // discard weight below this
  double merge_distance = 4.0;    // squared Mahalanobis merge radius
  int max_components = 100;
  double birth_weight = 0.05;
  Eigen::Matrix2d birth_cov =
      (Eigen::Matrix2d() << 4.0, 0.0, 0.0, 1.0).finished();
  double extract_threshold = 0.5;
};

/// Survival-scaled Kalman prediction of every component.
Intensity phd_predict(const Intensity& prior, const MotionModel& motion);

/// Measurement update: a missed-detection copy of each component plus one
/// Kalman-updated component per (measurement, prior) pair, with weights
/// normalized against the clutter density per measurement. Weight algebra
/// runs in the log domain.
Intensity phd_update(const Intensity& prior, const MeasurementModel& meas,
                     const std::vector<Detection>& detections);

/// Prune below-threshold components, merge mutually close ones (squared
/// Mahalanobis distance under the absorbed component's own covariance,
/// moment matched) until a fixpoint, then keep the max_components heaviest.
/// Idempotent by construction.
Intensity prune_merge(const Intensity& in, const PhdConfig& config);

/// Measurement-driven birth components for the next prediction.
Intensity adaptive_births(const std::vector<Detection>& detections,
                          const PhdConfig& config);

struct Estimate {
  double range_m = 0.0;
  double speed_mps = 0.0;
  double weight = 0.0;
};

/// Components above the extraction threshold; a component whose weight
/// exceeds 1.5 is reported round(weight) times.
std::vector<Estimate> phd_extract(const Intensity& intensity,
                                  const PhdConfig& config);

/// Full recursion with measurement-driven births folded into the next
/// frame's prediction.
class PhdFilter {
 public:
  PhdFilter(MotionModel motion, MeasurementModel meas, PhdConfig config)
      : motion_(motion), meas_(meas), config_(config) {}

  const Intensity& step(const std::vector<Detection>& detections);

  const Intensity& intensity() const { return intensity_; }
  std::vector<Estimate> extract() const {
    return phd_extract(intensity_, config_);
  }

 private:
  MotionModel motion_;
  MeasurementModel meas_;
  PhdConfig config_;
  Intensity intensity_;
  Intensity pending_births_;
};

}  // namespace isac

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isac/clutter.hpp"
#include "isac/gmphd.hpp"
#include "isac/io.hpp"
#include "isac/metrics.hpp"
#include "isac/ofdm.hpp"
#include "isac/scenario.hpp"
#include "isac/sensor.hpp"
#include "isac/tdd_detect.hpp"

namespace isac {

enum class SensorMode { ideal, ofdm };
enum class ClutterRemoval { none, eca_c, crap };

std::string to_string(SensorMode mode);
std::string to_string(ClutterRemoval removal);

struct OfdmSensorConfig {
  OfdmGridConfig grid = OfdmGridConfig::desk_scale();
  double target_power_db = 0.0;
  double noise_power_db = -10.0;
  std::vector<ClutterTap> clutter_taps;
};

struct TrackerConfig {
  PhdConfig phd;
  double p_survival = 0.99;
  double p_detect = 0.9;
  double sigma_accel = 1.0;
  Eigen::Matrix2d measurement_noise =
      (Eigen::Matrix2d() << 0.25, 0.0, 0.0, 0.04).finished();
  /// Clutter density per (m * m/s); negative means derive it from the
  /// sensor configuration.
  double clutter_density = -1.0;
  /// Zero-Doppler clutter ridge density per (scan * m); negative means
  /// derive it (ideal sensor: clutter rate over its range window; ofdm: 0).
  double zero_doppler_density = -1.0;
  double zero_doppler_sigma_mps = 0.01;
};

struct ExperimentConfig {
  SensorMode mode = SensorMode::ideal;
  std::uint64_t seed = 1;
  int parallel = 1;

  IdealSensorConfig ideal;
  OfdmSensorConfig ofdm;

  ClutterRemoval clutter_removal = ClutterRemoval::none;
  int eca_order = 3;
  int crap_components = 3;
  int crap_frames = 32;

  /// When false the ofdm pipeline feeds plain CFAR detections to the
  /// tracker, mask sidelobes and all.
  bool tdd_detect = true;
  TddDetectConfig detect;
  GateConfig gate;
  TrackerConfig tracker;
};

/// Everything one run produces: per-frame gated detections, per-frame
/// extracted estimates, tracker mass, and the evaluated report.
struct RunArtifacts {
  MetricsReport metrics;
  std::vector<std::vector<Detection>> detections;  // per frame, gated
  std::vector<std::vector<Estimate>> estimates;    // per frame
  std::vector<double> sum_weights;                 // tracker mass per frame
  std::vector<int> true_counts;
  std::vector<double> smoothed_counts;             // smoothed cardinality
  std::vector<int> unmatched_estimates;            // per frame
};

RunArtifacts run_experiment(const Scenario& scenario,
                            const ExperimentConfig& config);

/// Raw CSI of one scenario frame exactly as the OFDM run synthesizes it
/// (same per-frame random stream), for dumps and inspection.
CsiGrid synthesize_scenario_frame(const Scenario& scenario,
                                  const ExperimentConfig& config, int frame);

/// Association + metrics for externally produced estimates.
RunArtifacts evaluate_estimates(const Scenario& scenario,
                                std::vector<std::vector<Detection>> detections,
                                std::vector<std::vector<Estimate>> estimates,
                                std::vector<double> sum_weights,
                                const std::string& mode_label);

}  // namespace isac

#pragma once

#include <vector>

#include "isac/common.hpp"
#include "isac/scenario.hpp"

namespace isac {

/// Detection-level sensor: draws per-object hits with Gaussian range/speed
/// noise and Poisson-distributed static false alarms, skipping the waveform
/// stage entirely.
struct IdealSensorConfig {
  double p_detect = 0.9;
  double sigma_range_m = 0.3;
  double sigma_speed_mps = 0.1;
  double clutter_rate = 2.0;
  double clutter_range_min_m = 15.0;
  double clutter_range_max_m = 60.0;
};

/// One scan: each truth state is detected with probability p_detect and
/// perturbed by the measurement noise; clutter detections are uniform in
/// the configured range window at zero speed. All powers are 0 dB.
std::vector<Detection> ideal_observe(const IdealSensorConfig& config,
                                     const std::vector<ObjectState>& truths,
                                     std::mt19937_64& rng);

}  // namespace isac

#include "isac/sensor.hpp"

#include <stdexcept>

namespace isac {

std::vector<Detection> ideal_observe(const IdealSensorConfig& config,
                                     const std::vector<ObjectState>& truths,
                                     std::mt19937_64& rng) {
  if (config.p_detect < 0.0 || config.p_detect > 1.0 ||
      config.clutter_rate < 0.0 ||
      config.clutter_range_max_m <= config.clutter_range_min_m) {
    throw std::invalid_argument("ideal sensor configuration out of range");
  }
  std::vector<Detection> out;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> nr(0.0, config.sigma_range_m);
  std::normal_distribution<double> nv(0.0, config.sigma_speed_mps);
  for (const auto& s : truths) {
    if (coin(rng) < config.p_detect) {
      out.push_back({s.range_m + nr(rng), s.speed_mps + nv(rng), 0.0});
    }
  }
  std::poisson_distribution<int> pois(config.clutter_rate);
  std::uniform_real_distribution<double> ur(config.clutter_range_min_m,
                                            config.clutter_range_max_m);
  int n_clutter = config.clutter_rate > 0.0 ? pois(rng) : 0;
  for (int i = 0; i < n_clutter; ++i) {
    out.push_back({ur(rng), 0.0, 0.0});
  }
  return out;
}

}  // namespace isac

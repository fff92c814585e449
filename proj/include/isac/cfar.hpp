#pragma once

#include <vector>

#include "isac/periodogram.hpp"

namespace isac {

/// Cell-averaging CFAR over the range/speed map. Guard and training extents
/// are per side; windows are clipped at the map borders and the scaling
/// factor alpha = N * (pfa^(-1/N) - 1) is recomputed for the actual
/// training-cell count N of every cell.
struct CfarConfig {
  int guard_range = 2;
  int guard_speed = 2;
  int train_range = 8;
  int train_speed = 8;
  double pfa = 1e-4;
};

struct CfarDetection {
  int range_bin = 0;
  int speed_bin = 0;
  double power_db = 0.0;      // cell power, frame-relative dB
  double threshold_db = 0.0;  // applied threshold, frame-relative dB
};

std::vector<CfarDetection> ca_cfar(const Periodogram& map,
                                   const CfarConfig& config);

}  // namespace isac

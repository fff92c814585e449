#pragma once

#include <vector>

#include "isac/cfar.hpp"
#include "isac/ofdm.hpp"
#include "isac/periodogram.hpp"

namespace isac {

/// Doppler bin offsets (positive, unpadded bins) of the strongest periodic
/// sidelobes cast by the TDD mask, ranked by the mask spectrum magnitude.
/// A mask without blanked symbols has none.
std::vector<int> mask_sidelobe_offsets(const OfdmGridConfig& grid,
                                       int top_k = 2);

struct TddDetectConfig {
  CfarConfig cfar;
  double sidelobe_drop_db = 6.0;  // required drop at predicted sidelobes
  int refine_factor = 16;         // finest matched-filter step, 1/bin
  int max_peaks = 50;
  int ghost_offsets = 2;          // sidelobe offsets checked per candidate
};

/// Plain CFAR detections mapped to range/speed coordinates, with no
/// treatment of mask-induced sidelobes.
std::vector<Detection> naive_cfar_detect(const OfdmGridConfig& grid,
                                         const CsiGrid& csi,
                                         const CfarConfig& config);

/// Iterative peak extraction that is aware of the TDD point spread
/// function. Strongest CFAR candidate first: refine range/speed/amplitude
/// on a two-stage local matched-filter grid, resynthesize the masked
/// single-target response, subtract it from the CSI, and accept the
/// candidate only if the total power summed over its predicted sidelobe
/// offsets collapses by at least sidelobe_drop_db (sidelobes of a real echo
/// are explained by the fit; those of a ghost candidate are not). A
/// candidate whose summed sidelobe power sits within 6 dB of the noise
/// floor cannot be verified and is discarded, except under a mask with no
/// blanked symbols, which predicts no sidelobes at all. Rejected locations
/// are not revisited and no two detections fall within one resolution cell.
std::vector<Detection> tdd_peak_detect(const OfdmGridConfig& grid,
                                       const CsiGrid& csi,
                                       const TddDetectConfig& config);

/// Plausibility region for detections entering the tracker.
struct GateConfig {
  double min_range_m = 15.0;
  double max_range_m = 60.0;
  double min_speed_mps = -6.0;
  double max_speed_mps = 6.0;
  double min_power_db = -40.0;
};

std::vector<Detection> gate_detections(const std::vector<Detection>& dets,
                                       const GateConfig& gate);

}  // namespace isac

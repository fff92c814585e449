#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "isac/common.hpp"

namespace isac {

/// One coherent processing interval of CSI: n_subcarriers x n_symbols
/// complex gains. Columns whose TDD mask entry is 0 carry no observation
/// and are identically zero.
using CsiGrid = Eigen::MatrixXcd;

/// OFDM numerology of the sensing link plus the TDD usage mask
/// (1 = downlink symbol observed at the sensing receiver, 0 = blanked).
struct OfdmGridConfig {
  int n_subcarriers = 0;
  int n_symbols = 0;
  double subcarrier_spacing_hz = 0.0;
  double symbol_duration_s = 0.0;
  double carrier_hz = 0.0;
  std::vector<std::uint8_t> tdd_mask;

  double range_resolution_m() const {
    return kSpeedOfLight / (2.0 * n_subcarriers * subcarrier_spacing_hz);
  }
  double speed_resolution_mps() const {
    return kSpeedOfLight /
           (2.0 * carrier_hz * n_symbols * symbol_duration_s);
  }
  double unambiguous_range_m() const {
    return kSpeedOfLight / (2.0 * subcarrier_spacing_hz);
  }
  /// Half width of the unambiguous speed interval [-v, +v).
  double unambiguous_speed_mps() const {
    return kSpeedOfLight / (4.0 * carrier_hz * symbol_duration_s);
  }
  double frame_duration_s() const { return n_symbols * symbol_duration_s; }
  int usable_symbols() const;

  void validate() const;

  /// 27.6 GHz link, 1024 subcarriers at 120 kHz, 1120 symbols per 10 ms
  /// frame, downlink-heavy TDD pattern with 42 usable symbols per 70.
  static OfdmGridConfig full_scale();
  /// Reduced 256 x 112 grid with the same range and speed resolution as
  /// the full-scale numerology; 8 usable symbols per 14.
  static OfdmGridConfig desk_scale();
};

/// Periodic mask with the first `usable` symbols of every `period` set to 1.
std::vector<std::uint8_t> make_tdd_mask(int n_symbols, int period, int usable);

/// Static reflector: a zero-Doppler tap of the sensing channel.
struct ClutterTap {
  double range_m = 0.0;
  double power_db = 0.0;
  double phase_rad = 0.0;
};

/// Moving point scatterer for one frame.
struct PointTarget {
  double range_m = 0.0;
  double speed_mps = 0.0;
  double power_db = 0.0;
  double phase_rad = 0.0;
};

/// Frame-level CSI synthesis: superposition of target and clutter steering
/// products plus circular AWGN of the given total power, with blanked
/// symbols zeroed per the TDD mask.
CsiGrid synthesize_csi(const OfdmGridConfig& grid,
                       const std::vector<PointTarget>& targets,
                       const std::vector<ClutterTap>& clutter,
                       double noise_power_db, std::mt19937_64& rng);

/// Noiseless single-target response (used for echo cancellation).
CsiGrid synthesize_target_response(const OfdmGridConfig& grid,
                                   const PointTarget& target);

}  // namespace isac

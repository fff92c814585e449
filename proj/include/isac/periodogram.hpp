#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isac/ofdm.hpp"

namespace isac {

enum class Window { rectangular, hann };

/// Range/speed power map of one CSI frame. Powers are in dB relative to the
/// strongest cell (0 dB), floored at -300 dB; norm_linear is the linear
/// power of that strongest cell so absolute levels can be recovered.
struct Periodogram {
  Eigen::MatrixXd power_db;          // n_range x n_speed
  std::vector<double> range_axis_m;  // row -> range
  std::vector<double> speed_axis_mps;  // column -> radial speed, ascending
  int zero_pad = 1;
  double norm_linear = 0.0;

  int n_range() const { return static_cast<int>(power_db.rows()); }
  int n_speed() const { return static_cast<int>(power_db.cols()); }
  double range_step_m() const {
    return range_axis_m.size() > 1 ? range_axis_m[1] - range_axis_m[0] : 0.0;
  }
  double speed_step_mps() const {
    return speed_axis_mps.size() > 1 ? speed_axis_mps[1] - speed_axis_mps[0]
                                     : 0.0;
  }
};

/// IDFT across subcarriers and DFT across symbols of the (optionally
/// windowed, zero padded) CSI grid, with the speed axis centered on zero.
Periodogram periodogram(const OfdmGridConfig& grid, const CsiGrid& csi,
                        int zero_pad = 1, Window window = Window::rectangular);

/// Channel estimate from a received resource grid and the known transmitted
/// symbols. Blanked symbols and zero-energy cells give zero.
CsiGrid extract_csi(const OfdmGridConfig& grid, const Eigen::MatrixXcd& rx,
                    const Eigen::MatrixXcd& tx);

}  // namespace isac

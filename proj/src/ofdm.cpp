#include "isac/ofdm.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace isac {

namespace {

constexpr double kPi = std::numbers::pi;

/// Unit phasor ramp exp(j * rate * k) for k = 0..len-1, built by recurrence.
Eigen::VectorXcd phasor_ramp(double rate, int len) {
  Eigen::VectorXcd v(len);
  const cplx step = std::polar(1.0, rate);
  cplx cur(1.0, 0.0);
  for (int k = 0; k < len; ++k) {
    v[k] = cur;
    cur *= step;
  }
  return v;
}

void add_scatterer(CsiGrid& grid, const OfdmGridConfig& g, double range_m,
                   double speed_mps, double power_db, double phase_rad) {
  const double tau = 2.0 * range_m / kSpeedOfLight;
  const double doppler_hz = 2.0 * speed_mps * g.carrier_hz / kSpeedOfLight;
  const cplx amp = std::polar(std::pow(10.0, power_db / 20.0), phase_rad);
  Eigen::VectorXcd sub =
      phasor_ramp(-2.0 * kPi * g.subcarrier_spacing_hz * tau, g.n_subcarriers);
  Eigen::VectorXcd sym =
      phasor_ramp(2.0 * kPi * g.symbol_duration_s * doppler_hz, g.n_symbols);
  grid.noalias() += amp * sub * sym.transpose();
}

}  // namespace

int OfdmGridConfig::usable_symbols() const {
  return static_cast<int>(
      std::accumulate(tdd_mask.begin(), tdd_mask.end(), 0));
}

void OfdmGridConfig::validate() const {
  if (n_subcarriers <= 0 || n_symbols <= 0 ||
      !(subcarrier_spacing_hz > 0.0) || !(symbol_duration_s > 0.0) ||
      !(carrier_hz > 0.0)) {
    throw std::invalid_argument("OFDM grid dimensions must be positive");
  }
  if (tdd_mask.size() != static_cast<std::size_t>(n_symbols)) {
    throw std::invalid_argument("TDD mask length must equal n_symbols");
  }
  if (usable_symbols() == 0) {
    throw std::invalid_argument("TDD mask blanks every symbol");
  }
}

OfdmGridConfig OfdmGridConfig::full_scale() {
  OfdmGridConfig g;
  g.n_subcarriers = 1024;
  g.n_symbols = 1120;
  g.subcarrier_spacing_hz = 120e3;
  g.symbol_duration_s = 0.01 / 1120.0;
  g.carrier_hz = 27.6e9;
  g.tdd_mask = make_tdd_mask(g.n_symbols, 70, 42);
  return g;
}

OfdmGridConfig OfdmGridConfig::desk_scale() {
  OfdmGridConfig g;
  g.n_subcarriers = 256;
  g.n_symbols = 112;
  g.subcarrier_spacing_hz = 480e3;
  g.symbol_duration_s = 0.01 / 112.0;
  g.carrier_hz = 27.6e9;
  g.tdd_mask = make_tdd_mask(g.n_symbols, 14, 8);
  return g;
}

std::vector<std::uint8_t> make_tdd_mask(int n_symbols, int period,
                                        int usable) {
  if (n_symbols <= 0 || period <= 0 || usable <= 0 || usable > period) {
    throw std::invalid_argument("TDD mask needs 0 < usable <= period");
  }
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n_symbols));
  for (int m = 0; m < n_symbols; ++m) {
    mask[static_cast<std::size_t>(m)] = (m % period) < usable ? 1 : 0;
  }
  return mask;
}

CsiGrid synthesize_csi(const OfdmGridConfig& grid,
                       const std::vector<PointTarget>& targets,
                       const std::vector<ClutterTap>& clutter,
                       double noise_power_db, std::mt19937_64& rng) {
  grid.validate();
  CsiGrid csi = CsiGrid::Zero(grid.n_subcarriers, grid.n_symbols);
  for (const auto& t : targets) {
    add_scatterer(csi, grid, t.range_m, t.speed_mps, t.power_db, t.phase_rad);
  }
  for (const auto& c : clutter) {
    add_scatterer(csi, grid, c.range_m, 0.0, c.power_db, c.phase_rad);
  }
  const double sigma = std::sqrt(std::pow(10.0, noise_power_db / 10.0) / 2.0);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (int m = 0; m < grid.n_symbols; ++m) {
    if (!grid.tdd_mask[static_cast<std::size_t>(m)]) {
      csi.col(m).setZero();
      continue;
    }
    for (int n = 0; n < grid.n_subcarriers; ++n) {
      csi(n, m) += cplx(gauss(rng), gauss(rng));
    }
  }
  return csi;
}

CsiGrid synthesize_target_response(const OfdmGridConfig& grid,
                                   const PointTarget& target) {
  CsiGrid csi = CsiGrid::Zero(grid.n_subcarriers, grid.n_symbols);
  add_scatterer(csi, grid, target.range_m, target.speed_mps, target.power_db,
                target.phase_rad);
  for (int m = 0; m < grid.n_symbols; ++m) {
    if (!grid.tdd_mask[static_cast<std::size_t>(m)]) csi.col(m).setZero();
  }
  return csi;
}

}  // namespace isac

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "isac/metrics.hpp"
#include "isac/ofdm.hpp"
#include "isac/periodogram.hpp"
#include "isac/scenario.hpp"

namespace isac {

/// Scenario as JSON: {label, dt, duration, trajectories: [{id, birth_frame,
/// states: [[range, speed], ...]}]}.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

/// CSI frame dump, little endian: u32 n_subcarriers, u32 n_symbols, then
/// n_symbols mask bytes, then row-major float32 re/im pairs.
void write_csi_dump(const std::filesystem::path& path,
                    const OfdmGridConfig& grid, const CsiGrid& csi);
struct CsiDump {
  OfdmGridConfig grid;  // dimensions and mask only; numerology left zero
  CsiGrid csi;
};
CsiDump read_csi_dump(const std::filesystem::path& path);

/// Range/speed map dump, little endian: u32 n_range, u32 n_speed, float64
/// range axis, float64 speed axis, then row-major float32 powers in dB.
void write_periodogram_dump(const std::filesystem::path& path,
                            const Periodogram& map);

/// CSV rows: frame,range_m,speed_mps,power_db
void write_detections_csv(const std::filesystem::path& path,
                          const std::vector<std::vector<Detection>>& frames);

/// CSV rows: frame,est_index,range_m,speed_mps,weight
void write_tracks_csv(const std::filesystem::path& path,
                      const std::vector<std::vector<Estimate>>& frames);

/// CSV rows: scenario,mode,mae_range_m,mae_speed_mps,pd,fa_per_scan
void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsReport>& reports);

std::string metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const std::string& text);
void save_metrics(const MetricsReport& report,
                  const std::filesystem::path& path);
MetricsReport load_metrics(const std::filesystem::path& path);

}  // namespace isac

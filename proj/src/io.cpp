#include "isac/io.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstdint>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "binary dumps assume a little-endian host");

namespace isac {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) {
    throw std::runtime_error(
        fmt::format("cannot open {} for writing", path.string()));
  }
  return f;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
  if (!f) {
    throw std::runtime_error(
        fmt::format("cannot open {} for reading", path.string()));
  }
  return f;
}

}  // namespace

std::string scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["label"] = scenario.label;
  doc["dt"] = scenario.dt_s;
  doc["duration"] = scenario.duration_s;
  json trajs = json::array();
  for (const auto& tr : scenario.trajectories) {
    json states = json::array();
    for (const auto& s : tr.states) {
      states.push_back({s.range_m, s.speed_mps});
    }
    trajs.push_back({{"id", tr.id},
                     {"birth_frame", tr.birth_frame},
                     {"states", std::move(states)}});
  }
  doc["trajectories"] = std::move(trajs);
  return doc.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  const json doc = json::parse(text);
  Scenario scn;
  scn.label = doc.at("label").get<std::string>();
  scn.dt_s = doc.at("dt").get<double>();
  scn.duration_s = doc.at("duration").get<double>();
  for (const auto& jt : doc.at("trajectories")) {
    Trajectory tr;
    tr.id = jt.at("id").get<int>();
    tr.birth_frame = jt.at("birth_frame").get<int>();
    for (const auto& js : jt.at("states")) {
      tr.states.push_back({js.at(0).get<double>(), js.at(1).get<double>()});
    }
    scn.trajectories.push_back(std::move(tr));
  }
  return scn;
}

void save_scenario(const Scenario& scenario,
                   const std::filesystem::path& path) {
  open_out(path, false) << scenario_to_json(scenario) << '\n';
}

Scenario load_scenario(const std::filesystem::path& path) {
  auto f = open_in(path, false);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return scenario_from_json(text);
}

void write_csi_dump(const std::filesystem::path& path,
                    const OfdmGridConfig& grid, const CsiGrid& csi) {
  if (csi.rows() != grid.n_subcarriers || csi.cols() != grid.n_symbols) {
    throw std::invalid_argument("CSI dimensions do not match the grid");
  }
  auto f = open_out(path, true);
  const std::uint32_t n = static_cast<std::uint32_t>(grid.n_subcarriers);
  const std::uint32_t m = static_cast<std::uint32_t>(grid.n_symbols);
  f.write(reinterpret_cast<const char*>(&n), 4);
  f.write(reinterpret_cast<const char*>(&m), 4);
  f.write(reinterpret_cast<const char*>(grid.tdd_mask.data()),
          static_cast<std::streamsize>(grid.tdd_mask.size()));
  std::vector<float> row(2 * static_cast<std::size_t>(m));
  for (int i = 0; i < csi.rows(); ++i) {
    for (int j = 0; j < csi.cols(); ++j) {
      row[2 * static_cast<std::size_t>(j)] =
          static_cast<float>(csi(i, j).real());
      row[2 * static_cast<std::size_t>(j) + 1] =
          static_cast<float>(csi(i, j).imag());
    }
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

CsiDump read_csi_dump(const std::filesystem::path& path) {
  auto f = open_in(path, true);
  std::uint32_t n = 0, m = 0;
  f.read(reinterpret_cast<char*>(&n), 4);
  f.read(reinterpret_cast<char*>(&m), 4);
  if (!f || n == 0 || m == 0) {
    throw std::runtime_error("malformed CSI dump header");
  }
  CsiDump dump;
  dump.grid.n_subcarriers = static_cast<int>(n);
  dump.grid.n_symbols = static_cast<int>(m);
  dump.grid.tdd_mask.resize(m);
  f.read(reinterpret_cast<char*>(dump.grid.tdd_mask.data()), m);
  dump.csi.resize(n, m);
  std::vector<float> row(2 * static_cast<std::size_t>(m));
  for (std::uint32_t i = 0; i < n; ++i) {
    f.read(reinterpret_cast<char*>(row.data()),
           static_cast<std::streamsize>(row.size() * sizeof(float)));
    for (std::uint32_t j = 0; j < m; ++j) {
      dump.csi(static_cast<int>(i), static_cast<int>(j)) =
          cplx(row[2 * j], row[2 * j + 1]);
    }
  }
  if (!f) throw std::runtime_error("truncated CSI dump");
  return dump;
}

void write_periodogram_dump(const std::filesystem::path& path,
                            const Periodogram& map) {
  auto f = open_out(path, true);
  const std::uint32_t nr = static_cast<std::uint32_t>(map.n_range());
  const std::uint32_t ns = static_cast<std::uint32_t>(map.n_speed());
  f.write(reinterpret_cast<const char*>(&nr), 4);
  f.write(reinterpret_cast<const char*>(&ns), 4);
  f.write(reinterpret_cast<const char*>(map.range_axis_m.data()),
          static_cast<std::streamsize>(nr * sizeof(double)));
  f.write(reinterpret_cast<const char*>(map.speed_axis_mps.data()),
          static_cast<std::streamsize>(ns * sizeof(double)));
  std::vector<float> row(ns);
  for (std::uint32_t i = 0; i < nr; ++i) {
    for (std::uint32_t j = 0; j < ns; ++j) {
      row[j] = static_cast<float>(
          map.power_db(static_cast<int>(i), static_cast<int>(j)));
    }
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

void write_detections_csv(const std::filesystem::path& path,
                          const std::vector<std::vector<Detection>>& frames) {
  auto f = open_out(path, false);
  f << "frame,range_m,speed_mps,power_db\n";
  for (std::size_t k = 0; k < frames.size(); ++k) {
    for (const auto& d : frames[k]) {
      f << fmt::format("{},{:.6g},{:.6g},{:.6g}\n", k, d.range_m, d.speed_mps,
                       d.power_db);
    }
  }
}

void write_tracks_csv(const std::filesystem::path& path,
                      const std::vector<std::vector<Estimate>>& frames) {
  auto f = open_out(path, false);
  f << "frame,est_index,range_m,speed_mps,weight\n";
  for (std::size_t k = 0; k < frames.size(); ++k) {
    for (std::size_t e = 0; e < frames[k].size(); ++e) {
      const auto& est = frames[k][e];
      f << fmt::format("{},{},{:.6g},{:.6g},{:.6g}\n", k, e, est.range_m,
                       est.speed_mps, est.weight);
    }
  }
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsReport>& reports) {
  auto f = open_out(path, false);
  f << "scenario,mode,mae_range_m,mae_speed_mps,pd,fa_per_scan\n";
  for (const auto& r : reports) {
    f << fmt::format("{},{},{:.6g},{:.6g},{:.6g},{:.6g}\n", r.scenario,
                     r.mode, r.mae_range_m, r.mae_speed_mps, r.pd,
                     r.fa_per_scan);
  }
}

std::string metrics_to_json(const MetricsReport& report) {
  json doc;
  doc["scenario"] = report.scenario;
  doc["mode"] = report.mode;
  doc["mae_range_m"] = report.mae_range_m;
  doc["mae_speed_mps"] = report.mae_speed_mps;
  doc["pd"] = report.pd;
  doc["fa_per_scan"] = report.fa_per_scan;
  doc["matched_pairs"] = report.matched_pairs;
  doc["frames"] = report.frames;
  return doc.dump(2);
}

MetricsReport metrics_from_json(const std::string& text) {
  const json doc = json::parse(text);
  MetricsReport r;
  r.scenario = doc.at("scenario").get<std::string>();
  r.mode = doc.at("mode").get<std::string>();
  r.mae_range_m = doc.at("mae_range_m").get<double>();
  r.mae_speed_mps = doc.at("mae_speed_mps").get<double>();
  r.pd = doc.at("pd").get<double>();
  r.fa_per_scan = doc.at("fa_per_scan").get<double>();
  r.matched_pairs = doc.at("matched_pairs").get<long>();
  r.frames = doc.at("frames").get<int>();
  return r;
}

void save_metrics(const MetricsReport& report,
                  const std::filesystem::path& path) {
  open_out(path, false) << metrics_to_json(report) << '\n';
}

MetricsReport load_metrics(const std::filesystem::path& path) {
  auto f = open_in(path, false);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return metrics_from_json(text);
}

}  // namespace isac

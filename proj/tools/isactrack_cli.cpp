#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "isac/experiment.hpp"
#include "isac/io.hpp"
#include "isac/periodogram.hpp"
#include "isac/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct RunOptions {
  std::string config_file;
  int preset = 0;
  std::string scenario_file;
  std::string sensor_mode;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool dump_csi = false;
  bool dump_periodogram = false;
  int parallel = 1;

  // ideal sensor
  double p_detect = 0.9;
  double sigma_range = 0.3;
  double sigma_speed = 0.1;
  double clutter_rate = 2.0;
  std::vector<double> clutter_range{15.0, 60.0};

  // ofdm sensor
  std::string grid = "desk";
  double noise_power_db = -10.0;
  double target_power_db = 0.0;
  std::vector<double> clutter_tap_ranges;
  std::vector<double> clutter_tap_powers;

  // processing
  std::string clutter_removal = "none";
  int eca_order = 3;
  int crap_components = 3;
  int crap_frames = 32;
  double cfar_pfa = 1e-4;
  std::vector<int> cfar_guard{2, 2};
  std::vector<int> cfar_train{8, 8};
  bool tdd_detect = true;
  double sidelobe_drop_db = 6.0;
  int refine_factor = 16;

  // gate
  std::vector<double> gate_range{15.0, 60.0};
  std::vector<double> gate_speed{-6.0, 6.0};
  double gate_min_power_db = -40.0;

  // tracker
  double prune_threshold = 1e-5;
  double merge_distance = 4.0;
  int max_components = 100;
  double birth_weight = 0.05;
  double extract_threshold = 0.5;
  double p_survival = 0.99;
  double tracker_p_detect = 0.9;
  double sigma_accel = 1.0;
  double clutter_density = -1.0;
  double zero_doppler_density = -1.0;
  double zero_doppler_sigma = 0.01;
};

void bind_run_options(CLI::App& run, RunOptions& o) {
  run.add_option("--config", o.config_file,
                 "TOML configuration file; command-line options take "
                 "precedence over file values");
  run.add_option("--scenario.preset", o.preset, "Scene preset 1..4");
  run.add_option("--scenario.file", o.scenario_file,
                 "Scenario JSON instead of a preset");
  run.add_option("--sensor.mode", o.sensor_mode,
                 "Sensor mode: ideal | ofdm (required)");
  run.add_option("--seed", o.seed, "Random seed");
  run.add_option("--out", o.out_dir, "Output directory");
  run.add_flag("--dump-csi", o.dump_csi, "Dump per-frame CSI (ofdm mode)");
  run.add_flag("--dump-periodogram", o.dump_periodogram,
               "Dump per-frame range/speed maps (ofdm mode)");
  run.add_option("--parallel", o.parallel, "Worker threads for detection");

  run.add_option("--sensor.p_detect", o.p_detect);
  run.add_option("--sensor.sigma_range", o.sigma_range);
  run.add_option("--sensor.sigma_speed", o.sigma_speed);
  run.add_option("--sensor.clutter_rate", o.clutter_rate);
  run.add_option("--sensor.clutter_range", o.clutter_range)->expected(2);
  run.add_option("--sensor.grid", o.grid, "OFDM numerology: desk | full");
  run.add_option("--sensor.noise_power_db", o.noise_power_db);
  run.add_option("--sensor.target_power_db", o.target_power_db);
  run.add_option("--sensor.clutter_tap_ranges", o.clutter_tap_ranges);
  run.add_option("--sensor.clutter_tap_powers", o.clutter_tap_powers);

  run.add_option("--processing.clutter_removal", o.clutter_removal,
                 "none | eca_c | crap");
  run.add_option("--processing.eca_order", o.eca_order);
  run.add_option("--processing.crap_components", o.crap_components);
  run.add_option("--processing.crap_frames", o.crap_frames);
  run.add_option("--processing.cfar_pfa", o.cfar_pfa);
  run.add_option("--processing.cfar_guard", o.cfar_guard)->expected(2);
  run.add_option("--processing.cfar_train", o.cfar_train)->expected(2);
  run.add_option("--processing.tdd_detect", o.tdd_detect,
                 "true | false; false feeds raw CFAR hits to the tracker");
  run.add_option("--processing.sidelobe_drop_db", o.sidelobe_drop_db);
  run.add_option("--processing.refine_factor", o.refine_factor);

  run.add_option("--gate.range", o.gate_range)->expected(2);
  run.add_option("--gate.speed", o.gate_speed)->expected(2);
  run.add_option("--gate.min_power_db", o.gate_min_power_db);

  run.add_option("--tracker.prune_threshold", o.prune_threshold);
  run.add_option("--tracker.merge_distance", o.merge_distance);
  run.add_option("--tracker.max_components", o.max_components);
  run.add_option("--tracker.birth_weight", o.birth_weight);
  run.add_option("--tracker.extract_threshold", o.extract_threshold);
  run.add_option("--tracker.p_survival", o.p_survival);
  run.add_option("--tracker.p_detect", o.tracker_p_detect);
  run.add_option("--tracker.sigma_accel", o.sigma_accel);
  run.add_option("--tracker.clutter_density", o.clutter_density);
  run.add_option("--tracker.zero_doppler_density", o.zero_doppler_density);
  run.add_option("--tracker.zero_doppler_sigma", o.zero_doppler_sigma);
}

// CLI11 resolves [section] headers against subcommand names, so config files
// are applied to the dotted option names by hand. Options already set on the
// command line keep their values.
int apply_config_file(CLI::App& run, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fmt::print(stderr, "error: cannot open config file {}\n", path);
    return 2;
  }
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML{}.from_config(in);
  } catch (const CLI::Error& err) {
    fmt::print(stderr, "error: {}: {}\n", path, err.what());
    return 2;
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key;
    for (const auto& parent : item.parents) key += parent + ".";
    key += item.name;
    CLI::Option* op = run.get_option_no_throw("--" + key);
    if (op == nullptr) {
      fmt::print(stderr, "error: {}: unknown option \"{}\"\n", path, key);
      return 2;
    }
    if (!op->empty()) continue;
    for (const auto& value : item.inputs) op->add_result(value);
    try {
      op->run_callback();
    } catch (const CLI::Error& err) {
      fmt::print(stderr, "error: {}: {}: {}\n", path, key, err.what());
      return 2;
    }
  }
  return 0;
}

int do_run(const RunOptions& o) {
  if (o.sensor_mode != "ideal" && o.sensor_mode != "ofdm") {
    fmt::print(stderr,
               "error: sensor_mode is required; set [sensor] mode = \"ideal\" "
               "or \"ofdm\" in the config (got \"{}\")\n",
               o.sensor_mode);
    return 2;
  }
  if (o.scenario_file.empty() && (o.preset < 1 || o.preset > 4)) {
    fmt::print(stderr,
               "error: choose a scenario: [scenario] preset = 1..4 or "
               "file = \"...\"\n");
    return 2;
  }
  if (o.clutter_tap_ranges.size() != o.clutter_tap_powers.size()) {
    fmt::print(stderr,
               "error: clutter_tap_ranges and clutter_tap_powers must have "
               "the same length\n");
    return 2;
  }

  isac::Scenario scenario =
      o.scenario_file.empty()
          ? isac::make_preset(o.preset, o.seed)
          : isac::load_scenario(o.scenario_file);

  isac::ExperimentConfig cfg;
  cfg.mode = o.sensor_mode == "ideal" ? isac::SensorMode::ideal
                                      : isac::SensorMode::ofdm;
  cfg.seed = o.seed;
  cfg.parallel = o.parallel;

  cfg.ideal.p_detect = o.p_detect;
  cfg.ideal.sigma_range_m = o.sigma_range;
  cfg.ideal.sigma_speed_mps = o.sigma_speed;
  cfg.ideal.clutter_rate = o.clutter_rate;
  cfg.ideal.clutter_range_min_m = o.clutter_range[0];
  cfg.ideal.clutter_range_max_m = o.clutter_range[1];

  if (o.grid == "desk") {
    cfg.ofdm.grid = isac::OfdmGridConfig::desk_scale();
  } else if (o.grid == "full") {
    cfg.ofdm.grid = isac::OfdmGridConfig::full_scale();
  } else {
    fmt::print(stderr, "error: sensor grid must be \"desk\" or \"full\"\n");
    return 2;
  }
  cfg.ofdm.noise_power_db = o.noise_power_db;
  cfg.ofdm.target_power_db = o.target_power_db;
  for (std::size_t i = 0; i < o.clutter_tap_ranges.size(); ++i) {
    cfg.ofdm.clutter_taps.push_back(
        {o.clutter_tap_ranges[i], o.clutter_tap_powers[i], 0.0});
  }

  if (o.clutter_removal == "none") {
    cfg.clutter_removal = isac::ClutterRemoval::none;
  } else if (o.clutter_removal == "eca_c") {
    cfg.clutter_removal = isac::ClutterRemoval::eca_c;
  } else if (o.clutter_removal == "crap") {
    cfg.clutter_removal = isac::ClutterRemoval::crap;
  } else {
    fmt::print(stderr,
               "error: clutter_removal must be none, eca_c, or crap\n");
    return 2;
  }
  cfg.eca_order = o.eca_order;
  cfg.crap_components = o.crap_components;
  cfg.crap_frames = o.crap_frames;

  cfg.detect.cfar.pfa = o.cfar_pfa;
  cfg.detect.cfar.guard_range = o.cfar_guard[0];
  cfg.detect.cfar.guard_speed = o.cfar_guard[1];
  cfg.detect.cfar.train_range = o.cfar_train[0];
  cfg.detect.cfar.train_speed = o.cfar_train[1];
  cfg.tdd_detect = o.tdd_detect;
  cfg.detect.sidelobe_drop_db = o.sidelobe_drop_db;
  cfg.detect.refine_factor = o.refine_factor;

  cfg.gate.min_range_m = o.gate_range[0];
  cfg.gate.max_range_m = o.gate_range[1];
  cfg.gate.min_speed_mps = o.gate_speed[0];
  cfg.gate.max_speed_mps = o.gate_speed[1];
  cfg.gate.min_power_db = o.gate_min_power_db;

  cfg.tracker.phd.prune_threshold = o.prune_threshold;
  cfg.tracker.phd.merge_distance = o.merge_distance;
  cfg.tracker.phd.max_components = o.max_components;
  cfg.tracker.phd.birth_weight = o.birth_weight;
  cfg.tracker.phd.extract_threshold = o.extract_threshold;
  cfg.tracker.p_survival = o.p_survival;
  cfg.tracker.p_detect = o.tracker_p_detect;
  cfg.tracker.sigma_accel = o.sigma_accel;
  cfg.tracker.clutter_density = o.clutter_density;
  cfg.tracker.zero_doppler_density = o.zero_doppler_density;
  cfg.tracker.zero_doppler_sigma_mps = o.zero_doppler_sigma;

  const auto artifacts = isac::run_experiment(scenario, cfg);

  const fs::path out(o.out_dir);
  fs::create_directories(out);
  isac::save_scenario(scenario, out / "scenario.json");
  isac::write_detections_csv(out / "detections.csv", artifacts.detections);
  isac::write_tracks_csv(out / "tracks.csv", artifacts.estimates);
  isac::save_metrics(artifacts.metrics, out / "metrics.json");
  isac::write_metrics_csv(out / "metrics.csv", {artifacts.metrics});

  if ((o.dump_csi || o.dump_periodogram) &&
      cfg.mode == isac::SensorMode::ofdm) {
    for (int k = 0; k < scenario.frame_count(); ++k) {
      const auto csi = isac::synthesize_scenario_frame(scenario, cfg, k);
      if (o.dump_csi) {
        isac::write_csi_dump(out / fmt::format("csi_{:06d}.bin", k),
                             cfg.ofdm.grid, csi);
      }
      if (o.dump_periodogram) {
        isac::write_periodogram_dump(
            out / fmt::format("pgram_{:06d}.bin", k),
            isac::periodogram(cfg.ofdm.grid, csi));
      }
    }
  } else if (o.dump_csi || o.dump_periodogram) {
    fmt::print(stderr, "note: dump flags apply to ofdm mode only\n");
  }

  const auto& m = artifacts.metrics;
  fmt::print("scenario={} mode={} frames={}\n", m.scenario, m.mode, m.frames);
  fmt::print("mae_range_m={:.4f} mae_speed_mps={:.4f} pd={:.4f} "
             "fa_per_scan={:.4f}\n",
             m.mae_range_m, m.mae_speed_mps, m.pd, m.fa_per_scan);
  fmt::print("outputs written to {}\n", out.string());
  return 0;
}

int do_compare(const std::string& a_path, const std::string& b_path) {
  const auto a = isac::load_metrics(a_path);
  const auto b = isac::load_metrics(b_path);
  fmt::print("{:<16}{:>14}{:>14}{:>14}\n", "metric", "A", "B", "B-A");
  auto row = [](const char* name, double va, double vb) {
    fmt::print("{:<16}{:>14.4f}{:>14.4f}{:>14.4f}\n", name, va, vb, vb - va);
  };
  fmt::print("{:<16}{:>14}{:>14}\n", "scenario", a.scenario, b.scenario);
  fmt::print("{:<16}{:>14}{:>14}\n", "mode", a.mode, b.mode);
  row("mae_range_m", a.mae_range_m, b.mae_range_m);
  row("mae_speed_mps", a.mae_speed_mps, b.mae_speed_mps);
  row("pd", a.pd, b.pd);
  row("fa_per_scan", a.fa_per_scan, b.fa_per_scan);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ISAC range/speed tracking workbench"};
  app.require_subcommand(1);

  RunOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "Run a tracking experiment");
  bind_run_options(*run, run_opts);

  std::string cmp_a, cmp_b;
  CLI::App* compare =
      app.add_subcommand("compare", "Compare two metrics.json files");
  compare->add_option("a", cmp_a, "First metrics.json")->required();
  compare->add_option("b", cmp_b, "Second metrics.json")->required();

  CLI::App* scenario = app.add_subcommand("scenario", "Scenario tools");
  scenario->require_subcommand(1);
  int gen_preset = 1;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "scenario.json";
  CLI::App* gen = scenario->add_subcommand("gen", "Generate a preset scene");
  gen->add_option("--preset", gen_preset, "Preset 1..4")->required();
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--out", gen_out, "Output JSON path");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed() && !run_opts.config_file.empty()) {
    int rc = apply_config_file(*run, run_opts.config_file);
    if (rc != 0) return rc;
  }

  try {
    if (run->parsed()) return do_run(run_opts);
    if (compare->parsed()) return do_compare(cmp_a, cmp_b);
    if (gen->parsed()) {
      isac::save_scenario(isac::make_preset(gen_preset, gen_seed), gen_out);
      fmt::print("wrote {}\n", gen_out);
      return 0;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}

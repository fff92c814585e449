#include "isac/experiment.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "isac/periodogram.hpp"

namespace isac {

namespace {

std::vector<PointTarget> targets_at(const Scenario& scn, int frame,
                                    double power_db, double carrier_hz) {
  const double wavelength = kSpeedOfLight / carrier_hz;
  std::vector<PointTarget> targets;
  for (const auto* tr : scn.alive_at(frame)) {
    const auto& s = tr->state_at(frame);
    // round-trip carrier phase keeps frame-to-frame interference physical
    const double phase = -4.0 * std::numbers::pi * s.range_m / wavelength;
    targets.push_back({s.range_m, s.speed_mps, power_db, phase});
  }
  return targets;
}

double derived_clutter_density(const ExperimentConfig& cfg) {
  if (cfg.tracker.clutter_density > 0.0) return cfg.tracker.clutter_density;
  if (cfg.mode == SensorMode::ideal) {
    const double area = (cfg.ideal.clutter_range_max_m -
                         cfg.ideal.clutter_range_min_m) *
                        (cfg.gate.max_speed_mps - cfg.gate.min_speed_mps);
    return std::max(cfg.ideal.clutter_rate / area, 1e-8);
  }
  return 1e-4;
}

double derived_zero_doppler_density(const ExperimentConfig& cfg) {
  if (cfg.tracker.zero_doppler_density >= 0.0) {
    return cfg.tracker.zero_doppler_density;
  }
  if (cfg.mode == SensorMode::ideal) {
    const double span =
        cfg.ideal.clutter_range_max_m - cfg.ideal.clutter_range_min_m;
    if (span > 0.0) return cfg.ideal.clutter_rate / span;
  }
  return 0.0;
}

}  // namespace

std::string to_string(SensorMode mode) {
  return mode == SensorMode::ideal ? "ideal" : "ofdm";
}

std::string to_string(ClutterRemoval removal) {
  switch (removal) {
    case ClutterRemoval::none: return "none";
    case ClutterRemoval::eca_c: return "eca_c";
    default: return "crap";
  }
}

RunArtifacts run_experiment(const Scenario& scenario,
                            const ExperimentConfig& config) {
  const int frames = scenario.frame_count();
  if (frames <= 0) throw std::invalid_argument("scenario has no frames");

  std::vector<std::vector<Detection>> detections(
      static_cast<std::size_t>(frames));

  if (config.mode == SensorMode::ideal) {
    for (int k = 0; k < frames; ++k) {
      auto rng = make_rng(config.seed, 0x1000u + static_cast<std::uint64_t>(k));
      std::vector<ObjectState> truths;
      for (const auto* tr : scenario.alive_at(k)) {
        truths.push_back(tr->state_at(k));
      }
      detections[static_cast<std::size_t>(k)] = gate_detections(
          ideal_observe(config.ideal, truths, rng), config.gate);
    }
  } else {
    const auto& grid = config.ofdm.grid;
    grid.validate();

    auto synthesize_frame = [&](int k) {
      return synthesize_scenario_frame(scenario, config, k);
    };

    ClutterBasis basis;
    if (config.clutter_removal == ClutterRemoval::crap) {
      std::vector<CsiGrid> refs;
      const int n_ref = std::max(1, config.crap_frames);
      for (int i = 0; i < n_ref; ++i) {
        const int k = std::min(
            frames - 1, static_cast<int>((i + 0.5) * frames / n_ref));
        refs.push_back(synthesize_frame(k));
      }
      basis = crap_acquire(grid, refs, config.crap_components);
    }

    auto process_frame = [&](int k) {
      CsiGrid csi = synthesize_frame(k);
      if (config.clutter_removal == ClutterRemoval::eca_c) {
        csi = eca_c_remove(grid, csi, config.eca_order);
      } else if (config.clutter_removal == ClutterRemoval::crap) {
        csi = crap_remove(csi, basis);
      }
      const auto dets =
          config.tdd_detect
              ? tdd_peak_detect(grid, csi, config.detect)
              : naive_cfar_detect(grid, csi, config.detect.cfar);
      detections[static_cast<std::size_t>(k)] = gate_detections(
          dets, config.gate);
    };

    const int n_threads = std::max(1, config.parallel);
    if (n_threads == 1) {
      for (int k = 0; k < frames; ++k) process_frame(k);
    } else {
      std::atomic<int> next{0};
      std::vector<std::thread> pool;
      for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
          for (int k = next.fetch_add(1); k < frames; k = next.fetch_add(1)) {
            process_frame(k);
          }
        });
      }
      for (auto& th : pool) th.join();
    }
  }

  MotionModel motion = MotionModel::constant_velocity(
      scenario.dt_s, config.tracker.sigma_accel, config.tracker.p_survival);
  MeasurementModel meas;
  meas.R = config.tracker.measurement_noise;
  meas.p_detect = config.tracker.p_detect;
  meas.clutter_density = derived_clutter_density(config);
  meas.zero_doppler_density = derived_zero_doppler_density(config);
  meas.zero_doppler_sigma_mps = config.tracker.zero_doppler_sigma_mps;
  PhdFilter filter(motion, meas, config.tracker.phd);

  std::vector<std::vector<Estimate>> estimates(
      static_cast<std::size_t>(frames));
  std::vector<double> sum_weights(static_cast<std::size_t>(frames), 0.0);
  for (int k = 0; k < frames; ++k) {
    filter.step(detections[static_cast<std::size_t>(k)]);
    estimates[static_cast<std::size_t>(k)] = filter.extract();
    sum_weights[static_cast<std::size_t>(k)] =
        total_weight(filter.intensity());
  }

  return evaluate_estimates(scenario, std::move(detections),
                            std::move(estimates), std::move(sum_weights),
                            to_string(config.mode));
}

CsiGrid synthesize_scenario_frame(const Scenario& scenario,
                                  const ExperimentConfig& config, int frame) {
  const auto& grid = config.ofdm.grid;
  grid.validate();
  if (frame < 0 || frame >= scenario.frame_count()) {
    throw std::out_of_range("frame outside the scenario");
  }
  auto rng = make_rng(config.seed, 0x1000u + static_cast<std::uint64_t>(frame));
  return synthesize_csi(grid,
                        targets_at(scenario, frame,
                                   config.ofdm.target_power_db,
                                   grid.carrier_hz),
                        config.ofdm.clutter_taps, config.ofdm.noise_power_db,
                        rng);
}

RunArtifacts evaluate_estimates(const Scenario& scenario,
                                std::vector<std::vector<Detection>> detections,
                                std::vector<std::vector<Estimate>> estimates,
                                std::vector<double> sum_weights,
                                const std::string& mode_label) {
  const int frames = scenario.frame_count();
  RunArtifacts art;
  art.detections = std::move(detections);
  art.estimates = std::move(estimates);
  art.sum_weights = std::move(sum_weights);

  MaeAccumulator mae;
  std::vector<std::vector<int>> matched(static_cast<std::size_t>(frames));
  std::vector<int> est_counts(static_cast<std::size_t>(frames), 0);
  art.unmatched_estimates.assign(static_cast<std::size_t>(frames), 0);
  art.true_counts.assign(static_cast<std::size_t>(frames), 0);

  for (int k = 0; k < frames; ++k) {
    const auto alive = scenario.alive_at(k);
    art.true_counts[static_cast<std::size_t>(k)] =
        static_cast<int>(alive.size());
    std::vector<ObjectState> truths;
    std::vector<int> traj_index;
    for (const auto* tr : alive) {
      truths.push_back(tr->state_at(k));
      traj_index.push_back(static_cast<int>(tr - scenario.trajectories.data()));
    }
    const auto& ests = art.estimates[static_cast<std::size_t>(k)];
    est_counts[static_cast<std::size_t>(k)] = static_cast<int>(ests.size());

    const auto assoc = associate_frame(truths, ests);
    for (const auto& [ti, ei] : assoc.matches) {
      const auto& t = truths[static_cast<std::size_t>(ti)];
      const auto& e = ests[static_cast<std::size_t>(ei)];
      mae.add(e.range_m - t.range_m, e.speed_mps - t.speed_mps);
      matched[static_cast<std::size_t>(k)].push_back(
          traj_index[static_cast<std::size_t>(ti)]);
    }
    art.unmatched_estimates[static_cast<std::size_t>(k)] =
        static_cast<int>(assoc.unmatched_estimates.size());
  }

  art.smoothed_counts = smoothed_cardinality(est_counts);

  const auto mae_res = mae.result();
  art.metrics.scenario = scenario.label;
  art.metrics.mode = mode_label;
  art.metrics.mae_range_m = mae_res.range_m;
  art.metrics.mae_speed_mps = mae_res.speed_mps;
  art.metrics.matched_pairs = mae_res.matched_pairs;
  art.metrics.pd = windowed_pd(scenario, matched);
  art.metrics.fa_per_scan = false_alarms_per_scan(art.unmatched_estimates);
  art.metrics.frames = frames;
  return art;
}

}  // namespace isac

#include <doctest.h>

#include <cmath>
#include <random>

#include "isac/cfar.hpp"

using namespace isac;

namespace {

/// Uniform background at -floor_db with one 0 dB cell; a map as the
/// periodogram would describe it (dB relative to the strongest cell).
Periodogram bump_map(int nr, int ns, int bi, int bj, double floor_db) {
  Periodogram p;
  p.power_db = Eigen::MatrixXd::Constant(nr, ns, -floor_db);
  p.power_db(bi, bj) = 0.0;
  p.norm_linear = 1.0;
  return p;
}

double alpha_for(int n_train, double pfa) {
  return n_train * (std::pow(pfa, -1.0 / n_train) - 1.0);
}

}  // namespace

TEST_CASE("threshold matches the closed form for an interior cell") {
  const CfarConfig cfg;  // guard 2, train 8, pfa 1e-4
  const double floor_db = 14.0;
  const Periodogram map = bump_map(64, 64, 32, 30, floor_db);
  const auto dets = ca_cfar(map, cfg);
  REQUIRE(dets.size() == 1u);
  CHECK(dets[0].range_bin == 32);
  CHECK(dets[0].speed_bin == 30);
  CHECK(dets[0].power_db == 0.0);

  const int window = 2 * (cfg.guard_range + cfg.train_range) + 1;
  const int guard = 2 * cfg.guard_range + 1;
  const int n_train = window * window - guard * guard;
  const double expected_db =
      10.0 * std::log10(alpha_for(n_train, cfg.pfa)) - floor_db;
  CHECK(dets[0].threshold_db == doctest::Approx(expected_db).epsilon(1e-9));
}

TEST_CASE("border cells recompute the scaling for the clipped window") {
  const CfarConfig cfg;
  const double floor_db = 14.0;
  const Periodogram map = bump_map(64, 64, 0, 0, floor_db);
  const auto dets = ca_cfar(map, cfg);
  REQUIRE(dets.size() == 1u);
  CHECK(dets[0].range_bin == 0);
  CHECK(dets[0].speed_bin == 0);

  const int w = cfg.guard_range + cfg.train_range + 1;  // rows 0..10
  const int g = cfg.guard_range + 1;
  const int n_train = w * w - g * g;
  const double expected_db =
      10.0 * std::log10(alpha_for(n_train, cfg.pfa)) - floor_db;
  CHECK(dets[0].threshold_db == doctest::Approx(expected_db).epsilon(1e-9));
}

TEST_CASE("a bump below the scaled threshold is not flagged") {
  const CfarConfig cfg;
  const int window = 2 * (cfg.guard_range + cfg.train_range) + 1;
  const int guard = 2 * cfg.guard_range + 1;
  const int n_train = window * window - guard * guard;
  const double alpha_db = 10.0 * std::log10(alpha_for(n_train, cfg.pfa));

  CHECK(ca_cfar(bump_map(64, 64, 32, 30, alpha_db - 0.5), cfg).empty());
  CHECK(ca_cfar(bump_map(64, 64, 32, 30, alpha_db + 0.5), cfg).size() == 1u);
}

TEST_CASE("flat maps produce no detections") {
  Periodogram p;
  p.power_db = Eigen::MatrixXd::Zero(50, 50);
  p.norm_linear = 1.0;
  CHECK(ca_cfar(p, {}).empty());
}

TEST_CASE("false alarm rate tracks the configured pfa on white noise") {
  std::mt19937_64 rng(19);
  std::exponential_distribution<double> expo(1.0);
  const int nr = 200, ns = 200;
  Periodogram p;
  p.power_db.resize(nr, ns);
  double peak = 0.0;
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < ns; ++j) {
      p.power_db(i, j) = expo(rng);
      peak = std::max(peak, p.power_db(i, j));
    }
  }
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < ns; ++j) {
      p.power_db(i, j) = 10.0 * std::log10(p.power_db(i, j) / peak);
    }
  }
  p.norm_linear = peak;

  CfarConfig cfg;
  cfg.pfa = 1e-2;
  const double rate =
      static_cast<double>(ca_cfar(p, cfg).size()) / (nr * ns);
  CHECK(rate > 0.5e-2);
  CHECK(rate < 2.0e-2);
}

TEST_CASE("invalid configurations are rejected") {
  Periodogram p;
  p.power_db = Eigen::MatrixXd::Zero(10, 10);
  CfarConfig cfg;
  cfg.pfa = 0.0;
  CHECK_THROWS_AS(ca_cfar(p, cfg), std::invalid_argument);
  cfg = {};
  cfg.train_range = 0;
  CHECK_THROWS_AS(ca_cfar(p, cfg), std::invalid_argument);
  cfg = {};
  cfg.guard_speed = -1;
  CHECK_THROWS_AS(ca_cfar(p, cfg), std::invalid_argument);
}

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "isac/gmphd.hpp"

using namespace isac;

namespace {

double gaussian2(const Eigen::Vector2d& x, const Eigen::Vector2d& mean,
                 const Eigen::Matrix2d& cov) {
  const Eigen::Vector2d d = x - mean;
  return std::exp(-0.5 * d.dot(cov.inverse() * d)) /
         (2.0 * std::numbers::pi * std::sqrt(cov.determinant()));
}

bool approx_mat(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b,
                double tol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

TEST_CASE("constant-velocity model matrices") {
  const double dt = 0.01, sa = 1.5;
  const MotionModel m = MotionModel::constant_velocity(dt, sa, 0.98);
  CHECK(m.F(0, 0) == 1.0);
  CHECK(m.F(0, 1) == dt);
  CHECK(m.F(1, 0) == 0.0);
  CHECK(m.F(1, 1) == 1.0);
  const double s2 = sa * sa;
  CHECK(m.Q(0, 0) == doctest::Approx(s2 * dt * dt * dt * dt / 4.0));
  CHECK(m.Q(0, 1) == doctest::Approx(s2 * dt * dt * dt / 2.0));
  CHECK(m.Q(1, 0) == m.Q(0, 1));
  CHECK(m.Q(1, 1) == doctest::Approx(s2 * dt * dt));
  CHECK(m.p_survival == 0.98);
}

TEST_CASE("prediction scales weights and propagates moments") {
  MotionModel m = MotionModel::constant_velocity(0.1, 2.0, 0.95);
  GaussianComponent c;
  c.weight = 0.8;
  c.mean << 30.0, 1.0;
  c.cov << 0.5, 0.1, 0.1, 0.2;
  const Intensity out = phd_predict({c}, m);
  REQUIRE(out.size() == 1u);
  CHECK(out[0].weight == doctest::Approx(0.95 * 0.8).epsilon(1e-12));
  const Eigen::Vector2d want_mean = m.F * c.mean;
  CHECK((out[0].mean - want_mean).norm() < 1e-12);
  const Eigen::Matrix2d want_cov = m.F * c.cov * m.F.transpose() + m.Q;
  CHECK(approx_mat(out[0].cov, want_cov, 1e-12));
  CHECK(phd_predict({}, m).empty());
}

TEST_CASE("update weights follow the textbook formula") {
  MeasurementModel meas;
  meas.p_detect = 0.9;
  meas.clutter_density = 1e-3;
  GaussianComponent c;
  c.weight = 0.4;
  c.mean << 30.0, 1.0;
  c.cov << 1.0, 0.0, 0.0, 0.5;

  const Detection z{30.5, 0.8, 0.0};
  const Intensity out = phd_update({c}, meas, {z});
  REQUIRE(out.size() == 2u);

  CHECK(out[0].weight == doctest::Approx(0.1 * 0.4).epsilon(1e-12));
  CHECK((out[0].mean - c.mean).norm() == 0.0);

  const Eigen::Vector2d zv(z.range_m, z.speed_mps);
  const Eigen::Matrix2d s = c.cov + meas.R;
  const double num = 0.9 * 0.4 * gaussian2(zv, c.mean, s);
  const double want_w = num / (meas.clutter_density + num);
  CHECK(out[1].weight == doctest::Approx(want_w).epsilon(1e-9));

  const Eigen::Matrix2d gain = c.cov * s.inverse();
  const Eigen::Vector2d want_mean = c.mean + gain * (zv - c.mean);
  CHECK((out[1].mean - want_mean).norm() < 1e-9);
  const Eigen::Matrix2d want_cov =
      (Eigen::Matrix2d::Identity() - gain) * c.cov;
  CHECK(approx_mat(out[1].cov, want_cov, 1e-9));
}

TEST_CASE("update without detections only keeps missed copies") {
  MeasurementModel meas;
  meas.p_detect = 0.7;
  GaussianComponent c;
  c.weight = 1.0;
  c.mean << 20.0, 0.0;
  const Intensity out = phd_update({c}, meas, {});
  REQUIRE(out.size() == 1u);
  CHECK(out[0].weight == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(approx_mat(out[0].cov, c.cov, 0.0));
}

TEST_CASE("per-measurement update groups sum below one") {
  MeasurementModel meas;
  meas.clutter_density = 1e-4;
  Intensity prior;
  for (int i = 0; i < 3; ++i) {
    GaussianComponent c;
    c.weight = 0.5;
    c.mean << 25.0 + 5.0 * i, 0.5 * i;
    prior.push_back(c);
  }
  const std::vector<Detection> zs{{26.0, 0.2, 0.0}, {35.0, 1.1, 0.0}};
  const Intensity out = phd_update(prior, meas, zs);
  REQUIRE(out.size() == prior.size() * (zs.size() + 1));
  for (std::size_t m = 0; m < zs.size(); ++m) {
    double group = 0.0;
    for (std::size_t i = 0; i < prior.size(); ++i) {
      group += out[prior.size() * (m + 1) + i].weight;
    }
    CHECK(group > 0.0);
    CHECK(group < 1.0);
  }
}

TEST_CASE("pruning drops featherweights and merging moment-matches") {
  PhdConfig cfg;
  cfg.prune_threshold = 0.01;
  cfg.merge_distance = 4.0;

  GaussianComponent a;
  a.weight = 0.6;
  a.mean << 30.0, 1.0;
  a.cov = Eigen::Matrix2d::Identity();
  GaussianComponent b = a;
  b.weight = 0.3;
  b.mean << 30.5, 1.2;
  GaussianComponent far = a;
  far.weight = 0.5;
  far.mean << 45.0, -2.0;
  GaussianComponent feather = a;
  feather.weight = 0.001;

  const Intensity merged = prune_merge({a, b, far, feather}, cfg);
  REQUIRE(merged.size() == 2u);
  CHECK(total_weight(merged) == doctest::Approx(1.4).epsilon(1e-12));

  const auto& m = merged[0];  // heaviest first
  CHECK(m.weight == doctest::Approx(0.9).epsilon(1e-12));
  const Eigen::Vector2d want_mean = (0.6 * a.mean + 0.3 * b.mean) / 0.9;
  CHECK((m.mean - want_mean).norm() < 1e-12);
  Eigen::Matrix2d want_cov = Eigen::Matrix2d::Zero();
  for (const auto& c : {a, b}) {
    const Eigen::Vector2d d = c.mean - want_mean;
    want_cov += c.weight * (c.cov + d * d.transpose());
  }
  want_cov /= 0.9;
  CHECK(approx_mat(m.cov, want_cov, 1e-12));
}

TEST_CASE("prune_merge is idempotent and bounds the component count") {
  PhdConfig cfg;
  cfg.max_components = 5;
  Intensity many;
  for (int i = 0; i < 40; ++i) {
    GaussianComponent c;
    c.weight = 0.1 + 0.01 * i;
    c.mean << 18.0 + 0.9 * i, ((i % 7) - 3.0);
    c.cov = 0.05 * Eigen::Matrix2d::Identity();
    many.push_back(c);
  }
  const Intensity once = prune_merge(many, cfg);
  CHECK(static_cast<int>(once.size()) <= cfg.max_components);
  const Intensity twice = prune_merge(once, cfg);
  REQUIRE(twice.size() == once.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(twice[i].weight == once[i].weight);
    CHECK((twice[i].mean - once[i].mean).norm() == 0.0);
    CHECK(approx_mat(twice[i].cov, once[i].cov, 0.0));
  }
}

TEST_CASE("extraction copies components by rounded weight") {
  PhdConfig cfg;  // extract_threshold 0.5
  Intensity in;
  GaussianComponent c;
  c.mean << 30.0, 1.0;
  for (double w : {0.4, 0.5, 0.6, 2.4}) {
    c.weight = w;
    in.push_back(c);
  }
  const auto est = phd_extract(in, cfg);
  REQUIRE(est.size() == 3u);  // 0 + 0 + 1 + 2
  CHECK(est[0].weight == 0.6);
  CHECK(est[1].weight == 2.4);
  CHECK(est[2].weight == 2.4);
  CHECK(est[1].range_m == 30.0);
}

TEST_CASE("clutter intensity with and without the zero-Doppler ridge") {
  MeasurementModel meas;
  meas.clutter_density = 2e-4;
  CHECK(clutter_intensity_at(meas, {30.0, 3.0}) == 2e-4);

  meas.zero_doppler_density = 0.05;
  meas.zero_doppler_sigma_mps = 0.02;
  const double peak = clutter_intensity_at(meas, {30.0, 0.0});
  const double want =
      2e-4 + 0.05 / (std::sqrt(2.0 * std::numbers::pi) * 0.02);
  CHECK(peak == doctest::Approx(want).epsilon(1e-12));
  const double off = clutter_intensity_at(meas, {30.0, 0.06});
  const double want_off =
      2e-4 + 0.05 * std::exp(-4.5) /
                 (std::sqrt(2.0 * std::numbers::pi) * 0.02);
  CHECK(off == doctest::Approx(want_off).epsilon(1e-12));
  CHECK(peak > off);
}

TEST_CASE("adaptive births seed one component per detection") {
  PhdConfig cfg;
  const std::vector<Detection> dets{{20.0, 1.0, 0.0}, {40.0, -2.0, 0.0}};
  const Intensity births = adaptive_births(dets, cfg);
  REQUIRE(births.size() == 2u);
  for (std::size_t i = 0; i < births.size(); ++i) {
    CHECK(births[i].weight == cfg.birth_weight);
    CHECK(births[i].mean(0) == dets[i].range_m);
    CHECK(births[i].mean(1) == dets[i].speed_mps);
    CHECK(approx_mat(births[i].cov, cfg.birth_cov, 0.0));
  }
}

TEST_CASE("filter locks onto a persistent detection stream") {
  const MotionModel motion = MotionModel::constant_velocity(0.01, 1.0);
  MeasurementModel meas;
  meas.clutter_density = 1e-4;
  PhdFilter filter(motion, meas, {});

  CHECK(filter.step({}).empty());
  for (int k = 0; k < 60; ++k) {
    filter.step({{30.0 + 0.01 * k, 1.0, 0.0}});
  }
  const auto est = filter.extract();
  REQUIRE(est.size() == 1u);
  CHECK(est[0].range_m == doctest::Approx(30.6).epsilon(0.01));
  CHECK(est[0].speed_mps == doctest::Approx(1.0).epsilon(0.2));
  CHECK(est[0].weight > 0.8);
  CHECK(est[0].weight < 1.3);

  // The stream stops; the mass decays below the extraction threshold.
  for (int k = 0; k < 80; ++k) filter.step({});
  CHECK(filter.extract().empty());
}

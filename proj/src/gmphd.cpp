#include "isac/gmphd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace isac {

namespace {

double log_gaussian(const Eigen::Vector2d& x, const Eigen::Vector2d& mean,
                    const Eigen::Matrix2d& cov) {
  const Eigen::Vector2d d = x - mean;
  const double det = cov.determinant();
  const double quad = d.dot(cov.inverse() * d);
  return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) -
         0.5 * quad;
}

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

MotionModel MotionModel::constant_velocity(double dt, double sigma_accel,
                                           double p_survival) {
  MotionModel m;
  m.F << 1.0, dt, 0.0, 1.0;
  const double s2 = sigma_accel * sigma_accel;
  m.Q << s2 * dt * dt * dt * dt / 4.0, s2 * dt * dt * dt / 2.0,
      s2 * dt * dt * dt / 2.0, s2 * dt * dt;
  m.p_survival = p_survival;
  return m;
}

double clutter_intensity_at(const MeasurementModel& meas,
                            const Eigen::Vector2d& z) {
  double kappa = meas.clutter_density;
  if (meas.zero_doppler_density > 0.0 && meas.zero_doppler_sigma_mps > 0.0) {
    const double s = meas.zero_doppler_sigma_mps;
    const double v = z(1);
    kappa += meas.zero_doppler_density *
             std::exp(-0.5 * v * v / (s * s)) /
             (std::sqrt(2.0 * std::numbers::pi) * s);
  }
  return kappa;
}

Intensity phd_predict(const Intensity& prior, const MotionModel& motion) {
  Intensity out;
  out.reserve(prior.size());
  for (const auto& c : prior) {
    GaussianComponent p;
    p.weight = motion.p_survival * c.weight;
    p.mean = motion.F * c.mean;
    p.cov = motion.F * c.cov * motion.F.transpose() + motion.Q;
    out.push_back(p);
  }
  return out;
}

Intensity phd_update(const Intensity& prior, const MeasurementModel& meas,
                     const std::vector<Detection>& detections) {
  const std::size_t j = prior.size();
  Intensity out;
  out.reserve(j * (detections.size() + 1));

  for (const auto& c : prior) {
    GaussianComponent missed = c;
    missed.weight = (1.0 - meas.p_detect) * c.weight;
    out.push_back(missed);
  }
  if (detections.empty() || j == 0 || meas.p_detect <= 0.0) return out;

  std::vector<Eigen::Vector2d> eta(j);
  std::vector<Eigen::Matrix2d> s(j), gain(j), cov_upd(j);
  for (std::size_t i = 0; i < j; ++i) {
    const auto& c = prior[i];
    eta[i] = meas.H * c.mean;
    s[i] = meas.H * c.cov * meas.H.transpose() + meas.R;
    gain[i] = c.cov * meas.H.transpose() * s[i].inverse();
    Eigen::Matrix2d upd =
        (Eigen::Matrix2d::Identity() - gain[i] * meas.H) * c.cov;
    cov_upd[i] = 0.5 * (upd + upd.transpose());
  }

  std::vector<double> logw(j);
  for (const auto& d : detections) {
    const Eigen::Vector2d z(d.range_m, d.speed_mps);
    for (std::size_t i = 0; i < j; ++i) {
      logw[i] = std::log(meas.p_detect * prior[i].weight) +
                log_gaussian(z, eta[i], s[i]);
    }
    double log_denom = log_sum_exp(logw);
    const double kappa = clutter_intensity_at(meas, z);
    if (kappa > 0.0) {
      const double log_kappa = std::log(kappa);
      const double hi = std::max(log_kappa, log_denom);
      log_denom = hi + std::log(std::exp(log_kappa - hi) +
                                std::exp(log_denom - hi));
    }
    if (!std::isfinite(log_denom)) continue;
    for (std::size_t i = 0; i < j; ++i) {
      GaussianComponent u;
      u.weight = std::exp(logw[i] - log_denom);
      u.mean = prior[i].mean + gain[i] * (z - eta[i]);
      u.cov = cov_upd[i];
      out.push_back(u);
    }
  }
  return out;
}

Intensity prune_merge(const Intensity& in, const PhdConfig& config) {
  Intensity pool;
  for (const auto& c : in) {
    if (c.weight >= config.prune_threshold) pool.push_back(c);
  }

  bool merged_any = true;
  while (merged_any) {
    merged_any = false;
    std::sort(pool.begin(), pool.end(),
              [](const GaussianComponent& a, const GaussianComponent& b) {
                return a.weight > b.weight;
              });
    Intensity next;
    std::vector<bool> taken(pool.size(), false);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i]) continue;
      std::vector<std::size_t> group{i};
      taken[i] = true;
      for (std::size_t k = i + 1; k < pool.size(); ++k) {
        if (taken[k]) continue;
        const Eigen::Vector2d d = pool[k].mean - pool[i].mean;
        if (d.dot(pool[k].cov.inverse() * d) <= config.merge_distance) {
          group.push_back(k);
          taken[k] = true;
        }
      }
      if (group.size() == 1) {
        next.push_back(pool[i]);
        continue;
      }
      merged_any = true;
      GaussianComponent m;
      for (std::size_t k : group) m.weight += pool[k].weight;
      m.mean.setZero();
      for (std::size_t k : group) m.mean += pool[k].weight * pool[k].mean;
      m.mean /= m.weight;
      m.cov.setZero();
      for (std::size_t k : group) {
        const Eigen::Vector2d d = pool[k].mean - m.mean;
        m.cov += pool[k].weight * (pool[k].cov + d * d.transpose());
      }
      m.cov /= m.weight;
      next.push_back(m);
    }
    pool = std::move(next);
  }

  std::sort(pool.begin(), pool.end(),
            [](const GaussianComponent& a, const GaussianComponent& b) {
              return a.weight > b.weight;
            });
  if (static_cast<int>(pool.size()) > config.max_components) {
    pool.resize(static_cast<std::size_t>(config.max_components));
  }
  return pool;
}

Intensity adaptive_births(const std::vector<Detection>& detections,
                          const PhdConfig& config) {
  Intensity births;
  births.reserve(detections.size());
  for (const auto& d : detections) {
    GaussianComponent b;
    b.weight = config.birth_weight;
    b.mean = Eigen::Vector2d(d.range_m, d.speed_mps);
    b.cov = config.birth_cov;
    births.push_back(b);
  }
  return births;
}

std::vector<Estimate> phd_extract(const Intensity& intensity,
                                  const PhdConfig& config) {
  std::vector<Estimate> out;
  for (const auto& c : intensity) {
    if (c.weight <= config.extract_threshold) continue;
    int copies = c.weight > 1.5
                     ? static_cast<int>(std::lround(c.weight))
                     : 1;
    for (int k = 0; k < copies; ++k) {
      out.push_back({c.mean(0), c.mean(1), c.weight});
    }
  }
  return out;
}

const Intensity& PhdFilter::step(const std::vector<Detection>& detections) {
  Intensity prior = intensity_;
  prior.insert(prior.end(), pending_births_.begin(), pending_births_.end());
  prior = phd_predict(prior, motion_);
  prior = phd_update(prior, meas_, detections);
  intensity_ = prune_merge(prior, config_);
  pending_births_ = adaptive_births(detections, config_);
  return intensity_;
}

}  // namespace isac

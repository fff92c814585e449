#include "isac/tdd_detect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace isac {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> usable_symbol_indices(const OfdmGridConfig& grid) {
  std::vector<int> used;
  for (int m = 0; m < grid.n_symbols; ++m) {
    if (grid.tdd_mask[static_cast<std::size_t>(m)]) used.push_back(m);
  }
  return used;
}

/// Correlator against the masked steering vector of one (range, speed)
/// hypothesis set. Shares the Doppler combination across ranges.
class MatchedFilter {
 public:
  MatchedFilter(const OfdmGridConfig& grid, const CsiGrid& csi)
      : grid_(grid), csi_(csi), used_(usable_symbol_indices(grid)) {}

  /// A(r, v) = sum_{n,m} csi(n,m) exp(+j2 pi n df tau) exp(-j2 pi m T fD)
  /// for every range in `ranges` at one speed.
  void correlate(double speed, const std::vector<double>& ranges,
                 std::vector<cplx>& out) const {
    const double fd = 2.0 * speed * grid_.carrier_hz / kSpeedOfLight;
    const double rate = -2.0 * kPi * grid_.symbol_duration_s * fd;
    Eigen::VectorXcd col = Eigen::VectorXcd::Zero(grid_.n_subcarriers);
    for (int m : used_) {
      col += csi_.col(m) * std::polar(1.0, rate * m);
    }
    out.resize(ranges.size());
    for (std::size_t k = 0; k < ranges.size(); ++k) {
      const double tau = 2.0 * ranges[k] / kSpeedOfLight;
      const cplx step = std::polar(1.0, 2.0 * kPi * grid_.subcarrier_spacing_hz * tau);
      cplx phase(1.0, 0.0);
      cplx acc(0.0, 0.0);
      for (int n = 0; n < grid_.n_subcarriers; ++n) {
        acc += col[n] * phase;
        phase *= step;
      }
      out[k] = acc;
    }
  }

  cplx at(double range, double speed) const {
    std::vector<cplx> one;
    correlate(speed, {range}, one);
    return one[0];
  }

  double power_at(double range, double speed) const {
    return std::norm(at(range, speed));
  }

  int n_usable() const { return static_cast<int>(used_.size()); }

 private:
  const OfdmGridConfig& grid_;
  const CsiGrid& csi_;
  std::vector<int> used_;
};

struct PeakFit {
  double range_m = 0.0;
  double speed_mps = 0.0;
  cplx amp{0.0, 0.0};
  double power = 0.0;  // |A|^2 at the fit
};

/// Parabolic vertex of three log-power samples, clamped to half a step.
double parabolic_offset(double l, double c, double r) {
  const double denom = l - 2.0 * c + r;
  if (!(std::abs(denom) > 1e-12)) return 0.0;
  return std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
}

/// Local grid search around (r0, v0): quarter-bin sweep over +-1.5 bins,
/// fine sweep at 1/refine_factor, then a parabolic vertex on the fine grid.
PeakFit refine_peak(const OfdmGridConfig& grid, const MatchedFilter& mf,
                    double r0, double v0, int refine_factor) {
  const double rbin = grid.range_resolution_m();
  const double vbin = grid.speed_resolution_mps();

  auto sweep = [&](double rc, double vc, double step_bins, int half) {
    std::vector<double> ranges, speeds;
    for (int i = -half; i <= half; ++i) {
      ranges.push_back(rc + i * step_bins * rbin);
      speeds.push_back(vc + i * step_bins * vbin);
    }
    Eigen::MatrixXd pw(ranges.size(), speeds.size());
    std::vector<cplx> col;
    for (std::size_t j = 0; j < speeds.size(); ++j) {
      mf.correlate(speeds[j], ranges, col);
      for (std::size_t i = 0; i < ranges.size(); ++i) {
        pw(static_cast<int>(i), static_cast<int>(j)) = std::norm(col[i]);
      }
    }
    int bi = 0, bj = 0;
    pw.maxCoeff(&bi, &bj);
    struct SweepResult {
      double range, speed, step;
      double dlog_r, dlog_v;  // parabolic offsets in steps
    } res{ranges[static_cast<std::size_t>(bi)],
          speeds[static_cast<std::size_t>(bj)], step_bins, 0.0, 0.0};
    auto logp = [&](int i, int j) {
      return 10.0 * std::log10(std::max(pw(i, j), 1e-300));
    };
    if (bi > 0 && bi + 1 < pw.rows()) {
      res.dlog_r = parabolic_offset(logp(bi - 1, bj), logp(bi, bj),
                                    logp(bi + 1, bj));
    }
    if (bj > 0 && bj + 1 < pw.cols()) {
      res.dlog_v = parabolic_offset(logp(bi, bj - 1), logp(bi, bj),
                                    logp(bi, bj + 1));
    }
    return res;
  };

  auto coarse = sweep(r0, v0, 0.25, 6);
  const double fine_step = 1.0 / refine_factor;
  const int fine_half = std::max(1, static_cast<int>(0.25 / fine_step + 0.5));
  auto fine = sweep(coarse.range, coarse.speed, fine_step, fine_half);

  PeakFit fit;
  fit.range_m = fine.range + fine.dlog_r * fine.step * rbin;
  fit.speed_mps = fine.speed + fine.dlog_v * fine.step * vbin;
  fit.amp = mf.at(fit.range_m, fit.speed_mps);
  fit.power = std::norm(fit.amp);
  fit.amp /= static_cast<double>(grid.n_subcarriers) * mf.n_usable();
  return fit;
}

double wrap_speed(double v, double half_span) {
  const double span = 2.0 * half_span;
  return v - span * std::floor((v + half_span) / span);
}

bool near_cell(double r1, double v1, double r2, double v2, double rres,
               double vres) {
  return std::abs(r1 - r2) < rres && std::abs(v1 - v2) < vres;
}

double median_power_db(const Periodogram& p) {
  std::vector<double> vals(p.power_db.data(),
                           p.power_db.data() + p.power_db.size());
  auto mid = vals.begin() + vals.size() / 2;
  std::nth_element(vals.begin(), mid, vals.end());
  return *mid;
}

}  // namespace

std::vector<int> mask_sidelobe_offsets(const OfdmGridConfig& grid, int top_k) {
  grid.validate();
  const int m_total = grid.n_symbols;
  if (grid.usable_symbols() == m_total || top_k <= 0) return {};

  std::vector<double> mag(static_cast<std::size_t>(m_total / 2) + 1, 0.0);
  for (int j = 1; j <= m_total / 2; ++j) {
    cplx acc(0.0, 0.0);
    for (int m = 0; m < m_total; ++m) {
      if (grid.tdd_mask[static_cast<std::size_t>(m)]) {
        acc += std::polar(1.0, -2.0 * kPi * j * m / m_total);
      }
    }
    mag[static_cast<std::size_t>(j)] = std::abs(acc);
  }
  const double floor = 1e-6 * grid.usable_symbols();
  std::vector<int> picked;
  while (static_cast<int>(picked.size()) < top_k) {
    int best = 0;
    double best_mag = floor;
    for (int j = 1; j <= m_total / 2; ++j) {
      bool taken = std::any_of(picked.begin(), picked.end(), [&](int q) {
        return std::abs(q - j) <= 2;
      });
      if (!taken && mag[static_cast<std::size_t>(j)] > best_mag) {
        best = j;
        best_mag = mag[static_cast<std::size_t>(j)];
      }
    }
    if (best == 0) break;
    picked.push_back(best);
  }
  return picked;
}

std::vector<Detection> naive_cfar_detect(const OfdmGridConfig& grid,
                                         const CsiGrid& csi,
                                         const CfarConfig& config) {
  Periodogram p = periodogram(grid, csi);
  std::vector<Detection> out;
  for (const auto& d : ca_cfar(p, config)) {
    out.push_back({p.range_axis_m[static_cast<std::size_t>(d.range_bin)],
                   p.speed_axis_mps[static_cast<std::size_t>(d.speed_bin)],
                   d.power_db});
  }
  return out;
}

std::vector<Detection> tdd_peak_detect(const OfdmGridConfig& grid,
                                       const CsiGrid& csi,
                                       const TddDetectConfig& config) {
  grid.validate();
  if (config.refine_factor < 4) {
    throw std::invalid_argument("refine_factor must be >= 4");
  }
  const auto offsets = mask_sidelobe_offsets(grid, config.ghost_offsets);
  const double rres = grid.range_resolution_m();
  const double vres = grid.speed_resolution_mps();
  const double vmax = grid.unambiguous_speed_mps();

  CsiGrid residual = csi;
  const double norm0 = periodogram(grid, csi).norm_linear;
  if (norm0 <= 0.0) return {};

  std::vector<Detection> accepted;
  std::vector<std::pair<double, double>> rejected;

  auto near_any = [&](double r, double v,
                      const auto& getter, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      auto [rr, vv] = getter(i);
      if (near_cell(r, v, rr, vv, rres, vres)) return true;
    }
    return false;
  };
  auto near_accepted = [&](double r, double v) {
    return near_any(
        r, v,
        [&](std::size_t i) {
          return std::pair<double, double>{accepted[i].range_m,
                                           accepted[i].speed_mps};
        },
        accepted.size());
  };
  auto near_rejected = [&](double r, double v) {
    return near_any(
        r, v, [&](std::size_t i) { return rejected[i]; }, rejected.size());
  };

  while (static_cast<int>(accepted.size()) < config.max_peaks) {
    Periodogram p = periodogram(grid, residual);
    auto cands = ca_cfar(p, config.cfar);
    std::sort(cands.begin(), cands.end(),
              [](const CfarDetection& a, const CfarDetection& b) {
                return a.power_db > b.power_db;
              });
    const double scale_db =
        10.0 * std::log10(std::max(p.norm_linear, 1e-300) / norm0);
    const double noise_db = median_power_db(p) + scale_db;

    MatchedFilter mf(grid, residual);
    bool advanced = false;
    for (const auto& c : cands) {
      const double r0 = p.range_axis_m[static_cast<std::size_t>(c.range_bin)];
      const double v0 = p.speed_axis_mps[static_cast<std::size_t>(c.speed_bin)];
      if (near_accepted(r0, v0) || near_rejected(r0, v0)) continue;

      PeakFit fit = refine_peak(grid, mf, r0, v0, config.refine_factor);
      if (near_accepted(fit.range_m, fit.speed_mps)) {
        rejected.emplace_back(r0, v0);
        continue;
      }

      PointTarget t{fit.range_m, fit.speed_mps,
                    20.0 * std::log10(std::max(std::abs(fit.amp), 1e-300)),
                    std::arg(fit.amp)};
      CsiGrid next = residual - synthesize_target_response(grid, t);

      // A real echo predicts measurable sidelobes and the fitted model
      // explains them away; for a ghost or noise lump the summed power at
      // the predicted offsets either drowns in the floor or survives the
      // subtraction. Summing keeps one lucky noise cell from deciding.
      bool accept = offsets.empty();
      if (!offsets.empty()) {
        MatchedFilter mf_next(grid, next);
        double before_total = 0.0;
        double after_total = 0.0;
        int cells = 0;
        for (int off : offsets) {
          for (int sign : {1, -1}) {
            const double vg =
                wrap_speed(fit.speed_mps + sign * off * vres, vmax);
            before_total += mf.power_at(fit.range_m, vg);
            after_total += mf_next.power_at(fit.range_m, vg);
            ++cells;
          }
        }
        const double floor_total =
            cells * std::pow(10.0, (noise_db + 6.0) / 10.0) * norm0;
        accept = before_total >= floor_total &&
                 10.0 * std::log10(before_total /
                                   std::max(after_total, 1e-300)) >=
                     config.sidelobe_drop_db;
      }

      if (accept) {
        accepted.push_back({fit.range_m, fit.speed_mps,
                            10.0 * std::log10(fit.power / norm0)});
        residual = std::move(next);
        advanced = true;
        break;
      }
      rejected.emplace_back(r0, v0);
      rejected.emplace_back(fit.range_m, fit.speed_mps);
    }
    if (!advanced) break;
  }
  return accepted;
}

std::vector<Detection> gate_detections(const std::vector<Detection>& dets,
                                       const GateConfig& gate) {
  std::vector<Detection> out;
  for (const auto& d : dets) {
    if (d.range_m >= gate.min_range_m && d.range_m <= gate.max_range_m &&
        d.speed_mps >= gate.min_speed_mps &&
        d.speed_mps <= gate.max_speed_mps &&
        d.power_db >= gate.min_power_db) {
      out.push_back(d);
    }
  }
  return out;
}

}  // namespace isac

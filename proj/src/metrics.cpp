#include "isac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace isac {

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) {
    throw std::invalid_argument("cost matrix must be square");
  }
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return {};
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Shortest augmenting path with row/column potentials; p[j] is the row
  // currently assigned to column j, index 0 is the virtual root.
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0) {
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] =
          j - 1;
    }
  }
  return row_to_col;
}

AssociationResult associate_frame(const std::vector<ObjectState>& truths,
                                  const std::vector<Estimate>& estimates,
                                  const AssociationGate& gate) {
  const int nt = static_cast<int>(truths.size());
  const int ne = static_cast<int>(estimates.size());
  AssociationResult res;
  if (nt == 0 || ne == 0) {
    for (int i = 0; i < nt; ++i) res.unmatched_truths.push_back(i);
    for (int j = 0; j < ne; ++j) res.unmatched_estimates.push_back(j);
    return res;
  }

  const int n = std::max(nt, ne);
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i >= nt || j >= ne) continue;  // padding rows/cols are free
      const double dr =
          std::abs(truths[static_cast<std::size_t>(i)].range_m -
                   estimates[static_cast<std::size_t>(j)].range_m);
      const double dv =
          std::abs(truths[static_cast<std::size_t>(i)].speed_mps -
                   estimates[static_cast<std::size_t>(j)].speed_mps);
      cost(i, j) = (dr <= gate.range_gate_m && dv <= gate.speed_gate_mps)
                       ? dr / gate.range_gate_m + dv / gate.speed_gate_mps
                       : kGateSentinel;
    }
  }

  const auto assign = hungarian(cost);
  std::vector<bool> est_matched(static_cast<std::size_t>(ne), false);
  for (int i = 0; i < nt; ++i) {
    const int j = assign[static_cast<std::size_t>(i)];
    if (j < ne && cost(i, j) < kGateSentinel / 2.0) {
      res.matches.emplace_back(i, j);
      est_matched[static_cast<std::size_t>(j)] = true;
    } else {
      res.unmatched_truths.push_back(i);
    }
  }
  for (int j = 0; j < ne; ++j) {
    if (!est_matched[static_cast<std::size_t>(j)]) {
      res.unmatched_estimates.push_back(j);
    }
  }
  return res;
}

double windowed_pd(const Scenario& scenario,
                   const std::vector<std::vector<int>>& matched, int window) {
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("window must be odd and positive");
  }
  const int frames = static_cast<int>(matched.size());
  const int half = window / 2;
  long alive_total = 0;
  long detected_total = 0;
  for (std::size_t t = 0; t < scenario.trajectories.size(); ++t) {
    const auto& tr = scenario.trajectories[t];
    for (int k = tr.birth_frame; k < tr.death_frame() && k < frames; ++k) {
      ++alive_total;
      bool hit = false;
      const int lo = std::max({k - half, tr.birth_frame, 0});
      const int hi = std::min({k + half, tr.death_frame() - 1, frames - 1});
      for (int w = lo; w <= hi && !hit; ++w) {
        const auto& ids = matched[static_cast<std::size_t>(w)];
        hit = std::find(ids.begin(), ids.end(), static_cast<int>(t)) !=
              ids.end();
      }
      if (hit) ++detected_total;
    }
  }
  return alive_total > 0
             ? static_cast<double>(detected_total) / static_cast<double>(alive_total)
             : 0.0;
}

double false_alarms_per_scan(const std::vector<int>& unmatched_counts) {
  if (unmatched_counts.empty()) return 0.0;
  long sum = 0;
  for (int c : unmatched_counts) sum += c;
  return static_cast<double>(sum) / static_cast<double>(unmatched_counts.size());
}

std::vector<double> smoothed_cardinality(const std::vector<int>& counts,
                                         int window) {
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("window must be odd and positive");
  }
  const int n = static_cast<int>(counts.size());
  const int half = window / 2;
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    const int lo = std::max(0, k - half);
    const int hi = std::min(n - 1, k + half);
    long sum = 0;
    for (int i = lo; i <= hi; ++i) sum += counts[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(k)] =
        static_cast<double>(sum) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace isac

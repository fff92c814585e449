#include "isac/cfar.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

std::vector<CfarDetection> ca_cfar(const Periodogram& map,
                                   const CfarConfig& config) {
  if (config.guard_range < 0 || config.guard_speed < 0 ||
      config.train_range < 1 || config.train_speed < 1 ||
      !(config.pfa > 0.0) || !(config.pfa < 1.0)) {
    throw std::invalid_argument("CFAR window or pfa out of range");
  }
  const int nr = map.n_range();
  const int ns = map.n_speed();

  Eigen::MatrixXd lin(nr, ns);
  for (int j = 0; j < ns; ++j) {
    for (int i = 0; i < nr; ++i) {
      lin(i, j) = std::pow(10.0, map.power_db(i, j) / 10.0);
    }
  }

  // Summed-area table: integral(i, j) = sum of lin over [0,i) x [0,j).
  Eigen::MatrixXd integral = Eigen::MatrixXd::Zero(nr + 1, ns + 1);
  for (int i = 0; i < nr; ++i) {
    double row = 0.0;
    for (int j = 0; j < ns; ++j) {
      row += lin(i, j);
      integral(i + 1, j + 1) = integral(i, j + 1) + row;
    }
  }
  auto boxsum = [&](int r0, int r1, int s0, int s1) {
    r0 = std::max(r0, 0);
    s0 = std::max(s0, 0);
    r1 = std::min(r1, nr - 1);
    s1 = std::min(s1, ns - 1);
    if (r0 > r1 || s0 > s1) return std::pair<double, int>{0.0, 0};
    double s = integral(r1 + 1, s1 + 1) - integral(r0, s1 + 1) -
               integral(r1 + 1, s0) + integral(r0, s0);
    return std::pair<double, int>{s, (r1 - r0 + 1) * (s1 - s0 + 1)};
  };

  const int gr = config.guard_range, gs = config.guard_speed;
  const int wr = gr + config.train_range, ws = gs + config.train_speed;
  std::vector<CfarDetection> out;
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < ns; ++j) {
      auto [outer, n_outer] = boxsum(i - wr, i + wr, j - ws, j + ws);
      auto [inner, n_inner] = boxsum(i - gr, i + gr, j - gs, j + gs);
      const int n_train = n_outer - n_inner;
      if (n_train <= 0) continue;
      const double alpha =
          n_train * (std::pow(config.pfa, -1.0 / n_train) - 1.0);
      const double threshold = alpha * (outer - inner) / n_train;
      if (lin(i, j) > threshold) {
        out.push_back({i, j, map.power_db(i, j),
                       threshold > 0.0 ? 10.0 * std::log10(threshold)
                                       : -300.0});
      }
    }
  }
  return out;
}

}  // namespace isac

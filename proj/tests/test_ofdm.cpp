#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "isac/common.hpp"
#include "isac/ofdm.hpp"
#include "isac/periodogram.hpp"

using namespace isac;

namespace {

double frob2(const CsiGrid& m) { return m.squaredNorm(); }

std::pair<int, int> argmax_cell(const Periodogram& p) {
  int bi = 0, bj = 0;
  p.power_db.maxCoeff(&bi, &bj);
  return {bi, bj};
}

}  // namespace

TEST_CASE("numerology of the two grid scales") {
  const auto desk = OfdmGridConfig::desk_scale();
  const auto full = OfdmGridConfig::full_scale();

  CHECK(desk.n_subcarriers == 256);
  CHECK(desk.n_symbols == 112);
  CHECK(desk.subcarrier_spacing_hz == 480e3);
  CHECK(full.n_subcarriers == 1024);
  CHECK(full.n_symbols == 1120);
  CHECK(full.subcarrier_spacing_hz == 120e3);

  // Range resolution c / (2 N df), speed resolution lambda / (2 M T).
  const double rres = kSpeedOfLight / (2.0 * 256 * 480e3);
  CHECK(desk.range_resolution_m() == doctest::Approx(rres).epsilon(1e-12));
  const double lambda = kSpeedOfLight / desk.carrier_hz;
  const double vres = lambda / (2.0 * 112 * desk.symbol_duration_s);
  CHECK(desk.speed_resolution_mps() == doctest::Approx(vres).epsilon(1e-12));

  // Both scales span the same bandwidth and frame duration, so the
  // resolutions and unambiguous extents coincide.
  CHECK(desk.range_resolution_m() ==
        doctest::Approx(full.range_resolution_m()).epsilon(1e-12));
  CHECK(desk.speed_resolution_mps() ==
        doctest::Approx(full.speed_resolution_mps()).epsilon(1e-12));
  CHECK(desk.unambiguous_range_m() ==
        doctest::Approx(full.unambiguous_range_m()).epsilon(1e-12));
  CHECK(desk.frame_duration_s() == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(full.frame_duration_s() == doctest::Approx(0.01).epsilon(1e-12));

  CHECK(desk.unambiguous_range_m() ==
        doctest::Approx(256 * desk.range_resolution_m()).epsilon(1e-12));
  CHECK(2.0 * desk.unambiguous_speed_mps() ==
        doctest::Approx(112 * desk.speed_resolution_mps()).epsilon(1e-12));
}

TEST_CASE("TDD mask generator") {
  const auto mask = make_tdd_mask(112, 14, 8);
  REQUIRE(mask.size() == 112u);
  int usable = 0;
  for (std::size_t m = 0; m < mask.size(); ++m) {
    CHECK(mask[m] == mask[m % 14]);
    CHECK(mask[m] == ((m % 14) < 8 ? 1 : 0));
    usable += mask[m];
  }
  CHECK(usable == 64);

  const auto desk = OfdmGridConfig::desk_scale();
  CHECK(desk.usable_symbols() == 64);
  CHECK(OfdmGridConfig::full_scale().usable_symbols() == 1120 / 70 * 42);

  CHECK_THROWS_AS(make_tdd_mask(112, 14, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_tdd_mask(112, 14, 15), std::invalid_argument);
  CHECK_THROWS_AS(make_tdd_mask(0, 14, 8), std::invalid_argument);
}

TEST_CASE("grid validation rejects inconsistent configs") {
  auto g = OfdmGridConfig::desk_scale();
  CHECK_NOTHROW(g.validate());
  g.tdd_mask.pop_back();
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = OfdmGridConfig::desk_scale();
  g.tdd_mask.assign(g.tdd_mask.size(), 0);
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = OfdmGridConfig::desk_scale();
  g.n_subcarriers = 0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("single on-bin target concentrates in one periodogram cell") {
  auto grid = OfdmGridConfig::desk_scale();
  grid.tdd_mask = make_tdd_mask(grid.n_symbols, 14, 14);  // no blanking
  const double rres = grid.range_resolution_m();
  const double vres = grid.speed_resolution_mps();
  const int r_bin = 24, v_bin_offset = 5;
  const PointTarget t{r_bin * rres, v_bin_offset * vres, 0.0, 0.7};

  const CsiGrid csi = synthesize_target_response(grid, t);
  const Periodogram p = periodogram(grid, csi);

  const auto [bi, bj] = argmax_cell(p);
  CHECK(bi == r_bin);
  CHECK(bj == grid.n_symbols / 2 + v_bin_offset);
  CHECK(p.range_axis_m[static_cast<std::size_t>(bi)] ==
        doctest::Approx(t.range_m).epsilon(1e-9));
  CHECK(p.speed_axis_mps[static_cast<std::size_t>(bj)] ==
        doctest::Approx(t.speed_mps).epsilon(1e-9));
  CHECK(p.power_db(bi, bj) == 0.0);

  // Unit amplitude coherently summed over all N * M cells.
  const double nm = static_cast<double>(grid.n_subcarriers) * grid.n_symbols;
  CHECK(p.norm_linear == doctest::Approx(nm * nm).epsilon(1e-9));

  double second = -1e9;
  for (int i = 0; i < p.n_range(); ++i) {
    for (int j = 0; j < p.n_speed(); ++j) {
      if (i == bi && j == bj) continue;
      second = std::max(second, p.power_db(i, j));
    }
  }
  CHECK(second < -250.0);
}

TEST_CASE("TDD mask spreads an on-bin target into a Doppler comb") {
  const auto grid = OfdmGridConfig::desk_scale();  // 8-of-14 mask
  const double rres = grid.range_resolution_m();
  const double vres = grid.speed_resolution_mps();
  const PointTarget t{24 * rres, 5 * vres, 0.0, 0.0};
  const Periodogram p = periodogram(grid, synthesize_target_response(grid, t));

  // 112/gcd(112,14-period comb) -> lines every 112/14 = 8 Doppler bins.
  const int mainlobe = grid.n_symbols / 2 + 5;
  for (int k = -6; k <= 6; ++k) {
    const int j = mainlobe + 8 * k;
    if (j < 0 || j >= p.n_speed()) continue;
    if (8 * k == 0) continue;
    const double off_line = p.power_db(24, (j + 4) % p.n_speed());
    CHECK(p.power_db(24, j) > -40.0);
    CHECK(off_line < -250.0);
  }
  // Strongest sidelobe pair sits 8 bins out, several dB below the mainlobe.
  CHECK(p.power_db(24, mainlobe) == 0.0);
  CHECK(p.power_db(24, mainlobe + 8) == doctest::Approx(-5.17).epsilon(0.05));
}

TEST_CASE("synthesize_csi blanks masked symbols and is seed reproducible") {
  const auto grid = OfdmGridConfig::desk_scale();
  const PointTarget t{30.0, 1.5, 0.0, 0.2};
  auto rng1 = make_rng(9, 1);
  auto rng2 = make_rng(9, 1);
  const CsiGrid a = synthesize_csi(grid, {t}, {}, -20.0, rng1);
  const CsiGrid b = synthesize_csi(grid, {t}, {}, -20.0, rng2);
  CHECK(a == b);

  for (int m = 0; m < grid.n_symbols; ++m) {
    if (!grid.tdd_mask[static_cast<std::size_t>(m)]) {
      CHECK(a.col(m).norm() == 0.0);
    } else {
      CHECK(a.col(m).norm() > 0.0);
    }
  }
}

TEST_CASE("noise level matches the configured power") {
  const auto grid = OfdmGridConfig::desk_scale();
  auto rng = make_rng(4, 2);
  const CsiGrid n = synthesize_csi(grid, {}, {}, -10.0, rng);
  const double mean_power =
      frob2(n) / (grid.n_subcarriers * grid.usable_symbols());
  CHECK(mean_power == doctest::Approx(0.1).epsilon(0.02));
}

TEST_CASE("clutter taps are static scatterers at the configured power") {
  const auto grid = OfdmGridConfig::desk_scale();
  const double rres = grid.range_resolution_m();
  const ClutterTap tap{20 * rres, 14.0, 0.4};
  auto rng = make_rng(4, 3);
  const CsiGrid c = synthesize_csi(grid, {}, {tap}, -300.0, rng);
  const Periodogram p = periodogram(grid, c);
  const auto [bi, bj] = argmax_cell(p);
  CHECK(bi == 20);
  CHECK(p.speed_axis_mps[static_cast<std::size_t>(bj)] == 0.0);
  const double nm = static_cast<double>(grid.n_subcarriers) *
                    grid.usable_symbols();
  CHECK(p.norm_linear ==
        doctest::Approx(std::pow(10.0, 1.4) * nm * nm).epsilon(1e-6));
}

TEST_CASE("resynthesized response cancels the echo it models") {
  const auto grid = OfdmGridConfig::desk_scale();
  const PointTarget t{33.7, -2.1, -3.0, 1.1};
  auto rng = make_rng(4, 4);
  const CsiGrid noisy = synthesize_csi(grid, {t}, {}, -120.0, rng);
  const CsiGrid residual = noisy - synthesize_target_response(grid, t);
  CHECK(frob2(residual) / frob2(noisy) < 1e-10);
}

TEST_CASE("extract_csi divides received by transmitted on usable symbols") {
  const auto grid = OfdmGridConfig::desk_scale();
  const PointTarget t{25.0, 1.0, 0.0, 0.0};
  const CsiGrid h = synthesize_target_response(grid, t);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 2.0 * 3.14159);
  Eigen::MatrixXcd tx(grid.n_subcarriers, grid.n_symbols);
  for (int m = 0; m < grid.n_symbols; ++m) {
    for (int n = 0; n < grid.n_subcarriers; ++n) {
      tx(n, m) = std::polar(1.0, u(rng));  // unit-modulus symbols
    }
  }
  const Eigen::MatrixXcd rx = h.cwiseProduct(tx);
  const CsiGrid est = extract_csi(grid, rx, tx);
  CHECK((est - h).norm() / h.norm() < 1e-12);

  // Blanked symbols and zero-energy tx cells give zero.
  Eigen::MatrixXcd tx0 = tx;
  tx0(3, 0) = 0.0;
  const CsiGrid est0 = extract_csi(grid, rx, tx0);
  CHECK(est0(3, 0) == cplx(0.0, 0.0));
  for (int m = 0; m < grid.n_symbols; ++m) {
    if (!grid.tdd_mask[static_cast<std::size_t>(m)]) {
      CHECK(est.col(m).norm() == 0.0);
    }
  }
}

TEST_CASE("periodogram rejects mismatched input") {
  const auto grid = OfdmGridConfig::desk_scale();
  const CsiGrid wrong = CsiGrid::Zero(grid.n_subcarriers, grid.n_symbols - 1);
  CHECK_THROWS_AS(periodogram(grid, wrong), std::invalid_argument);
  const CsiGrid ok = CsiGrid::Zero(grid.n_subcarriers, grid.n_symbols);
  CHECK_THROWS_AS(periodogram(grid, ok, 0), std::invalid_argument);
}

TEST_CASE("zero padding refines the axes without moving the peak") {
  const auto grid = OfdmGridConfig::desk_scale();
  const PointTarget t{30.2, 1.3, 0.0, 0.0};
  const CsiGrid csi = synthesize_target_response(grid, t);
  const Periodogram p1 = periodogram(grid, csi, 1);
  const Periodogram p4 = periodogram(grid, csi, 4);
  CHECK(p4.n_range() == 4 * p1.n_range());
  CHECK(p4.n_speed() == 4 * p1.n_speed());
  CHECK(p4.range_step_m() == doctest::Approx(p1.range_step_m() / 4.0));
  const auto [i1, j1] = argmax_cell(p1);
  const auto [i4, j4] = argmax_cell(p4);
  const double r1 = p1.range_axis_m[static_cast<std::size_t>(i1)];
  const double r4 = p4.range_axis_m[static_cast<std::size_t>(i4)];
  CHECK(std::abs(r4 - t.range_m) <= std::abs(r1 - t.range_m) + 1e-12);
  CHECK(std::abs(r4 - t.range_m) < p4.range_step_m());
  const double v4 = p4.speed_axis_mps[static_cast<std::size_t>(j4)];
  CHECK(std::abs(v4 - t.speed_mps) < p4.speed_step_mps());
}

#include "isac/periodogram.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace isac {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  fftw_complex* data = nullptr;
  explicit FftwBuffer(std::size_t n) {
    data = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

double window_gain(Window w, int k, int len) {
  if (w == Window::rectangular) return 1.0;
  return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / (len - 1));
}

}  // namespace

Periodogram periodogram(const OfdmGridConfig& grid, const CsiGrid& csi,
                        int zero_pad, Window window) {
  grid.validate();
  if (csi.rows() != grid.n_subcarriers || csi.cols() != grid.n_symbols) {
    throw std::invalid_argument("CSI dimensions do not match the grid");
  }
  if (zero_pad < 1) throw std::invalid_argument("zero_pad must be >= 1");

  const int nr = grid.n_subcarriers * zero_pad;
  const int ns = grid.n_symbols * zero_pad;
  FftwBuffer buf(static_cast<std::size_t>(nr) * ns);
  auto at = [&](int n, int m) -> fftw_complex& {
    return buf.data[static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(nr) * m];
  };
  for (int m = 0; m < ns; ++m) {
    for (int n = 0; n < nr; ++n) {
      at(n, m)[0] = 0.0;
      at(n, m)[1] = 0.0;
    }
  }
  for (int m = 0; m < grid.n_symbols; ++m) {
    const double wm = window_gain(window, m, grid.n_symbols);
    for (int n = 0; n < grid.n_subcarriers; ++n) {
      const double wn = wm * window_gain(window, n, grid.n_subcarriers);
      const cplx v = csi(n, m) * wn;
      at(n, m)[0] = v.real();
      at(n, m)[1] = v.imag();
    }
  }

  {
    std::scoped_lock lock(planner_mutex());
    fftw_plan over_n = fftw_plan_many_dft(
        1, &nr, ns, buf.data, nullptr, 1, nr, buf.data, nullptr, 1, nr,
        FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_plan over_m = fftw_plan_many_dft(
        1, &ns, nr, buf.data, nullptr, nr, 1, buf.data, nullptr, nr, 1,
        FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(over_n);
    fftw_execute(over_m);
    fftw_destroy_plan(over_n);
    fftw_destroy_plan(over_m);
  }

  Periodogram out;
  out.zero_pad = zero_pad;
  out.power_db.resize(nr, ns);
  Eigen::MatrixXd& p = out.power_db;
  const int half = ns / 2;
  double peak = 0.0;
  for (int j = 0; j < ns; ++j) {
    const int src = (j + half) % ns;  // centered speed axis
    for (int n = 0; n < nr; ++n) {
      const double re = at(n, src)[0];
      const double im = at(n, src)[1];
      const double pw = re * re + im * im;
      p(n, j) = pw;
      peak = std::max(peak, pw);
    }
  }
  out.norm_linear = peak;
  const double floor_db = -300.0;
  const double eps = peak * 1e-30;
  for (int j = 0; j < ns; ++j) {
    for (int n = 0; n < nr; ++n) {
      p(n, j) = peak > 0.0 && p(n, j) > eps
                    ? std::max(10.0 * std::log10(p(n, j) / peak), floor_db)
                    : floor_db;
    }
  }

  out.range_axis_m.resize(static_cast<std::size_t>(nr));
  const double rstep = grid.unambiguous_range_m() / nr;
  for (int n = 0; n < nr; ++n) {
    out.range_axis_m[static_cast<std::size_t>(n)] = n * rstep;
  }
  out.speed_axis_mps.resize(static_cast<std::size_t>(ns));
  const double vstep = 2.0 * grid.unambiguous_speed_mps() / ns;
  for (int j = 0; j < ns; ++j) {
    out.speed_axis_mps[static_cast<std::size_t>(j)] = (j - half) * vstep;
  }
  return out;
}

CsiGrid extract_csi(const OfdmGridConfig& grid, const Eigen::MatrixXcd& rx,
                    const Eigen::MatrixXcd& tx) {
  grid.validate();
  if (rx.rows() != grid.n_subcarriers || rx.cols() != grid.n_symbols ||
      tx.rows() != rx.rows() || tx.cols() != rx.cols()) {
    throw std::invalid_argument("resource grid dimensions do not match");
  }
  CsiGrid h = CsiGrid::Zero(rx.rows(), rx.cols());
  for (int m = 0; m < grid.n_symbols; ++m) {
    if (!grid.tdd_mask[static_cast<std::size_t>(m)]) continue;
    for (int n = 0; n < grid.n_subcarriers; ++n) {
      const cplx t = tx(n, m);
      if (std::norm(t) > 0.0) h(n, m) = rx(n, m) / t;
    }
  }
  return h;
}

}  // namespace isac

#include "isac/clutter.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

CsiGrid eca_c_remove(const OfdmGridConfig& grid, const CsiGrid& csi,
                     int order) {
  grid.validate();
  if (csi.rows() != grid.n_subcarriers || csi.cols() != grid.n_symbols) {
    throw std::invalid_argument("CSI dimensions do not match the grid");
  }
  if (order < 1) throw std::invalid_argument("basis order must be >= 1");

  std::vector<int> used;
  for (int m = 0; m < grid.n_symbols; ++m) {
    if (grid.tdd_mask[static_cast<std::size_t>(m)]) used.push_back(m);
  }
  const int mu = static_cast<int>(used.size());
  order = std::min(order, mu);

  // Vandermonde in normalized time over the observed symbols, orthonormal
  // columns via thin QR.
  Eigen::MatrixXd vand(mu, order);
  for (int i = 0; i < mu; ++i) {
    double t = mu > 1 ? 2.0 * i / (mu - 1) - 1.0 : 0.0;
    double p = 1.0;
    for (int k = 0; k < order; ++k) {
      vand(i, k) = p;
      p *= t;
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vand);
  Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(mu, order);

  Eigen::MatrixXcd sub(csi.rows(), mu);
  for (int i = 0; i < mu; ++i) sub.col(i) = csi.col(used[static_cast<std::size_t>(i)]);
  Eigen::MatrixXcd coeffs = sub * q;           // N x order
  Eigen::MatrixXcd cleaned = sub - coeffs * q.transpose();

  CsiGrid out = csi;
  for (int i = 0; i < mu; ++i) out.col(used[static_cast<std::size_t>(i)]) = cleaned.col(i);
  return out;
}

ClutterBasis crap_acquire(const OfdmGridConfig& grid,
                          const std::vector<CsiGrid>& frames,
                          int n_components) {
  grid.validate();
  if (n_components < 0) {
    throw std::invalid_argument("component count must be >= 0");
  }
  ClutterBasis basis;
  basis.n_subcarriers = grid.n_subcarriers;
  basis.n_symbols = grid.n_symbols;
  if (n_components == 0 || frames.empty()) return basis;

  const int k = static_cast<int>(frames.size());
  for (const auto& f : frames) {
    if (f.rows() != grid.n_subcarriers || f.cols() != grid.n_symbols) {
      throw std::invalid_argument("frame dimensions do not match the grid");
    }
  }

  Eigen::MatrixXcd gram(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      cplx g = frames[static_cast<std::size_t>(j)]
                   .cwiseProduct(frames[static_cast<std::size_t>(i)].conjugate())
                   .sum();
      gram(i, j) = g;
      gram(j, i) = std::conj(g);
    }
  }
  const double total_energy = gram.real().trace();
  if (total_energy <= 0.0) return basis;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  n_components = std::min(n_components, k);
  for (int c = 0; c < n_components; ++c) {
    const int idx = k - 1 - c;  // eigenvalues come back ascending
    const double lambda = eig.eigenvalues()(idx);
    if (lambda <= 1e-12 * total_energy) break;
    CsiGrid comp = CsiGrid::Zero(grid.n_subcarriers, grid.n_symbols);
    for (int i = 0; i < k; ++i) {
      comp += eig.eigenvectors()(i, idx) * frames[static_cast<std::size_t>(i)];
    }
    comp /= std::sqrt(lambda);
    basis.components.push_back(std::move(comp));
    basis.energy_fraction.push_back(lambda / total_energy);
  }
  return basis;
}

CsiGrid crap_remove(const CsiGrid& csi, const ClutterBasis& basis) {
  if (basis.components.empty()) return csi;
  if (csi.rows() != basis.n_subcarriers || csi.cols() != basis.n_symbols) {
    throw std::invalid_argument("frame dimensions do not match the basis");
  }
  CsiGrid out = csi;
  for (const auto& b : basis.components) {
    const cplx coeff = out.cwiseProduct(b.conjugate()).sum();
    out -= coeff * b;
  }
  return out;
}

}  // namespace isac

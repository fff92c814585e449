#pragma once

#include <vector>

#include "isac/ofdm.hpp"

namespace isac {

/// Extensive cancellation, column-wise: per subcarrier, project the symbol
/// sequence onto an orthonormalized polynomial basis of the given order
/// (evaluated over the unmasked symbols only) and subtract the projection.
/// Order 1 removes the per-subcarrier mean; higher orders also track slow
/// drift, deepening the notch around zero Doppler.
CsiGrid eca_c_remove(const OfdmGridConfig& grid, const CsiGrid& csi,
                     int order = 3);

/// Clutter subspace learned from reference frames: the dominant principal
/// directions of the vectorized frames, orthonormal under the Frobenius
/// inner product.
struct ClutterBasis {
  int n_subcarriers = 0;
  int n_symbols = 0;
  std::vector<CsiGrid> components;
  std::vector<double> energy_fraction;  // eigenvalue / total frame energy
};

/// Principal component analysis of the frame set via its Gram matrix; keeps
/// the strongest n_components directions. n_components = 0 yields an empty
/// basis (removal is then the identity).
ClutterBasis crap_acquire(const OfdmGridConfig& grid,
                          const std::vector<CsiGrid>& frames,
                          int n_components);

/// Subtract the projection of the frame onto the acquired subspace.
CsiGrid crap_remove(const CsiGrid& csi, const ClutterBasis& basis);

}  // namespace isac

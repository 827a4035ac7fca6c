// Grid transfer operators for the cell-centered FAS hierarchy: full-weighting
// restriction and bilinear prolongation. Both preserve constants; restriction
// preserves the discrete mean on periodic grids.
#pragma once

#include "hf/grid.hpp"

namespace hf {

GridSpec coarse_grid(const GridSpec& fine);

// Full weighting with tensor weights [1/4, 1/2, 1/4] centered on the fine
// cell that shares the coarse sample position; exact volume average of the
// coarse cell and the adjoint of bilinear prolongation. Requires even m, n.
CellField restrict_fw(const CellField& fine, GhostKind kind = GhostKind::Scalar);

// Linear interpolation at fine cell positions from coarse samples. Prolonged
// fields are multigrid corrections; with `homogeneous` the channel wall rule
// for the tangential velocity drops the wall speed (corrections of two
// fields with the same wall value reflect plainly).
CellField prolong_bilinear(const CellField& coarse, const GridSpec& fine,
                           GhostKind kind = GhostKind::Scalar, bool homogeneous = true);

}  // namespace hf

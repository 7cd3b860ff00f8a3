#pragma once

// Quadrant-grid machinery around an extraordinary element. A SectorGrid holds
// values on n glued quadrant grids (plus the center for vertex schemes) and
// knows how to apply one subdivision step to itself; ValueGrid carries a
// rectangular regular patch through repeated mask upsampling for surface
// sampling on the ring cells.

#include <Eigen/Dense>
#include <vector>

#include "nssubdiv/mesh.hpp"
#include "nssubdiv/schemes.hpp"
#include "nssubdiv/symbols.hpp"

namespace nssubdiv::analyzer {

// A finite rectangular grid of values with dyadic positions: index (i, j)
// sits at (origin_a + i * spacing, origin_b + j * spacing) in level-1 sector
// units.
struct ValueGrid {
    int rows = 0, cols = 0, dim = 0;
    double origin_a = 0.0, origin_b = 0.0, spacing = 1.0;
    Eigen::MatrixXd v; // (rows * cols) x dim, row-major cells

    Eigen::VectorXd at(int i, int j) const { return v.row(i * cols + j); }
    double pos_a(int i) const { return origin_a + i * spacing; }
    double pos_b(int j) const { return origin_b + j * spacing; }
};

// One mask-upsampling step. `trim` keeps only outputs whose full stencil is
// covered (sampling a window of an infinite grid); without it the input is
// treated as genuinely compactly supported.
ValueGrid upsample(const ValueGrid& g, const symbols::Mask2D& mask, bool trim);

// Centered stencil application (same positions, trimmed border).
ValueGrid apply_centered_stencil(const ValueGrid& g, const std::vector<double>& w1d);

// Values on the sector quadrants; same slot layout as mesh::SectorGridIds.
struct SectorGrid {
    bool dual = false;
    int n = 0;
    int R = 0;
    int dim = 3;
    int level = 1; // spacing of the grid is 2^{1-level} in sector units
    Eigen::VectorXd center; // primal only
    Eigen::MatrixXd values; // (n * slots_per_sector) x dim

    int slots_per_sector() const { return dual ? R * R : R * (R + 1); }
    int slot_index(int sector, int a, int b) const {
        const int idx = dual ? (a * R + b) : ((a - 1) * (R + 1) + b);
        return sector * slots_per_sector() + idx;
    }
    // Cross-sector access with quadrant wraps; (0,0) yields the center for
    // vertex grids.
    Eigen::VectorXd at(int sector, int a, int b) const;

    int total_slots() const { return n * slots_per_sector() + (dual ? 0 : 1); }
    Eigen::VectorXd flatten() const;            // center first for vertex grids
    void unflatten(const Eigen::MatrixXd& columns);

    static SectorGrid from_patch(const mesh::LocalPatch& patch, const mesh::QuadMesh& m);

    // One subdivision step with the level-`level` rules of the scheme; the
    // result is the same window one level finer.
    SectorGrid refined(const schemes::SchemeDescriptor& s) const;

    // Values of the paper-ordered patch vector (the rows of d_k) read off the
    // grid; N = 4n for dual grids, 7n folded rows for vertex grids.
    Eigen::MatrixXd patch_rows() const;
};

// The window subdivision operator of the stationary scheme as a dense matrix
// over the flattened SectorGrid slots (used for the characteristic-map
// eigenvectors; block-triangular over the paper's local matrix).
Eigen::MatrixXd window_operator(const schemes::SchemeDescriptor& s, int n, int R, bool dual);

// Samples of one ring cell. Cell c of a sector covers, in level-k units,
// [0,1]x[1,2] (c = 0), [1,2]x[1,2] (c = 1) or [1,2]x[0,1] (c = 2).
struct CellSamples {
    int sector = 0, cell = 0, k = 1;
    ValueGrid grid; // positions within [cell box +- one sample spacing]
};

// Evaluate one cell of ring `grid.level` by gathering a regular subgrid and
// applying `depth` regular upsampling steps (mask levels level..level+depth-1).
// `limit_project` applies the scheme's limit stencil afterwards (stationary
// rules only).
CellSamples sample_cell(const SectorGrid& grid, const schemes::SchemeDescriptor& s, int sector,
                        int cell, int depth, bool limit_project = false);

} // namespace nssubdiv::analyzer

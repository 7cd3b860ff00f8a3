#include "nssubdiv/sector_grid.hpp"

#include <cmath>

namespace nssubdiv::analyzer {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ValueGrid upsample(const ValueGrid& g, const symbols::Mask2D& mask, bool trim) {
    if (mask.offset[0] != 0 || mask.offset[1] != 0) {
        raise(ErrorCode::InvalidParameter, "upsampling expects masks anchored at (0,0)");
    }
    const int mr = mask.rows, mc = mask.cols;
    ValueGrid out;
    out.dim = g.dim;
    out.spacing = g.spacing / 2.0;
    int base_a = 0, base_b = 0;
    if (trim) {
        if (g.rows < mr || g.cols < mc) {
            raise(ErrorCode::InvalidParameter, "grid too small for a trimmed upsample");
        }
        base_a = mr - 1;
        base_b = mc - 1;
        out.rows = 2 * g.rows - mr;
        out.cols = 2 * g.cols - mc;
    } else {
        out.rows = 2 * (g.rows - 1) + mr;
        out.cols = 2 * (g.cols - 1) + mc;
    }
    // New index t corresponds to alpha = t + base; position (alpha - L/2)/2
    // in old index units, L being the per-axis support length.
    out.origin_a = g.origin_a + g.spacing * (base_a - (mr - 1) / 2.0) / 2.0;
    out.origin_b = g.origin_b + g.spacing * (base_b - (mc - 1) / 2.0) / 2.0;

    out.v = MatrixXd::Zero(out.rows * out.cols, out.dim);
    for (int i = 0; i < out.rows; ++i) {
        const int alpha_a = i + base_a;
        for (int j = 0; j < out.cols; ++j) {
            const int alpha_b = j + base_b;
            auto row = out.v.row(i * out.cols + j);
            for (int ma = alpha_a % 2; ma < mr; ma += 2) {
                const int ba = (alpha_a - ma) / 2;
                if (ba < 0 || ba >= g.rows) continue;
                for (int mb = alpha_b % 2; mb < mc; mb += 2) {
                    const int bb = (alpha_b - mb) / 2;
                    if (bb < 0 || bb >= g.cols) continue;
                    const double w = mask.at(ma, mb);
                    if (w != 0.0) row += w * g.v.row(ba * g.cols + bb);
                }
            }
        }
    }
    return out;
}

ValueGrid apply_centered_stencil(const ValueGrid& g, const std::vector<double>& w1d) {
    const int len = static_cast<int>(w1d.size());
    const int half = len / 2;
    if (g.rows < len || g.cols < len) {
        raise(ErrorCode::InvalidParameter, "grid too small for the stencil");
    }
    ValueGrid out;
    out.dim = g.dim;
    out.spacing = g.spacing;
    out.rows = g.rows - 2 * half;
    out.cols = g.cols - 2 * half;
    out.origin_a = g.origin_a + half * g.spacing;
    out.origin_b = g.origin_b + half * g.spacing;
    out.v = MatrixXd::Zero(out.rows * out.cols, out.dim);
    for (int i = 0; i < out.rows; ++i) {
        for (int j = 0; j < out.cols; ++j) {
            auto row = out.v.row(i * out.cols + j);
            for (int s = 0; s < len; ++s) {
                for (int t = 0; t < len; ++t) {
                    row += w1d[static_cast<size_t>(s)] * w1d[static_cast<size_t>(t)] *
                           g.v.row((i + s) * g.cols + (j + t));
                }
            }
        }
    }
    return out;
}

VectorXd SectorGrid::at(int sector, int a, int b) const {
    if (mesh::SectorGridIds::resolve(dual, n, sector, a, b)) return center;
    return values.row(slot_index(sector, a, b));
}

VectorXd SectorGrid::flatten() const {
    const int total = total_slots();
    VectorXd out(total * dim);
    int pos = 0;
    if (!dual) {
        out.segment(0, dim) = center;
        pos = dim;
    }
    for (int r = 0; r < values.rows(); ++r) {
        out.segment(pos, dim) = values.row(r);
        pos += dim;
    }
    return out;
}

void SectorGrid::unflatten(const Eigen::MatrixXd& columns) {
    dim = static_cast<int>(columns.cols());
    int pos = 0;
    center = VectorXd::Zero(dim);
    if (!dual) {
        center = columns.row(0);
        pos = 1;
    }
    values = columns.bottomRows(columns.rows() - pos);
}

SectorGrid SectorGrid::from_patch(const mesh::LocalPatch& patch, const mesh::QuadMesh& m) {
    SectorGrid g;
    g.dual = patch.grid.dual;
    g.n = patch.grid.n;
    g.R = patch.grid.R;
    g.dim = 3;
    g.level = 1;
    g.center = VectorXd::Zero(3);
    if (!g.dual) g.center = m.vertices()[static_cast<size_t>(patch.grid.center)];
    g.values.resize(patch.grid.ids.size(), 3);
    for (size_t i = 0; i < patch.grid.ids.size(); ++i) {
        g.values.row(static_cast<Eigen::Index>(i)) =
            m.vertices()[static_cast<size_t>(patch.grid.ids[i])];
    }
    return g;
}

SectorGrid SectorGrid::refined(const schemes::SchemeDescriptor& s) const {
    SectorGrid out = *this;
    out.level = level + 1;
    out.values = MatrixXd::Zero(values.rows(), dim);

    if (!dual) {
        const schemes::PrimalStencils st = schemes::primal_stencils(s, level);
        const double a4 = st.coeff.a4, b4 = st.coeff.b4, c4 = st.coeff.c4;
        const double d = st.edge_d, e = st.edge_e;

        VectorXd cen = st.vertex_a(n) * center;
        for (int i = 0; i < n; ++i) {
            cen += st.vertex_b(n) * at(i, 1, 0) + st.vertex_c(n) * at(i, 1, 1);
        }
        out.center = cen;

        for (int i = 0; i < n; ++i) {
            for (int a = 1; a <= R; ++a) {
                for (int b = 0; b <= R; ++b) {
                    VectorXd val;
                    if (a % 2 == 0 && b % 2 == 0) {
                        const int p = a / 2, q = b / 2;
                        val = a4 * at(i, p, q) +
                              b4 * (at(i, p - 1, q) + at(i, p + 1, q) + at(i, p, q - 1) +
                                    at(i, p, q + 1)) +
                              c4 * (at(i, p - 1, q - 1) + at(i, p + 1, q - 1) +
                                    at(i, p - 1, q + 1) + at(i, p + 1, q + 1));
                    } else if (a % 2 == 1 && b % 2 == 0) {
                        const int lo = (a - 1) / 2, q = b / 2;
                        val = d * (at(i, lo, q) + at(i, lo + 1, q)) +
                              e * (at(i, lo, q - 1) + at(i, lo + 1, q - 1) +
                                   at(i, lo, q + 1) + at(i, lo + 1, q + 1));
                    } else if (a % 2 == 0) {
                        const int p = a / 2, lo = (b - 1) / 2;
                        val = d * (at(i, p, lo) + at(i, p, lo + 1)) +
                              e * (at(i, p - 1, lo) + at(i, p - 1, lo + 1) +
                                   at(i, p + 1, lo) + at(i, p + 1, lo + 1));
                    } else {
                        const int pa = (a - 1) / 2, pb = (b - 1) / 2;
                        val = 0.25 * (at(i, pa, pb) + at(i, pa + 1, pb) + at(i, pa, pb + 1) +
                                      at(i, pa + 1, pb + 1));
                    }
                    out.values.row(slot_index(i, a, b)) = val;
                }
            }
        }
        return out;
    }

    // Dual grid: every new value is a face point of the level-k control net.
    const schemes::TrigCoefficients t = schemes::trig_coefficients(s.param, level);
    const double c4 = t.cn(4);
    const double w_near = t.a + c4, w_side = t.b + c4, w_opp = c4;
    const std::vector<double> w_ngon = schemes::dual_face_weights(s, level, n);

    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < R; ++a) {
            for (int b = 0; b < R; ++b) {
                const int fi = (a + 1) >> 1, fj = (b + 1) >> 1;
                VectorXd val;
                if (fi == 0 && fj == 0) {
                    // Corner of the central n-gon closest to sector i.
                    val = VectorXd::Zero(dim);
                    for (int m2 = 0; m2 < n; ++m2) {
                        val += w_ngon[static_cast<size_t>((m2 - i + n) % n)] * at(m2, 0, 0);
                    }
                } else {
                    const int da = (a % 2 == 0) ? 0 : 1; // near corner storage offset
                    const int db = (b % 2 == 0) ? 0 : 1;
                    const int na = fi - da, nb = fj - db;       // nearest corner
                    const int ma = fi - (1 - da), mb = fj - (1 - db); // mirrored sides
                    val = w_near * at(i, na, nb) + w_side * (at(i, ma, nb) + at(i, na, mb)) +
                          w_opp * at(i, ma, mb);
                }
                out.values.row(slot_index(i, a, b)) = val;
            }
        }
    }
    return out;
}

Eigen::MatrixXd SectorGrid::patch_rows() const {
    if (dual) {
        MatrixXd d(4 * n, dim);
        const int order[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        for (int i = 0; i < n; ++i) {
            for (int r = 0; r < 4; ++r) {
                d.row(4 * i + r) = at(i, order[r][0], order[r][1]);
            }
        }
        return d;
    }
    MatrixXd d(7 * n, dim);
    const int order[6][2] = {{1, 0}, {1, 1}, {2, 0}, {2, 1}, {2, 2}, {1, 2}};
    for (int i = 0; i < n; ++i) {
        d.row(7 * i) = center;
        for (int r = 0; r < 6; ++r) {
            d.row(7 * i + 1 + r) = at(i, order[r][0], order[r][1]);
        }
    }
    return d;
}

Eigen::MatrixXd window_operator(const schemes::SchemeDescriptor& s, int n, int R, bool dual) {
    SectorGrid probe;
    probe.dual = dual;
    probe.n = n;
    probe.R = R;
    probe.dim = 1;
    probe.level = 1;
    probe.center = VectorXd::Zero(1);
    probe.values = MatrixXd::Zero(n * probe.slots_per_sector(), 1);

    const int total = probe.total_slots();
    MatrixXd W(total, total);
    for (int col = 0; col < total; ++col) {
        MatrixXd unit = MatrixXd::Zero(total, 1);
        unit(col, 0) = 1.0;
        probe.unflatten(unit);
        W.col(col) = probe.refined(s).flatten();
    }
    return W;
}

namespace {

ValueGrid trim_to_box(const ValueGrid& g, double a0, double a1, double b0, double b1) {
    // Keep samples inside the box plus one spacing of overlap so that
    // neighboring cells share boundary samples.
    const double eps = 0.75 * g.spacing;
    int ilo = g.rows, ihi = -1, jlo = g.cols, jhi = -1;
    for (int i = 0; i < g.rows; ++i) {
        const double p = g.pos_a(i);
        if (p >= a0 - eps && p <= a1 + eps) {
            ilo = std::min(ilo, i);
            ihi = std::max(ihi, i);
        }
    }
    for (int j = 0; j < g.cols; ++j) {
        const double p = g.pos_b(j);
        if (p >= b0 - eps && p <= b1 + eps) {
            jlo = std::min(jlo, j);
            jhi = std::max(jhi, j);
        }
    }
    if (ihi < ilo || jhi < jlo) raise(ErrorCode::InvalidParameter, "empty sample window");
    ValueGrid out;
    out.dim = g.dim;
    out.spacing = g.spacing;
    out.rows = ihi - ilo + 1;
    out.cols = jhi - jlo + 1;
    out.origin_a = g.pos_a(ilo);
    out.origin_b = g.pos_b(jlo);
    out.v = MatrixXd::Zero(out.rows * out.cols, out.dim);
    for (int i = 0; i < out.rows; ++i) {
        for (int j = 0; j < out.cols; ++j) {
            out.v.row(i * out.cols + j) = g.v.row((i + ilo) * g.cols + (j + jlo));
        }
    }
    return out;
}

} // namespace

CellSamples sample_cell(const SectorGrid& grid, const schemes::SchemeDescriptor& s, int sector,
                        int cell, int depth, bool limit_project) {
    // Cell boxes in level-k sector units.
    const double boxes[3][4] = {{0, 1, 1, 2}, {1, 2, 1, 2}, {1, 2, 0, 1}};
    const int ca = static_cast<int>(boxes[cell][0]);
    const int cb = static_cast<int>(boxes[cell][2]);

    ValueGrid vg;
    vg.dim = grid.dim;
    vg.spacing = 1.0;
    if (grid.dual) {
        // 5x5 half-integer gather around the cell.
        vg.rows = vg.cols = 5;
        vg.origin_a = ca - 2 + 0.5;
        vg.origin_b = cb - 2 + 0.5;
        vg.v.resize(25, grid.dim);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                vg.v.row(i * 5 + j) = grid.at(sector, ca - 2 + i, cb - 2 + j);
            }
        }
    } else {
        // 6x6 integer gather.
        vg.rows = vg.cols = 6;
        vg.origin_a = ca - 2;
        vg.origin_b = cb - 2;
        vg.v.resize(36, grid.dim);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                vg.v.row(i * 6 + j) = grid.at(sector, ca - 2 + i, cb - 2 + j);
            }
        }
    }

    for (int step = 0; step < depth; ++step) {
        vg = upsample(vg, schemes::regular_mask(s, grid.level + step), true);
    }
    if (limit_project) {
        if (!s.stationary_rules()) {
            raise(ErrorCode::InvalidParameter,
                  "limit projection is only exact for stationary rules");
        }
        if (grid.dual) {
            vg = apply_centered_stencil(vg, {1.0 / 8.0, 6.0 / 8.0, 1.0 / 8.0});
        } else {
            vg = apply_centered_stencil(vg, {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0});
        }
    }

    CellSamples out;
    out.sector = sector;
    out.cell = cell;
    out.k = grid.level;
    out.grid = trim_to_box(vg, boxes[cell][0], boxes[cell][1], boxes[cell][2], boxes[cell][3]);
    return out;
}

} // namespace nssubdiv::analyzer

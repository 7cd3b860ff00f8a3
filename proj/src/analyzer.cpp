#include "nssubdiv/analyzer.hpp"

#include <algorithm>
#include <cmath>

namespace nssubdiv::analyzer {

using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;
using symbols::Mask2D;

namespace {

Hypothesis make_hyp(std::string name, bool pass) {
    Hypothesis h;
    h.name = std::move(name);
    h.status = pass ? "pass" : "fail";
    return h;
}

void check_compatible(const schemes::SchemeDescriptor& ns,
                      const schemes::SchemeDescriptor& stat) {
    if (ns.kind != stat.kind || ns.sector_size != stat.sector_size) {
        raise(ErrorCode::IncompatibleSchemes,
              "schemes act on different local structures (" + ns.id() + " vs " + stat.id() + ")");
    }
}

void finish(ConditionReport& r) {
    r.overall = true;
    for (const auto& h : r.hypotheses) {
        if (h.status == "fail") r.overall = false;
    }
}

void add_valence_warning(ConditionReport& r, int n) {
    if (n == 3 || n == 4) {
        Hypothesis h;
        h.name = "valence-range";
        h.status = "warn";
        h.note = "the matrix decay bounds are only proved for valence >= 5";
        h.evidence.push_back({"valence", double(n)});
        r.hypotheses.push_back(h);
    }
}

bool stationary_whitelisted(const schemes::SchemeDescriptor& stat) {
    return stat.name == "ds" || stat.name == "cc";
}

} // namespace

ConditionReport verify_convergence_conditions(const schemes::SchemeDescriptor& ns,
                                              const schemes::SchemeDescriptor& stat, int n,
                                              const AnalyzerOptions& opts) {
    check_compatible(ns, stat);
    ConditionReport r;
    r.theorem = "convergence";
    r.ns_id = ns.id();
    r.stat_id = stat.id();
    r.valence = n;
    add_valence_warning(r, n);

    const auto S_stat = localmatrix::local_matrix(stat, 1, n);
    localmatrix::SpectrumOptions sopts;
    sopts.cluster_tol = opts.eigen_tol;
    sopts.rank_tol = opts.eigen_tol;
    const auto sp = localmatrix::spectrum(S_stat, sopts);

    {
        double contraction = 2.0;
        bool factor_ok = false;
        try {
            contraction = symbols::contraction_factor(
                symbols::symbol_from_mask(schemes::regular_mask(stat, 1)), opts.divisibility_tol);
            factor_ok = true;
        } catch (const SubdivError&) {
        }
        const bool regular_conv = stationary_whitelisted(stat) || (factor_ok && contraction < 1.0);
        Hypothesis h = make_hyp("stationary-convergence", regular_conv && sp.convergence_gate());
        h.evidence.push_back({"contraction_factor", contraction});
        h.evidence.push_back({"lambda0", sp.lambda0});
        h.evidence.push_back({"lambda1", sp.lambda1});
        if (stationary_whitelisted(stat)) h.note = "reference scheme is classically convergent";
        r.hypotheses.push_back(std::move(h));
    }
    {
        const Mask2D ref = schemes::regular_mask(stat, 1);
        const auto est = symbols::asymptotic_equivalence(
            0, [&](int k) { return schemes::regular_mask(ns, k); }, ref,
            opts.equivalence_k_max);
        Hypothesis h = make_hyp("asymptotic-equivalence",
                                est.verdict == symbols::EquivalenceVerdict::Converged);
        h.evidence.push_back({"partial_sum", est.partial_sums.back()});
        h.evidence.push_back({"tail_ratio", est.tail_ratio});
        h.note = symbols::verdict_name(est.verdict);
        r.hypotheses.push_back(std::move(h));
    }
    {
        Hypothesis h;
        h.name = "matrix-decay";
        try {
            const auto fit = localmatrix::decay_fit(ns, n, opts.decay_k_lo, opts.decay_k_hi);
            const bool ok = fit.sigma > 1.0 && fit.residual_rms <= opts.max_fit_residual;
            h.status = ok ? "pass" : "fail";
            h.evidence.push_back({"sigma", fit.sigma});
            h.evidence.push_back({"constant", fit.constant});
            h.evidence.push_back({"residual_rms", fit.residual_rms});
        } catch (const SubdivError& e) {
            if (e.code() != ErrorCode::AllBelowNoiseFloor) throw;
            h.status = "pass";
            h.note = "S_k coincides with S at every level";
        }
        r.hypotheses.push_back(std::move(h));
    }
    finish(r);
    return r;
}

ConditionReport verify_normal_continuity_conditions(const schemes::SchemeDescriptor& ns,
                                                    const schemes::SchemeDescriptor& stat,
                                                    int n, const AnalyzerOptions& opts) {
    check_compatible(ns, stat);
    ConditionReport r;
    r.theorem = "normal-continuity";
    r.ns_id = ns.id();
    r.stat_id = stat.id();
    r.valence = n;
    add_valence_warning(r, n);

    const auto S_stat = localmatrix::local_matrix(stat, 1, n);
    localmatrix::SpectrumOptions sopts;
    sopts.cluster_tol = opts.eigen_tol;
    sopts.rank_tol = opts.eigen_tol;
    const auto sp = localmatrix::spectrum(S_stat, sopts);

    {
        const bool factor = symbols::has_smoothing_factor(
            symbols::symbol_from_mask(schemes::regular_mask(stat, 1)), opts.divisibility_tol);
        bool charmap_ok = false;
        double min_det = 0.0, max_det = 0.0;
        if (factor && sp.normal_continuity_gate()) {
            const auto jac = sample_characteristic_ring(stat, n, opts.charmap_depth,
                                                        opts.charmap_margin, opts.eigen_tol);
            charmap_ok = jac.pass;
            min_det = jac.min_abs_det;
            max_det = jac.max_abs_det;
        }
        Hypothesis h = make_hyp("stationary-C1-and-characteristic-map",
                                factor && sp.normal_continuity_gate() && charmap_ok);
        h.evidence.push_back({"lambda1", sp.lambda1});
        h.evidence.push_back({"lambda1_algebraic", double(sp.lambda1_algebraic)});
        h.evidence.push_back({"lambda1_geometric", double(sp.lambda1_geometric)});
        h.evidence.push_back({"min_abs_det", min_det});
        h.evidence.push_back({"max_abs_det", max_det});
        r.hypotheses.push_back(std::move(h));
    }
    {
        Hypothesis h;
        h.name = "level-symbols-contain-factor";
        h.status = "pass";
        for (int k = 1; k <= opts.symbol_levels; ++k) {
            if (!symbols::has_smoothing_factor(
                    symbols::symbol_from_mask(schemes::regular_mask(ns, k)),
                    opts.divisibility_tol)) {
                h.status = "fail";
                h.note = "NotDivisible at level " + std::to_string(k);
                h.evidence.push_back({"first_failing_level", double(k)});
                break;
            }
        }
        if (h.status == "pass") h.evidence.push_back({"levels_checked", double(opts.symbol_levels)});
        r.hypotheses.push_back(std::move(h));
    }
    {
        const Mask2D ref = schemes::regular_mask(stat, 1);
        const auto est = symbols::asymptotic_equivalence(
            1, [&](int k) { return schemes::regular_mask(ns, k); }, ref,
            opts.equivalence_k_max);
        Hypothesis h = make_hyp("order-1-asymptotic-equivalence",
                                est.verdict == symbols::EquivalenceVerdict::Converged);
        h.evidence.push_back({"partial_sum", est.partial_sums.back()});
        h.evidence.push_back({"tail_ratio", est.tail_ratio});
        h.note = symbols::verdict_name(est.verdict);
        r.hypotheses.push_back(std::move(h));
    }
    {
        // The ring parameterization assumes the level-k limit functions sum
        // to a grid-independent constant alpha_k; measured, not assumed.
        Hypothesis h;
        h.name = "ring-functions-partition-constant";
        h.status = "pass";
        double worst = 0.0;
        for (int k : {1, 4}) {
            const auto blf = basic_limit_function(ns, k, 6);
            const auto [lo, hi] = partition_range(blf.values, 6);
            worst = std::max(worst, (hi - lo) / std::max(1.0, std::abs(hi)));
        }
        if (worst > 1e-8) h.status = "fail";
        h.evidence.push_back({"max_partition_spread", worst});
        r.hypotheses.push_back(std::move(h));
    }
    {
        Hypothesis h;
        h.name = "decay-rate-beats-subdominant";
        try {
            const auto fit = localmatrix::decay_fit(ns, n, opts.decay_k_lo, opts.decay_k_hi);
            const bool ok = fit.sigma > 1.0 / sp.lambda1 &&
                            fit.residual_rms <= opts.max_fit_residual;
            h.status = ok ? "pass" : "fail";
            h.evidence.push_back({"sigma", fit.sigma});
            h.evidence.push_back({"one_over_lambda1", 1.0 / sp.lambda1});
            h.evidence.push_back({"residual_rms", fit.residual_rms});
        } catch (const SubdivError& e) {
            if (e.code() != ErrorCode::AllBelowNoiseFloor) throw;
            h.status = "pass";
            h.note = "S_k coincides with S at every level";
        }
        r.hypotheses.push_back(std::move(h));
    }
    finish(r);
    return r;
}

JacobianSignReport sample_characteristic_ring(const schemes::SchemeDescriptor& stat, int n,
                                              int depth, double margin, double eigen_tol,
                                              bool swap_eigenvectors) {
    if (!stat.stationary_rules()) {
        raise(ErrorCode::InvalidParameter, "the characteristic map is a stationary notion");
    }
    const bool dual = stat.kind == schemes::SchemeKind::Dual;
    const auto sp = localmatrix::spectrum(localmatrix::local_matrix(stat, 1, n));
    if (!sp.subdominant_double_nondefective) {
        raise(ErrorCode::DefectiveSubdominant,
              "subdominant eigenvalue is not real double non-defective");
    }

    const int R = 4;
    const MatrixXd W = window_operator(stat, n, R, dual);
    Eigen::EigenSolver<MatrixXd> es(W);

    JacobianSignReport rep;
    rep.valence = n;
    rep.depth = depth;
    rep.lambda1_matrix = sp.lambda1;

    std::vector<Eigen::VectorXcd> vecs;
    double lambda_w = 0.0;
    for (int i = 0; i < W.rows(); ++i) {
        if (std::abs(es.eigenvalues()(i) - sp.lambda1) <= 100 * eigen_tol) {
            vecs.push_back(es.eigenvectors().col(i));
            lambda_w = es.eigenvalues()(i).real();
        }
    }
    rep.lambda1_window = lambda_w;
    if (vecs.size() != 2) {
        raise(ErrorCode::DefectiveSubdominant,
              "window operator carries " + std::to_string(vecs.size()) +
                  " eigenvalues at lambda1; expected 2");
    }

    MatrixXd cand(W.rows(), 4);
    cand.col(0) = vecs[0].real();
    cand.col(1) = vecs[0].imag();
    cand.col(2) = vecs[1].real();
    cand.col(3) = vecs[1].imag();
    Eigen::ColPivHouseholderQR<MatrixXd> qr(cand);
    qr.setThreshold(1e-10);
    if (qr.rank() < 2) {
        raise(ErrorCode::DefectiveSubdominant, "could not build two real eigenvectors");
    }
    MatrixXd basis(W.rows(), 2);
    basis.col(0) = cand.col(qr.colsPermutation().indices()(0)).normalized();
    basis.col(1) = cand.col(qr.colsPermutation().indices()(1)).normalized();
    if (swap_eigenvectors) basis = basis.rowwise().reverse().eval();

    SectorGrid psi;
    psi.dual = dual;
    psi.n = n;
    psi.R = R;
    psi.dim = 2;
    psi.level = 1;
    psi.unflatten(basis);

    double min_det = std::numeric_limits<double>::infinity();
    for (int sector = 0; sector < n; ++sector) {
        for (int cell = 0; cell < 3; ++cell) {
            const CellSamples cs = sample_cell(psi, stat, sector, cell, depth, false);
            const ValueGrid& g = cs.grid;
            const double h = g.spacing;
            for (int i = 1; i + 1 < g.rows; ++i) {
                for (int j = 1; j + 1 < g.cols; ++j) {
                    const VectorXd du = (g.at(i + 1, j) - g.at(i - 1, j)) / (2 * h);
                    const VectorXd dv = (g.at(i, j + 1) - g.at(i, j - 1)) / (2 * h);
                    const double det = du(0) * dv(1) - du(1) * dv(0);
                    ++rep.samples;
                    if (det > 0) ++rep.positive;
                    else if (det < 0) ++rep.negative;
                    min_det = std::min(min_det, std::abs(det));
                    rep.max_abs_det = std::max(rep.max_abs_det, std::abs(det));
                }
            }
        }
    }
    rep.min_abs_det = std::isfinite(min_det) ? min_det : 0.0;
    rep.constant_sign = (rep.positive == 0) != (rep.negative == 0);
    rep.pass = rep.constant_sign && rep.min_abs_det >= margin * rep.max_abs_det;
    return rep;
}

std::vector<RingSample> generate_rings(const schemes::SchemeDescriptor& s, SectorGrid start,
                                       int k_max, int depth, bool limit_project,
                                       bool check_gates) {
    const int n = start.n;
    if (check_gates) {
        const auto sp =
            localmatrix::spectrum(localmatrix::local_matrix(s.stationary_reference(), 1, n));
        if (!sp.convergence_gate()) {
            raise(ErrorCode::GateFailed, "stationary spectrum gate failed");
        }
        if (!s.stationary_rules()) {
            const auto fit = localmatrix::decay_fit(s, n, 1, 15);
            if (!(fit.sigma > 1.0)) raise(ErrorCode::GateFailed, "decay gate failed");
        }
    }
    std::vector<RingSample> rings;
    SectorGrid g = std::move(start);
    for (int k = 1; k <= k_max; ++k) {
        RingSample ring;
        ring.k = k;
        ring.depth = depth;
        for (int sector = 0; sector < n; ++sector) {
            for (int cell = 0; cell < 3; ++cell) {
                ring.cells.push_back(sample_cell(g, s, sector, cell, depth, limit_project));
            }
        }
        rings.push_back(std::move(ring));
        if (k < k_max) g = g.refined(s);
    }
    return rings;
}

std::vector<RingSample> generate_rings(const schemes::SchemeDescriptor& s,
                                       const mesh::LocalPatch& patch, const mesh::QuadMesh& m,
                                       int k_max, int depth, bool limit_project,
                                       bool check_gates) {
    return generate_rings(s, SectorGrid::from_patch(patch, m), k_max, depth, limit_project,
                          check_gates);
}

NormalEstimate estimate_limit_normal(const std::vector<RingSample>& rings,
                                     const Vector3d& r_c) {
    if (rings.size() < 3) raise(ErrorCode::InvalidParameter, "need at least 3 rings");
    NormalEstimate est;

    double scale = 0.0;
    for (const auto& ring : rings) {
        for (const auto& cs : ring.cells) {
            for (int r = 0; r < cs.grid.v.rows(); ++r) {
                scale = std::max(scale, cs.grid.v.row(r).cwiseAbs().maxCoeff());
            }
        }
    }
    scale = std::max(scale, 1e-30);

    struct Field {
        std::vector<Vector3d> normals;
        std::vector<double> weights;
    };
    std::vector<Field> fields(rings.size());
    long degenerate = 0, total = 0;
    for (size_t ri = 0; ri < rings.size(); ++ri) {
        for (const auto& cs : rings[ri].cells) {
            const ValueGrid& g = cs.grid;
            const double h = g.spacing;
            for (int i = 1; i + 1 < g.rows; ++i) {
                for (int j = 1; j + 1 < g.cols; ++j) {
                    const Vector3d du = (g.at(i + 1, j) - g.at(i - 1, j)) / (2 * h);
                    const Vector3d dv = (g.at(i, j + 1) - g.at(i, j - 1)) / (2 * h);
                    const Vector3d cross = du.cross(dv);
                    const double nrm = cross.norm();
                    ++total;
                    if (nrm <= 1e-12 * scale) {
                        ++degenerate;
                        continue;
                    }
                    fields[ri].normals.push_back(cross / nrm);
                    fields[ri].weights.push_back(nrm * h * h);
                }
            }
        }
    }
    est.degenerate_fraction = total > 0 ? double(degenerate) / double(total) : 0.0;
    if (est.degenerate_fraction > 0.01) {
        raise(ErrorCode::DegenerateNormals,
              "more than 1% of the samples have vanishing normals");
    }

    // Area-weighted mean normal of the last ring.
    Vector3d acc = Vector3d::Zero();
    const Field& last = fields.back();
    for (size_t i = 0; i < last.normals.size(); ++i) acc += last.weights[i] * last.normals[i];
    if (acc.norm() <= 1e-30) raise(ErrorCode::DegenerateNormals, "mean normal vanished");
    est.n_inf = acc.normalized();

    for (size_t ri = 0; ri < rings.size(); ++ri) {
        double worst = 0.0;
        for (const auto& nrm : fields[ri].normals) {
            const double c = std::clamp(nrm.dot(est.n_inf), -1.0, 1.0);
            worst = std::max(worst, std::acos(c));
        }
        est.theta_max.push_back(worst);

        double sup = 0.0;
        for (const auto& cs : rings[ri].cells) {
            for (int r = 0; r < cs.grid.v.rows(); ++r) {
                sup = std::max(sup,
                               (cs.grid.v.row(r).transpose() - r_c).cwiseAbs().maxCoeff());
            }
        }
        est.sup_dist.push_back(sup);
    }
    return est;
}

Mask2D upsample_grid(const Mask2D& data, const Mask2D& mask) {
    Mask2D out({2 * data.offset[0] + mask.offset[0], 2 * data.offset[1] + mask.offset[1]},
               2 * (data.rows - 1) + mask.rows, 2 * (data.cols - 1) + mask.cols);
    for (int i = 0; i < data.rows; ++i) {
        for (int j = 0; j < data.cols; ++j) {
            const double v = data.at(i, j);
            if (v == 0.0) continue;
            for (int a = 0; a < mask.rows; ++a) {
                for (int b = 0; b < mask.cols; ++b) {
                    out.at(2 * i + a, 2 * j + b) += mask.at(a, b) * v;
                }
            }
        }
    }
    return out;
}

Mask2D backward_difference(const Mask2D& data, int direction, double scale) {
    const int dr = direction == 0 ? 1 : 0;
    const int dc = direction == 0 ? 0 : 1;
    Mask2D out(data.offset, data.rows + dr, data.cols + dc);
    for (int i = 0; i < out.rows; ++i) {
        for (int j = 0; j < out.cols; ++j) {
            const int a1 = data.offset[0] + i, a2 = data.offset[1] + j;
            out.at(i, j) = scale * (data.coeff(a1, a2) - data.coeff(a1 - dr, a2 - dc));
        }
    }
    return out;
}

BLFSample basic_limit_function(const schemes::SchemeDescriptor& s, int k, int depth) {
    if (depth < 4) raise(ErrorCode::InvalidParameter, "depth must be at least 4");
    BLFSample out;
    out.start_level = k;
    out.depth = depth;
    Mask2D data({0, 0}, 1, 1);
    data.at(0, 0) = 1.0;
    for (int step = 0; step < depth; ++step) {
        data = upsample_grid(data, schemes::regular_mask(s, k + step));
    }
    out.values = data;
    const double scale = std::ldexp(1.0, depth);
    out.du = backward_difference(data, 0, scale);
    out.dv = backward_difference(data, 1, scale);
    return out;
}

std::pair<double, double> partition_range(const Mask2D& values, int depth) {
    const int stride = 1 << depth;
    std::vector<double> sums(static_cast<size_t>(stride) * stride, 0.0);
    for (int i = 0; i < values.rows; ++i) {
        const int ca = ((values.offset[0] + i) % stride + stride) % stride;
        for (int j = 0; j < values.cols; ++j) {
            const int cb = ((values.offset[1] + j) % stride + stride) % stride;
            sums[static_cast<size_t>(ca) * stride + cb] += values.at(i, j);
        }
    }
    double lo = sums[0], hi = sums[0];
    for (double v : sums) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

} // namespace nssubdiv::analyzer

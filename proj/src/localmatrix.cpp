#include "nssubdiv/localmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nssubdiv::localmatrix {

double infinity_norm(const MatrixXd& m) {
    if (m.rows() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

MatrixXd BlockCirculantMatrix::dense() const {
    const int N = size();
    MatrixXd d(N, N);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            d.block(i * m, j * m, m, m) = blocks[static_cast<size_t>(((j - i) % n + n) % n)];
        }
    }
    return d;
}

MatrixXd BlockCirculantMatrix::dense_tilde() const {
    if (!from_vertex) raise(ErrorCode::InvalidParameter, "matrix was not built from vertex form");
    const int pp = p();
    const int N = pp * n + 1;
    MatrixXd d = MatrixXd::Zero(N, N);
    d(0, 0) = alpha;
    for (int j = 0; j < n; ++j) d.block(0, 1 + j * pp, 1, pp) = beta.transpose();
    for (int i = 0; i < n; ++i) {
        d.block(1 + i * pp, 0, pp, 1) = gamma;
        for (int j = 0; j < n; ++j) {
            d.block(1 + i * pp, 1 + j * pp, pp, pp) =
                tilde_blocks[static_cast<size_t>(((j - i) % n + n) % n)];
        }
    }
    return d;
}

BlockCirculantMatrix assemble_face_matrix(const std::vector<MatrixXd>& blocks) {
    if (blocks.empty()) raise(ErrorCode::ShapeMismatch, "no blocks");
    const int m = static_cast<int>(blocks.front().rows());
    for (const auto& b : blocks) {
        if (b.rows() != m || b.cols() != m) {
            raise(ErrorCode::ShapeMismatch, "blocks must be square and equally sized");
        }
    }
    BlockCirculantMatrix S;
    S.n = static_cast<int>(blocks.size());
    S.m = m;
    S.blocks = blocks;
    return S;
}

BlockCirculantMatrix assemble_face_matrix(const schemes::DualBlockSet& set) {
    return assemble_face_matrix(set.blocks);
}

BlockCirculantMatrix assemble_vertex_matrix(double alpha, const VectorXd& beta,
                                            const VectorXd& gamma,
                                            const std::vector<MatrixXd>& blocks) {
    if (blocks.empty()) raise(ErrorCode::ShapeMismatch, "no blocks");
    const int p = static_cast<int>(blocks.front().rows());
    if (beta.size() != p || gamma.size() != p) {
        raise(ErrorCode::ShapeMismatch, "beta/gamma length must match the block size");
    }
    for (const auto& b : blocks) {
        if (b.rows() != p || b.cols() != p) {
            raise(ErrorCode::ShapeMismatch, "blocks must be square and equally sized");
        }
    }
    BlockCirculantMatrix S;
    S.n = static_cast<int>(blocks.size());
    S.m = p + 1;
    S.from_vertex = true;
    S.alpha = alpha;
    S.beta = beta;
    S.gamma = gamma;
    S.tilde_blocks = blocks;
    S.blocks.reserve(blocks.size());
    for (const auto& bt : blocks) {
        MatrixXd b = MatrixXd::Zero(p + 1, p + 1);
        b(0, 0) = alpha / S.n;
        b.block(0, 1, 1, p) = beta.transpose();
        b.block(1, 0, p, 1) = gamma / S.n;
        b.block(1, 1, p, p) = bt;
        S.blocks.push_back(std::move(b));
    }
    return S;
}

BlockCirculantMatrix assemble_vertex_matrix(const schemes::PrimalBlockSet& set) {
    return assemble_vertex_matrix(set.alpha, set.beta, set.gamma, set.blocks);
}

BlockCirculantMatrix local_matrix(const schemes::SchemeDescriptor& s, int k, int n) {
    if (s.kind == schemes::SchemeKind::Dual) {
        return assemble_face_matrix(schemes::dual_blocks(s, k, n));
    }
    return assemble_vertex_matrix(schemes::primal_blocks(s, k, n));
}

MatrixXd fold_vertex_vector(const MatrixXd& d_tilde, int n, int p) {
    if (d_tilde.rows() != p * n + 1) raise(ErrorCode::ShapeMismatch, "bad unfolded vector size");
    MatrixXd d((p + 1) * n, d_tilde.cols());
    for (int i = 0; i < n; ++i) {
        d.row(i * (p + 1)) = d_tilde.row(0);
        d.block(i * (p + 1) + 1, 0, p, d_tilde.cols()) = d_tilde.block(1 + i * p, 0, p, d_tilde.cols());
    }
    return d;
}

MatrixXd unfold_vertex_vector(const MatrixXd& d, int n, int p) {
    if (d.rows() != (p + 1) * n) raise(ErrorCode::ShapeMismatch, "bad folded vector size");
    MatrixXd dt(p * n + 1, d.cols());
    dt.row(0) = d.row(0);
    for (int i = 0; i < n; ++i) {
        dt.block(1 + i * p, 0, p, d.cols()) = d.block(i * (p + 1) + 1, 0, p, d.cols());
    }
    return dt;
}

std::vector<MatrixXc> fourier_block_diagonalize(const BlockCirculantMatrix& S) {
    std::vector<MatrixXc> out;
    out.reserve(static_cast<size_t>(S.n));
    for (int l = 0; l < S.n; ++l) {
        MatrixXc acc = MatrixXc::Zero(S.m, S.m);
        for (int j = 0; j < S.n; ++j) {
            const double angle = 2.0 * M_PI * l * j / S.n;
            acc += std::polar(1.0, angle) * S.blocks[static_cast<size_t>(j)];
        }
        out.push_back(std::move(acc));
    }
    return out;
}

namespace {

struct EigenPair {
    std::complex<double> value;
    int block = 0;
    Eigen::VectorXcd vec; // eigenvector of the Fourier block (size m)
};

// Dense eigenvector of the circulant matrix from a Fourier-block eigenvector:
// block i of the full vector is w^{l i} times the block eigenvector.
Eigen::VectorXcd expand_eigenvector(const EigenPair& p, int n, int m) {
    Eigen::VectorXcd z(n * m);
    for (int i = 0; i < n; ++i) {
        const std::complex<double> phase = std::polar(1.0, 2.0 * M_PI * p.block * i / n);
        z.segment(i * m, m) = phase * p.vec;
    }
    return z;
}

// Pick `want` linearly independent real vectors from the real/imaginary parts
// of the given complex vectors.
std::vector<VectorXd> real_basis(const std::vector<Eigen::VectorXcd>& vecs, int want) {
    if (vecs.empty()) return {};
    const int N = static_cast<int>(vecs.front().size());
    MatrixXd cand(N, static_cast<int>(vecs.size()) * 2);
    int c = 0;
    for (const auto& v : vecs) {
        cand.col(c++) = v.real();
        cand.col(c++) = v.imag();
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(cand);
    qr.setThreshold(1e-10);
    const int rank = std::min<int>(static_cast<int>(qr.rank()), want);
    std::vector<VectorXd> out;
    for (int i = 0; i < rank; ++i) {
        VectorXd v = cand.col(qr.colsPermutation().indices()(i));
        const double norm = v.norm();
        if (norm > 0) v /= norm;
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace

Spectrum spectrum(const BlockCirculantMatrix& S, const SpectrumOptions& opts) {
    const MatrixXd dense = S.dense();
    const double scale = std::max(1.0, infinity_norm(dense));
    const double tol = opts.cluster_tol * scale;

    // Nonsingularity gate on the matrix that defines the scheme: the folded
    // vertex matrix always has n-1 coincident rows, so the check runs on S~.
    {
        const MatrixXd defining = S.from_vertex ? S.dense_tilde() : dense;
        Eigen::JacobiSVD<MatrixXd> svd(defining);
        const double smin = svd.singularValues().tail(1)(0);
        if (smin <= opts.singular_tol * scale) {
            raise(ErrorCode::SingularMatrix,
                  "defining matrix is numerically singular (sigma_min = " +
                      std::to_string(smin) + ")");
        }
    }

    std::vector<EigenPair> pairs;
    pairs.reserve(static_cast<size_t>(S.size()));
    const auto fblocks = fourier_block_diagonalize(S);
    for (int l = 0; l < S.n; ++l) {
        Eigen::ComplexEigenSolver<MatrixXc> es(fblocks[static_cast<size_t>(l)]);
        for (int i = 0; i < S.m; ++i) {
            pairs.push_back({es.eigenvalues()(i), l, es.eigenvectors().col(i)});
        }
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const EigenPair& a, const EigenPair& b) {
                  return std::abs(a.value) > std::abs(b.value);
              });

    Spectrum sp;
    for (const auto& p : pairs) sp.eigenvalues.push_back(p.value);

    // Cluster along the sorted order; two eigenvalues belong together when
    // they agree within tol in the complex plane.
    std::vector<std::vector<size_t>> clusters;
    for (size_t i = 0; i < pairs.size(); ++i) {
        if (!clusters.empty()) {
            const auto& ref = pairs[clusters.back().front()].value;
            if (std::abs(pairs[i].value - ref) <= tol) {
                clusters.back().push_back(i);
                continue;
            }
        }
        clusters.push_back({i});
    }

    const int N = S.size();
    sp.x0 = VectorXd::Ones(N);

    const auto& dom = clusters.front();
    sp.lambda0 = std::abs(pairs[dom.front()].value);
    sp.dominant_is_one = std::abs(pairs[dom.front()].value - 1.0) <= tol;
    sp.dominant_simple = dom.size() == 1;
    sp.all_ones_eigenvector =
        (dense * sp.x0 - sp.lambda0 * sp.x0).cwiseAbs().maxCoeff() <= tol;

    // Left dominant eigenvector from the omega = 1 Fourier block.
    {
        MatrixXd s0 = MatrixXd::Zero(S.m, S.m);
        for (const auto& b : S.blocks) s0 += b;
        Eigen::EigenSolver<MatrixXd> es(s0.transpose());
        int best = 0;
        for (int i = 1; i < S.m; ++i) {
            if (std::abs(es.eigenvalues()(i) - 1.0) < std::abs(es.eigenvalues()(best) - 1.0)) {
                best = i;
            }
        }
        VectorXd y = es.eigenvectors().col(best).real();
        VectorXd full(N);
        for (int i = 0; i < S.n; ++i) full.segment(i * S.m, S.m) = y;
        const double dot = full.dot(sp.x0);
        if (std::abs(dot) < 1e-14) {
            raise(ErrorCode::DefectiveSubdominant, "left eigenvector orthogonal to ones");
        }
        sp.x_tilde0 = full / dot;
    }

    if (clusters.size() > 1) {
        const auto& sub = clusters[1];
        const std::complex<double> l1 = pairs[sub.front()].value;
        sp.lambda1 = l1.real();
        sp.lambda1_algebraic = static_cast<int>(sub.size());
        bool all_real = true;
        for (size_t idx : sub) {
            if (std::abs(pairs[idx].value.imag()) > tol) all_real = false;
        }
        sp.subdominant_real_positive = all_real && l1.real() > 0.0;

        // Geometric multiplicity by the numerical nullity of S - lambda1 I.
        Eigen::JacobiSVD<MatrixXd> svd(dense - sp.lambda1 * MatrixXd::Identity(N, N));
        const double rank_tol = opts.rank_tol * scale;
        int nullity = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i) {
            if (svd.singularValues()(i) <= rank_tol) ++nullity;
        }
        sp.lambda1_geometric = nullity;
        sp.subdominant_double_nondefective =
            sp.lambda1_algebraic == 2 && sp.lambda1_geometric == 2 && sp.subdominant_real_positive;

        if (clusters.size() > 2) {
            sp.subdominant_separated =
                std::abs(l1) > std::abs(pairs[clusters[2].front()].value) + tol;
        } else {
            sp.subdominant_separated = true;
        }

        if (sp.subdominant_double_nondefective) {
            std::vector<Eigen::VectorXcd> vecs;
            for (size_t idx : sub) vecs.push_back(expand_eigenvector(pairs[idx], S.n, S.m));
            auto basis = real_basis(vecs, 2);
            if (basis.size() == 2) {
                sp.x1_0 = basis[0];
                sp.x1_1 = basis[1];
            } else {
                sp.subdominant_double_nondefective = false;
            }
        }
    }
    return sp;
}

MatrixXd product_chain(const schemes::SchemeDescriptor& s, int n, int k) {
    if (k < 0) raise(ErrorCode::InvalidParameter, "k must be >= 0");
    const int N = local_matrix(s, 1, n).size();
    MatrixXd prod = MatrixXd::Identity(N, N);
    for (int j = 1; j <= k; ++j) {
        prod = local_matrix(s, j, n).dense() * prod;
    }
    return prod;
}

RecurrenceCheck recurrence_residual(const std::vector<MatrixXd>& m_seq, const MatrixXd& m,
                                    int k) {
    if (k < 1 || static_cast<int>(m_seq.size()) < k) {
        raise(ErrorCode::InvalidParameter, "need at least k matrices");
    }
    const int N = static_cast<int>(m.rows());
    for (const auto& mj : m_seq) {
        if (mj.rows() != N || mj.cols() != N) raise(ErrorCode::ShapeMismatch, "sizes differ");
    }
    RecurrenceCheck out;

    // Left side M^(k) and the partial products M^(j-1), tracking scale.
    std::vector<MatrixXd> partial; // partial[j] = M^(j)
    partial.push_back(MatrixXd::Identity(N, N));
    for (int j = 1; j <= k; ++j) {
        partial.push_back(m_seq[static_cast<size_t>(j - 1)] * partial.back());
        out.scale = std::max(out.scale, infinity_norm(partial.back()));
    }
    // Powers M^0 .. M^k.
    std::vector<MatrixXd> powers;
    powers.push_back(MatrixXd::Identity(N, N));
    for (int j = 1; j <= k; ++j) {
        powers.push_back(m * powers.back());
        out.scale = std::max(out.scale, infinity_norm(powers.back()));
    }

    MatrixXd rhs = powers[static_cast<size_t>(k)];
    for (int j = 1; j <= k; ++j) {
        rhs += powers[static_cast<size_t>(k - j)] * (m_seq[static_cast<size_t>(j - 1)] - m) *
               partial[static_cast<size_t>(j - 1)];
    }
    out.scale = std::max(out.scale, 1.0);
    out.residual = infinity_norm(partial[static_cast<size_t>(k)] - rhs);
    return out;
}

DecayFit decay_fit(const schemes::SchemeDescriptor& s, int n, int k_lo, int k_hi) {
    if (k_hi - k_lo + 1 < 5) raise(ErrorCode::InvalidParameter, "need at least 5 levels");
    const MatrixXd S = local_matrix(s.stationary_reference(), 1, n).dense();
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, infinity_norm(S));
    DecayFit fit;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double nrm = infinity_norm(local_matrix(s, k, n).dense() - S);
        if (nrm <= floor) {
            ++fit.excluded_below_floor;
            continue;
        }
        fit.ks.push_back(k);
        fit.norms.push_back(nrm);
    }
    if (fit.ks.size() < 5) {
        raise(ErrorCode::AllBelowNoiseFloor,
              "fewer than 5 usable decay samples above the noise floor");
    }

    // Least squares on log(norm) = log C - k log sigma over ks[first..].
    auto fit_from = [&](size_t first, double* slope, double* intercept, double* rms,
                        double* se) {
        const int cnt = static_cast<int>(fit.ks.size() - first);
        double sk = 0, sy = 0, skk = 0, sky = 0;
        for (size_t i = first; i < fit.ks.size(); ++i) {
            const double x = fit.ks[i];
            const double y = std::log(fit.norms[i]);
            sk += x; sy += y; skk += x * x; sky += x * y;
        }
        *slope = (cnt * sky - sk * sy) / (cnt * skk - sk * sk);
        *intercept = (sy - *slope * sk) / cnt;
        double ss = 0.0, sxx = 0.0;
        const double kbar = sk / cnt;
        for (size_t i = first; i < fit.ks.size(); ++i) {
            const double r = std::log(fit.norms[i]) - (*intercept + *slope * fit.ks[i]);
            ss += r * r;
            sxx += (fit.ks[i] - kbar) * (fit.ks[i] - kbar);
        }
        *rms = std::sqrt(ss / cnt);
        *se = cnt > 2 ? std::sqrt(ss / (cnt - 2) / sxx) : 0.0;
    };

    // The estimator targets the geometric tail; saturated pre-asymptotic
    // levels are trimmed from the front until the power-law model fits.
    size_t first = 0;
    double slope = 0, intercept = 0, rms = 0, se = 0;
    fit_from(first, &slope, &intercept, &rms, &se);
    while (rms > 0.1 && fit.ks.size() - first > 5) {
        ++first;
        fit_from(first, &slope, &intercept, &rms, &se);
    }
    fit.head_trimmed = static_cast<int>(first);

    fit.sigma = std::exp(-slope);
    fit.constant = std::exp(intercept);
    fit.residual_rms = rms;
    fit.sigma_lo = std::exp(-slope - 2.0 * se);
    fit.sigma_hi = std::exp(-slope + 2.0 * se);
    return fit;
}

LimitPoint limit_point(const schemes::SchemeDescriptor& s, int n, const MatrixXd& d1,
                       const LimitPointOptions& opts) {
    const BlockCirculantMatrix S1 = local_matrix(s, 1, n);
    const int N = S1.size();
    if (d1.rows() != N || d1.cols() != 3) {
        raise(ErrorCode::ShapeMismatch, "d1 must be N x 3 for this valence");
    }
    const MatrixXd S = local_matrix(s.stationary_reference(), 1, n).dense();
    const Spectrum sp = spectrum(local_matrix(s.stationary_reference(), 1, n));

    if (opts.check_gates) {
        if (!sp.convergence_gate()) {
            raise(ErrorCode::GateFailed, "stationary spectrum gate failed");
        }
        if (!s.stationary_rules()) {
            // Stationary sequences have S_k = S exactly; the decay hypothesis
            // is then vacuously true and the fit has nothing to measure.
            const DecayFit fit = decay_fit(s, n, 1, 15);
            if (!(fit.sigma > 1.0)) {
                raise(ErrorCode::GateFailed, "decay gate failed: sigma <= 1");
            }
        }
    }

    LimitPoint lp;
    lp.q0 = (d1.transpose() * sp.x_tilde0).eval();

    MatrixXd chain = d1;   // S^(k) d1
    MatrixXd powed = d1;   // S^k d1
    MatrixXd y_prev = MatrixXd::Zero(N, 3);
    Eigen::Vector3d q_prev = lp.q0;
    const double scale = std::max(1e-300, d1.cwiseAbs().maxCoeff());
    int k = 0;
    bool converged = false;
    while (k < opts.k_max) {
        ++k;
        chain = local_matrix(s, k, n).dense() * chain;
        powed = S * powed;
        const MatrixXd y = chain - powed;
        const double inc = (y - y_prev).cwiseAbs().maxCoeff();
        lp.increments.push_back(inc);
        y_prev = y;
        const Eigen::Vector3d q = chain.transpose() * sp.x_tilde0;
        lp.projection_increments.push_back((q - q_prev).cwiseAbs().maxCoeff());
        q_prev = q;
        if (inc < opts.tol * scale) {
            converged = true;
            break;
        }
    }
    lp.r_c_projection = q_prev;
    if (!converged) {
        raise(ErrorCode::NotConverged, "limit point iteration hit k_max with increment " +
                                           std::to_string(lp.increments.back()));
    }
    lp.k_used = k;
    lp.beta0 = (y_prev.transpose() * sp.x0 / N).eval();
    lp.r_c = lp.q0 + lp.beta0;

    // Observed approach of y_k to its rank-one limit x0 beta0^T.
    {
        MatrixXd c2 = d1, p2 = d1;
        const MatrixXd limit = sp.x0 * lp.beta0.transpose();
        for (int j = 1; j <= lp.k_used; ++j) {
            c2 = local_matrix(s, j, n).dense() * c2;
            p2 = S * p2;
            lp.rank_one_gap.push_back(((c2 - p2) - limit).cwiseAbs().maxCoeff());
        }
    }
    return lp;
}

} // namespace nssubdiv::localmatrix

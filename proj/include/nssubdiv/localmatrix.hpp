#pragma once

// Block-circulant local subdivision matrices around extraordinary elements:
// assembly from dual/primal block sets, norms, Fourier block-diagonalization,
// spectral gates, level products S^(k), decay-rate fits and the limit point
// r_c = q_0 + beta_0.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "nssubdiv/errors.hpp"
#include "nssubdiv/schemes.hpp"

namespace nssubdiv::localmatrix {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using MatrixXc = Eigen::MatrixXcd;

double infinity_norm(const MatrixXd& m);

// S = Circ(B_0, ..., B_{n-1}): block row i, block column j holds
// B_{(j - i) mod n}. Vertex-centered matrices additionally remember the
// unfolded form S~ acting on the (p n + 1)-vector (center + sectors).
struct BlockCirculantMatrix {
    int n = 0;
    int m = 0;
    std::vector<MatrixXd> blocks;

    bool from_vertex = false;
    double alpha = 0.0;
    VectorXd beta, gamma;
    std::vector<MatrixXd> tilde_blocks;

    int size() const { return n * m; }
    int p() const { return from_vertex ? m - 1 : m; }
    MatrixXd dense() const;
    MatrixXd dense_tilde() const; // (p n + 1) square; vertex form only
    double norm_inf() const { return infinity_norm(dense()); }
};

BlockCirculantMatrix assemble_face_matrix(const std::vector<MatrixXd>& blocks);
BlockCirculantMatrix assemble_face_matrix(const schemes::DualBlockSet& set);

BlockCirculantMatrix assemble_vertex_matrix(double alpha, const VectorXd& beta,
                                            const VectorXd& gamma,
                                            const std::vector<MatrixXd>& blocks);
BlockCirculantMatrix assemble_vertex_matrix(const schemes::PrimalBlockSet& set);

// The local matrix of a named scheme at level k and valence n.
BlockCirculantMatrix local_matrix(const schemes::SchemeDescriptor& s, int k, int n);

// Replicate the center across the n sectors: (p n + 1) x c -> (n (p+1)) x c.
MatrixXd fold_vertex_vector(const MatrixXd& d_tilde, int n, int p);
MatrixXd unfold_vertex_vector(const MatrixXd& d, int n, int p);

// Fourier blocks S_hat_l = sum_j B_j w^{l j}, w = exp(2 pi i l / n). Their
// eigenvalues over l = 0..n-1 form the spectrum of the dense matrix.
std::vector<MatrixXc> fourier_block_diagonalize(const BlockCirculantMatrix& S);

struct SpectrumOptions {
    double cluster_tol = 1e-8;   // scaled by ||S||_inf
    double rank_tol = 1e-8;      // singular-value threshold, scaled by ||S||_inf
    double singular_tol = 1e-12; // nonsingularity gate on the defining matrix
};

struct Spectrum {
    std::vector<std::complex<double>> eigenvalues; // sorted by decreasing |.|

    double lambda0 = 0.0;         // modulus of the dominant eigenvalue
    bool dominant_is_one = false;
    bool dominant_simple = false;
    bool all_ones_eigenvector = false;

    double lambda1 = 0.0;         // real part of the subdominant cluster
    int lambda1_algebraic = 0;
    int lambda1_geometric = 0;
    bool subdominant_real_positive = false;
    bool subdominant_double_nondefective = false;
    bool subdominant_separated = false; // lambda1 > |lambda2| by the cluster tol

    VectorXd x0;      // all-ones
    VectorXd x_tilde0; // left eigenvector of lambda0, normalized x~0^T x0 = 1
    VectorXd x1_0, x1_1; // right subdominant eigenvectors when double

    bool convergence_gate() const {
        return dominant_is_one && dominant_simple && all_ones_eigenvector;
    }
    bool normal_continuity_gate() const {
        return convergence_gate() && subdominant_real_positive &&
               subdominant_double_nondefective && subdominant_separated &&
               lambda1 > 0.5 && lambda1 < 1.0;
    }
};

Spectrum spectrum(const BlockCirculantMatrix& S, const SpectrumOptions& opts = {});

// S^(k) = S_k S_{k-1} ... S_1 (identity for k = 0).
MatrixXd product_chain(const schemes::SchemeDescriptor& s, int n, int k);

struct RecurrenceCheck {
    double residual = 0.0; // || M^(k) - (M^k + sum_j M^{k-j}(M_j - M) M^(j-1)) ||_inf
    double scale = 0.0;    // max norm of the intermediate products
};

RecurrenceCheck recurrence_residual(const std::vector<MatrixXd>& m_seq, const MatrixXd& m,
                                    int k);

struct DecayFit {
    std::vector<int> ks;
    std::vector<double> norms;   // ||S_k - S||_inf for usable k
    double sigma = 0.0;          // fitted decay base
    double constant = 0.0;       // fitted C in ||S_k - S|| ~ C / sigma^k
    double residual_rms = 0.0;   // on log(norm), over the fitted points
    double sigma_lo = 0.0, sigma_hi = 0.0; // 2-standard-error band
    int excluded_below_floor = 0;
    int head_trimmed = 0; // pre-asymptotic levels dropped by the residual gate
};

DecayFit decay_fit(const schemes::SchemeDescriptor& s, int n, int k_lo, int k_hi);

struct LimitPoint {
    Eigen::Vector3d q0 = Eigen::Vector3d::Zero();
    Eigen::Vector3d beta0 = Eigen::Vector3d::Zero();
    Eigen::Vector3d r_c = Eigen::Vector3d::Zero();
    int k_used = 0;
    std::vector<double> increments;   // ||y_{k+1} - y_k||_inf
    std::vector<double> rank_one_gap; // ||y_k - x0 beta0^T||_inf
    // Dominant-mode projections q_k = x~0^T S^(k) d1. Their increments are
    // x~0^T (S_{k+1} - S) S^(k) d1 and contract at the matrix decay rate
    // 1/sigma; their limit is r_c again.
    std::vector<double> projection_increments;
    Eigen::Vector3d r_c_projection = Eigen::Vector3d::Zero();
};

struct LimitPointOptions {
    double tol = 1e-12;
    int k_max = 60;
    bool check_gates = true;
};

// d1 has N rows (the folded vector for vertex schemes) and 3 columns.
LimitPoint limit_point(const schemes::SchemeDescriptor& s, int n, const MatrixXd& d1,
                       const LimitPointOptions& opts = {});

} // namespace nssubdiv::localmatrix

#pragma once

// End-to-end verification of the convergence and normal-continuity
// conditions: hypothesis checks with numerical evidence, surface-ring
// generation, limit-normal estimation, characteristic-map sign sampling and
// basic-limit-function grids.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nssubdiv/localmatrix.hpp"
#include "nssubdiv/sector_grid.hpp"

namespace nssubdiv::analyzer {

struct AnalyzerOptions {
    int equivalence_k_max = 50;
    int decay_k_lo = 1;
    int decay_k_hi = 15;
    int symbol_levels = 20;      // level-k symbols checked for the factor
    double divisibility_tol = 1e-12;
    double eigen_tol = 1e-8;
    double max_fit_residual = 0.25; // rms on log ||S_k - S||
    int charmap_depth = 6;          // 2^depth + 1 samples per cell axis
    double charmap_margin = 1e-6;   // min |det| relative to max |det|
};

struct Hypothesis {
    std::string name;
    std::string status; // "pass" | "fail" | "warn"
    std::vector<std::pair<std::string, double>> evidence;
    std::string note;
};

struct ConditionReport {
    std::string theorem; // "convergence" | "normal-continuity"
    std::string ns_id;
    std::string stat_id;
    int valence = 0;
    std::vector<Hypothesis> hypotheses;
    bool overall = false;
};

ConditionReport verify_convergence_conditions(const schemes::SchemeDescriptor& ns,
                                              const schemes::SchemeDescriptor& stat, int n,
                                              const AnalyzerOptions& opts = {});

ConditionReport verify_normal_continuity_conditions(const schemes::SchemeDescriptor& ns,
                                                    const schemes::SchemeDescriptor& stat,
                                                    int n,
                                                    const AnalyzerOptions& opts = {});

struct JacobianSignReport {
    int valence = 0;
    int depth = 0;
    long samples = 0;
    long positive = 0;
    long negative = 0;
    double min_abs_det = 0.0;
    double max_abs_det = 0.0;
    double lambda1_matrix = 0.0;
    double lambda1_window = 0.0;
    bool constant_sign = false;
    bool pass = false;
};

// Builds the planar characteristic ring from the two subdominant
// eigenvectors of the stationary scheme's window operator and samples
// sign(det J Psi) over the ring-1 cells.
JacobianSignReport sample_characteristic_ring(const schemes::SchemeDescriptor& stat, int n,
                                              int depth = 6, double margin = 1e-6,
                                              double eigen_tol = 1e-8,
                                              bool swap_eigenvectors = false);

struct RingSample {
    int k = 1;
    int depth = 0;
    std::vector<CellSamples> cells; // 3n cells
};

std::vector<RingSample> generate_rings(const schemes::SchemeDescriptor& s, SectorGrid start,
                                       int k_max, int depth, bool limit_project = false,
                                       bool check_gates = true);

std::vector<RingSample> generate_rings(const schemes::SchemeDescriptor& s,
                                       const mesh::LocalPatch& patch, const mesh::QuadMesh& m,
                                       int k_max, int depth, bool limit_project = false,
                                       bool check_gates = true);

struct NormalEstimate {
    Eigen::Vector3d n_inf = Eigen::Vector3d::Zero();
    std::vector<double> theta_max; // per ring, radians
    std::vector<double> sup_dist;  // sup ||r_k - r_c||_inf per ring
    double degenerate_fraction = 0.0;
};

NormalEstimate estimate_limit_normal(const std::vector<RingSample>& rings,
                                     const Eigen::Vector3d& r_c);

// Basic limit function approximated by `depth` upsampling steps of the delta
// sequence starting at level k; values attach to 2^-depth * alpha. du and dv
// are backward divided differences scaled by 2^depth.
struct BLFSample {
    int start_level = 1;
    int depth = 0;
    symbols::Mask2D values;
    symbols::Mask2D du;
    symbols::Mask2D dv;
};

BLFSample basic_limit_function(const schemes::SchemeDescriptor& s, int k, int depth);

// Grid helpers shared by the tests: full convolution-upsampling of finite
// data, the backward divided difference, and the per-coset partition sums of
// a depth-L grid.
symbols::Mask2D upsample_grid(const symbols::Mask2D& data, const symbols::Mask2D& mask);
symbols::Mask2D backward_difference(const symbols::Mask2D& data, int direction, double scale);
std::pair<double, double> partition_range(const symbols::Mask2D& values, int depth);

} // namespace nssubdiv::analyzer

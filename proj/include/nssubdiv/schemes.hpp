#pragma once

// Named subdivision schemes as level-indexed generators of regular-region
// masks and extraordinary-element block sets: stationary Doo-Sabin and
// Catmull-Clark, the trigonometric (level-dependent) Doo-Sabin generalization
// and the exponential (level-dependent) Catmull-Clark generalization.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nssubdiv/errors.hpp"
#include "nssubdiv/symbols.hpp"

namespace nssubdiv::schemes {

enum class SchemeKind { Dual, Primal };       // face-centered vs vertex-centered
enum class ParamKind { Stationary, Trig, Exp };

// The admissible tension parameter. Trig: h in [0, pi/3). Exp: theta in
// [0, pi) or purely imaginary with magnitude in (0, 2 acosh(500)); the
// imaginary branch is stored as the magnitude plus a flag, which keeps all
// level coefficients in real arithmetic.
struct Parameter {
    ParamKind kind = ParamKind::Stationary;
    double value = 0.0;
    bool imaginary = false;

    static Parameter stationary() { return {}; }
    static Parameter trig(double h);
    static Parameter exp_real(double theta);
    static Parameter exp_imag(double magnitude);
};

struct SchemeDescriptor {
    std::string name;       // "ds", "cc", "trig-ds", "exp-cc"
    SchemeKind kind = SchemeKind::Dual;
    Parameter param;
    int sector_size = 4;    // p: points per sector of the local matrix

    bool stationary_rules() const {
        return param.kind == ParamKind::Stationary ||
               (param.value == 0.0 && !param.imaginary);
    }
    // The stationary reference scheme of the same family.
    SchemeDescriptor stationary_reference() const;
    std::string id() const;
};

SchemeDescriptor doo_sabin();
SchemeDescriptor catmull_clark();
SchemeDescriptor trig_doo_sabin(double h);
SchemeDescriptor exp_catmull_clark_real(double theta);
SchemeDescriptor exp_catmull_clark_imag(double magnitude);

// CLI string ids: "ds", "cc", "trig-ds:h=<real>", "exp-cc:theta=<real>",
// "exp-cc:theta=<real>i".
SchemeDescriptor parse_scheme_id(const std::string& id);

// v_k = cos(theta / 2^k) on the real branch, cosh(Im(theta) / 2^k) on the
// imaginary one. Satisfies v_{k+1} = sqrt((v_k + 1) / 2) and v_k -> 1.
double vk(const Parameter& theta, int k);

// Per-level coefficients of the trigonometric Doo-Sabin rules.
struct TrigCoefficients {
    double a = 0.5;   // a_k
    double b = 0.125; // b_k
    double cn(int n) const; // c_{n,k}
private:
    friend TrigCoefficients trig_coefficients(const Parameter&, int);
    double c1sq_c2sq = 1.0; // cos^2(h/2^k) cos^2(h/2^{k-1})
};

TrigCoefficients trig_coefficients(const Parameter& p, int k);

// Per-level coefficients of the exponential Catmull-Clark rules.
struct ExpCoefficients {
    double v = 1.0;
    double a4 = 9.0 / 16.0, b4 = 3.0 / 32.0, c4 = 1.0 / 64.0;
    double d = 3.0 / 8.0, e = 1.0 / 16.0;
    double an(int n) const { return 1.0 - n * (bn(n) + cn(n)); }
    double bn(int n) const { return 2.0 * (2.0 * v + 1.0) / (n * n * (v + 1.0) * (v + 1.0)); }
    double cn(int n) const { return 1.0 / (n * n * (v + 1.0) * (v + 1.0)); }
};

ExpCoefficients exp_coefficients(const Parameter& p, int k);

// The level-k regular-region mask: 4x4 for the dual family, 5x5 for the
// primal family, offset (0,0). Stationary descriptors return the stationary
// mask for every k.
symbols::Mask2D regular_mask(const SchemeDescriptor& s, int k);

// The level-k symbol as the product of its (1 + z_j)-type factors; equals
// symbol_from_mask(regular_mask(s, k)) and is used to cross-check both the
// factorized form and the realness of the coefficients.
symbols::LaurentSymbol level_symbol_product_form(const SchemeDescriptor& s, int k);

// Extraordinary-element blocks. Dual: the n blocks B_{0,k}..B_{n-1,k} of the
// block-circulant local matrix. Primal: the scalar/vector/blocks of the
// vertex-centered matrix before its block-circulant folding.
struct DualBlockSet {
    int n = 0;
    std::vector<Eigen::MatrixXd> blocks; // n matrices, p x p
};

struct PrimalBlockSet {
    int n = 0;
    double alpha = 0.0;
    Eigen::VectorXd beta;   // p
    Eigen::VectorXd gamma;  // p
    std::vector<Eigen::MatrixXd> blocks; // n matrices, p x p
};

DualBlockSet dual_blocks(const SchemeDescriptor& s, int k, int n);
PrimalBlockSet primal_blocks(const SchemeDescriptor& s, int k, int n);

// Reciprocal of the common coset row-sum of regular_mask(s, k); multiplying
// the level-k rules by this factor makes the refinement step affine. Errors
// with NonConstantCosetSums when the four coset sums disagree.
double normalization_factor(const SchemeDescriptor& s, int k);

// Geometric stencils used by mesh refinement.
//
// Dual rule: the new point for corner j of a valence-q face is
// sum_i w[(i - j) mod q] * corner_i with w[0] = a + c_q, w[+-1] = b + c_q and
// w[else] = c_q.
std::vector<double> dual_face_weights(const SchemeDescriptor& s, int k, int q);

// Primal rules: face point = 1/4 of the quad corners; edge point =
// d * endpoints + e * wings; vertex point of valence n = an * v +
// bn * (edge neighbors) + cn * (diagonal neighbors).
struct PrimalStencils {
    double edge_d = 3.0 / 8.0;
    double edge_e = 1.0 / 16.0;
    double vertex_a(int n) const { return coeff.an(n); }
    double vertex_b(int n) const { return coeff.bn(n); }
    double vertex_c(int n) const { return coeff.cn(n); }
    ExpCoefficients coeff;
};

PrimalStencils primal_stencils(const SchemeDescriptor& s, int k);

} // namespace nssubdiv::schemes

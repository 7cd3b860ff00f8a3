#pragma once

// Finite bivariate subdivision masks, their Laurent symbols, the subdivision
// operator norm, divided-difference factorization and asymptotic-equivalence
// diagnostics between a level-dependent scheme and a stationary reference.

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "nssubdiv/errors.hpp"

namespace nssubdiv::symbols {

using cplx = std::complex<double>;

// Dense finite-support real coefficient grid. Coefficient c_{alpha} with
// alpha = offset + (i, j) lives at row i (first lattice direction e1) and
// column j (second direction e2) of the row-major array.
struct Mask2D {
    std::array<int, 2> offset{0, 0};
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mask2D() = default;
    Mask2D(std::array<int, 2> off, int r, int c)
        : offset(off), rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    // Coefficient by absolute multi-index; zero outside the support.
    double coeff(int a1, int a2) const;

    double max_abs() const;
    bool same_shape(const Mask2D& o) const {
        return offset == o.offset && rows == o.rows && cols == o.cols;
    }
};

// Same grid with complex coefficients, interpreted as the Laurent polynomial
// c(z) = sum c_alpha z1^{alpha1} z2^{alpha2}.
struct LaurentSymbol {
    std::array<int, 2> offset{0, 0};
    int rows = 0;
    int cols = 0;
    std::vector<cplx> a;

    LaurentSymbol() = default;
    LaurentSymbol(std::array<int, 2> off, int r, int c)
        : offset(off), rows(r), cols(c), a(static_cast<size_t>(r) * c, cplx(0.0)) {}

    cplx& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    cplx at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    cplx eval(cplx z1, cplx z2) const;
    double max_abs() const;
};

LaurentSymbol symbol_from_mask(const Mask2D& m);

// Errors with NonRealMask if any imaginary part exceeds `tol`.
Mask2D mask_from_symbol(const LaurentSymbol& s, double tol = 1e-12);

// Pointwise sum/difference after aligning the two supports by their offsets.
Mask2D aligned_difference(const Mask2D& a, const Mask2D& b);

// Convolution product of two symbols (polynomial multiplication).
LaurentSymbol multiply(const LaurentSymbol& a, const LaurentSymbol& b);

// The univariate factor (1 + z_j) as a symbol, direction in {0, 1}.
LaurentSymbol one_plus_z(int direction);

// Norm of the subdivision operator: the maximum over the four cosets
// alpha in {0,1}^2 (mod 2) of sum_beta |c_{alpha - 2 beta}|.
double operator_norm(const Mask2D& c);

// Sup-norm distance between two masks aligned by their offsets.
double mask_distance(const Mask2D& a, const Mask2D& b);

// Divided-difference symbol b with 2 c(z) = (1 + z_j) b(z); synthetic
// division along the chosen axis, coefficient-by-coefficient. Errors with
// NotDivisible when any remainder exceeds `tol` relative to the symbol scale.
LaurentSymbol divided_difference_symbol(const LaurentSymbol& c, int direction,
                                        double tol = 1e-12);

// True iff c(z) contains the smoothing factor (1 + z1)(1 + z2).
bool has_smoothing_factor(const LaurentSymbol& c, double tol = 1e-12);

// One-step contraction factor of the divided-difference schemes,
// max_j || S_{b_{e_j}} / 2 ||_inf. A value < 1 certifies convergence of the
// stationary scheme on regular grids.
double contraction_factor(const LaurentSymbol& c, double tol = 1e-12);

enum class EquivalenceVerdict { Converged, Diverging, Inconclusive };

const char* verdict_name(EquivalenceVerdict v);

// Partial sums of sum_k (2^k)^order ||S_{c^(k)} - S_c||_inf together with a
// fitted geometric tail ratio and a summability verdict.
struct EquivalenceEstimate {
    int order = 0;
    int k_max = 0;
    std::vector<double> terms;         // term for k = 1..k_max
    std::vector<double> partial_sums;  // P_K, nondecreasing in K
    double tail_ratio = 0.0;           // geometric ratio fitted on the last terms
    EquivalenceVerdict verdict = EquivalenceVerdict::Inconclusive;
};

using MaskGenerator = std::function<Mask2D(int level)>;

EquivalenceEstimate asymptotic_equivalence(int order, const MaskGenerator& masks,
                                           const Mask2D& reference, int k_max);

} // namespace nssubdiv::symbols

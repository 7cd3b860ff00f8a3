#include "nssubdiv/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace nssubdiv::symbols {

namespace {

inline int parity(int v) { return ((v % 2) + 2) % 2; }

} // namespace

double Mask2D::coeff(int a1, int a2) const {
    const int i = a1 - offset[0];
    const int j = a2 - offset[1];
    if (i < 0 || i >= rows || j < 0 || j >= cols) return 0.0;
    return at(i, j);
}

double Mask2D::max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

cplx LaurentSymbol::eval(cplx z1, cplx z2) const {
    cplx acc(0.0);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            acc += at(i, j) * std::pow(z1, offset[0] + i) * std::pow(z2, offset[1] + j);
        }
    }
    return acc;
}

double LaurentSymbol::max_abs() const {
    double m = 0.0;
    for (const cplx& v : a) m = std::max(m, std::abs(v));
    return m;
}

LaurentSymbol symbol_from_mask(const Mask2D& m) {
    LaurentSymbol s(m.offset, m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) s.a[i] = cplx(m.a[i], 0.0);
    return s;
}

Mask2D mask_from_symbol(const LaurentSymbol& s, double tol) {
    const double scale = std::max(1.0, s.max_abs());
    Mask2D m(s.offset, s.rows, s.cols);
    for (size_t i = 0; i < s.a.size(); ++i) {
        if (std::abs(s.a[i].imag()) > tol * scale) {
            raise(ErrorCode::NonRealMask,
                  "imaginary part " + std::to_string(s.a[i].imag()) + " above tolerance");
        }
        m.a[i] = s.a[i].real();
    }
    return m;
}

Mask2D aligned_difference(const Mask2D& a, const Mask2D& b) {
    const int lo0 = std::min(a.offset[0], b.offset[0]);
    const int lo1 = std::min(a.offset[1], b.offset[1]);
    const int hi0 = std::max(a.offset[0] + a.rows, b.offset[0] + b.rows);
    const int hi1 = std::max(a.offset[1] + a.cols, b.offset[1] + b.cols);
    Mask2D d({lo0, lo1}, hi0 - lo0, hi1 - lo1);
    for (int i = 0; i < d.rows; ++i) {
        for (int j = 0; j < d.cols; ++j) {
            d.at(i, j) = a.coeff(lo0 + i, lo1 + j) - b.coeff(lo0 + i, lo1 + j);
        }
    }
    return d;
}

LaurentSymbol multiply(const LaurentSymbol& a, const LaurentSymbol& b) {
    LaurentSymbol p({a.offset[0] + b.offset[0], a.offset[1] + b.offset[1]},
                    a.rows + b.rows - 1, a.cols + b.cols - 1);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) {
            const cplx va = a.at(i, j);
            if (va == cplx(0.0)) continue;
            for (int k = 0; k < b.rows; ++k)
                for (int l = 0; l < b.cols; ++l) p.at(i + k, j + l) += va * b.at(k, l);
        }
    return p;
}

LaurentSymbol one_plus_z(int direction) {
    LaurentSymbol s({0, 0}, direction == 0 ? 2 : 1, direction == 0 ? 1 : 2);
    s.at(0, 0) = 1.0;
    if (direction == 0) s.at(1, 0) = 1.0;
    else s.at(0, 1) = 1.0;
    return s;
}

double operator_norm(const Mask2D& c) {
    double coset[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int i = 0; i < c.rows; ++i) {
        for (int j = 0; j < c.cols; ++j) {
            coset[parity(c.offset[0] + i)][parity(c.offset[1] + j)] += std::abs(c.at(i, j));
        }
    }
    return std::max(std::max(coset[0][0], coset[0][1]), std::max(coset[1][0], coset[1][1]));
}

double mask_distance(const Mask2D& a, const Mask2D& b) {
    return aligned_difference(a, b).max_abs();
}

LaurentSymbol divided_difference_symbol(const LaurentSymbol& c, int direction, double tol) {
    if (direction != 0 && direction != 1) {
        raise(ErrorCode::InvalidParameter, "direction must be 0 (e1) or 1 (e2)");
    }
    const double scale = std::max(1.0, 2.0 * c.max_abs());
    // Synthetic division of 2 c by (1 + z_j) along the chosen axis:
    // b_0 = 2 c_0, b_i = 2 c_i - b_{i-1}, remainder 2 c_N - b_{N-1}.
    const int n_lines = (direction == 0) ? c.cols : c.rows;
    const int len = (direction == 0) ? c.rows : c.cols;
    if (len < 2) raise(ErrorCode::NotDivisible, "support too small for a (1+z) factor");
    LaurentSymbol b(c.offset, direction == 0 ? c.rows - 1 : c.rows,
                    direction == 0 ? c.cols : c.cols - 1);
    for (int line = 0; line < n_lines; ++line) {
        cplx carry(0.0);
        for (int i = 0; i + 1 < len; ++i) {
            const cplx ci = (direction == 0) ? c.at(i, line) : c.at(line, i);
            const cplx bi = 2.0 * ci - carry;
            if (direction == 0) b.at(i, line) = bi;
            else b.at(line, i) = bi;
            carry = bi;
        }
        const cplx last = (direction == 0) ? c.at(len - 1, line) : c.at(line, len - 1);
        const cplx remainder = 2.0 * last - carry;
        if (std::abs(remainder) > tol * scale) {
            raise(ErrorCode::NotDivisible,
                  "deconvolution remainder " + std::to_string(std::abs(remainder)));
        }
    }
    return b;
}

bool has_smoothing_factor(const LaurentSymbol& c, double tol) {
    try {
        LaurentSymbol b1 = divided_difference_symbol(c, 0, tol);
        (void)divided_difference_symbol(b1, 1, tol);
        return true;
    } catch (const SubdivError& e) {
        if (e.code() == ErrorCode::NotDivisible) return false;
        throw;
    }
}

double contraction_factor(const LaurentSymbol& c, double tol) {
    double worst = 0.0;
    for (int dir = 0; dir < 2; ++dir) {
        LaurentSymbol b = divided_difference_symbol(c, dir, tol);
        for (cplx& v : b.a) v *= 0.5;
        worst = std::max(worst, operator_norm(mask_from_symbol(b, 1e-9)));
    }
    return worst;
}

const char* verdict_name(EquivalenceVerdict v) {
    switch (v) {
        case EquivalenceVerdict::Converged: return "converged";
        case EquivalenceVerdict::Diverging: return "diverging";
        case EquivalenceVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

EquivalenceEstimate asymptotic_equivalence(int order, const MaskGenerator& masks,
                                           const Mask2D& reference, int k_max) {
    if (order != 0 && order != 1) raise(ErrorCode::InvalidParameter, "order must be 0 or 1");
    if (k_max < 8) raise(ErrorCode::InvalidParameter, "k_max must be at least 8");

    EquivalenceEstimate est;
    est.order = order;
    est.k_max = k_max;
    double sum = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        const double dist = operator_norm(aligned_difference(masks(k), reference));
        const double term = (order == 1 ? std::ldexp(dist, k) : dist);
        est.terms.push_back(term);
        sum += term;
        est.partial_sums.push_back(sum);
    }

    // Geometric tail ratio: successive-ratio geometric mean over the last up
    // to 10 consecutive nonzero terms (terms may underflow to exact zero once
    // the masks agree to machine precision).
    int last = k_max - 1;
    while (last >= 0 && est.terms[static_cast<size_t>(last)] == 0.0) --last;
    double log_sum = 0.0;
    int count = 0;
    for (int k = last; k > 0 && count < 10; --k) {
        const double prev = est.terms[static_cast<size_t>(k - 1)];
        const double cur = est.terms[static_cast<size_t>(k)];
        if (prev <= 0.0 || cur <= 0.0) break;
        log_sum += std::log(cur / prev);
        ++count;
    }
    est.tail_ratio = count > 0 ? std::exp(log_sum / count) : 0.0;

    const double last_term = est.terms.back();
    const double total = est.partial_sums.back();
    if (total == 0.0) {
        est.verdict = EquivalenceVerdict::Converged;  // identical schemes
    } else if (est.tail_ratio < 1.0 && last_term < 1e-10 * total) {
        est.verdict = EquivalenceVerdict::Converged;
    } else if (est.tail_ratio >= 1.0 && last_term > 1e-6 * total) {
        est.verdict = EquivalenceVerdict::Diverging;
    } else {
        est.verdict = EquivalenceVerdict::Inconclusive;
    }
    return est;
}

} // namespace nssubdiv::symbols

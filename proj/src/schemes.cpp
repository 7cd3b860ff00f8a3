#include "nssubdiv/schemes.hpp"

#include <cmath>
#include <cstdio>

namespace nssubdiv::schemes {

namespace {

constexpr double kPi = 3.14159265358979323846;

double acosh500() { return std::acosh(500.0); }

} // namespace

Parameter Parameter::trig(double h) {
    if (!(h >= 0.0 && h < kPi / 3.0)) {
        raise(ErrorCode::InvalidParameter, "trig parameter h must lie in [0, pi/3)");
    }
    Parameter p;
    p.kind = ParamKind::Trig;
    p.value = h;
    return p;
}

Parameter Parameter::exp_real(double theta) {
    if (!(theta >= 0.0 && theta < kPi)) {
        raise(ErrorCode::InvalidParameter, "exp parameter theta must lie in [0, pi)");
    }
    Parameter p;
    p.kind = ParamKind::Exp;
    p.value = theta;
    return p;
}

Parameter Parameter::exp_imag(double magnitude) {
    if (!(magnitude > 0.0 && magnitude < 2.0 * acosh500())) {
        raise(ErrorCode::InvalidParameter,
              "imaginary exp parameter must lie in (0, 2 acosh(500))");
    }
    Parameter p;
    p.kind = ParamKind::Exp;
    p.value = magnitude;
    p.imaginary = true;
    return p;
}

SchemeDescriptor SchemeDescriptor::stationary_reference() const {
    return kind == SchemeKind::Dual ? doo_sabin() : catmull_clark();
}

std::string SchemeDescriptor::id() const {
    if (param.kind == ParamKind::Stationary) return name;
    char buf[64];
    if (param.kind == ParamKind::Trig) {
        std::snprintf(buf, sizeof(buf), "%s:h=%.17g", name.c_str(), param.value);
    } else {
        std::snprintf(buf, sizeof(buf), "%s:theta=%.17g%s", name.c_str(), param.value,
                      param.imaginary ? "i" : "");
    }
    return buf;
}

SchemeDescriptor doo_sabin() { return {"ds", SchemeKind::Dual, Parameter::stationary(), 4}; }

SchemeDescriptor catmull_clark() {
    return {"cc", SchemeKind::Primal, Parameter::stationary(), 6};
}

SchemeDescriptor trig_doo_sabin(double h) {
    return {"trig-ds", SchemeKind::Dual, Parameter::trig(h), 4};
}

SchemeDescriptor exp_catmull_clark_real(double theta) {
    return {"exp-cc", SchemeKind::Primal, Parameter::exp_real(theta), 6};
}

SchemeDescriptor exp_catmull_clark_imag(double magnitude) {
    return {"exp-cc", SchemeKind::Primal, Parameter::exp_imag(magnitude), 6};
}

SchemeDescriptor parse_scheme_id(const std::string& id) {
    if (id == "ds") return doo_sabin();
    if (id == "cc") return catmull_clark();
    if (id == "bad-ds") return {"bad-ds", SchemeKind::Dual, Parameter::stationary(), 4};
    auto parse_value = [&](const std::string& prefix) -> std::string {
        return id.substr(prefix.size());
    };
    if (id.rfind("trig-ds:h=", 0) == 0) {
        const std::string v = parse_value("trig-ds:h=");
        size_t pos = 0;
        const double h = std::stod(v, &pos);
        if (pos != v.size()) raise(ErrorCode::ParseError, "bad trig-ds parameter: " + v);
        return trig_doo_sabin(h);
    }
    if (id.rfind("exp-cc:theta=", 0) == 0) {
        std::string v = parse_value("exp-cc:theta=");
        bool imag = false;
        if (!v.empty() && v.back() == 'i') {
            imag = true;
            v.pop_back();
        }
        size_t pos = 0;
        const double t = std::stod(v, &pos);
        if (pos != v.size()) raise(ErrorCode::ParseError, "bad exp-cc parameter: " + v);
        return imag ? exp_catmull_clark_imag(t) : exp_catmull_clark_real(t);
    }
    raise(ErrorCode::UnknownScheme, "unrecognized scheme id: " + id);
}

double vk(const Parameter& theta, int k) {
    if (k < 1) raise(ErrorCode::InvalidParameter, "level k must be >= 1");
    if (theta.kind == ParamKind::Stationary) return 1.0;
    const double arg = std::ldexp(theta.value, -k); // value / 2^k
    if (theta.kind == ParamKind::Exp && theta.imaginary) return std::cosh(arg);
    return std::cos(arg);
}

double TrigCoefficients::cn(int n) const { return 1.0 / (4.0 * n * c1sq_c2sq); }

TrigCoefficients trig_coefficients(const Parameter& p, int k) {
    if (k < 1) raise(ErrorCode::InvalidParameter, "level k must be >= 1");
    TrigCoefficients c;
    if (p.kind == ParamKind::Stationary || p.value == 0.0) return c;
    if (p.kind != ParamKind::Trig) raise(ErrorCode::InvalidParameter, "not a trig parameter");
    const double c1 = std::cos(std::ldexp(p.value, -k));       // cos(h / 2^k)
    const double c2 = std::cos(std::ldexp(p.value, -(k - 1))); // cos(h / 2^{k-1})
    const double c1sq = c1 * c1;
    c.a = 1.0 / (4.0 * c1sq * c2) + 1.0 / (4.0 * c1sq);
    c.b = 1.0 / (8.0 * c1sq * c2);
    c.c1sq_c2sq = c1sq * (c2 * c2);
    return c;
}

ExpCoefficients exp_coefficients(const Parameter& p, int k) {
    if (k < 1) raise(ErrorCode::InvalidParameter, "level k must be >= 1");
    ExpCoefficients c;
    if (p.kind == ParamKind::Stationary) return c;
    if (p.kind != ParamKind::Exp) raise(ErrorCode::InvalidParameter, "not an exp parameter");
    const double v = vk(p, k);
    const double vp1 = v + 1.0;
    c.v = v;
    c.a4 = (2.0 * v + 1.0) * (2.0 * v + 1.0) / (4.0 * vp1 * vp1);
    c.b4 = 2.0 * (2.0 * v + 1.0) / (16.0 * vp1 * vp1);
    c.c4 = 1.0 / (16.0 * vp1 * vp1);
    c.d = (2.0 * v + 1.0) / (4.0 * vp1);
    c.e = 1.0 / (8.0 * vp1);
    return c;
}

symbols::Mask2D regular_mask(const SchemeDescriptor& s, int k) {
    if (s.kind == SchemeKind::Dual) {
        const TrigCoefficients t = trig_coefficients(s.param, k);
        if (s.name == "bad-ds") {
            // Synthetic counterexample: a stationary-looking mask whose
            // symbol lacks the (1+z1)(1+z2) factor.
            symbols::Mask2D m = regular_mask(doo_sabin(), 1);
            m.at(0, 0) += 0.02;
            return m;
        }
        const double c4 = t.cn(4);
        const double e0 = c4, e1 = t.b + c4, e2 = t.a + c4;
        symbols::Mask2D m({0, 0}, 4, 4);
        const double row0[4] = {e0, e1, e1, e0};
        const double row1[4] = {e1, e2, e2, e1};
        for (int j = 0; j < 4; ++j) {
            m.at(0, j) = row0[j];
            m.at(1, j) = row1[j];
            m.at(2, j) = row1[j];
            m.at(3, j) = row0[j];
        }
        return m;
    }
    const ExpCoefficients c = exp_coefficients(s.param, k);
    symbols::Mask2D m({0, 0}, 5, 5);
    const double row0[5] = {c.c4, c.e, c.b4, c.e, c.c4};
    const double row1[5] = {c.e, 0.25, c.d, 0.25, c.e};
    const double row2[5] = {c.b4, c.d, c.a4, c.d, c.b4};
    for (int j = 0; j < 5; ++j) {
        m.at(0, j) = row0[j];
        m.at(1, j) = row1[j];
        m.at(2, j) = row2[j];
        m.at(3, j) = row1[j];
        m.at(4, j) = row0[j];
    }
    return m;
}

symbols::LaurentSymbol level_symbol_product_form(const SchemeDescriptor& s, int k) {
    using symbols::LaurentSymbol;
    using symbols::cplx;
    using symbols::multiply;
    using symbols::one_plus_z;

    auto linear = [](int dir, cplx c0, cplx c1) {
        LaurentSymbol l({0, 0}, dir == 0 ? 2 : 1, dir == 0 ? 1 : 2);
        l.at(0, 0) = c0;
        if (dir == 0) l.at(1, 0) = c1;
        else l.at(0, 1) = c1;
        return l;
    };
    auto scaled = [](LaurentSymbol l, cplx f) {
        for (auto& v : l.a) v *= f;
        return l;
    };

    if (s.kind == SchemeKind::Dual) {
        if (s.stationary_rules()) {
            // (1+z1)^3 (1+z2)^3 / 16
            LaurentSymbol p = one_plus_z(0);
            p = multiply(p, one_plus_z(0));
            p = multiply(p, one_plus_z(0));
            p = multiply(p, one_plus_z(1));
            p = multiply(p, one_plus_z(1));
            p = multiply(p, one_plus_z(1));
            return scaled(p, 1.0 / 16.0);
        }
        const double u = std::ldexp(s.param.value, -(k - 1)); // h / 2^{k-1}
        const cplx eu = std::polar(1.0, u);
        const cplx e2u = std::polar(1.0, 2.0 * u);
        LaurentSymbol p = multiply(one_plus_z(0), one_plus_z(1));
        p = multiply(p, linear(0, eu, 1.0));  // z1 + e^{iu}
        p = multiply(p, linear(0, 1.0, eu));  // z1 e^{iu} + 1
        p = multiply(p, linear(1, eu, 1.0));
        p = multiply(p, linear(1, 1.0, eu));
        const cplx denom = (e2u + 1.0) * (e2u + 1.0) * (eu + 1.0) * (eu + 1.0);
        return scaled(p, eu / denom);
    }

    if (s.stationary_rules()) {
        // (1+z1)^4 (1+z2)^4 / 64
        LaurentSymbol p = one_plus_z(0);
        for (int i = 0; i < 3; ++i) p = multiply(p, one_plus_z(0));
        for (int i = 0; i < 4; ++i) p = multiply(p, one_plus_z(1));
        return scaled(p, 1.0 / 64.0);
    }
    // e^{i theta / 2^k}: real exp(-m / 2^k) on the imaginary branch.
    const double w = std::ldexp(s.param.value, -k);
    const cplx ew = s.param.imaginary ? cplx(std::exp(-w), 0.0) : std::polar(1.0, w);
    LaurentSymbol p = multiply(one_plus_z(0), one_plus_z(0));
    p = multiply(p, multiply(one_plus_z(1), one_plus_z(1)));
    p = multiply(p, linear(0, 1.0, ew));
    p = multiply(p, linear(0, ew, 1.0));
    p = multiply(p, linear(1, 1.0, ew));
    p = multiply(p, linear(1, ew, 1.0));
    const cplx ew1 = ew + 1.0;
    const cplx denom = 4.0 * ew1 * ew1 * ew1 * ew1;
    return scaled(p, 1.0 / denom);
}

DualBlockSet dual_blocks(const SchemeDescriptor& s, int k, int n) {
    if (s.kind != SchemeKind::Dual) raise(ErrorCode::InvalidParameter, "not a dual scheme");
    if (n < 3) raise(ErrorCode::UnsupportedValence, "valence must be >= 3");
    const TrigCoefficients t = trig_coefficients(s.param, k);
    const double a = t.a, b = t.b;
    const double c4 = t.cn(4), cn = t.cn(n);

    DualBlockSet set;
    set.n = n;
    set.blocks.assign(n, Eigen::MatrixXd::Zero(4, 4));

    Eigen::MatrixXd& B0 = set.blocks[0];
    B0(0, 0) = a + cn;
    B0(1, 0) = a + c4; B0(1, 1) = b + c4;
    B0(2, 0) = a + c4; B0(2, 1) = b + c4; B0(2, 2) = c4; B0(2, 3) = b + c4;
    B0(3, 0) = a + c4; B0(3, 3) = b + c4;

    Eigen::MatrixXd& B1 = set.blocks[1];
    B1(0, 0) = b + cn;
    B1(3, 0) = b + c4; B1(3, 1) = c4;

    for (int i = 2; i <= n - 2; ++i) set.blocks[static_cast<size_t>(i)](0, 0) = cn;

    Eigen::MatrixXd& Bn1 = set.blocks[static_cast<size_t>(n - 1)];
    Bn1(0, 0) = b + cn;
    Bn1(1, 0) = b + c4; Bn1(1, 3) = c4;
    return set;
}

PrimalBlockSet primal_blocks(const SchemeDescriptor& s, int k, int n) {
    if (s.kind != SchemeKind::Primal) raise(ErrorCode::InvalidParameter, "not a primal scheme");
    if (n < 3) raise(ErrorCode::UnsupportedValence, "valence must be >= 3");
    const ExpCoefficients c = exp_coefficients(s.param, k);

    PrimalBlockSet set;
    set.n = n;
    set.alpha = c.an(n);
    set.beta = Eigen::VectorXd::Zero(6);
    set.beta(0) = c.bn(n);
    set.beta(1) = c.cn(n);
    set.gamma = Eigen::VectorXd::Zero(6);
    set.gamma << c.d, 0.25, c.b4, c.e, c.c4, c.e;
    set.blocks.assign(n, Eigen::MatrixXd::Zero(6, 6));

    Eigen::MatrixXd& B0 = set.blocks[0];
    B0 << c.d,  c.e,  0,    0,    0,    0,
          0.25, 0.25, 0,    0,    0,    0,
          c.a4, c.b4, c.b4, c.c4, 0,    0,
          c.d,  c.d,  c.e,  c.e,  0,    0,
          c.b4, c.a4, c.c4, c.b4, c.c4, c.b4,
          c.e,  c.d,  0,    0,    0,    c.e;

    Eigen::MatrixXd& B1 = set.blocks[1];
    B1(0, 0) = c.e;
    B1(1, 0) = 0.25;
    B1(2, 0) = c.c4;
    B1(3, 0) = c.e;
    B1(4, 0) = c.b4; B1(4, 2) = c.c4;
    B1(5, 0) = c.d;  B1(5, 2) = c.e;

    Eigen::MatrixXd& Bn1 = set.blocks[static_cast<size_t>(n - 1)];
    Bn1(0, 0) = c.e;  Bn1(0, 1) = c.e;
    Bn1(2, 0) = c.c4; Bn1(2, 1) = c.b4; Bn1(2, 5) = c.c4;
    return set;
}

double normalization_factor(const SchemeDescriptor& s, int k) {
    const symbols::Mask2D m = regular_mask(s, k);
    double coset[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) coset[i % 2][j % 2] += m.at(i, j);
    const double s00 = coset[0][0];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            if (std::abs(coset[i][j] - s00) > 1e-12) {
                raise(ErrorCode::NonConstantCosetSums,
                      "coset sums differ; no single scalar normalization exists");
            }
        }
    return 1.0 / s00;
}

std::vector<double> dual_face_weights(const SchemeDescriptor& s, int k, int q) {
    if (s.kind != SchemeKind::Dual) raise(ErrorCode::InvalidParameter, "not a dual scheme");
    if (q < 3) raise(ErrorCode::UnsupportedValence, "face valence must be >= 3");
    const TrigCoefficients t = trig_coefficients(s.param, k);
    const double cq = t.cn(q);
    std::vector<double> w(static_cast<size_t>(q), cq);
    w[0] = t.a + cq;
    w[1] = t.b + cq;
    w[static_cast<size_t>(q - 1)] = t.b + cq;
    return w;
}

PrimalStencils primal_stencils(const SchemeDescriptor& s, int k) {
    if (s.kind != SchemeKind::Primal) raise(ErrorCode::InvalidParameter, "not a primal scheme");
    PrimalStencils st;
    st.coeff = exp_coefficients(s.param, k);
    st.edge_d = st.coeff.d;
    st.edge_e = st.coeff.e;
    return st;
}

} // namespace nssubdiv::schemes

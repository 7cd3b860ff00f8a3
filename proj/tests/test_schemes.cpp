#include <cmath>

#include "doctest.h"
#include "nssubdiv/schemes.hpp"
#include "nssubdiv/symbols.hpp"

using namespace nssubdiv;
using namespace nssubdiv::schemes;

TEST_CASE("stationary masks match the published grids") {
    const symbols::Mask2D ds = regular_mask(doo_sabin(), 1);
    REQUIRE(ds.rows == 4);
    const double ds_expected[4][4] = {{1, 3, 3, 1}, {3, 9, 9, 3}, {3, 9, 9, 3}, {1, 3, 3, 1}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(ds.at(i, j) == ds_expected[i][j] / 16.0);

    const symbols::Mask2D cc = regular_mask(catmull_clark(), 1);
    REQUIRE(cc.rows == 5);
    const double cc_expected[5][5] = {{1. / 64, 1. / 16, 3. / 32, 1. / 16, 1. / 64},
                                      {1. / 16, 1. / 4, 3. / 8, 1. / 4, 1. / 16},
                                      {3. / 32, 3. / 8, 9. / 16, 3. / 8, 3. / 32},
                                      {1. / 16, 1. / 4, 3. / 8, 1. / 4, 1. / 16},
                                      {1. / 64, 1. / 16, 3. / 32, 1. / 16, 1. / 64}};
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(cc.at(i, j) == cc_expected[i][j]);
}

TEST_CASE("degenerate parameters reproduce the stationary scheme exactly") {
    for (int k : {1, 3, 7, 20}) {
        const symbols::Mask2D trig0 = regular_mask(trig_doo_sabin(0.0), k);
        const symbols::Mask2D ds = regular_mask(doo_sabin(), k);
        CHECK(symbols::mask_distance(trig0, ds) == 0.0);

        const symbols::Mask2D exp0 = regular_mask(exp_catmull_clark_real(0.0), k);
        const symbols::Mask2D cc = regular_mask(catmull_clark(), k);
        CHECK(symbols::mask_distance(exp0, cc) == 0.0);
    }
    const symbols::Mask2D exp0 = regular_mask(exp_catmull_clark_real(0.0), 2);
    CHECK(exp0.at(2, 2) == 9.0 / 16.0);
    CHECK(exp0.at(0, 0) == 1.0 / 64.0);
}

TEST_CASE("v_k values and recurrence") {
    CHECK(vk(Parameter::exp_real(0.0), 5) == 1.0);
    CHECK(vk(Parameter::exp_real(M_PI / 2), 1) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(vk(Parameter::exp_imag(10.0), 1) == doctest::Approx(std::cosh(5.0)).epsilon(1e-15));

    for (auto p : {Parameter::exp_real(3.0), Parameter::exp_imag(10.0)}) {
        double prev = vk(p, 1);
        for (int k = 1; k <= 30; ++k) {
            const double v = vk(p, k);
            const double next = vk(p, k + 1);
            CHECK(std::abs(2.0 * next * next - 1.0 - v) <= 1e-14 * std::max(1.0, std::abs(v)));
            if (k > 1) CHECK(std::abs(v - 1.0) <= std::abs(prev - 1.0));
            prev = v;
        }
        // Geometric approach to 1.
        const double r0 = std::abs(vk(p, 1) - 1.0);
        CHECK(std::abs(vk(p, 20) - 1.0) <= r0 * std::pow(0.5, 19));
    }
}

TEST_CASE("coefficient identities") {
    for (auto p : {Parameter::exp_real(3.0), Parameter::exp_imag(10.0), Parameter::exp_real(0.0)}) {
        for (int k = 1; k <= 10; ++k) {
            const ExpCoefficients c = exp_coefficients(p, k);
            for (int n = 3; n <= 12; ++n) {
                CHECK(c.an(n) == 1.0 - n * (c.bn(n) + c.cn(n)));
            }
            // The n = 4 vertex coefficients coincide with the mask entries.
            CHECK(c.bn(4) == doctest::Approx(c.b4).epsilon(1e-15));
            CHECK(c.cn(4) == doctest::Approx(c.c4).epsilon(1e-15));
            CHECK(c.an(4) == doctest::Approx(c.a4).epsilon(1e-14));
        }
    }
}

TEST_CASE("level coefficients approach the stationary values at rate 4^-k") {
    // Constants fitted over k = 1..20 and a parameter sweep, then frozen as
    // regression baselines.
    double A = 0, B = 0, C = 0;
    for (double h : {1.0 / 16.0, 0.5, 1.0}) {
        for (int k = 1; k <= 20; ++k) {
            const auto t = trig_coefficients(Parameter::trig(h), k);
            const double w = std::ldexp(1.0, 2 * k);
            A = std::max(A, w * std::abs(t.a - 0.5));
            B = std::max(B, w * std::abs(t.b - 0.125));
            for (int n = 5; n <= 12; ++n) {
                C = std::max(C, w * n * std::abs(t.cn(n) - 0.25 / n));
            }
        }
    }
    CHECK(A <= 1.75);
    CHECK(B <= 0.75);
    CHECK(C <= 3.5);

    double E = 0;
    for (auto p : {Parameter::exp_real(3.0), Parameter::exp_imag(10.0)}) {
        for (int k = 1; k <= 20; ++k) {
            const auto c = exp_coefficients(p, k);
            const double w = std::ldexp(1.0, 2 * k);
            E = std::max(E, w * std::abs(c.a4 - 9.0 / 16.0));
            E = std::max(E, w * std::abs(c.b4 - 3.0 / 32.0));
            E = std::max(E, w * std::abs(c.c4 - 1.0 / 64.0));
            E = std::max(E, w * std::abs(c.d - 3.0 / 8.0));
            E = std::max(E, w * std::abs(c.e - 1.0 / 16.0));
        }
    }
    CHECK(E <= 9.5);
}

TEST_CASE("published block entries") {
    SUBCASE("stationary Doo-Sabin, n = 5") {
        const DualBlockSet set = dual_blocks(doo_sabin(), 1, 5);
        CHECK(set.blocks[0](0, 0) == doctest::Approx(0.55).epsilon(1e-15));
        CHECK(set.blocks[1](0, 0) == doctest::Approx(1.0 / 20.0 + 0.125).epsilon(1e-15));
    }
    SUBCASE("exp Catmull-Clark at theta = 0, n = 5") {
        const PrimalBlockSet set = primal_blocks(exp_catmull_clark_real(0.0), 1, 5);
        CHECK(set.alpha == doctest::Approx(0.65).epsilon(1e-15));
        CHECK(set.beta(0) == doctest::Approx(3.0 / 50.0).epsilon(1e-15));
        CHECK(set.beta(1) == doctest::Approx(1.0 / 100.0).epsilon(1e-15));
    }
    SUBCASE("trig Doo-Sabin interior blocks at h = 0, n = 7") {
        const DualBlockSet set = dual_blocks(trig_doo_sabin(0.0), 1, 7);
        for (int i = 2; i <= 5; ++i) {
            const auto& B = set.blocks[static_cast<size_t>(i)];
            CHECK(B(0, 0) == doctest::Approx(1.0 / 28.0).epsilon(1e-15));
            CHECK(B.cwiseAbs().sum() == doctest::Approx(1.0 / 28.0).epsilon(1e-15));
        }
    }
}

TEST_CASE("stationary reduction of the blocks is exact") {
    for (int n = 5; n <= 10; ++n) {
        for (int k = 1; k <= 20; ++k) {
            const DualBlockSet a = dual_blocks(trig_doo_sabin(0.0), k, n);
            const DualBlockSet b = dual_blocks(doo_sabin(), k, n);
            for (int i = 0; i < n; ++i) {
                CHECK((a.blocks[static_cast<size_t>(i)] - b.blocks[static_cast<size_t>(i)])
                          .cwiseAbs()
                          .maxCoeff() <= 1e-15);
            }
            const PrimalBlockSet c = primal_blocks(exp_catmull_clark_real(0.0), k, n);
            const PrimalBlockSet d = primal_blocks(catmull_clark(), k, n);
            CHECK(std::abs(c.alpha - d.alpha) <= 1e-15);
            CHECK((c.beta - d.beta).cwiseAbs().maxCoeff() <= 1e-15);
            CHECK((c.gamma - d.gamma).cwiseAbs().maxCoeff() <= 1e-15);
            for (int i = 0; i < n; ++i) {
                CHECK((c.blocks[static_cast<size_t>(i)] - d.blocks[static_cast<size_t>(i)])
                          .cwiseAbs()
                          .maxCoeff() <= 1e-15);
            }
        }
    }
}

TEST_CASE("first-row sum identity of the dual blocks") {
    for (double h : {0.0, 0.5, 1.0}) {
        const auto s = trig_doo_sabin(h);
        for (int k = 1; k <= 8; ++k) {
            const auto t = trig_coefficients(s.param, k);
            for (int n : {5, 7, 10}) {
                const DualBlockSet set = dual_blocks(s, k, n);
                double row0 = 0.0;
                for (const auto& B : set.blocks) row0 += B.row(0).sum();
                CHECK(row0 == doctest::Approx(t.a + 2 * t.b + n * t.cn(n)).epsilon(1e-14));
                if (h == 0.0) CHECK(row0 == doctest::Approx(1.0).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("level symbols in product form match the masks") {
    auto check = [](const SchemeDescriptor& s, int k) {
        const symbols::LaurentSymbol prod = level_symbol_product_form(s, k);
        const symbols::Mask2D grid = symbols::mask_from_symbol(prod, 1e-11);
        CHECK(symbols::mask_distance(grid, regular_mask(s, k)) < 1e-12);
    };
    for (int k = 1; k <= 6; ++k) {
        check(doo_sabin(), k);
        check(catmull_clark(), k);
        check(trig_doo_sabin(1.0), k);
        check(trig_doo_sabin(1.0 / 16.0), k);
        check(exp_catmull_clark_real(3.0), k);
        check(exp_catmull_clark_imag(10.0), k);
    }
}

TEST_CASE("normalization factor") {
    CHECK(normalization_factor(doo_sabin(), 1) == 1.0);
    CHECK(normalization_factor(catmull_clark(), 3) == 1.0);
    // The exponential masks have unit coset sums for every parameter.
    CHECK(normalization_factor(exp_catmull_clark_real(3.0), 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(normalization_factor(exp_catmull_clark_imag(10.0), 2) == doctest::Approx(1.0).epsilon(1e-14));

    const auto t = trig_coefficients(Parameter::trig(1.0), 1);
    const double expected = 1.0 / (t.a + 2 * t.b + 4 * t.cn(4));
    const double got = normalization_factor(trig_doo_sabin(1.0), 1);
    CHECK(got == doctest::Approx(expected).epsilon(1e-14));
    CHECK(got != 1.0);
    // Closed form cos^2(h/2^{k-1}) / cos^2(h/2^k).
    CHECK(got == doctest::Approx(std::pow(std::cos(1.0), 2) / std::pow(std::cos(0.5), 2))
                     .epsilon(1e-13));
}

TEST_CASE("parameter domains are enforced") {
    CHECK_THROWS_AS((void)Parameter::trig(M_PI / 3.0), SubdivError);
    CHECK_THROWS_AS((void)Parameter::trig(-0.1), SubdivError);
    CHECK_THROWS_AS((void)Parameter::exp_real(M_PI), SubdivError);
    CHECK_THROWS_AS((void)Parameter::exp_imag(0.0), SubdivError);
    CHECK_THROWS_AS((void)Parameter::exp_imag(2.0 * std::acosh(500.0)), SubdivError);
    CHECK_NOTHROW((void)Parameter::exp_imag(10.0));
}

TEST_CASE("scheme id round trip") {
    CHECK(parse_scheme_id("ds").name == "ds");
    CHECK(parse_scheme_id("cc").kind == SchemeKind::Primal);
    const auto trig = parse_scheme_id("trig-ds:h=0.5");
    CHECK(trig.param.value == 0.5);
    const auto exp_i = parse_scheme_id("exp-cc:theta=10i");
    CHECK(exp_i.param.imaginary);
    CHECK(exp_i.param.value == 10.0);
    CHECK(parse_scheme_id(exp_i.id()).param.imaginary);
    CHECK_THROWS_AS((void)parse_scheme_id("loop"), SubdivError);
    CHECK_THROWS_AS((void)parse_scheme_id("trig-ds:h=2.0"), SubdivError);
}

TEST_CASE("unsupported valences are rejected") {
    CHECK_THROWS_AS((void)dual_blocks(doo_sabin(), 1, 2), SubdivError);
    CHECK_THROWS_AS((void)primal_blocks(catmull_clark(), 1, 2), SubdivError);
    CHECK_NOTHROW((void)dual_blocks(doo_sabin(), 1, 3));
    CHECK_NOTHROW((void)primal_blocks(catmull_clark(), 1, 3));
}

TEST_CASE("non-constant coset sums have no scalar normalization") {
    CHECK_THROWS_WITH_AS((void)normalization_factor(parse_scheme_id("bad-ds"), 1),
                         doctest::Contains("NonConstantCosetSums"), SubdivError);
}

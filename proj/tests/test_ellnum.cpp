#include <catch2/catch_amalgamated.hpp>

#include "hyperderiv/ellnum.hpp"
#include "hyperderiv/verify.hpp"

using namespace hyperderiv;

TEST_CASE("wp_coeffs: degenerate curve and first coefficients") {
    const SeriesG1 s0 = wp_coeffs(0.0L, 0.0L, 12);
    for (int k = 1; k <= 12; ++k) CHECK(s0.c[k] == 0.0L);  // wp = z^-2 exactly
    const SeriesG1 s = wp_coeffs(Rational(1), Rational(2), 12);
    CHECK(s.c[1] == Catch::Approx(-1.0 / 5));
    CHECK(s.c[2] == Catch::Approx(-2.0 / 7));
    CHECK_THROWS_AS(wp_coeffs(1.0L, 2.0L, 3), std::invalid_argument);
}

TEST_CASE("series oracle: defect of the differential equation") {
    // This substitution validates the coefficient recursion itself.
    const SeriesG1 s = wp_coeffs(1.0L, 2.0L, 12);
    const Complex z(0.3L, 0.0L);
    CHECK(series_defect(s, z) < 1e-8L);
    // defect shrinks with truncation order
    const SeriesG1 s8 = wp_coeffs(1.0L, 2.0L, 8);
    const SeriesG1 s14 = wp_coeffs(1.0L, 2.0L, 14);
    CHECK(series_defect(s14, z) < series_defect(s8, z));
    CHECK(series_defect(s8, z) / std::max(series_defect(s14, z), 1e-30L) > 1e2L);
}

TEST_CASE("eval_functions: poles, radius guard, basic identities") {
    const SeriesG1 s = wp_coeffs(1.0L, 2.0L, 14);
    CHECK_THROWS_AS(eval_functions(s, Complex(0)), std::invalid_argument);
    CHECK_THROWS_AS(eval_functions(s, Complex(100.0L, 0)), std::invalid_argument);
    const Complex z(0.25L, 0.1L);
    const auto v = eval_functions(s, z);
    // wp'' = 6 wp^2 + 2 l4
    CHECK(std::abs(v.wp2 - (Complex(6) * v.wp * v.wp + Complex(2))) < 1e-8L);
    // sigma(z)/z -> 1 near 0
    const auto v0 = eval_functions(s, Complex(1e-3L, 0));
    CHECK(std::abs(v0.sigma / Complex(1e-3L) - Complex(1)) < 1e-6L);
    // zeta' = -wp by finite differences
    const AnalyticOperators ops(14);
    const AnalyticFn zeta_fn = [](Complex zz, long double a, long double b) {
        return eval_functions(wp_coeffs(a, b, 14), zz).zeta;
    };
    CHECK(std::abs(ops.d_z(zeta_fn)(z, 1.0L, 2.0L) + v.wp) < 1e-9L);
}

TEST_CASE("lambda_partials: series derivatives at lambda = 0") {
    // d wp / d l4 = -z^2/5 + O(lambda), d wp / d l6 = -z^4/7
    const Complex z(0.2L, 0.05L);
    const auto lp = lambda_partials(
        [&](long double a, long double b) { return eval_functions(wp_coeffs(a, b, 14), z).wp; }, 0.0L, 0.0L);
    CHECK(std::abs(lp.d_l4 + z * z / Complex(5)) < 1e-9L);
    CHECK(std::abs(lp.d_l6 + z * z * z * z / Complex(7)) < 1e-9L);
    const auto zero = lambda_partials([](long double, long double) { return Complex(7); }, 1.0L, 2.0L);
    CHECK(std::abs(zero.d_l4) == 0.0L);
    CHECK(std::abs(zero.d_l6) == 0.0L);
}

TEST_CASE("genus-1 generator identities at the default samples") {
    const auto pipeline = Pipeline::build(1);
    const auto rep = verify_genus1_generators(pipeline.fields, pipeline.pm, default_g1_samples(), 1e-6L);
    CHECK(rep.rows.size() == 75);  // 15 samples x 5 identities
    for (const auto& r : rep.rows) {
        INFO(r.identity << " err=" << static_cast<double>(r.abs_error));
        CHECK(r.pass);
    }
    CHECK(rep.all_pass);
    CHECK(!rep.scalar_mismatch);
}

TEST_CASE("genus-1 bracket identities at the default samples") {
    const auto pipeline = Pipeline::build(1);
    const auto rep = verify_genus1_brackets(pipeline.fields, default_g1_samples(), 1e-5L);
    for (const auto& r : rep.rows) {
        INFO(r.identity << " err=" << static_cast<double>(r.abs_error));
        CHECK(r.pass);
    }
    CHECK(rep.all_pass);
}

TEST_CASE("scalar-mismatch diagnostic fires on a rescaled field") {
    auto pipeline = Pipeline::build(1);
    // rescale L2 by 2: the analytic side no longer matches, uniformly
    std::map<VarId, Polynomial> img;
    for (const auto& [v, p] : pipeline.fields.at(2).images()) img.emplace(v, Rational(2) * p);
    pipeline.fields.fields.erase(2);
    pipeline.fields.fields.emplace(2, Derivation(1, 2, std::move(img)));
    const auto rep = verify_genus1_generators(pipeline.fields, pipeline.pm, default_g1_samples(), 1e-6L);
    CHECK(!rep.all_pass);
    CHECK(rep.scalar_mismatch);
    CHECK(rep.fitted_scalar == Catch::Approx(0.5).margin(1e-3));
}

TEST_CASE("sample lambdas avoid the discriminant") {
    for (const auto& s : default_g1_samples()) CHECK_NOTHROW(assert_off_discriminant(s.l4, s.l6));
    CHECK_THROWS_AS(assert_off_discriminant(Rational(-3), Rational(2)), std::invalid_argument);
}

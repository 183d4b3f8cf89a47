#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hyperderiv/fields.hpp"
#include "hyperderiv/linalg.hpp"
#include "hyperderiv/sampling.hpp"
#include "hyperderiv/textio.hpp"

using namespace hyperderiv;

namespace {

Polynomial rand_homogeneous(std::mt19937_64& rng, int w, const std::vector<VarId>& alphabet, int genus) {
    const auto basis = monomial_basis(w, alphabet);
    std::vector<Polynomial::Term> ts;
    for (const auto& m : basis)
        if (rand_int(rng, 0, 2) == 0) ts.emplace_back(m, rand_rational(rng, 9));
    return Polynomial::from_terms(genus, std::move(ts));
}

}  // namespace

TEST_CASE("rational invariants") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, -2) == Rational(-1, 2));
    CHECK(Rational(-1, 2).den_str() == "2");
    CHECK(Rational(0, 7).str() == "0");
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK((Rational(3, 5) * Rational(5, 3)) == Rational(1));
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
    CHECK(Rational("7/21") == Rational(1, 3));
    CHECK(Rational(-3, 7) < Rational(1, 9));
}

TEST_CASE("varid construction and weights") {
    CHECK(weight(make_x(3, 1, 1)) == 4);
    CHECK(weight(make_lambda(6, 1)) == 6);
    CHECK(weight(make_w(3, 5, 3)) == 8);
    CHECK(weight(make_f(0)) == 2);
    CHECK_THROWS_AS(make_x(1, 3, 1), std::invalid_argument);   // j beyond 2g-1
    CHECK_THROWS_AS(make_x(4, 1, 1), std::invalid_argument);   // bad i
    CHECK_THROWS_AS(make_x(1, 2, 2), std::invalid_argument);   // even j
    CHECK_THROWS_AS(make_lambda(8, 1), std::invalid_argument); // beyond 4g+2
    CHECK_THROWS_AS(make_lambda(5, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_w(3, 3, 1), std::invalid_argument);   // no w at genus 1
    CHECK(make_w(5, 3, 3) == make_w(3, 5, 3));                 // normalized order
    CHECK(x_coordinates(2).size() == 6);
}

TEST_CASE("poly_arith examples") {
    const Polynomial x11 = x_poly(1, 1, 1), x31 = x_poly(3, 1, 1);
    CHECK(x11 + x11 == Rational(2) * x11);
    CHECK(((x11 + x31) * Polynomial::zero(1)).is_zero());
    CHECK((x11 * x11 - x11 * x11).is_zero());
    CHECK((x11 * x11 - x11 * x11).term_count() == 0);
    CHECK_THROWS_AS(x_poly(1, 1, 1) + x_poly(1, 1, 2), std::invalid_argument);
}

TEST_CASE("weight_of examples") {
    CHECK(x_poly(3, 1, 1).weight_of() == 4);
    const Polynomial p = x_poly(1, 1, 1) * x_poly(1, 1, 1) + x_poly(3, 1, 1);
    CHECK(p.weight_of() == 4);
    CHECK(!(x_poly(1, 1, 1) + x_poly(2, 1, 1)).weight_of().has_value());
}

TEST_CASE("monomial_basis examples") {
    const auto b4 = monomial_basis(4, x_alphabet(1));
    REQUIRE(b4.size() == 2);
    CHECK(b4[0] == Monomial(make_x(1, 1, 1), 2));
    CHECK(b4[1] == Monomial(make_x(3, 1, 1)));
    CHECK(monomial_basis(1, x_alphabet(3)).empty());
    const auto b0 = monomial_basis(0, x_alphabet(2));
    REQUIRE(b0.size() == 1);
    CHECK(b0[0].is_unit());
}

TEST_CASE("apply_derivation examples") {
    const Derivation L1 = build_L1(1);
    CHECK(L1.apply(x_poly(1, 1, 1)) == x_poly(2, 1, 1));
    CHECK(L1.apply(x_poly(1, 1, 1) * x_poly(1, 1, 1)) ==
          Rational(2) * (x_poly(1, 1, 1) * x_poly(2, 1, 1)));
    CHECK(L1.apply(x_poly(3, 1, 1)) == Rational(12) * (x_poly(1, 1, 1) * x_poly(2, 1, 1)));
    CHECK_THROWS_AS(L1.apply(lambda_poly(4, 1)), std::invalid_argument);
}

TEST_CASE("derivation weight homogeneity is checked") {
    std::map<VarId, Polynomial> img;
    img.emplace(make_x(1, 1, 1), x_poly(1, 1, 1));  // weight 2, expected 3 for weight-1 field
    img.emplace(make_x(2, 1, 1), Polynomial::zero(1));
    img.emplace(make_x(3, 1, 1), Polynomial::zero(1));
    CHECK_THROWS_AS(Derivation(1, 1, img), std::invalid_argument);
}

TEST_CASE("solve_rational_linear_system examples") {
    {
        const auto r = solve_rational_linear_system({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}},
                                                    {Rational(1), Rational(2)});
        REQUIRE(r.kind == LinearSolveResult::Kind::Unique);
        CHECK(r.values == RationalVector{Rational(1), Rational(2)});
    }
    {
        const auto r = solve_rational_linear_system({{Rational(1), Rational(1)}}, {Rational(3)});
        REQUIRE(r.kind == LinearSolveResult::Kind::Underdetermined);
        CHECK(r.values == RationalVector{Rational(1), Rational(-1)});
    }
    {
        const auto r = solve_rational_linear_system({{Rational(1)}, {Rational(1)}}, {Rational(1), Rational(2)});
        CHECK(r.kind == LinearSolveResult::Kind::None);
    }
}

TEST_CASE("solve property: exactness of outcomes") {
    std::mt19937_64 rng(42);
    for (int iter = 0; iter < 60; ++iter) {
        const int rows = static_cast<int>(rand_int(rng, 1, 5));
        const int cols = static_cast<int>(rand_int(rng, 1, 5));
        RationalMatrix A(rows, RationalVector(cols));
        RationalVector b(rows);
        for (auto& r : A)
            for (auto& v : r) v = rand_rational(rng, 6);
        for (auto& v : b) v = rand_rational(rng, 6);
        const auto res = solve_rational_linear_system(A, b);
        if (res.kind == LinearSolveResult::Kind::Unique) {
            for (int i = 0; i < rows; ++i) {
                Rational acc(0);
                for (int j = 0; j < cols; ++j) acc += A[i][j] * res.values[j];
                CHECK(acc == b[i]);
            }
        } else if (res.kind == LinearSolveResult::Kind::Underdetermined) {
            for (int i = 0; i < rows; ++i) {
                Rational acc(0);
                for (int j = 0; j < cols; ++j) acc += A[i][j] * res.values[j];
                CHECK(acc == Rational(0));
            }
        }
    }
}

TEST_CASE("property: weights are additive under multiplication") {
    std::mt19937_64 rng(7);
    const auto alphabet = x_alphabet(2);
    for (int iter = 0; iter < 40; ++iter) {
        const int wp = static_cast<int>(rand_int(rng, 2, 8));
        const int wq = static_cast<int>(rand_int(rng, 2, 8));
        const Polynomial p = rand_homogeneous(rng, wp, alphabet, 2);
        const Polynomial q = rand_homogeneous(rng, wq, alphabet, 2);
        const Polynomial pq = p * q;
        if (pq.is_zero()) continue;
        CHECK(pq.weight_of() == wp + wq);
    }
}

TEST_CASE("property: Leibniz rule holds exactly") {
    std::mt19937_64 rng(11);
    const Derivation L1 = build_L1(2);
    const auto alphabet = x_alphabet(2);
    for (int iter = 0; iter < 30; ++iter) {
        const Polynomial p = rand_homogeneous(rng, static_cast<int>(rand_int(rng, 2, 7)), alphabet, 2);
        const Polynomial q = rand_homogeneous(rng, static_cast<int>(rand_int(rng, 2, 7)), alphabet, 2);
        CHECK(L1.apply(p * q) == L1.apply(p) * q + p * L1.apply(q));
    }
}

TEST_CASE("canonical serialization examples") {
    const Polynomial p = Rational(1, 2) * x_poly(3, 1, 1) - Rational(3) * (x_poly(1, 1, 1) * x_poly(1, 1, 1));
    CHECK(canonical_serialize(p) == "1/2*x[3,1] - 3*x[1,1]^2");
    CHECK(canonical_serialize(Polynomial::zero(1)) == "0");
    CHECK(canonical_parse("0", 1).is_zero());
    CHECK(canonical_parse("  1/2 * x[3,1] - 3*x[1,1]^2 ", 1) == p);
    CHECK(canonical_parse("x[1,1]*x[3,1]", 1) == x_poly(1, 1, 1) * x_poly(3, 1, 1));
    CHECK(canonical_parse("-x[1,1] + x[1,1]", 1).is_zero());
    CHECK(canonical_parse("5", 2) == Polynomial::constant(2, 5));
    CHECK(canonical_serialize(Polynomial::constant(1, Rational(-7, 3))) == "-7/3");
}

TEST_CASE("parse rejects malformed input with position info") {
    CHECK_THROWS_AS(canonical_parse("1/2*", 1), ParseError);
    CHECK_THROWS_AS(canonical_parse("x[1,2]", 1), ParseError);  // even j
    CHECK_THROWS_AS(canonical_parse("x[1,1 + 2", 1), ParseError);
    CHECK_THROWS_AS(canonical_parse("", 1), ParseError);
    CHECK_THROWS_AS(canonical_parse("3x[1,1]", 1), ParseError);  // missing '*'
    try {
        canonical_parse("x[1,1] $ 2", 1);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() == 7);
    }
}

TEST_CASE("property: serialize/parse round trip") {
    std::mt19937_64 rng(23);
    std::vector<VarId> alphabet = x_alphabet(2);
    for (const auto& l : lambda_alphabet(2)) alphabet.push_back(l);
    alphabet.push_back(make_w(3, 3, 2));
    for (int iter = 0; iter < 60; ++iter) {
        std::vector<Polynomial::Term> ts;
        const int n = static_cast<int>(rand_int(rng, 0, 6));
        for (int t = 0; t < n; ++t) {
            std::vector<Monomial::Factor> fs;
            const int k = static_cast<int>(rand_int(rng, 0, 3));
            for (int f = 0; f < k; ++f)
                fs.emplace_back(alphabet[rand_int(rng, 0, static_cast<long>(alphabet.size()) - 1)],
                                static_cast<int>(rand_int(rng, 1, 3)));
            ts.emplace_back(Monomial::from_factors(fs), rand_rational(rng, 12));
        }
        const Polynomial p = Polynomial::from_terms(2, std::move(ts));
        const std::string s = canonical_serialize(p);
        CHECK(canonical_parse(s, 2) == p);
        CHECK(canonical_serialize(canonical_parse(s, 2)) == s);  // canonical form is a fixpoint
    }
}

TEST_CASE("exact_divide") {
    const Polynomial a = x_poly(1, 1, 1) + x_poly(2, 1, 1);
    const Polynomial b = x_poly(1, 1, 1) * x_poly(1, 1, 1) - x_poly(3, 1, 1);
    const auto q = exact_divide(a * b, b);
    REQUIRE(q.has_value());
    CHECK(*q == a);
    CHECK(!exact_divide(a * b + Polynomial::constant(1, 1), b).has_value());
}

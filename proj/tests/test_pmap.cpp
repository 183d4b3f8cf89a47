#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "hyperderiv/liegen.hpp"
#include "hyperderiv/textio.hpp"
#include "hyperderiv/version.hpp"

using namespace hyperderiv;

TEST_CASE("relation2_poly examples") {
    CHECK(relation2_poly(1, 1).poly == canonical_parse("x[3,1] - 6*x[1,1]^2 - 2*l[4]", 1));
    CHECK(relation2_poly(1, 2).poly == canonical_parse("x[3,1] - 6*x[1,1]^2 - 4*x[1,3] - 2*l[4]", 2));
    CHECK(relation2_poly(3, 2).poly == canonical_parse("x[3,3] - 6*x[1,1]*x[1,3] + 2*w[3,3]", 2));
    CHECK_THROWS_AS(relation2_poly(2, 2), std::invalid_argument);
    CHECK_THROWS_AS(relation2_poly(5, 2), std::invalid_argument);
}

TEST_CASE("relation3_poly examples") {
    CHECK(relation3_poly(1, 1, 1).poly ==
          canonical_parse("x[2,1]^2 - 4*x[1,1]^3 - 4*l[4]*x[1,1] - 4*l[6]", 1));
    CHECK(relation3_poly(1, 3, 2).poly ==
          canonical_parse("x[2,1]*x[2,3] - 4*x[1,1]^2*x[1,3] - 4*x[1,3]^2 + 2*x[1,1]*w[3,3] + 2*x[1,3]^2 "
                          "- 2*l[4]*x[1,3] - 2*l[8]",
                          2));
    CHECK(relation3_poly(3, 3, 2).poly ==
          canonical_parse("x[2,3]^2 - 4*x[1,1]*x[1,3]^2 + 4*x[1,3]*w[3,3] - 4*l[10]", 2));
    // every relation is homogeneous
    for (int g = 1; g <= 3; ++g)
        for (const auto& r : all_relations(g)) CHECK(r.poly.weight_of().has_value());
}

TEST_CASE("eliminate_pmap genus 1") {
    const auto pm = eliminate_pmap(1);
    CHECK(pm.lambda(4) == canonical_parse("1/2*x[3,1] - 3*x[1,1]^2", 1));
    CHECK(pm.lambda(6) == canonical_parse("1/4*x[2,1]^2 + 2*x[1,1]^3 - 1/2*x[1,1]*x[3,1]", 1));
    const auto deg = pmap_degree_report(pm);
    CHECK(deg.at(4) == 2);
    CHECK(deg.at(6) == 3);
}

TEST_CASE("eliminate_pmap genus 2: worklist order and w") {
    const auto pm = eliminate_pmap(2);
    REQUIRE(pm.elimination_trace.size() == 5);
    CHECK(pm.elimination_trace[0] == std::make_pair(std::string("l[4]"), std::string("(2,i=1)")));
    CHECK(pm.elimination_trace[1] == std::make_pair(std::string("w[3,3]"), std::string("(2,i=3)")));
    CHECK(pm.elimination_trace[2].first == "l[6]");
    CHECK(pm.elimination_trace[3].first == "l[8]");
    CHECK(pm.elimination_trace[4].first == "l[10]");
    CHECK(pm.w_polys.at({3, 3}) == canonical_parse("3*x[1,1]*x[1,3] - 1/2*x[3,3]", 2));
}

TEST_CASE("eliminate_pmap genus 3: elimination sources and worklist order") {
    const auto pm = eliminate_pmap(3);
    // Lowest-weight-resolvable-first interleaving.
    std::vector<std::string> unknowns;
    for (const auto& [u, r] : pm.elimination_trace) unknowns.push_back(u);
    CHECK(unknowns == std::vector<std::string>{"l[4]", "w[3,3]", "l[6]", "w[3,5]", "l[8]", "w[5,5]",
                                               "l[10]", "l[12]", "l[14]"});
    // Each unknown resolves from the expected relation; in particular w[5,5]
    // comes from (3,(1,5)), whose l[10] coefficient vanishes.
    std::map<std::string, std::string> source(pm.elimination_trace.begin(), pm.elimination_trace.end());
    CHECK(source.at("l[4]") == "(2,i=1)");
    CHECK(source.at("w[3,3]") == "(2,i=3)");
    CHECK(source.at("w[3,5]") == "(2,i=5)");
    CHECK(source.at("l[6]") == "(3,(1,1))");
    CHECK(source.at("l[8]") == "(3,(1,3))");
    CHECK(source.at("w[5,5]") == "(3,(1,5))");
    CHECK(source.at("l[10]") == "(3,(3,3))");
    CHECK(source.at("l[12]") == "(3,(3,5))");
    CHECK(source.at("l[14]") == "(3,(5,5))");
}

TEST_CASE("back-substitution: all relations vanish for g = 1, 2, 3") {
    for (int g = 1; g <= 3; ++g) {
        const auto pm = eliminate_pmap(g);
        for (const auto& rel : all_relations(g)) {
            Polynomial q = pm.pullback(rel.poly);
            for (const auto& [ab, wp] : pm.w_polys) q = q.substitute(make_w(ab.first, ab.second, g), wp);
            CHECK(q.is_zero());
        }
        for (const auto& [s, p] : pm.lambda_polys) {
            CHECK(p.is_homogeneous_of(s));
            CHECK(p.degree_in_x() <= 3);
        }
        for (const auto& [ab, p] : pm.w_polys) CHECK(p.is_homogeneous_of(ab.first + ab.second));
    }
}

TEST_CASE("elimination is order-independent") {
    std::mt19937_64 rng(kDefaultSeed);
    for (int g = 1; g <= 3; ++g) {
        const auto reference = eliminate_pmap(g);
        const std::size_t n_rel = all_relations(g).size();
        for (int iter = 0; iter < 4; ++iter) {
            std::vector<std::size_t> order(n_rel);
            std::iota(order.begin(), order.end(), 0);
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
            const auto pm = eliminate_pmap(g, &order);
            CHECK(pm.lambda_polys == reference.lambda_polys);
            CHECK(pm.w_polys == reference.w_polys);
        }
    }
}

TEST_CASE("invariance_check examples") {
    const auto pm = eliminate_pmap(1);
    const Derivation L1 = build_L1(1);
    // explicit expansion: L1(p*l4) = 1/2 * 12 x11 x21 - 6 x11 x21 = 0
    CHECK(L1.apply(pm.lambda(4)).is_zero());
    CHECK(L1.apply(pm.lambda(6)).is_zero());
    std::vector<std::pair<int, const Derivation*>> odds{{1, &L1}};
    CHECK(invariance_check(pm, odds).empty());

    // a perturbed "field" must be reported
    const Derivation euler = build_euler(1);
    std::vector<std::pair<int, const Derivation*>> wrong{{0, &euler}};
    const auto fails = invariance_check(pm, wrong);
    CHECK(fails.size() == 2);  // Euler scales both pullbacks instead of killing them
}

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <functional>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyperderiv/ellnum.hpp"
#include "hyperderiv/freering.hpp"
#include "hyperderiv/report.hpp"
#include "hyperderiv/version.hpp"

namespace hyperderiv {

struct RunConfig {
    int genus = 1;
    unsigned long long seed = kDefaultSeed;
    int depth = 6;    // hierarchy depth K
    int trunc = 14;   // series truncation N
    double tol = 1e-5;  // numeric tolerance for bracket identities; generators use tol/10
    std::string format = "json";
    std::string method;  // tangency: "divisibility" | "sample" | "" (by genus)
    int trials = 10;
    bool parallel = false;
    bool full_discriminant = false;
    bool numeric = false;
    bool experimental = false;
    std::string tamper;  // field label to perturb, e.g. "L2"
};

struct SuiteResult {
    std::string name;
    bool pass = true;
    std::vector<std::string> details;
    double seconds = 0;

    void fail(const std::string& msg) {
        pass = false;
        details.push_back("FAIL: " + msg);
    }
    void note(const std::string& msg) { details.push_back(msg); }
};

struct VerificationReport {
    std::vector<SuiteResult> suites;
    bool all_pass = true;
    // 1-based index of the first failing suite, 0 when everything passed.
    int first_failing() const {
        for (std::size_t i = 0; i < suites.size(); ++i)
            if (!suites[i].pass) return static_cast<int>(i) + 1;
        return 0;
    }
};

// One fully built pipeline: relations eliminated, all 3g fields constructed.
struct Pipeline {
    int genus = 0;
    PMapResult pm;
    FieldSet fields;

    static Pipeline build(int genus) {
        Pipeline p;
        p.genus = genus;
        p.pm = eliminate_pmap(genus);
        p.fields = build_field_set(genus, p.pm);
        return p;
    }
};

namespace suites {

inline SuiteResult relations(const Pipeline& p) {
    SuiteResult r;
    r.name = "relations";
    for (const auto& rel : all_relations(p.genus)) {
        Polynomial q = p.pm.pullback(rel.poly);
        for (const auto& [ab, wp] : p.pm.w_polys) q = q.substitute(make_w(ab.first, ab.second, p.genus), wp);
        if (!q.is_zero()) r.fail(rel.tag.str() + " does not vanish: " + canonical_serialize(q));
    }
    r.note(std::to_string(all_relations(p.genus).size()) + " relations vanish after substitution");
    return r;
}

inline SuiteResult pmap_suite(const Pipeline& p) {
    SuiteResult r;
    r.name = "pmap";
    for (const auto& [s, poly] : p.pm.lambda_polys) {
        if (!poly.is_homogeneous_of(s)) r.fail("p*l" + std::to_string(s) + " is not homogeneous of weight " + std::to_string(s));
        if (poly.degree_in_x() > 3) r.fail("p*l" + std::to_string(s) + " exceeds degree 3");
        r.note("deg p*l" + std::to_string(s) + " = " + std::to_string(poly.degree_in_x()));
    }
    for (const auto& [ab, poly] : p.pm.w_polys)
        if (!poly.is_homogeneous_of(ab.first + ab.second))
            r.fail("w[" + std::to_string(ab.first) + "," + std::to_string(ab.second) + "] weight mismatch");
    std::vector<std::pair<int, const Derivation*>> odds;
    for (int s = 1; s <= 2 * p.genus - 1; s += 2) odds.emplace_back(s, &p.fields.at(s));
    for (const auto& f : invariance_check(p.pm, odds))
        r.fail("L" + std::to_string(f.field_label) + "(p*l" + std::to_string(f.lambda_index) +
               ") = " + canonical_serialize(f.residual));
    if (r.pass) r.note("all odd fields annihilate every p*l");
    return r;
}

inline SuiteResult kdv(const Pipeline& p, int depth) {
    SuiteResult r;
    r.name = "kdv";
    KdvHierarchy h(depth + 1);
    if (!(h.phi(1) == f_poly(0))) r.fail("Phi_2 != f(0)");
    for (int k = 1; k <= depth; ++k)
        if (!h.phi(k).is_homogeneous_of(2 * k)) r.fail("Phi_" + std::to_string(2 * k) + " weight mismatch");
    for (int k = 1; k <= depth; ++k) {
        auto step = kdv_step(free_derive(h.phi(k)));
        if (!step) { r.fail("recursion step not exact at k=" + std::to_string(k)); continue; }
        if (!(free_derive(h.phi(k + 1)) == *step))
            r.fail("D(Phi_" + std::to_string(2 * k + 2) + ") != R(D(Phi_" + std::to_string(2 * k) + "))");
    }
    r.note("recursion exact through Phi_" + std::to_string(2 * depth + 2));
    if (p.genus >= 2) {
        const Polynomial lhs = embed_to_x(h.phi(2), p.genus) - Rational(1, 2) * p.pm.lambda(4);
        if (!(lhs == x_poly(1, 3, p.genus))) r.fail("embed(Phi_4) - 1/2 p*l4 != x[1,3]");
        else r.note("embed(Phi_4) - 1/2 p*l4 = x[1,3]");
    }
    if (p.genus >= 3) {
        // The weight-6 invariant combination: embed(Phi_6) - x[1,5] +
        // 1/2 x[1,1] p*l4 is annihilated by L1 and proportional to p*l6; the
        // proportionality constant is determined here, not assumed.
        const Polynomial E = embed_to_x(h.phi(3), p.genus) - x_poly(1, 5, p.genus) +
                             Rational(1, 2) * (x_poly(1, 1, p.genus) * p.pm.lambda(4));
        if (!p.fields.at(1).apply(E).is_zero()) r.fail("L1(embed(Phi_6) - x[1,5] + 1/2 x[1,1] p*l4) != 0");
        const Polynomial& l6 = p.pm.lambda(6);
        const Rational c = E.coefficient_of(l6.leading_term().first) / l6.leading_term().second;
        if (!(E == c * l6)) r.fail("embed(Phi_6) - x[1,5] + 1/2 x[1,1] p*l4 is not proportional to p*l6");
        else r.note("embed(Phi_6) - x[1,5] + 1/2 x[1,1] p*l4 = (" + c.str() + ") * p*l6");
    }
    return r;
}

inline SuiteResult com1(const Pipeline& p) {
    SuiteResult r;
    r.name = "com1";
    std::map<int, Derivation> odds;
    for (int s = 1; s <= 2 * p.genus - 1; s += 2) odds.emplace(s, p.fields.at(s));
    for (int k = 0; k <= 2 * p.genus - 1; ++k) {
        const Derivation lhs = bracket(p.fields.at(1), p.fields.at(2 * k));
        if (!(lhs == com1_rhs(k, p.genus, odds))) r.fail("row k=" + std::to_string(k) + " violated");
    }
    r.note("all " + std::to_string(2 * p.genus) + " rows hold exactly");
    return r;
}

inline SuiteResult projectability(const Pipeline& p) {
    SuiteResult r;
    r.name = "projectability";
    for (int s = 1; s <= 2 * p.genus - 1; s += 2) {
        for (const auto& [m, res] : check_projectable(p.fields.at(s), p.pm, nullptr))
            if (!res.is_zero()) r.fail("L" + std::to_string(s) + " on p*l" + std::to_string(m) + " nonzero");
    }
    for (int k = 0; k <= 2 * p.genus - 1; ++k) {
        const LambdaField L = build_lambda_field(k, p.genus);
        for (const auto& [m, res] : check_projectable(p.fields.at(2 * k), p.pm, &L))
            if (!res.is_zero())
                r.fail("L" + std::to_string(2 * k) + " on p*l" + std::to_string(m) +
                       " residual " + canonical_serialize(res));
    }
    if (r.pass) r.note("every field is projectable with its declared pushforward");
    return r;
}

inline SuiteResult closure(const Pipeline& p) {
    SuiteResult r;
    r.name = "closure";
    try {
        const StructureTable tab = structure_table(p.fields);
        for (const auto& [ab, cs] : tab.brackets) {
            const auto [a, b] = ab;
            if (a % 2 == 1 && b % 2 == 1 && !cs.empty()) r.fail("odd-odd bracket [L" + std::to_string(a) + ",L" + std::to_string(b) + "] nonzero");
            for (const auto& [m, c] : cs)
                if (!c.is_homogeneous_of(a + b - m))
                    r.fail("coefficient weight bookkeeping broken at [L" + std::to_string(a) + ",L" + std::to_string(b) + "]");
        }
        r.note(std::to_string(tab.brackets.size()) + " brackets expressed in the module basis");
    } catch (const std::exception& e) {
        r.fail(e.what());
    }
    return r;
}

inline SuiteResult jacobi(const Pipeline& p, unsigned long long seed) {
    SuiteResult r;
    r.name = "jacobi";
    const auto labels = p.fields.labels();
    std::vector<std::array<int, 3>> triples;
    if (p.genus <= 2) {
        for (std::size_t a = 0; a < labels.size(); ++a)
            for (std::size_t b = a + 1; b < labels.size(); ++b)
                for (std::size_t c = b + 1; c < labels.size(); ++c)
                    triples.push_back({labels[a], labels[b], labels[c]});
    } else {
        std::mt19937_64 rng(seed);
        std::set<std::array<int, 3>> seen;
        while (triples.size() < 30) {
            std::array<int, 3> t;
            t[0] = labels[rand_int(rng, 0, static_cast<long>(labels.size()) - 1)];
            t[1] = labels[rand_int(rng, 0, static_cast<long>(labels.size()) - 1)];
            t[2] = labels[rand_int(rng, 0, static_cast<long>(labels.size()) - 1)];
            std::sort(t.begin(), t.end());
            if (t[0] == t[1] || t[1] == t[2]) continue;
            if (seen.insert(t).second) triples.push_back(t);
        }
    }
    for (const auto& [a, b, c] : triples) {
        Derivation J = bracket(p.fields.at(a), bracket(p.fields.at(b), p.fields.at(c))) +
                       bracket(p.fields.at(b), bracket(p.fields.at(c), p.fields.at(a))) +
                       bracket(p.fields.at(c), bracket(p.fields.at(a), p.fields.at(b)));
        if (!J.is_zero())
            r.fail("Jacobi fails on (L" + std::to_string(a) + ",L" + std::to_string(b) + ",L" + std::to_string(c) + ")");
    }
    r.note(std::to_string(triples.size()) + " triples verified exactly");
    return r;
}

inline SuiteResult tangency(const Pipeline& p, const RunConfig& cfg) {
    SuiteResult r;
    r.name = "tangency";
    std::string method = cfg.method;
    if (method.empty()) method = (p.genus <= 2 || cfg.full_discriminant) ? "divisibility" : "sample";
    if (method == "divisibility" && p.genus >= 3 && !cfg.full_discriminant) {
        r.fail("divisibility at genus 3 requires --full-discriminant");
        return r;
    }
    if (method == "divisibility") {
        const Polynomial disc = discriminant(p.genus);
        r.note("disc: " + std::to_string(disc.term_count()) + " terms, weight " +
               std::to_string(*disc.weight_of()));
        for (int k = 0; k <= 2 * p.genus - 1; ++k) {
            auto h = divisibility_tangency(build_lambda_field(k, p.genus), disc);
            if (!h) r.fail("L" + std::to_string(2 * k) + "(disc) is not divisible by disc");
            else r.note("L" + std::to_string(2 * k) + ": h = " + canonical_serialize(*h));
        }
    } else if (method == "sample") {
        for (int k = 0; k <= 2 * p.genus - 1; ++k) {
            const auto rep = sample_singular_tangency(build_lambda_field(k, p.genus), p.genus, cfg.trials,
                                                      cfg.seed + static_cast<unsigned long long>(k));
            if (!rep.all_pass()) r.fail("L" + std::to_string(2 * k) + ": only " + std::to_string(rep.passes) +
                                        "/" + std::to_string(rep.trials) + " sampled points tangent");
            else r.note("L" + std::to_string(2 * k) + ": " + std::to_string(rep.passes) + "/" +
                        std::to_string(rep.trials) + " sampled points tangent (" +
                        std::to_string(rep.degenerate_resamples) + " degenerate resamples)");
        }
    } else {
        r.fail("unknown tangency method '" + method + "'");
    }
    return r;
}

inline SuiteResult independence(const Pipeline& p, unsigned long long seed) {
    SuiteResult r;
    r.name = "independence";
    const auto rep = independence_check(p.fields, p.pm, seed);
    if (!rep.full_rank) r.fail("image matrix rank " + std::to_string(rep.rank));
    r.note("rank " + std::to_string(rep.rank) + " at a point with disc = " + rep.discriminant_value.str() +
           " (" + std::to_string(rep.resamples) + " resamples)");
    return r;
}

inline SuiteResult numeric_fs(const Pipeline& p, const RunConfig& cfg) {
    SuiteResult r;
    r.name = "numeric-fs";
    if (p.genus != 1) {
        r.fail("numeric verification is genus-1 only");
        return r;
    }
    const auto samples = default_g1_samples();
    const long double tol = static_cast<long double>(cfg.tol);
    // Series self-consistency at every sample.
    for (const auto& smp : samples) {
        const long double l4 = smp.l4.to_long_double(), l6 = smp.l6.to_long_double();
        const SeriesG1 s = wp_coeffs(l4, l6, cfg.trunc);
        if (series_defect(s, smp.z) >= 1e-8L) r.fail("series defect >= 1e-8 at a sample");
        const SeriesG1 s8 = wp_coeffs(l4, l6, 8);
        if (series_defect(s8, smp.z) < series_defect(s, smp.z))
            r.fail("series defect does not shrink with truncation order");
        // zeta' = -wp and (ln sigma)' = zeta to 1e-9
        const AnalyticOperators ops(cfg.trunc);
        const auto v = eval_functions(s, smp.z);
        const AnalyticFn zeta_fn = [&](Complex z, long double a, long double b) {
            return eval_functions(wp_coeffs(a, b, cfg.trunc), z).zeta;
        };
        const AnalyticFn logsig_fn = [&](Complex z, long double a, long double b) {
            return std::log(eval_functions(wp_coeffs(a, b, cfg.trunc), z).sigma);
        };
        if (std::abs(ops.d_z(zeta_fn)(smp.z, l4, l6) + v.wp) >= 1e-9L) r.fail("zeta' != -wp at a sample");
        if (std::abs(ops.d_z(logsig_fn)(smp.z, l4, l6) - v.zeta) >= 1e-9L) r.fail("(ln sigma)' != zeta at a sample");
    }
    {  // sigma normalization at tiny |z|
        const SeriesG1 s = wp_coeffs(1.0L, 2.0L, cfg.trunc);
        const Complex z(1e-3L, 0);
        if (std::abs(eval_functions(s, z).sigma / z - Complex(1)) >= 1e-5L) r.fail("sigma(z)/z != 1 near 0");
    }
    r.note("series self-tests passed at " + std::to_string(samples.size()) + " samples");

    const auto gen = verify_genus1_generators(p.fields, p.pm, samples, tol / 10, cfg.trunc);
    int gen_fail = 0;
    for (const auto& row : gen.rows)
        if (!row.pass) ++gen_fail;
    if (gen_fail) r.fail(std::to_string(gen_fail) + " generator rows exceed tolerance");
    if (gen.scalar_mismatch)
        r.note("normalization diagnostic: FS2 rows match after scaling by " + float_str(gen.fitted_scalar));
    r.note(std::to_string(gen.rows.size()) + " generator rows checked at tol " + float_str(tol / 10));

    const auto br = verify_genus1_brackets(p.fields, samples, tol, cfg.trunc);
    int br_fail = 0;
    for (const auto& row : br.rows)
        if (!row.pass) ++br_fail;
    if (br_fail) r.fail(std::to_string(br_fail) + " bracket rows exceed tolerance");
    r.note(std::to_string(br.rows.size()) + " bracket rows checked at tol " + float_str(tol));
    return r;
}

}  // namespace suites

// The full verification battery, in the documented order. The exit-code
// contract keys off the position of the first failing suite.
inline VerificationReport run_verification(const Pipeline& p, const RunConfig& cfg) {
    VerificationReport rep;
    std::vector<std::pair<std::string, std::function<SuiteResult()>>> plan;
    plan.emplace_back("relations", [&] { return suites::relations(p); });
    plan.emplace_back("pmap", [&] { return suites::pmap_suite(p); });
    plan.emplace_back("kdv", [&] { return suites::kdv(p, cfg.depth); });
    plan.emplace_back("com1", [&] { return suites::com1(p); });
    plan.emplace_back("projectability", [&] { return suites::projectability(p); });
    plan.emplace_back("closure", [&] { return suites::closure(p); });
    plan.emplace_back("jacobi", [&] { return suites::jacobi(p, cfg.seed); });
    plan.emplace_back("tangency", [&] { return suites::tangency(p, cfg); });
    plan.emplace_back("independence", [&] { return suites::independence(p, cfg.seed); });
    if (cfg.numeric) plan.emplace_back("numeric-fs", [&] { return suites::numeric_fs(p, cfg); });

    rep.suites.resize(plan.size());
    auto timed = [](const std::function<SuiteResult()>& f) {
        const auto t0 = std::chrono::steady_clock::now();
        SuiteResult r = f();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    };
    if (cfg.parallel) {
        std::vector<std::future<SuiteResult>> futs;
        futs.reserve(plan.size());
        for (auto& [name, fn] : plan) futs.push_back(std::async(std::launch::async, timed, fn));
        for (std::size_t i = 0; i < futs.size(); ++i) rep.suites[i] = futs[i].get();
    } else {
        for (std::size_t i = 0; i < plan.size(); ++i) rep.suites[i] = timed(plan[i].second);
    }
    for (const auto& s : rep.suites) rep.all_pass = rep.all_pass && s.pass;
    return rep;
}

}  // namespace hyperderiv

#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperderiv/derivation.hpp"
#include "hyperderiv/polynomial.hpp"

namespace hyperderiv {

// The projection p: C^{3g} -> C^{2g} of the commuting diagram, obtained by
// eliminating lambda_{2s} and the auxiliary w_{a,b} from the two families of
// fundamental relations between second logarithmic derivatives.

struct RelationTag {
    int family;  // 2 or 3
    int i;
    int k;  // unused for family 2

    std::string str() const {
        if (family == 2) return "(2,i=" + std::to_string(i) + ")";
        return "(3,(" + std::to_string(i) + "," + std::to_string(k) + "))";
    }
    friend bool operator==(const RelationTag&, const RelationTag&) = default;
};

struct RelationInstance {
    RelationTag tag;
    Polynomial poly;  // must vanish identically on the image
};

namespace detail {
// The mixed symbol p_{0;a,b}: merges with x_{1,max} when an index is 1,
// becomes w_{a,b} when both are >= 3, vanishes outside the alphabet.
inline Polynomial p0(int a, int b, int genus) {
    if (a > b) std::swap(a, b);
    if (b > 2 * genus - 1) return Polynomial::zero(genus);
    if (a == 1) return x_poly(1, b, genus);
    return w_poly(a, b, genus);
}
}  // namespace detail

// x_{3,i} = 6 x_{1,1} x_{1,i} + 6 x_{1,i+2} - 2 p_{0;3,i} + 2 lambda_4 [i=1],
// moved to the left-hand side.
inline RelationInstance relation2_poly(int i, int genus) {
    if (i < 1 || i % 2 == 0 || i > 2 * genus - 1) throw std::invalid_argument("relation2_poly: bad index");
    Polynomial rhs = Rational(6) * (x_poly(1, 1, genus) * x_poly(1, i, genus)) +
                     Rational(6) * x_poly(1, i + 2, genus) - Rational(2) * detail::p0(3, i, genus);
    if (i == 1) rhs += Rational(2) * lambda_poly(4, genus);
    return {RelationTag{2, i, 0}, x_poly(3, i, genus) - rhs};
}

// The quadratic family, transcribed with the same symbol conventions.
inline RelationInstance relation3_poly(int i, int k, int genus) {
    if (i > k) std::swap(i, k);
    if (i < 1 || i % 2 == 0 || k > 2 * genus - 1) throw std::invalid_argument("relation3_poly: bad indices");
    const Polynomial x11 = x_poly(1, 1, genus);
    Polynomial rhs =
        Rational(4) * (x11 * x_poly(1, i, genus) * x_poly(1, k, genus) +
                       x_poly(1, k, genus) * x_poly(1, i + 2, genus) +
                       x_poly(1, i, genus) * x_poly(1, k + 2, genus) + detail::p0(k + 2, i + 2, genus)) -
        Rational(2) * (x_poly(1, i, genus) * detail::p0(3, k, genus) +
                       x_poly(1, k, genus) * detail::p0(3, i, genus) + detail::p0(k, i + 4, genus) +
                       detail::p0(i, k + 4, genus));
    Polynomial delta1(genus);
    if (i == 1) delta1 += x_poly(1, k, genus);
    if (k == 1) delta1 += x_poly(1, i, genus);
    rhs += Rational(2) * (lambda_poly(4, genus) * delta1);
    const int dcoef = 2 * (i == k ? 1 : 0) + (k == i - 2 ? 1 : 0) + (i == k - 2 ? 1 : 0);
    if (dcoef != 0) rhs += Rational(2 * dcoef) * lambda_poly(i + k + 4, genus);
    return {RelationTag{3, i, k}, x_poly(2, i, genus) * x_poly(2, k, genus) - rhs};
}

inline std::vector<RelationInstance> all_relations(int genus) {
    std::vector<RelationInstance> rels;
    for (int i = 1; i <= 2 * genus - 1; i += 2) rels.push_back(relation2_poly(i, genus));
    for (int i = 1; i <= 2 * genus - 1; i += 2)
        for (int k = i; k <= 2 * genus - 1; k += 2) rels.push_back(relation3_poly(i, k, genus));
    return rels;
}

struct PMapResult {
    int genus = 0;
    std::map<int, Polynomial> lambda_polys;          // 2s -> p*lambda_{2s}, pure X
    std::map<std::pair<int, int>, Polynomial> w_polys;  // (a,b) -> resolved w, pure X
    std::vector<std::pair<std::string, std::string>> elimination_trace;  // (unknown, relation)

    const Polynomial& lambda(int two_s) const {
        auto it = lambda_polys.find(two_s);
        if (it == lambda_polys.end()) throw std::invalid_argument("PMapResult: no lambda " + std::to_string(two_s));
        return it->second;
    }

    // Substitute every lambda occurring in q by its pullback polynomial.
    Polynomial pullback(const Polynomial& q) const {
        Polynomial out = q;
        for (const auto& [s, p] : lambda_polys) out = out.substitute(make_lambda(s, genus), p);
        return out;
    }
};

// Worklist elimination. Every relation is linear in the unknowns
// {lambda} u {w}; repeatedly pick a relation containing exactly one
// unresolved unknown whose coefficient is a nonzero rational constant, solve,
// substitute everywhere. Tie-breaking: lowest-weight resolvable unknown
// first, then relation tag order; a permutation hook randomizes the scan for
// the order-independence test.
inline PMapResult eliminate_pmap(int genus, const std::vector<std::size_t>* scan_order = nullptr) {
    if (genus < 1) throw std::invalid_argument("eliminate_pmap: genus must be >= 1");
    std::vector<RelationInstance> rels = all_relations(genus);
    std::vector<Polynomial> work;
    for (const auto& r : rels) work.push_back(r.poly);

    std::vector<VarId> unknowns;
    for (int s = 2; s <= 2 * genus + 1; ++s) unknowns.push_back(make_lambda(2 * s, genus));
    for (int a = 3; a <= 2 * genus - 1; a += 2)
        for (int b = a; b <= 2 * genus - 1; b += 2) unknowns.push_back(make_w(a, b, genus));

    std::map<VarId, Polynomial> solved;
    std::vector<std::pair<std::string, std::string>> trace;

    auto unresolved_in = [&](const Polynomial& p) {
        std::vector<VarId> out;
        for (const auto& u : unknowns) {
            if (solved.count(u)) continue;
            if (!p.derivative(u).is_zero()) out.push_back(u);
        }
        return out;
    };

    while (solved.size() < unknowns.size()) {
        // Collect solvable (relation, unknown) candidates.
        struct Candidate { std::size_t rel; VarId u; Rational coef; };
        std::vector<Candidate> cands;
        std::vector<std::size_t> order(work.size());
        std::iota(order.begin(), order.end(), 0);
        if (scan_order) order = *scan_order;
        for (std::size_t idx : order) {
            const Polynomial& p = work[idx];
            auto present = unresolved_in(p);
            if (present.size() != 1) continue;
            Polynomial c = p.derivative(present[0]);
            if (c.term_count() != 1 || !c.terms().front().first.is_unit()) continue;
            cands.push_back({idx, present[0], c.terms().front().second});
        }
        if (cands.empty()) {
            std::string stuck = "eliminate_pmap stalled; unresolved:";
            for (const auto& u : unknowns)
                if (!solved.count(u)) stuck += " " + var_name(u);
            throw std::runtime_error(stuck);
        }
        auto best = cands.begin();  // randomized scan order: take the first hit
        if (!scan_order)
            best = std::min_element(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
                if (weight(a.u) != weight(b.u)) return weight(a.u) < weight(b.u);
                return a.rel < b.rel;
            });
        Polynomial rest = work[best->rel].substitute(best->u, Polynomial::zero(genus));
        Polynomial value = -best->coef.inverse() * rest;
        solved.emplace(best->u, value);
        trace.emplace_back(var_name(best->u), rels[best->rel].tag.str());
        for (auto& p : work) p = p.substitute(best->u, value);
    }

    PMapResult res;
    res.genus = genus;
    res.elimination_trace = std::move(trace);
    for (const auto& [u, p] : solved) {
        if (!p.pure_kind(VarKind::X)) throw std::logic_error("eliminate_pmap: unresolved symbols in solution");
        if (u.kind == VarKind::Lambda) res.lambda_polys.emplace(u.a, p);
        else res.w_polys.emplace(std::make_pair(int(u.a), int(u.b)), p);
    }
    // Back-substitution sanity: every relation vanishes identically.
    for (std::size_t idx = 0; idx < work.size(); ++idx)
        if (!work[idx].is_zero())
            throw std::logic_error("eliminate_pmap: relation " + rels[idx].tag.str() + " does not vanish");
    return res;
}

// Total degree in X of each p*lambda_{2s}; the bound <= 3 is asserted.
inline std::map<int, int> pmap_degree_report(const PMapResult& r) {
    std::map<int, int> deg;
    for (const auto& [s, p] : r.lambda_polys) {
        deg[s] = p.degree_in_x();
        if (deg[s] > 3) throw std::logic_error("pmap degree bound violated for lambda_" + std::to_string(s));
    }
    return deg;
}

struct InvarianceFailure {
    int field_label;
    int lambda_index;
    Polynomial residual;
};

// L_s(p*lambda_{2m}) must vanish for every odd field; returns the failures.
inline std::vector<InvarianceFailure> invariance_check(const PMapResult& r,
                                                       const std::vector<std::pair<int, const Derivation*>>& odds) {
    std::vector<InvarianceFailure> fails;
    for (const auto& [label, d] : odds) {
        for (const auto& [s, p] : r.lambda_polys) {
            Polynomial res = d->apply(p);
            if (!res.is_zero()) fails.push_back({label, s, std::move(res)});
        }
    }
    return fails;
}

}  // namespace hyperderiv

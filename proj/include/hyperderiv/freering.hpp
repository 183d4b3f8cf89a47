#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "hyperderiv/fields.hpp"
#include "hyperderiv/linalg.hpp"
#include "hyperderiv/polynomial.hpp"

namespace hyperderiv {

// The free differential ring in one chain f(0), f(1), f(2), ... carrying the
// KdV hierarchy: Phi_2 = f(0) and d1 Phi_{2k+2} = R d1 Phi_{2k} with the
// recursion operator R = 1/4 d1^2 - 2 Phi_2 - Phi_2' d1^{-1}.
// Elements are genus-0 Polynomials over FreeChain variables.
using FreeElement = Polynomial;

inline int max_order(const FreeElement& e) {
    int n = -1;
    for (const auto& [m, c] : e.terms())
        for (const auto& [v, ex] : m.factors())
            if (v.kind == VarKind::FreeChain) n = std::max(n, static_cast<int>(v.a));
    return n;
}

// The free derivation D: f(n) -> f(n+1), extended by linearity and Leibniz.
inline FreeElement free_derive(const FreeElement& e) {
    FreeElement out(kFreeRing);
    for (const auto& [m, c] : e.terms()) {
        for (const auto& [v, ex] : m.factors()) {
            if (v.kind != VarKind::FreeChain) throw std::invalid_argument("free_derive: non-FreeChain variable");
            Monomial rest = *m.divided_by(Monomial(v));
            out += Polynomial::from_terms(kFreeRing, {{rest * Monomial(make_f(v.a + 1)), c * Rational(ex)}});
        }
    }
    return out;
}

// Unique homogeneous antiderivative: the F with D(F) = e, when it exists.
// Uniqueness holds because D has no nonconstant kernel in positive weight;
// existence is a linear solve over the weight-(w-1) monomial basis.
inline std::optional<FreeElement> free_integrate(const FreeElement& e) {
    if (e.is_zero()) return FreeElement(kFreeRing);
    auto w = e.weight_of();
    if (!w || *w < 3) throw std::invalid_argument("free_integrate: argument must be homogeneous of weight >= 3");
    const auto basis = monomial_basis(*w - 1, free_chain_alphabet(*w - 3));
    std::vector<FreeElement> imgs;
    imgs.reserve(basis.size());
    for (const auto& m : basis) imgs.push_back(free_derive(Polynomial::from_terms(kFreeRing, {{m, Rational(1)}})));
    // Assemble by rows (monomials of weight w) and solve.
    std::map<Monomial, SparseEchelon::Row, CanonicalMonomialLess> rows;
    for (std::size_t i = 0; i < imgs.size(); ++i)
        for (const auto& [m, c] : imgs[i].terms()) rows[m].emplace_back(static_cast<int>(i), c);
    const int n = static_cast<int>(basis.size());
    SparseEchelon ech(n + 1);
    bool consistent = true;
    std::map<Monomial, Rational, CanonicalMonomialLess> target;
    for (const auto& [m, c] : e.terms()) target.emplace(m, c);
    for (auto& [m, row] : rows) {
        auto it = target.find(m);
        const Rational rhs = it == target.end() ? Rational(0) : it->second;
        if (it != target.end()) target.erase(it);
        if (ech.add_row(std::move(row), rhs) == SparseEchelon::AddOutcome::Inconsistent) consistent = false;
    }
    if (!target.empty()) consistent = false;  // e has a monomial no derivative reaches
    if (!consistent) return std::nullopt;
    auto sol = ech.solve(n);
    if (!sol) throw std::logic_error("free_integrate: kernel in positive weight");
    std::vector<Polynomial::Term> ts;
    for (int i = 0; i < n; ++i)
        if (!(*sol)[i].is_zero()) ts.emplace_back(basis[i], (*sol)[i]);
    return Polynomial::from_terms(kFreeRing, std::move(ts));
}

// One application of the recursion operator to dPhi = D(Phi_{2k}):
//   R(dPhi) = 1/4 D^2(dPhi) - 2 f(0) dPhi - f(1) * D^{-1}(dPhi).
inline std::optional<FreeElement> kdv_step(const FreeElement& d_phi) {
    if (d_phi.is_zero()) return FreeElement(kFreeRing);
    auto anti = free_integrate(d_phi);
    if (!anti) return std::nullopt;
    return Rational(1, 4) * free_derive(free_derive(d_phi)) - Rational(2) * (f_poly(0) * d_phi) -
           f_poly(1) * *anti;
}

// Hierarchy table Phi_2, Phi_4, ..., Phi_{2K}, built sequentially up front.
class KdvHierarchy {
public:
    explicit KdvHierarchy(int depth) {
        if (depth < 1) throw std::invalid_argument("KdvHierarchy: depth must be >= 1");
        phis_.push_back(f_poly(0));
        for (int k = 2; k <= depth; ++k) {
            auto step = kdv_step(free_derive(phis_.back()));
            if (!step) throw std::runtime_error("KdV hierarchy: non-exact integrand at k=" + std::to_string(k));
            auto phi = free_integrate(*step);
            if (!phi) throw std::runtime_error("KdV hierarchy: non-exact step result at k=" + std::to_string(k));
            phis_.push_back(std::move(*phi));
        }
    }

    int depth() const { return static_cast<int>(phis_.size()); }
    // Phi_{2k}
    const FreeElement& phi(int k) const {
        if (k < 1 || k > depth()) throw std::invalid_argument("KdvHierarchy: k out of range");
        return phis_[static_cast<std::size_t>(k) - 1];
    }

private:
    std::vector<FreeElement> phis_;
};

// Substitution into the x-ring: f(0) -> x_{1,1}, f(1) -> x_{2,1},
// f(2) -> x_{3,1}, and f(n) -> L1^{n-2}(x_{3,1}) for n >= 3, with the
// genus-g L1.
inline Polynomial embed_to_x(const FreeElement& e, int genus) {
    const Derivation L1 = build_L1(genus);
    std::vector<Polynomial> chain{x_poly(1, 1, genus), x_poly(2, 1, genus), x_poly(3, 1, genus)};
    const int n_max = max_order(e);
    while (static_cast<int>(chain.size()) <= n_max) chain.push_back(L1.apply(chain.back()));
    Polynomial out(genus);
    for (const auto& [m, c] : e.terms()) {
        Polynomial t = Polynomial::constant(genus, c);
        for (const auto& [v, ex] : m.factors()) {
            if (v.kind != VarKind::FreeChain) throw std::invalid_argument("embed_to_x: non-FreeChain variable");
            for (int k = 0; k < ex; ++k) t *= chain[v.a];
        }
        out += t;
    }
    return out;
}

}  // namespace hyperderiv

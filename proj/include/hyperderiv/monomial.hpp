#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hyperderiv/varid.hpp"

namespace hyperderiv {

// Power product of variables; the empty product is the unit monomial.
// The weight is cached: monomial comparisons sit on the hot path of every
// polynomial product.
class Monomial {
public:
    using Factor = std::pair<VarId, int>;

    Monomial() = default;
    explicit Monomial(VarId v, int exp = 1) {
        if (exp < 0) throw std::invalid_argument("Monomial: negative exponent");
        if (exp > 0) factors_.emplace_back(v, exp);
        weight_ = hyperderiv::weight(v) * exp;
    }
    static Monomial unit() { return Monomial(); }

    static Monomial from_factors(std::vector<Factor> fs) {
        std::sort(fs.begin(), fs.end(), [](const Factor& x, const Factor& y) { return x.first < y.first; });
        Monomial m;
        for (const auto& [v, e] : fs) {
            if (e < 0) throw std::invalid_argument("Monomial: negative exponent");
            if (e == 0) continue;
            if (!m.factors_.empty() && m.factors_.back().first == v)
                m.factors_.back().second += e;
            else
                m.factors_.emplace_back(v, e);
            m.weight_ += hyperderiv::weight(v) * e;
        }
        return m;
    }

    const std::vector<Factor>& factors() const { return factors_; }
    bool is_unit() const { return factors_.empty(); }

    int weight() const { return weight_; }
    int total_degree() const {
        int d = 0;
        for (const auto& [v, e] : factors_) d += e;
        return d;
    }
    int exponent_of(const VarId& v) const {
        for (const auto& [u, e] : factors_)
            if (u == v) return e;
        return 0;
    }
    bool contains_kind(VarKind k) const {
        for (const auto& [v, e] : factors_)
            if (v.kind == k) return true;
        return false;
    }

    friend Monomial operator*(const Monomial& x, const Monomial& y) {
        Monomial m;
        m.factors_.reserve(x.factors_.size() + y.factors_.size());
        auto i = x.factors_.begin();
        auto j = y.factors_.begin();
        while (i != x.factors_.end() && j != y.factors_.end()) {
            if (i->first < j->first) m.factors_.push_back(*i++);
            else if (j->first < i->first) m.factors_.push_back(*j++);
            else { m.factors_.emplace_back(i->first, i->second + j->second); ++i; ++j; }
        }
        m.factors_.insert(m.factors_.end(), i, x.factors_.end());
        m.factors_.insert(m.factors_.end(), j, y.factors_.end());
        m.weight_ = x.weight_ + y.weight_;
        return m;
    }

    // Exact monomial quotient, or nullopt when some exponent would go negative.
    std::optional<Monomial> divided_by(const Monomial& d) const {
        Monomial q;
        auto i = factors_.begin();
        for (const auto& [v, e] : d.factors_) {
            while (i != factors_.end() && i->first < v) q.factors_.push_back(*i++);
            if (i == factors_.end() || !(i->first == v) || i->second < e) return std::nullopt;
            if (i->second > e) q.factors_.emplace_back(v, i->second - e);
            ++i;
        }
        q.factors_.insert(q.factors_.end(), i, factors_.end());
        q.weight_ = weight_ - d.weight_;
        return q;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.weight_ == b.weight_ && a.factors_ == b.factors_;
    }

private:
    std::vector<Factor> factors_;  // sorted by VarId, exponents >= 1
    int weight_ = 0;
};

// Canonical monomial order: graded by weight; within a weight the monomial
// placing larger exponents on earlier (smaller) variables compares smaller.
// Descending iteration therefore prints the highest variables first, e.g.
// 1/2*x[3,1] before 3*x[1,1]^2.
inline bool canonical_less(const Monomial& x, const Monomial& y) {
    if (x.weight() != y.weight()) return x.weight() < y.weight();
    auto i = x.factors().begin();
    auto j = y.factors().begin();
    while (i != x.factors().end() || j != y.factors().end()) {
        if (j == y.factors().end()) return true;   // x has an extra low variable
        if (i == x.factors().end()) return false;
        if (i->first < j->first) return true;      // x carries the smaller variable
        if (j->first < i->first) return false;
        if (i->second != j->second) return i->second > j->second;
        ++i; ++j;
    }
    return false;
}

struct CanonicalMonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return canonical_less(a, b); }
};

// All monomials of exact weight w over the given alphabet, canonically ordered.
inline std::vector<Monomial> monomial_basis(int w, const std::vector<VarId>& alphabet) {
    if (w < 0) throw std::invalid_argument("monomial_basis: negative weight");
    std::vector<Monomial> out;
    std::vector<Monomial::Factor> cur;
    auto rec = [&](auto&& self, std::size_t idx, int rem) -> void {
        if (rem == 0) { out.push_back(Monomial::from_factors(cur)); return; }
        if (idx >= alphabet.size()) return;
        const int wv = weight(alphabet[idx]);
        self(self, idx + 1, rem);
        if (wv <= rem) {
            for (int e = 1; e * wv <= rem; ++e) {
                cur.emplace_back(alphabet[idx], e);
                self(self, idx + 1, rem - e * wv);
                cur.pop_back();
            }
        }
    };
    rec(rec, 0, w);
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

}  // namespace hyperderiv

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hyperderiv/monomial.hpp"
#include "hyperderiv/rational.hpp"

namespace hyperderiv {

// Genus tag for polynomials over the free differential ring (FreeChain vars).
inline constexpr int kFreeRing = 0;

// Sparse multivariate polynomial with exact rational coefficients, graded by
// weight. Terms are kept sorted in the canonical monomial order with no zero
// coefficients, so equality is plain term-by-term comparison.
class Polynomial {
public:
    using Term = std::pair<Monomial, Rational>;

    explicit Polynomial(int genus = kFreeRing) : genus_(genus) {}

    static Polynomial zero(int genus) { return Polynomial(genus); }
    static Polynomial constant(int genus, Rational c) {
        Polynomial p(genus);
        if (!c.is_zero()) p.terms_.emplace_back(Monomial::unit(), std::move(c));
        return p;
    }
    static Polynomial variable(int genus, const VarId& v) {
        Polynomial p(genus);
        p.terms_.emplace_back(Monomial(v), Rational(1));
        return p;
    }
    static Polynomial from_terms(int genus, std::vector<Term> ts) {
        Polynomial p(genus);
        p.terms_ = canonicalize(std::move(ts));
        return p;
    }

    int genus() const { return genus_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    // Highest term in the canonical order; requires a nonzero polynomial.
    const Term& leading_term() const {
        if (terms_.empty()) throw std::logic_error("leading_term of zero polynomial");
        return terms_.back();
    }

    Rational coefficient_of(const Monomial& m) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                                   [](const Term& t, const Monomial& k) { return canonical_less(t.first, k); });
        if (it != terms_.end() && it->first == m) return it->second;
        return Rational(0);
    }

    // Weight if homogeneous (the zero polynomial reports weight 0), nullopt otherwise.
    std::optional<int> weight_of() const {
        if (terms_.empty()) return 0;
        const int w = terms_.front().first.weight();
        if (terms_.back().first.weight() != w) return std::nullopt;
        return w;
    }
    bool is_homogeneous_of(int w) const {
        return is_zero() || (terms_.front().first.weight() == w && terms_.back().first.weight() == w);
    }

    int max_total_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.total_degree());
        return d;
    }
    // Total degree counting only X-kind variables.
    int degree_in_x() const {
        int d = 0;
        for (const auto& [m, c] : terms_) {
            int t = 0;
            for (const auto& [v, e] : m.factors())
                if (v.kind == VarKind::X) t += e;
            d = std::max(d, t);
        }
        return d;
    }
    bool contains_kind(VarKind k) const {
        for (const auto& [m, c] : terms_)
            if (m.contains_kind(k)) return true;
        return false;
    }
    bool pure_kind(VarKind k) const {
        for (const auto& [m, c] : terms_)
            for (const auto& [v, e] : m.factors())
                if (v.kind != k) return false;
        return true;
    }

    friend Polynomial operator-(const Polynomial& p) {
        Polynomial q(p.genus_);
        q.terms_.reserve(p.terms_.size());
        for (const auto& [m, c] : p.terms_) q.terms_.emplace_back(m, -c);
        return q;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) { return merged(a, b, false); }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return merged(a, b, true); }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        check_genus(a, b);
        std::vector<Term> acc;
        acc.reserve(a.terms_.size() * b.terms_.size());
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) acc.emplace_back(ma * mb, ca * cb);
        Polynomial p(a.genus_);
        p.terms_ = canonicalize(std::move(acc));
        return p;
    }

    friend Polynomial operator*(const Rational& s, const Polynomial& p) {
        Polynomial q(p.genus_);
        if (s.is_zero()) return q;
        q.terms_.reserve(p.terms_.size());
        for (const auto& [m, c] : p.terms_) q.terms_.emplace_back(m, s * c);
        return q;
    }
    friend Polynomial operator*(const Polynomial& p, const Rational& s) { return s * p; }

    Polynomial& operator+=(const Polynomial& o) { *this = *this + o; return *this; }
    Polynomial& operator-=(const Polynomial& o) { *this = *this - o; return *this; }
    Polynomial& operator*=(const Polynomial& o) { *this = *this * o; return *this; }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.genus_ == b.genus_ && a.terms_ == b.terms_;
    }

    Polynomial derivative(const VarId& v) const {
        Polynomial q(genus_);
        std::vector<Term> ts;
        for (const auto& [m, c] : terms_) {
            const int e = m.exponent_of(v);
            if (e == 0) continue;
            auto rest = m.divided_by(Monomial(v));
            ts.emplace_back(*rest, c * Rational(e));
        }
        return from_terms(genus_, std::move(ts));
    }

    Polynomial substitute(const VarId& v, const Polynomial& value) const {
        check_genus(*this, value);
        Polynomial out(genus_);
        std::vector<Polynomial> powers{constant(genus_, 1)};
        for (const auto& [m, c] : terms_) {
            const int e = m.exponent_of(v);
            Monomial rest = m;
            if (e > 0) {
                rest = *m.divided_by(Monomial(v, e));
                while (static_cast<int>(powers.size()) <= e) powers.push_back(powers.back() * value);
            }
            Polynomial t(genus_);
            t.terms_.emplace_back(rest, c);
            out += e > 0 ? t * powers[e] : t;
        }
        return out;
    }

    template <typename T, typename ValueOf>
    T evaluate_with(ValueOf&& value_of) const {
        T sum{};
        for (const auto& [m, c] : terms_) {
            T t = static_cast<T>(c.to_long_double());
            for (const auto& [v, e] : m.factors()) {
                const T x = value_of(v);
                for (int k = 0; k < e; ++k) t *= x;
            }
            sum += t;
        }
        return sum;
    }

    Rational evaluate(const std::map<VarId, Rational>& point) const {
        Rational sum(0);
        for (const auto& [m, c] : terms_) {
            Rational t = c;
            for (const auto& [v, e] : m.factors()) {
                auto it = point.find(v);
                if (it == point.end()) throw std::invalid_argument("evaluate: missing value for " + var_name(v));
                for (int k = 0; k < e; ++k) t *= it->second;
            }
            sum += t;
        }
        return sum;
    }

private:
    // Sort, combine equal monomials, drop zeros.
    static std::vector<Term> canonicalize(std::vector<Term> ts) {
        std::sort(ts.begin(), ts.end(),
                  [](const Term& x, const Term& y) { return canonical_less(x.first, y.first); });
        std::vector<Term> out;
        out.reserve(ts.size());
        for (auto& t : ts) {
            if (!out.empty() && out.back().first == t.first) {
                out.back().second += t.second;
                if (out.back().second.is_zero()) out.pop_back();
            } else if (!t.second.is_zero()) {
                out.push_back(std::move(t));
            }
        }
        return out;
    }

    static void check_genus(const Polynomial& a, const Polynomial& b) {
        if (a.genus_ != b.genus_)
            throw std::invalid_argument("polynomial arithmetic: genus mismatch (" + std::to_string(a.genus_) +
                                        " vs " + std::to_string(b.genus_) + ")");
    }

    static Polynomial merged(const Polynomial& a, const Polynomial& b, bool subtract) {
        check_genus(a, b);
        Polynomial p(a.genus_);
        p.terms_.reserve(a.terms_.size() + b.terms_.size());
        auto i = a.terms_.begin();
        auto j = b.terms_.begin();
        while (i != a.terms_.end() && j != b.terms_.end()) {
            if (canonical_less(i->first, j->first)) p.terms_.push_back(*i++);
            else if (canonical_less(j->first, i->first)) { p.terms_.emplace_back(j->first, subtract ? -j->second : j->second); ++j; }
            else {
                Rational c = subtract ? i->second - j->second : i->second + j->second;
                if (!c.is_zero()) p.terms_.emplace_back(i->first, std::move(c));
                ++i; ++j;
            }
        }
        p.terms_.insert(p.terms_.end(), i, a.terms_.end());
        for (; j != b.terms_.end(); ++j) p.terms_.emplace_back(j->first, subtract ? -j->second : j->second);
        return p;
    }

    int genus_;
    std::vector<Term> terms_;
};

// Convenience constructors honoring the index-vanishing convention: any
// x_{i,j}, lambda_{2s} or w_{a,b} outside the genus-g range is the zero
// polynomial.
inline Polynomial x_poly(int i, int j, int genus) {
    if (j > 2 * genus - 1) return Polynomial::zero(genus);
    return Polynomial::variable(genus, make_x(i, j, genus));
}
inline Polynomial lambda_poly(int two_s, int genus) {
    if (two_s % 2 != 0 || two_s < 4 || two_s > 4 * genus + 2) return Polynomial::zero(genus);
    return Polynomial::variable(genus, make_lambda(two_s, genus));
}
inline Polynomial w_poly(int a, int b, int genus) {
    if (a > b) std::swap(a, b);
    if (b > 2 * genus - 1) return Polynomial::zero(genus);
    return Polynomial::variable(genus, make_w(a, b, genus));
}
inline Polynomial f_poly(int n) { return Polynomial::variable(kFreeRing, make_f(n)); }

// Exact quotient p / d, or nullopt when d does not divide p. Leading-term
// elimination in the canonical order; works for any exact multivariate
// division since lead(q*d) = lead(q)*lead(d).
inline std::optional<Polynomial> exact_divide(const Polynomial& p, const Polynomial& d) {
    if (d.is_zero()) throw std::invalid_argument("exact_divide: zero divisor");
    Polynomial rem = p;
    Polynomial quot(p.genus());
    const auto& [dm, dc] = d.leading_term();
    while (!rem.is_zero()) {
        const auto& [rm, rc] = rem.leading_term();
        auto qm = rm.divided_by(dm);
        if (!qm) return std::nullopt;
        Polynomial t(p.genus());
        t = Polynomial::from_terms(p.genus(), {{*qm, rc / dc}});
        quot += t;
        rem -= t * d;
    }
    return quot;
}

}  // namespace hyperderiv

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "hyperderiv/polynomial.hpp"

namespace hyperderiv {

// Polynomial vector field on C^{3g}, stored through its images on the 3g
// coordinates x_{i,j} and extended to all X-polynomials by the Leibniz rule.
// Every image of x_{i,j} must be homogeneous of weight i + j + weight(D).
class Derivation {
public:
    Derivation(int genus, int weight, std::map<VarId, Polynomial> images)
        : genus_(genus), weight_(weight), images_(std::move(images)) {
        for (const auto& v : x_coordinates(genus_)) {
            auto it = images_.find(v);
            if (it == images_.end())
                throw std::invalid_argument("Derivation: missing image for " + var_name(v));
            const auto& img = it->second;
            if (img.genus() != genus_) throw std::invalid_argument("Derivation: image genus mismatch");
            if (!img.is_homogeneous_of(hyperderiv::weight(v) + weight_))
                throw std::invalid_argument("Derivation: image of " + var_name(v) +
                                            " is not homogeneous of weight " +
                                            std::to_string(hyperderiv::weight(v) + weight_));
            if (!img.pure_kind(VarKind::X))
                throw std::invalid_argument("Derivation: image of " + var_name(v) + " uses non-X variables");
        }
        if (images_.size() != x_coordinates(genus_).size())
            throw std::invalid_argument("Derivation: extra images present");
    }

    static Derivation zero(int genus, int weight) {
        std::map<VarId, Polynomial> imgs;
        for (const auto& v : x_coordinates(genus)) imgs.emplace(v, Polynomial::zero(genus));
        return Derivation(genus, weight, std::move(imgs));
    }

    int genus() const { return genus_; }
    int weight() const { return weight_; }
    const std::map<VarId, Polynomial>& images() const { return images_; }
    const Polynomial& image(const VarId& v) const {
        auto it = images_.find(v);
        if (it == images_.end()) throw std::invalid_argument("Derivation: no image for " + var_name(v));
        return it->second;
    }
    const Polynomial& image(int i, int j) const { return image(make_x(i, j, genus_)); }

    bool is_zero() const {
        for (const auto& [v, p] : images_)
            if (!p.is_zero()) return false;
        return true;
    }

    // Leibniz extension; p must be a polynomial in X variables only.
    // Assembled in one pass: every term contributes coeff * exp * (m / v) *
    // image(v) for each of its factors, canonicalized once at the end.
    Polynomial apply(const Polynomial& p) const {
        if (p.genus() != genus_) throw std::invalid_argument("Derivation::apply: genus mismatch");
        std::vector<Polynomial::Term> acc;
        for (const auto& [m, c] : p.terms()) {
            for (const auto& [v, e] : m.factors()) {
                if (v.kind != VarKind::X)
                    throw std::invalid_argument(
                        "Derivation::apply: polynomial uses non-X variables; eliminate first");
                const Polynomial& img = images_.at(v);
                if (img.is_zero()) continue;
                const Monomial rest = *m.divided_by(Monomial(v));
                const Rational ce = c * Rational(e);
                for (const auto& [mi, ci] : img.terms()) acc.emplace_back(rest * mi, ce * ci);
            }
        }
        return Polynomial::from_terms(genus_, std::move(acc));
    }

    friend Derivation operator+(const Derivation& a, const Derivation& b) {
        check_compatible(a, b);
        std::map<VarId, Polynomial> imgs;
        for (const auto& [v, p] : a.images_) imgs.emplace(v, p + b.image(v));
        return Derivation(a.genus_, a.weight_, std::move(imgs));
    }
    friend Derivation operator-(const Derivation& a, const Derivation& b) {
        check_compatible(a, b);
        std::map<VarId, Polynomial> imgs;
        for (const auto& [v, p] : a.images_) imgs.emplace(v, p - b.image(v));
        return Derivation(a.genus_, a.weight_, std::move(imgs));
    }
    // Module action: multiply a field by a homogeneous polynomial coefficient.
    friend Derivation operator*(const Polynomial& c, const Derivation& d) {
        auto wc = c.weight_of();
        if (!wc) throw std::invalid_argument("poly * derivation: coefficient not homogeneous");
        std::map<VarId, Polynomial> imgs;
        for (const auto& [v, p] : d.images_) imgs.emplace(v, c * p);
        return Derivation(d.genus_, d.weight_ + *wc, std::move(imgs));
    }

    friend bool operator==(const Derivation& a, const Derivation& b) {
        return a.genus_ == b.genus_ && a.images_ == b.images_;
    }

private:
    static void check_compatible(const Derivation& a, const Derivation& b) {
        if (a.genus_ != b.genus_ || a.weight_ != b.weight_)
            throw std::invalid_argument("derivation arithmetic: genus/weight mismatch");
    }

    int genus_;
    int weight_;
    std::map<VarId, Polynomial> images_;
};

// Commutator [A, B], image-wise A(B(x)) - B(A(x)); weights add.
inline Derivation bracket(const Derivation& A, const Derivation& B) {
    if (A.genus() != B.genus()) throw std::invalid_argument("bracket: genus mismatch");
    std::map<VarId, Polynomial> imgs;
    for (const auto& v : x_coordinates(A.genus()))
        imgs.emplace(v, A.apply(B.image(v)) - B.apply(A.image(v)));
    return Derivation(A.genus(), A.weight() + B.weight(), std::move(imgs));
}

}  // namespace hyperderiv

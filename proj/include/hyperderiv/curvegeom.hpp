#pragma once

#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperderiv/linalg.hpp"
#include "hyperderiv/polynomial.hpp"
#include "hyperderiv/sampling.hpp"

namespace hyperderiv {

// Lambda-space side: the curve Y^2 = X^{2g+1} + lambda_4 X^{2g-1} + ... +
// lambda_{4g+2}, the T-matrix of convolved invariants, the tangent fields
// L_{2k}, the discriminant, and two independent tangency checks.

// Monic odd-degree model; coefficient of X^{2g+1-s} is lambda_{2s}, no X^{2g}
// term (lambda_2 = 0).
struct CurveModel {
    int genus;

    explicit CurveModel(int g) : genus(g) {
        if (g < 1) throw std::invalid_argument("CurveModel: genus must be >= 1");
    }

    int degree() const { return 2 * genus + 1; }

    // Coefficient of X^d in the defining polynomial, as a lambda-polynomial.
    Polynomial coefficient(int d) const {
        if (d < 0 || d > degree()) return Polynomial::zero(genus);
        if (d == degree()) return Polynomial::constant(genus, 1);
        const int two_s = 2 * (degree() - d);
        return lambda_poly(two_s, genus);  // zero for two_s == 2
    }
};

// T_{2k,2m} = 2(k+m) lambda_{2k+2m}
//           + sum_{s=2}^{k-1} 2(k+m-2s) lambda_{2s} lambda_{2k+2m-2s}
//           - 2k(2g-m+1)/(2g+1) lambda_{2k} lambda_{2m},   for k <= m,
// with T_{2k,2m} = T_{2m,2k} for k > m and out-of-range lambdas set to zero.
inline Polynomial t_entry(int k, int m, int genus) {
    if (k < 1 || m < 1 || k > 2 * genus || m > 2 * genus)
        throw std::invalid_argument("t_entry: indices must lie in [1, 2g]");
    if (k > m) std::swap(k, m);
    Polynomial t = Rational(2 * (k + m)) * lambda_poly(2 * k + 2 * m, genus);
    for (int s = 2; s <= k - 1; ++s)
        t += Rational(2 * (k + m - 2 * s)) * (lambda_poly(2 * s, genus) * lambda_poly(2 * k + 2 * m - 2 * s, genus));
    t -= Rational(2 * k * (2 * genus - m + 1), 2 * genus + 1) * (lambda_poly(2 * k, genus) * lambda_poly(2 * m, genus));
    return t;
}

// L_{2k} = sum_{s=2}^{2g+1} T_{2k+2, 2s-2} d/dlambda_{2s}.
struct LambdaField {
    int genus = 0;
    int k = 0;                        // the field is L_{2k}
    std::map<int, Polynomial> images;  // 2s -> image polynomial in lambda

    const Polynomial& image(int two_s) const {
        auto it = images.find(two_s);
        if (it == images.end()) throw std::invalid_argument("LambdaField: no image for lambda_" + std::to_string(two_s));
        return it->second;
    }

    Polynomial apply(const Polynomial& p) const {
        Polynomial out(genus);
        for (const auto& [two_s, img] : images) {
            Polynomial d = p.derivative(make_lambda(two_s, genus));
            if (!d.is_zero()) out += img * d;
        }
        return out;
    }
};

inline LambdaField build_lambda_field(int k, int genus) {
    if (k < 0 || k > 2 * genus - 1) throw std::invalid_argument("build_lambda_field: k must lie in [0, 2g-1]");
    LambdaField f;
    f.genus = genus;
    f.k = k;
    for (int s = 2; s <= 2 * genus + 1; ++s) f.images.emplace(2 * s, t_entry(k + 1, s - 1, genus));
    return f;
}

namespace detail {

// Fraction-free Bareiss determinant of a polynomial matrix; every division is
// an exact polynomial quotient.
inline Polynomial bareiss_determinant(std::vector<std::vector<Polynomial>> M, int genus) {
    const std::size_t n = M.size();
    if (n == 0) return Polynomial::constant(genus, 1);
    Polynomial prev = Polynomial::constant(genus, 1);
    int sign = 1;
    for (std::size_t r = 0; r + 1 < n; ++r) {
        std::size_t pr = r;
        while (pr < n && M[pr][r].is_zero()) ++pr;
        if (pr == n) return Polynomial::zero(genus);
        if (pr != r) { std::swap(M[pr], M[r]); sign = -sign; }
        for (std::size_t i = r + 1; i < n; ++i) {
            for (std::size_t j = r + 1; j < n; ++j) {
                Polynomial t = M[r][r] * M[i][j] - M[i][r] * M[r][j];
                auto q = exact_divide(t, prev);
                if (!q) throw std::logic_error("bareiss_determinant: inexact division");
                M[i][j] = std::move(*q);
            }
            M[i][r] = Polynomial::zero(genus);
        }
        prev = M[r][r];
    }
    return sign < 0 ? -M[n - 1][n - 1] : M[n - 1][n - 1];
}

}  // namespace detail

// Discriminant of the defining polynomial: the Sylvester resultant of F and
// F', carrying the classical sign (-1)^{n(n-1)/2} for n = 2g+1, so that
// genus 1 yields -4 l4^3 - 27 l6^2. Homogeneous of weight 4g(2g+1).
inline Polynomial discriminant(int genus) {
    const CurveModel curve(genus);
    const int n = curve.degree();
    const int rows = 2 * n - 1;
    std::vector<std::vector<Polynomial>> S(rows, std::vector<Polynomial>(rows, Polynomial::zero(genus)));
    for (int r = 0; r < n - 1; ++r)  // n-1 shifted copies of F
        for (int d = 0; d <= n; ++d) S[r][r + n - d] = curve.coefficient(d);
    for (int r = 0; r < n; ++r)  // n shifted copies of F'
        for (int d = 1; d <= n; ++d) S[n - 1 + r][r + n - d] = Rational(d) * curve.coefficient(d);
    Polynomial res = detail::bareiss_determinant(std::move(S), genus);
    const long long e = static_cast<long long>(genus) * (2 * genus + 1);
    return (e % 2 != 0) ? -res : res;
}

// Exact division witness of tangency: h with L(Disc) = h * Disc, or nullopt
// when the division is not exact (a tangency failure).
inline std::optional<Polynomial> divisibility_tangency(const LambdaField& L, const Polynomial& disc) {
    Polynomial ld = L.apply(disc);
    if (ld.is_zero()) return Polynomial::zero(L.genus);
    return exact_divide(ld, disc);
}

struct TangencySample {
    std::vector<Rational> parameters;  // (a, b_1, ..., b_{2g-2})
    std::vector<Rational> lambda;      // the sampled point of Sigma
    bool degenerate = false;           // rank-deficient Jacobian, resampled
    bool pass = false;
};

struct TangencyReport {
    int k = 0;
    int trials = 0;
    int passes = 0;
    int degenerate_resamples = 0;
    std::vector<TangencySample> samples;
    bool all_pass() const { return passes == trials; }
};

namespace detail {

// Coefficients of prod (X - r_i) for given roots, exactly.
inline std::vector<Rational> poly_from_roots(const std::vector<Rational>& roots) {
    std::vector<Rational> c{Rational(1)};
    for (const auto& r : roots) {
        std::vector<Rational> nc(c.size() + 1, Rational(0));
        for (std::size_t i = 0; i < c.size(); ++i) {
            nc[i + 1] += c[i];
            nc[i] -= r * c[i];
        }
        c = std::move(nc);  // c[i] = coefficient of X^i
    }
    return c;
}

}  // namespace detail

// Rank-based tangency at random points of Sigma. Sigma is parametrized by
// lambda = coefficients of (X-a)^2 prod (X-b_i) with 2a + sum b_i = 0; at each
// sample the field value must lie in the column span of the parametrization
// Jacobian (exact rational rank comparison).
inline TangencyReport sample_singular_tangency(const LambdaField& L, int genus, int trials,
                                               unsigned long long seed) {
    TangencyReport rep;
    rep.k = L.k;
    rep.trials = trials;
    std::mt19937_64 rng(seed);
    const int n_params = 2 * genus - 1;  // a, b_1..b_{2g-2}; the last root is forced

    while (static_cast<int>(rep.samples.size()) < trials) {
        TangencySample smp;
        for (int t = 0; t < n_params; ++t) smp.parameters.push_back(rand_rational(rng));

        auto roots_for = [&](const std::vector<Rational>& par) {
            std::vector<Rational> roots{par[0], par[0]};  // double root a, twice
            Rational sum = par[0] + par[0];
            for (int t = 1; t < n_params; ++t) { roots.push_back(par[t]); sum += par[t]; }
            roots.push_back(-sum);  // kills the X^{2g} coefficient
            return roots;
        };
        const auto roots = roots_for(smp.parameters);
        const auto coeffs = detail::poly_from_roots(roots);
        // lambda_{2s} = coefficient of X^{2g+1-s}, s = 2..2g+1
        for (int s = 2; s <= 2 * genus + 1; ++s) smp.lambda.push_back(coeffs[2 * genus + 1 - s]);

        // Jacobian d lambda / d parameters: d/dr_i of prod (X - r_j) is
        // -prod_{j != i} (X - r_j); chain through the root parametrization.
        RationalMatrix J(2 * genus, RationalVector(n_params, Rational(0)));
        for (std::size_t ri = 0; ri < roots.size(); ++ri) {
            std::vector<Rational> others;
            for (std::size_t rj = 0; rj < roots.size(); ++rj)
                if (rj != ri) others.push_back(roots[rj]);
            const auto minor = detail::poly_from_roots(others);
            for (int p = 0; p < n_params; ++p) {
                // d r_ri / d parameter p
                Rational dr(0);
                const bool is_dbl = ri <= 1;
                const bool is_last = ri + 1 == roots.size();
                if (p == 0) dr = is_dbl ? Rational(1) : (is_last ? Rational(-2) : Rational(0));
                else dr = (ri == static_cast<std::size_t>(p) + 1) ? Rational(1) : (is_last ? Rational(-1) : Rational(0));
                if (dr.is_zero()) continue;
                for (int s = 2; s <= 2 * genus + 1; ++s)
                    J[s - 2][p] += dr * -minor[2 * genus + 1 - s];
            }
        }

        const std::size_t rank_j = rational_rank(J);
        if (rank_j < static_cast<std::size_t>(n_params)) {
            smp.degenerate = true;
            ++rep.degenerate_resamples;
            continue;  // triple root or similar; resample
        }
        // Field value at the sampled lambda.
        std::map<VarId, Rational> point;
        for (int s = 2; s <= 2 * genus + 1; ++s) point.emplace(make_lambda(2 * s, genus), smp.lambda[s - 2]);
        RationalMatrix Jv = J;
        for (int s = 2; s <= 2 * genus + 1; ++s) Jv[s - 2].push_back(L.image(2 * s).evaluate(point));
        smp.pass = rational_rank(Jv) == rank_j;
        if (smp.pass) ++rep.passes;
        rep.samples.push_back(std::move(smp));
    }
    return rep;
}

}  // namespace hyperderiv

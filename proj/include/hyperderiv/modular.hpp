#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <utility>
#include <vector>

#include "hyperderiv/polynomial.hpp"

namespace hyperderiv::modp {

// Arithmetic modulo the Mersenne prime 2^61 - 1, used to produce candidate
// coefficients fast; every candidate is certified afterwards by an exact
// symbolic identity check, so nothing downstream relies on modular results.
inline constexpr std::uint64_t kP = (1ull << 61) - 1;

inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    if (s >= kP) s -= kP;
    return s;
}
inline std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return add(a, kP - b); }
inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 t = static_cast<unsigned __int128>(a) * b;
    std::uint64_t lo = static_cast<std::uint64_t>(t & kP);
    std::uint64_t hi = static_cast<std::uint64_t>(t >> 61);
    std::uint64_t s = lo + hi;
    if (s >= kP) s -= kP;
    return s;
}
inline std::uint64_t pow(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}
inline std::uint64_t inv(std::uint64_t a) { return pow(a, kP - 2); }

// Reduce an arbitrary-precision rational mod p.
inline std::uint64_t reduce(const Rational& r) {
    static const mpz_class p = (mpz_class(1) << 61) - 1;
    mpz_class n = r.raw().get_num() % p;
    if (n < 0) n += p;
    mpz_class d = r.raw().get_den() % p;
    return mul(n.get_ui(), inv(d.get_ui()));
}

// Dense square-matrix inverse mod p; nullopt when singular.
inline std::optional<std::vector<std::vector<std::uint64_t>>> inverse(
    std::vector<std::vector<std::uint64_t>> M) {
    const std::size_t n = M.size();
    std::vector<std::vector<std::uint64_t>> I(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) I[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pr = c;
        while (pr < n && M[pr][c] == 0) ++pr;
        if (pr == n) return std::nullopt;
        std::swap(M[pr], M[c]);
        std::swap(I[pr], I[c]);
        const std::uint64_t piv_inv = inv(M[c][c]);
        for (std::size_t j = 0; j < n; ++j) {
            M[c][j] = mul(M[c][j], piv_inv);
            I[c][j] = mul(I[c][j], piv_inv);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || M[i][c] == 0) continue;
            const std::uint64_t f = M[i][c];
            for (std::size_t j = 0; j < n; ++j) {
                M[i][j] = sub(M[i][j], mul(f, M[c][j]));
                I[i][j] = sub(I[i][j], mul(f, I[c][j]));
            }
        }
    }
    return I;
}

// Rational reconstruction (Wang): the unique r/s with |r|, s <= ~2^30
// congruent to c mod p, when one exists.
inline std::optional<Rational> reconstruct(std::uint64_t c) {
    const std::int64_t bound = 1ll << 30;
    std::int64_t a0 = static_cast<std::int64_t>(kP), a1 = static_cast<std::int64_t>(c);
    std::int64_t x0 = 0, x1 = 1;
    while (a1 > bound) {
        const std::int64_t q = a0 / a1;
        a0 -= q * a1;
        std::swap(a0, a1);
        x0 -= q * x1;
        std::swap(x0, x1);
    }
    if (x1 == 0 || std::abs(x1) > bound) return std::nullopt;
    long num = static_cast<long>(a1), den = static_cast<long>(x1);
    if (den < 0) { num = -num; den = -den; }
    Rational r(num, den);
    if (reduce(r) != c) return std::nullopt;
    return r;
}

// Polynomial image mod p, with coefficients pre-reduced.
struct PolyModP {
    std::vector<std::pair<Monomial, std::uint64_t>> terms;

    static PolyModP of(const Polynomial& p) {
        PolyModP out;
        out.terms.reserve(p.term_count());
        for (const auto& [m, c] : p.terms()) out.terms.emplace_back(m, reduce(c));
        return out;
    }

    template <typename ValueOf>
    std::uint64_t evaluate(ValueOf&& value_of) const {
        std::uint64_t acc = 0;
        for (const auto& [m, c] : terms) {
            std::uint64_t t = c;
            for (const auto& [v, e] : m.factors()) {
                const std::uint64_t x = value_of(v);
                for (int k = 0; k < e; ++k) t = mul(t, x);
            }
            acc = add(acc, t);
        }
        return acc;
    }
};

}  // namespace hyperderiv::modp

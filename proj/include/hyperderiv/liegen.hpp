#pragma once

#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hyperderiv/curvegeom.hpp"
#include "hyperderiv/modular.hpp"
#include "hyperderiv/fields.hpp"
#include "hyperderiv/pmap.hpp"
#include "hyperderiv/sampling.hpp"
#include "hyperderiv/textio.hpp"

namespace hyperderiv {

// Construction of the 3g polynomial vector fields on C^{3g} and their
// polynomial Lie algebra: L1 and the Euler field are explicit, the remaining
// odd fields are forced column by column from [L1, Ls] = 0, and the even
// fields solve the (com1) bracket condition together with projectability.

// Unique Y with L1(Y) = Z for homogeneous Z of even weight. The solution has
// odd weight, where ker L1 contains no invariants, so the linear system over
// the monomial basis has at most one solution.
inline Polynomial l1_integrate(const Polynomial& Z, const Derivation& L1) {
    if (Z.is_zero()) return Polynomial::zero(Z.genus());
    auto w = Z.weight_of();
    if (!w) throw std::invalid_argument("l1_integrate: inhomogeneous argument");
    const int genus = Z.genus();
    const auto basis = monomial_basis(*w - 1, x_alphabet(genus));
    const int n = static_cast<int>(basis.size());
    std::map<Monomial, SparseEchelon::Row, CanonicalMonomialLess> rows;
    for (int i = 0; i < n; ++i) {
        const Polynomial img = L1.apply(Polynomial::from_terms(genus, {{basis[i], Rational(1)}}));
        for (const auto& [m, c] : img.terms()) rows[m].emplace_back(i, c);
    }
    std::map<Monomial, Rational, CanonicalMonomialLess> target;
    for (const auto& [m, c] : Z.terms()) target.emplace(m, c);
    SparseEchelon ech(n + 1);
    for (auto& [m, row] : rows) {
        auto it = target.find(m);
        const Rational rhs = it == target.end() ? Rational(0) : it->second;
        if (it != target.end()) target.erase(it);
        if (ech.add_row(std::move(row), rhs) == SparseEchelon::AddOutcome::Inconsistent)
            throw std::runtime_error("l1_integrate: target is not an L1-derivative");
    }
    if (!target.empty()) throw std::runtime_error("l1_integrate: target is not an L1-derivative");
    auto sol = ech.solve(n);
    if (!sol) throw std::logic_error("l1_integrate: unexpected kernel in odd weight");
    std::vector<Polynomial::Term> ts;
    for (int i = 0; i < n; ++i)
        if (!(*sol)[i].is_zero()) ts.emplace_back(basis[i], (*sol)[i]);
    return Polynomial::from_terms(genus, std::move(ts));
}

// Odd field L_s, s = 3, 5, ..., 2g-1. The j=1 column is prescribed:
//   x_{1,1} -> x_{2,s},  x_{2,1} -> x_{3,s},  x_{3,1} -> L1(x_{3,s});
// each higher column is then forced by commutation with L1:
//   [L1,Ls](x_{3,j-2}) = 0 determines Ls(x_{2,j}),
//   Ls(x_{1,j}) = L1^{-1}(Ls(x_{2,j})),  Ls(x_{3,j}) = L1(Ls(x_{2,j})).
inline Derivation build_odd(int s, int genus, const Derivation& L1) {
    if (s < 3 || s % 2 == 0 || s > 2 * genus - 1)
        throw std::invalid_argument("build_odd: s must be odd in [3, 2g-1]");
    std::map<VarId, Polynomial> img;
    img.emplace(make_x(1, 1, genus), x_poly(2, s, genus));
    img.emplace(make_x(2, 1, genus), x_poly(3, s, genus));
    img.emplace(make_x(3, 1, genus), L1.apply(x_poly(3, s, genus)));
    for (int j = 3; j <= 2 * genus - 1; j += 2) {
        const int jp = j - 2;
        Polynomial t = Rational(1, 4) * L1.apply(img.at(make_x(3, jp, genus))) -
                       Rational(2) * (x_poly(2, s, genus) * x_poly(2, jp, genus)) -
                       Rational(2) * (x_poly(1, 1, genus) * img.at(make_x(2, jp, genus))) -
                       x_poly(3, s, genus) * x_poly(1, jp, genus) -
                       x_poly(2, 1, genus) * img.at(make_x(1, jp, genus));
        img.emplace(make_x(1, j, genus), l1_integrate(t, L1));
        img.emplace(make_x(3, j, genus), L1.apply(t));
        img.emplace(make_x(2, j, genus), std::move(t));
    }
    return Derivation(genus, s, std::move(img));
}

// The 3g-field basis: odd labels 1, 3, ..., 2g-1 and even labels
// 0, 2, ..., 4g-2; weight(L_s) = s throughout.
struct FieldSet {
    int genus = 0;
    std::map<int, Derivation> fields;

    const Derivation& at(int label) const {
        auto it = fields.find(label);
        if (it == fields.end()) throw std::invalid_argument("FieldSet: no field L" + std::to_string(label));
        return it->second;
    }
    std::vector<int> labels() const {
        std::vector<int> out;
        for (const auto& [l, d] : fields) out.push_back(l);
        return out;
    }
    static std::vector<int> odd_labels(int g) {
        std::vector<int> out;
        for (int s = 1; s <= 2 * g - 1; s += 2) out.push_back(s);
        return out;
    }
    static std::vector<int> even_labels(int g) {
        std::vector<int> out;
        for (int k = 0; k <= 2 * g - 1; ++k) out.push_back(2 * k);
        return out;
    }
};

// Right-hand side of the (com1) condition:
//   [L1, L_{2k}] = sum_{m=1}^{k} x_{1,2(k-m)+1} L_{2m-1}  -  L_{2k+1},
// with x_{1,j} = 0 beyond the alphabet and absent odd labels read as zero.
inline Derivation com1_rhs(int k, int genus, const std::map<int, Derivation>& odd_fields) {
    if (k < 0 || k > 2 * genus - 1) throw std::invalid_argument("com1_rhs: k must lie in [0, 2g-1]");
    std::map<VarId, Polynomial> img;
    for (const auto& v : x_coordinates(genus)) {
        Polynomial acc(genus);
        for (int m = 1; m <= k; ++m) {
            const int j = 2 * (k - m) + 1;
            if (j > 2 * genus - 1 || 2 * m - 1 > 2 * genus - 1) continue;
            acc += x_poly(1, j, genus) * odd_fields.at(2 * m - 1).image(v);
        }
        if (2 * k + 1 <= 2 * genus - 1) acc -= odd_fields.at(2 * k + 1).image(v);
        img.emplace(v, std::move(acc));
    }
    return Derivation(genus, 2 * k + 1, std::move(img));
}

namespace detail {

// Polynomial with affine-linear coefficients in a set of unknowns: c0 + sum_i
// u_i * p_i. Closed under the operations the even-field assembly needs.
struct LinPoly {
    Polynomial c0;
    std::map<int, Polynomial> lin;

    explicit LinPoly(int genus) : c0(genus) {}
    static LinPoly constant(Polynomial p) {
        LinPoly r(p.genus());
        r.c0 = std::move(p);
        return r;
    }
    static LinPoly unknown(int genus, int idx, const Monomial& m) {
        LinPoly r(genus);
        r.lin.emplace(idx, Polynomial::from_terms(genus, {{m, Rational(1)}}));
        return r;
    }
    LinPoly& operator+=(const LinPoly& o) {
        c0 += o.c0;
        for (const auto& [i, p] : o.lin) {
            auto [it, fresh] = lin.try_emplace(i, p);
            if (!fresh) it->second += p;
        }
        return *this;
    }
    LinPoly& operator-=(const LinPoly& o) {
        c0 -= o.c0;
        for (const auto& [i, p] : o.lin) {
            auto [it, fresh] = lin.try_emplace(i, -p);
            if (!fresh) it->second -= p;
        }
        return *this;
    }
    friend LinPoly operator*(const Polynomial& q, const LinPoly& a) {
        LinPoly r(a.c0.genus());
        r.c0 = q * a.c0;
        for (const auto& [i, p] : a.lin) r.lin.emplace(i, q * p);
        return r;
    }
    LinPoly applied(const Derivation& d) const {
        LinPoly r(c0.genus());
        r.c0 = d.apply(c0);
        for (const auto& [i, p] : lin) r.lin.emplace(i, d.apply(p));
        return r;
    }
};

}  // namespace detail

// Even field L_{2k}, k >= 1, from the stated linear system: pose the images
// of x_{1,j} over the weight-(2k+1+j) monomial basis; the com1 rows on
// x_{1,j} and x_{2,j} determine the remaining images by substitution, the
// com1 rows on x_{3,j} plus the pushforward conditions
// L_{2k}(p*lambda_{2s}) = p*(T_{2k+2,2s-2}) close the system. The solution
// must be unique; both constraint families are re-verified on the built field.
inline Derivation solve_even(int k, int genus, const PMapResult& pm,
                             const std::map<int, Derivation>& odd_fields) {
    if (k < 1 || k > 2 * genus - 1) throw std::invalid_argument("solve_even: k must lie in [1, 2g-1]");
    const Derivation& L1 = odd_fields.at(1);
    const Derivation E = com1_rhs(k, genus, odd_fields);
    using detail::LinPoly;

    // Unknowns: coefficients of A_j := L_{2k}(x_{1,j}).
    std::vector<std::pair<int, Monomial>> unknowns;
    std::map<int, std::vector<int>> unknowns_of_j;
    std::map<int, std::vector<Monomial>> basis_of_j;
    for (int j = 1; j <= 2 * genus - 1; j += 2) {
        basis_of_j[j] = monomial_basis(2 * k + 1 + j, x_alphabet(genus));
        for (const auto& m : basis_of_j[j]) {
            unknowns_of_j[j].push_back(static_cast<int>(unknowns.size()));
            unknowns.emplace_back(j, m);
        }
    }
    const int n_unknowns = static_cast<int>(unknowns.size());

    std::map<int, LinPoly> A, B, C;
    for (int j = 1; j <= 2 * genus - 1; j += 2) {
        LinPoly a(genus);
        for (std::size_t t = 0; t < basis_of_j[j].size(); ++t)
            a += LinPoly::unknown(genus, unknowns_of_j[j][t], basis_of_j[j][t]);
        B.emplace(j, a.applied(L1) -= LinPoly::constant(E.image(1, j)));
        C.emplace(j, B.at(j).applied(L1) -= LinPoly::constant(E.image(2, j)));
        A.emplace(j, std::move(a));
    }
    auto image_lin = [&](int i, int j) -> LinPoly {
        if (j > 2 * genus - 1) return LinPoly(genus);
        return i == 1 ? A.at(j) : i == 2 ? B.at(j) : C.at(j);
    };

    SparseEchelon ech(n_unknowns + 1);
    bool inconsistent = false;
    auto emit_zero = [&](LinPoly lp) {
        std::map<Monomial, SparseEchelon::Row, CanonicalMonomialLess> rows;
        std::map<Monomial, Rational, CanonicalMonomialLess> rhs;
        for (const auto& [i, p] : lp.lin)
            for (const auto& [m, c] : p.terms()) rows[m].emplace_back(i, c);
        for (const auto& [m, c] : lp.c0.terms()) { rhs[m] = -c; rows.try_emplace(m); }
        for (auto& [m, row] : rows) {
            std::sort(row.begin(), row.end());
            auto it = rhs.find(m);
            const Rational r = it == rhs.end() ? Rational(0) : it->second;
            if (ech.add_row(std::move(row), r) == SparseEchelon::AddOutcome::Inconsistent) inconsistent = true;
        }
    };

    // com1 rows on x_{3,j}: L1(C_j) - L_{2k}(L1 x_{3,j}) = E(x_{3,j}).
    for (int j = 1; j <= 2 * genus - 1; j += 2) {
        LinPoly lhs = C.at(j).applied(L1);
        LinPoly rhs_field(genus);
        rhs_field += Rational(8) * x_poly(2, j, genus) * A.at(1);
        rhs_field += Rational(8) * x_poly(1, 1, genus) * B.at(j);
        rhs_field += Rational(4) * x_poly(1, j, genus) * B.at(1);
        rhs_field += Rational(4) * x_poly(2, 1, genus) * A.at(j);
        rhs_field += Polynomial::constant(genus, 4) * image_lin(2, j + 2);
        lhs -= rhs_field;
        lhs -= LinPoly::constant(E.image(3, j));
        emit_zero(std::move(lhs));
    }
    // Pushforward rows: L_{2k}(p*lambda_{2s}) = p*(T_{2k+2,2s-2}).
    for (int s = 2; s <= 2 * genus + 1; ++s) {
        LinPoly lp(genus);
        for (int j = 1; j <= 2 * genus - 1; j += 2)
            for (int i = 1; i <= 3; ++i) {
                Polynomial d = pm.lambda(2 * s).derivative(make_x(i, j, genus));
                if (!d.is_zero()) lp += d * image_lin(i, j);
            }
        lp -= LinPoly::constant(pm.pullback(t_entry(k + 1, s - 1, genus)));
        emit_zero(std::move(lp));
    }

    if (inconsistent)
        throw std::runtime_error("solve_even: no solution for L" + std::to_string(2 * k) +
                                 " (construction inconsistency)");
    auto sol = ech.solve(n_unknowns);
    if (!sol) {
        auto free_col = ech.first_free_column(n_unknowns);
        throw std::runtime_error("solve_even: underdetermined system for L" + std::to_string(2 * k) +
                                 "; ambiguous unknown " + canonical_serialize(Polynomial::from_terms(
                                     genus, {{unknowns[*free_col].second, Rational(1)}})) +
                                 " in image of x[1," + std::to_string(unknowns[*free_col].first) + "]");
    }

    std::map<VarId, Polynomial> img;
    for (int j = 1; j <= 2 * genus - 1; j += 2) {
        std::vector<Polynomial::Term> ts;
        for (std::size_t t = 0; t < basis_of_j[j].size(); ++t) {
            const Rational& c = (*sol)[unknowns_of_j[j][t]];
            if (!c.is_zero()) ts.emplace_back(basis_of_j[j][t], c);
        }
        Polynomial a = Polynomial::from_terms(genus, std::move(ts));
        Polynomial b = L1.apply(a) - E.image(1, j);
        Polynomial c = L1.apply(b) - E.image(2, j);
        img.emplace(make_x(1, j, genus), std::move(a));
        img.emplace(make_x(2, j, genus), std::move(b));
        img.emplace(make_x(3, j, genus), std::move(c));
    }
    Derivation D(genus, 2 * k, std::move(img));

    // Re-verify both families on the built field.
    if (!(bracket(L1, D) == E))
        throw std::logic_error("solve_even: com1 verification failed for L" + std::to_string(2 * k));
    for (int s = 2; s <= 2 * genus + 1; ++s)
        if (!(D.apply(pm.lambda(2 * s)) == pm.pullback(t_entry(k + 1, s - 1, genus))))
            throw std::logic_error("solve_even: pushforward verification failed for L" + std::to_string(2 * k));
    return D;
}

// Full basis: L1 + forced odd fields, Euler, then the solved even fields.
inline FieldSet build_field_set(int genus, const PMapResult& pm) {
    FieldSet fs;
    fs.genus = genus;
    std::map<int, Derivation> odds;
    odds.emplace(1, build_L1(genus));
    for (int s = 3; s <= 2 * genus - 1; s += 2) odds.emplace(s, build_odd(s, genus, odds.at(1)));
    fs.fields = odds;
    fs.fields.emplace(0, build_euler(genus));
    for (int k = 1; k <= 2 * genus - 1; ++k) fs.fields.emplace(2 * k, solve_even(k, genus, pm, odds));
    return fs;
}

struct ExpressResult {
    bool in_module = false;
    std::map<int, Polynomial> coefficients;      // label -> homogeneous c_m
    std::map<VarId, Polynomial> residual_images;  // nonzero only when !in_module
};

// Expresses derivations in the polynomial module spanned by a field set:
// B = sum_m c_m L_m with weight(c_m) = weight(B) - m. Candidate coefficients
// come from interpolation over random points of Z_p (p = 2^61 - 1): at each
// point the 3g x 3g image matrix is inverted mod p, the pointwise c_m values
// are interpolated over the weight-(wB - m) monomial basis, and the
// coefficients are lifted by rational reconstruction. The candidate is then
// verified symbolically in exact arithmetic, which alone certifies the
// expression; a verification failure after independent retries yields
// NotInModule with the residual as witness. Per-weight interpolation data is
// shared, which keeps the full structure table cheap.
class ModuleExpresser {
public:
    explicit ModuleExpresser(const FieldSet& fields, unsigned long long seed = 0x9e3779b97f4a7c15ull)
        : fields_(fields), rng_(seed) {
        for (const auto& [l, d] : fields_.fields) {
            labels_.push_back(l);
            for (const auto& v : x_coordinates(fields_.genus))
                images_modp_[{l, v}] = modp::PolyModP::of(d.image(v));
        }
        coords_ = x_coordinates(fields_.genus);
    }

    ExpressResult express(const Derivation& B) {
        for (int attempt = 0; attempt < 3; ++attempt) {
            auto candidate = interpolate_candidate(B);
            if (!candidate) { reset_points(); continue; }
            ExpressResult res = verify(B, std::move(*candidate));
            if (res.in_module || attempt == 2) return res;
            reset_points();  // unlucky points cannot survive three rounds
        }
        throw std::logic_error("ModuleExpresser: unreachable");
    }

private:
    struct PerWeight {
        std::vector<Monomial> basis;
        std::vector<int> point_ids;
        std::vector<std::vector<std::uint64_t>> inverse;  // basis-eval matrix mod p
    };
    struct Point {
        std::map<VarId, std::uint64_t> coords;
        std::vector<std::vector<std::uint64_t>> inv_m;  // 3g x 3g image matrix mod p
    };

    // Exact check of B = sum c_m L_m; the only step results depend on.
    ExpressResult verify(const Derivation& B, std::map<int, Polynomial> coefficients) {
        ExpressResult res;
        res.coefficients = std::move(coefficients);
        bool ok = true;
        for (const auto& v : coords_) {
            Polynomial acc(fields_.genus);
            for (int m : labels_) {
                const Polynomial& c = res.coefficients.at(m);
                if (!c.is_zero()) acc += c * fields_.at(m).image(v);
            }
            Polynomial r = B.image(v) - acc;
            if (!r.is_zero()) ok = false;
            res.residual_images.emplace(v, std::move(r));
        }
        res.in_module = ok;
        if (ok) res.residual_images.clear();
        return res;
    }

    std::optional<std::map<int, Polynomial>> interpolate_candidate(const Derivation& B) {
        const int wB = B.weight();
        cvals_.clear();
        std::map<int, Polynomial> out;
        for (int m : labels_) {
            const int w = wB - m;
            if (w < 0) { out.emplace(m, Polynomial::zero(fields_.genus)); continue; }
            const PerWeight& pw = per_weight(w);
            std::vector<std::uint64_t> vals(pw.point_ids.size());
            for (std::size_t t = 0; t < pw.point_ids.size(); ++t) {
                auto v = coeff_value_at(B, pw.point_ids[t], m);
                if (!v) return std::nullopt;
                vals[t] = *v;
            }
            std::vector<Polynomial::Term> ts;
            for (std::size_t i = 0; i < pw.basis.size(); ++i) {
                std::uint64_t c = 0;
                for (std::size_t t = 0; t < vals.size(); ++t)
                    if (pw.inverse[i][t] && vals[t]) c = modp::add(c, modp::mul(pw.inverse[i][t], vals[t]));
                if (c == 0) continue;
                auto lifted = modp::reconstruct(c);
                if (!lifted) return std::nullopt;
                ts.emplace_back(pw.basis[i], std::move(*lifted));
            }
            out.emplace(m, Polynomial::from_terms(fields_.genus, std::move(ts)));
        }
        return out;
    }

    // c_m(P_t) mod p: one 3g x 3g matrix-vector product per (bracket, point).
    std::optional<std::uint64_t> coeff_value_at(const Derivation& B, int point_id, int label) {
        auto it = cvals_.find(point_id);
        if (it == cvals_.end()) {
            const Point& pt = points_[point_id];
            auto value_of = [&](const VarId& v) { return pt.coords.at(v); };
            std::vector<std::uint64_t> bv(coords_.size());
            for (std::size_t r = 0; r < coords_.size(); ++r)
                bv[r] = modp::PolyModP::of(B.image(coords_[r])).evaluate(value_of);
            std::vector<std::uint64_t> c(labels_.size(), 0);
            for (std::size_t i = 0; i < labels_.size(); ++i)
                for (std::size_t r = 0; r < coords_.size(); ++r)
                    if (pt.inv_m[i][r] && bv[r]) c[i] = modp::add(c[i], modp::mul(pt.inv_m[i][r], bv[r]));
            it = cvals_.emplace(point_id, std::move(c)).first;
        }
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return it->second[i];
        return std::nullopt;
    }

    void reset_points() {
        points_.clear();
        cache_.clear();
        cvals_.clear();
    }

    int new_point() {
        while (true) {
            Point p;
            for (const auto& v : coords_) p.coords.emplace(v, 1 + rng_() % (modp::kP - 1));
            auto value_of = [&](const VarId& v) { return p.coords.at(v); };
            std::vector<std::vector<std::uint64_t>> M(coords_.size(),
                                                      std::vector<std::uint64_t>(labels_.size()));
            for (std::size_t r = 0; r < coords_.size(); ++r)
                for (std::size_t c = 0; c < labels_.size(); ++c)
                    M[r][c] = images_modp_.at({labels_[c], coords_[r]}).evaluate(value_of);
            auto inv = modp::inverse(std::move(M));
            if (!inv) continue;  // fields degenerate at this point; resample
            p.inv_m = std::move(*inv);
            points_.push_back(std::move(p));
            return static_cast<int>(points_.size()) - 1;
        }
    }

    const PerWeight& per_weight(int w) {
        auto it = cache_.find(w);
        if (it != cache_.end()) return it->second;
        PerWeight pw;
        pw.basis = monomial_basis(w, x_alphabet(fields_.genus));
        const int n = static_cast<int>(pw.basis.size());
        auto eval_basis_row = [&](int pid) {
            std::vector<std::uint64_t> row(n);
            for (int i = 0; i < n; ++i) {
                std::uint64_t val = 1;
                for (const auto& [v, e] : pw.basis[i].factors()) {
                    const std::uint64_t x = points_[pid].coords.at(v);
                    for (int q = 0; q < e; ++q) val = modp::mul(val, x);
                }
                row[i] = val;
            }
            return row;
        };
        // Greedily pick points whose evaluation rows are independent mod p.
        SparseEchelon probe(n + 1);
        int next_existing = 0;
        while (static_cast<int>(pw.point_ids.size()) < n) {
            const int pid = next_existing < static_cast<int>(points_.size()) ? next_existing++ : new_point();
            const auto row = eval_basis_row(pid);
            SparseEchelon::Row srow;
            for (int i = 0; i < n; ++i)
                if (row[i]) srow.emplace_back(i, Rational(static_cast<long>(row[i] % 1000003ul)));
            // cheap independence probe over a small modulus is not reliable;
            // use the full echelon over Q of the mod-p row lifted as integers
            srow.clear();
            for (int i = 0; i < n; ++i)
                if (row[i]) srow.emplace_back(i, Rational(mpq_class(mpz_class(row[i]))));
            if (probe.add_row(std::move(srow), Rational(0)) == SparseEchelon::AddOutcome::NewPivot)
                pw.point_ids.push_back(pid);
        }
        std::vector<std::vector<std::uint64_t>> M(n, std::vector<std::uint64_t>(n));
        for (int t = 0; t < n; ++t) M[t] = eval_basis_row(pw.point_ids[t]);
        auto inv = modp::inverse(std::move(M));
        if (!inv) throw std::logic_error("ModuleExpresser: interpolation matrix singular");
        pw.inverse = std::move(*inv);
        return cache_.emplace(w, std::move(pw)).first->second;
    }

    const FieldSet& fields_;
    std::mt19937_64 rng_;
    std::vector<int> labels_;
    std::vector<VarId> coords_;
    std::map<std::pair<int, VarId>, modp::PolyModP> images_modp_;
    std::vector<Point> points_;
    std::map<int, PerWeight> cache_;
    std::map<int, std::vector<std::uint64_t>> cvals_;  // point id -> c values for the current bracket
};

inline ExpressResult express_in_module_basis(const Derivation& B, const FieldSet& fields) {
    ModuleExpresser ex(fields);
    return ex.express(B);
}

// All pairwise brackets of the basis, expressed back in the basis. A failed
// expression is a closure violation and therefore fatal.
struct StructureTable {
    int genus = 0;
    // (a,b) with a < b -> {m -> c^{ab}_m}, zero coefficients omitted
    std::map<std::pair<int, int>, std::map<int, Polynomial>> brackets;
};

inline StructureTable structure_table(const FieldSet& fields) {
    StructureTable tab;
    tab.genus = fields.genus;
    ModuleExpresser ex(fields);
    const auto labels = fields.labels();
    for (std::size_t ia = 0; ia < labels.size(); ++ia)
        for (std::size_t ib = ia + 1; ib < labels.size(); ++ib) {
            const int a = labels[ia], b = labels[ib];
            Derivation br = bracket(fields.at(a), fields.at(b));
            ExpressResult res = ex.express(br);
            if (!res.in_module)
                throw std::runtime_error("structure_table: [L" + std::to_string(a) + ",L" + std::to_string(b) +
                                         "] is not in the module (closure violation)");
            std::map<int, Polynomial> nz;
            for (auto& [m, c] : res.coefficients)
                if (!c.is_zero()) nz.emplace(m, std::move(c));
            tab.brackets.emplace(std::make_pair(a, b), std::move(nz));
        }
    return tab;
}

// Projectability: D(p*lambda_{2s}) = p*(L(lambda_{2s})) on the generators;
// returns the residual for every s (all zero on success). Passing no lambda
// field checks the zero pushforward.
inline std::map<int, Polynomial> check_projectable(const Derivation& D, const PMapResult& pm,
                                                   const LambdaField* L = nullptr) {
    std::map<int, Polynomial> residuals;
    for (int s = 2; s <= 2 * pm.genus + 1; ++s) {
        Polynomial target = L ? pm.pullback(L->image(2 * s)) : Polynomial::zero(pm.genus);
        residuals.emplace(2 * s, D.apply(pm.lambda(2 * s)) - target);
    }
    return residuals;
}

struct IndependenceReport {
    std::map<VarId, Rational> point;
    Rational discriminant_value;
    std::size_t rank = 0;
    int resamples = 0;
    bool full_rank = false;
};

// Exact full-rank test of the 3g x 3g image matrix at a random rational point
// off p^{-1}(Sigma); the discriminant value is computed numerically from the
// Sylvester matrix at p*lambda(point).
inline IndependenceReport independence_check(const FieldSet& fields, const PMapResult& pm,
                                             unsigned long long seed) {
    const int genus = fields.genus;
    std::mt19937_64 rng(seed);
    IndependenceReport rep;
    const auto coords = x_coordinates(genus);
    const CurveModel curve(genus);
    const int n = curve.degree();
    while (true) {
        std::map<VarId, Rational> point;
        for (const auto& v : coords) point.emplace(v, rand_rational(rng, 9));
        // off-Sigma check via the numeric resultant of (F, F')
        std::map<VarId, Rational> lam;
        for (int s = 2; s <= 2 * genus + 1; ++s)
            lam.emplace(make_lambda(2 * s, genus), pm.lambda(2 * s).evaluate(point));
        auto coef_val = [&](int d) {
            if (d == n) return Rational(1);
            const int two_s = 2 * (n - d);
            if (two_s == 2) return Rational(0);
            return lam.at(make_lambda(two_s, genus));
        };
        RationalMatrix S(2 * n - 1, RationalVector(2 * n - 1, Rational(0)));
        for (int r = 0; r < n - 1; ++r)
            for (int d = 0; d <= n; ++d) S[r][r + n - d] = coef_val(d);
        for (int r = 0; r < n; ++r)
            for (int d = 1; d <= n; ++d) S[n - 1 + r][r + n - d] = Rational(d) * coef_val(d);
        Rational disc = rational_determinant(std::move(S));
        if (disc.is_zero()) { ++rep.resamples; continue; }

        RationalMatrix M;
        for (const auto& [l, d] : fields.fields) {
            RationalVector row;
            for (const auto& v : coords) row.push_back(d.image(v).evaluate(point));
            M.push_back(std::move(row));
        }
        rep.point = std::move(point);
        rep.discriminant_value = std::move(disc);
        rep.rank = rational_rank(M);
        rep.full_rank = rep.rank == coords.size();
        return rep;
    }
}

// Test hook: perturb one coefficient of one image of the given field (the
// negative control for the verification suites).
inline FieldSet tamper_field(FieldSet fs, int label) {
    const Derivation& d = fs.at(label);
    std::map<VarId, Polynomial> img = d.images();
    for (auto& [v, p] : img) {
        if (p.is_zero()) continue;
        const auto& [m, c] = p.leading_term();
        p += Polynomial::from_terms(fs.genus, {{m, c * Rational(1, 1000)}});
        break;
    }
    fs.fields.erase(label);
    fs.fields.emplace(label, Derivation(fs.genus, d.weight(), std::move(img)));
    return fs;
}

}  // namespace hyperderiv

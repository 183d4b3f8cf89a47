#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperderiv/curvegeom.hpp"
#include "hyperderiv/liegen.hpp"

namespace hyperderiv {

// Genus-1 numeric oracle: truncated Laurent/Taylor series for the Weierstrass
// functions of the curve Y^2 = X^3 + l4 X + l6, i.e. (wp')^2 = 4 wp^3 +
// 4 l4 wp + 4 l6, finite-difference lambda-derivatives, and the classical
// Frobenius-Stickelberger generator and bracket identities checked against
// the symbolic fields.

using Complex = std::complex<long double>;

struct SeriesG1 {
    long double l4 = 0, l6 = 0;
    int trunc = 14;                 // N
    std::vector<long double> c;     // c[1..N]; wp = z^-2 + sum c_k z^{2k}
    long double safe_radius = 0;    // 0.5 * min root spacing; evaluation guard
};

namespace detail {

// Roots of X^3 + p X + q by Cardano, for the evaluation radius guard.
inline std::vector<Complex> cubic_roots(long double p, long double q) {
    const Complex D = Complex(q * q / 4 + p * p * p / 27);
    const Complex s = std::sqrt(D);
    Complex A = std::pow(-Complex(q) / Complex(2) + s, Complex(1.0L / 3));
    if (std::abs(A) < 1e-30L) A = std::pow(-Complex(q) / Complex(2) - s, Complex(1.0L / 3));
    const Complex w(-0.5L, 0.86602540378443864676L);
    std::vector<Complex> roots;
    for (int k = 0; k < 3; ++k) {
        const Complex Ak = A * std::pow(w, Complex(k));
        const Complex Bk = std::abs(Ak) < 1e-30L ? Complex(0) : -Complex(p) / (Complex(3) * Ak);
        roots.push_back(Ak + Bk);
    }
    return roots;
}

inline long double min_root_spacing(long double l4, long double l6) {
    const auto r = cubic_roots(l4, l6);
    long double best = -1;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const long double d = std::abs(r[i] - r[j]);
            if (best < 0 || d < best) best = d;
        }
    return best;
}

inline long double max_root_magnitude(long double l4, long double l6) {
    const auto r = cubic_roots(l4, l6);
    long double best = 0;
    for (const auto& root : r) best = std::max(best, std::abs(root));
    return best;
}

}  // namespace detail

// c1 = -l4/5, c2 = -l6/7, and for k >= 3
//   c_k = 3/((2k+3)(k-2)) * sum_{m=1}^{k-2} c_m c_{k-1-m};
// the recursion is validated by substituting the truncated series into the
// defining differential equation (the series self-test in the suites).
inline SeriesG1 wp_coeffs(long double l4, long double l6, int N = 14) {
    if (N < 4) throw std::invalid_argument("wp_coeffs: truncation order must be >= 4");
    SeriesG1 s;
    s.l4 = l4;
    s.l6 = l6;
    s.trunc = N;
    s.c.assign(N + 1, 0.0L);
    s.c[1] = -l4 / 5;
    s.c[2] = -l6 / 7;
    for (int k = 3; k <= N; ++k) {
        long double acc = 0;
        for (int m = 1; m <= k - 2; ++m) acc += s.c[m] * s.c[k - 1 - m];
        s.c[k] = 3 * acc / ((2 * k + 3) * (k - 2));
    }
    // Evaluation guard: half the smallest root spacing, floored by the
    // 1/sqrt(root scale) lattice estimate. The floor matters when roots
    // collapse toward the cusp, where the actual convergence region grows
    // while the spacing shrinks.
    const long double spacing = detail::min_root_spacing(l4, l6);
    const long double scale = std::max(1.0L, detail::max_root_magnitude(l4, l6));
    s.safe_radius = std::max(spacing, 1 / std::sqrt(scale)) / 2;
    return s;
}

inline SeriesG1 wp_coeffs(const Rational& l4, const Rational& l6, int N = 14) {
    return wp_coeffs(l4.to_long_double(), l6.to_long_double(), N);
}

struct G1Values {
    Complex wp, wp1, wp2, zeta, sigma;
};

inline G1Values eval_functions(const SeriesG1& s, Complex z) {
    if (z == Complex(0)) throw std::invalid_argument("eval_functions: z = 0 is a pole");
    if (std::abs(z) >= s.safe_radius)
        throw std::invalid_argument("eval_functions: |z| outside the convergence-safe radius");
    G1Values v{};
    const Complex z2 = z * z;
    v.wp = Complex(1) / z2;
    v.wp1 = Complex(-2) / (z2 * z);
    v.wp2 = Complex(6) / (z2 * z2);
    v.zeta = Complex(1) / z;
    Complex logsig = std::log(z);
    Complex zp = z2;  // z^{2k}
    for (int k = 1; k <= s.trunc; ++k) {
        const Complex ck(s.c[k]);
        v.wp += ck * zp;
        v.wp1 += ck * Complex(2 * k) * zp / z;
        v.wp2 += ck * Complex(2 * k) * Complex(2 * k - 1) * zp / z2;
        v.zeta -= ck * zp * z / Complex(2 * k + 1);
        logsig -= ck * zp * z2 / Complex((2 * k + 1) * (2 * k + 2));
        zp *= z2;
    }
    v.sigma = std::exp(logsig);
    return v;
}

// Defect of the truncated series in the curve equation at z; the analytic
// self-test driven by the suites.
inline long double series_defect(const SeriesG1& s, Complex z) {
    const auto v = eval_functions(s, z);
    const Complex lhs = v.wp1 * v.wp1;
    const Complex rhs = Complex(4) * v.wp * v.wp * v.wp + Complex(4) * Complex(s.l4) * v.wp + Complex(4) * Complex(s.l6);
    return std::abs(lhs - rhs);
}

// Central differences with one Richardson extrapolation step, O(h^4).
struct LambdaPartials {
    Complex d_l4, d_l6;
};

inline LambdaPartials lambda_partials(const std::function<Complex(long double, long double)>& f,
                                      long double l4, long double l6, long double h_rel = 1e-5L) {
    const long double scale = std::max({std::fabs(l4), std::fabs(l6), 1.0L});
    const long double h = h_rel * scale;
    auto richardson = [&](auto&& at) {
        const Complex d1 = (at(h) - at(-h)) / Complex(2 * h);
        const Complex d2 = (at(h / 2) - at(-h / 2)) / Complex(h);
        return (Complex(4) * d2 - d1) / Complex(3);
    };
    LambdaPartials out;
    out.d_l4 = richardson([&](long double d) { return f(l4 + d, l6); });
    out.d_l6 = richardson([&](long double d) { return f(l4, l6 + d); });
    return out;
}

// ---------------------------------------------------------------------------
// Analytic differential operators for the genus-1 Frobenius-Stickelberger
// fields, applied through nested finite differences:
//   FS0 = L0 - z d/dz,   FS1 = d/dz,   FS2 = L2 - zeta(z) d/dz,
// with L0, L2 the lambda-space tangent fields. Nested application amplifies
// finite-difference noise, so the operator applicator uses larger steps than
// the single-shot lambda_partials default (budget: ~1e-7 absolute against
// acceptance tolerances 1e-6..1e-5).

using AnalyticFn = std::function<Complex(Complex, long double, long double)>;

class AnalyticOperators {
public:
    explicit AnalyticOperators(int trunc = 14, long double h_lambda = 1e-3L, long double h_z = 3e-4L)
        : trunc_(trunc), h_lambda_(h_lambda), h_z_(h_z) {}

    AnalyticFn d_z(const AnalyticFn& f) const {
        const long double hz = h_z_;
        return [f, hz](Complex z, long double l4, long double l6) {
            const long double h = hz * std::max(std::abs(z), 0.1L);
            const Complex d1 = (f(z + h, l4, l6) - f(z - h, l4, l6)) / Complex(2 * h);
            const Complex d2 = (f(z + h / 2, l4, l6) - f(z - h / 2, l4, l6)) / Complex(h);
            return (Complex(4) * d2 - d1) / Complex(3);
        };
    }

    // sum_s coef_s(l) d/dlambda_{2s} for the field L_{2k}, plus b(z,l) d/dz.
    AnalyticFn apply_field(int label, const AnalyticFn& f) const {
        if (label == 1) return d_z(f);
        const int trunc = trunc_;
        const long double hl = h_lambda_;
        AnalyticFn dz = d_z(f);
        if (label == 0) {
            return [f, dz, hl](Complex z, long double l4, long double l6) {
                const auto lp = lambda_partials([&](long double a, long double b) { return f(z, a, b); }, l4, l6, hl);
                return Complex(4 * l4) * lp.d_l4 + Complex(6 * l6) * lp.d_l6 - z * dz(z, l4, l6);
            };
        }
        if (label == 2) {
            return [f, dz, hl, trunc](Complex z, long double l4, long double l6) {
                const auto lp = lambda_partials([&](long double a, long double b) { return f(z, a, b); }, l4, l6, hl);
                const auto v = eval_functions(wp_coeffs(l4, l6, trunc), z);
                return Complex(6 * l6) * lp.d_l4 - Complex(4.0L / 3 * l4 * l4) * lp.d_l6 - v.zeta * dz(z, l4, l6);
            };
        }
        throw std::invalid_argument("apply_field: genus-1 labels are 0, 1, 2");
    }

    AnalyticFn bracket(int a, int b, const AnalyticFn& f) const {
        AnalyticFn ab = apply_field(a, apply_field(b, f));
        AnalyticFn ba = apply_field(b, apply_field(a, f));
        return [ab, ba](Complex z, long double l4, long double l6) { return ab(z, l4, l6) - ba(z, l4, l6); };
    }

private:
    int trunc_;
    long double h_lambda_;
    long double h_z_;
};

// ---------------------------------------------------------------------------
// Reports

struct NumericCheckRow {
    std::string identity;
    Complex z;
    Rational l4, l6;
    Complex lhs, rhs;
    long double abs_error = 0;
    bool pass = false;
};

struct NumericCheckReport {
    std::vector<NumericCheckRow> rows;
    bool all_pass = true;
    // Normalization diagnostic: set when the failing rows of one identity are
    // explained by a single scalar factor (a convention mismatch, not noise).
    bool scalar_mismatch = false;
    long double fitted_scalar = 1;

    void add(NumericCheckRow row) {
        all_pass = all_pass && row.pass;
        rows.push_back(std::move(row));
    }
};

struct G1Sample {
    Complex z;
    Rational l4, l6;
};

// 5 z-values x 3 lambda-pairs inside the series trust region, all off the
// discriminant (asserted at use).
inline std::vector<G1Sample> default_g1_samples() {
    const std::vector<Complex> zs{Complex(0.2L, 0.11L), Complex(0.31L, 0.0L), Complex(0.15L, -0.2L),
                                  Complex(0.25L, 0.05L), Complex(-0.3L, 0.07L)};
    const std::vector<std::pair<Rational, Rational>> lams{
        {Rational(1), Rational(2)}, {Rational(-1), Rational(1)}, {Rational(3), Rational(1)}};
    std::vector<G1Sample> out;
    for (const auto& [l4, l6] : lams)
        for (const auto& z : zs) out.push_back({z, l4, l6});
    return out;
}

inline void assert_off_discriminant(const Rational& l4, const Rational& l6) {
    const Rational disc = Rational(-4) * l4 * l4 * l4 - Rational(27) * l6 * l6;
    if (disc.is_zero()) throw std::invalid_argument("sample lambda lies on the discriminant");
}

namespace detail {

inline Complex eval_symbolic(const Polynomial& p, const G1Values& v, int genus) {
    return p.evaluate_with<Complex>([&](const VarId& var) {
        if (var == make_x(1, 1, genus)) return v.wp;
        if (var == make_x(2, 1, genus)) return v.wp1;
        if (var == make_x(3, 1, genus)) return v.wp2;
        throw std::invalid_argument("eval_symbolic: unexpected variable " + var_name(var));
    });
}

}  // namespace detail

// Generator identities: for each sample, the analytic action of FS0/FS1/FS2 on
// wp and wp' must match the symbolic field images evaluated on the point
// (wp, wp', wp''). The lambda-parts use lambda_partials at its default step.
inline NumericCheckReport verify_genus1_generators(const FieldSet& fields, const PMapResult& pm,
                                                   const std::vector<G1Sample>& samples, long double tol,
                                                   int trunc = 14) {
    (void)pm;
    if (fields.genus != 1) throw std::invalid_argument("verify_genus1_generators: genus-1 field set required");
    NumericCheckReport rep;
    const LambdaField L2f = build_lambda_field(1, 1);
    std::vector<std::pair<std::string, std::pair<int, int>>> plan{
        {"FS1.wp = L1(x[1,1])", {1, 1}},   {"FS0.wp = L0(x[1,1])", {0, 1}},
        {"FS0.wp' = L0(x[2,1])", {0, 2}},  {"FS2.wp = L2(x[1,1])", {2, 1}},
        {"FS2.wp' = L2(x[2,1])", {2, 2}},
    };
    long double fit_num = 0, fit_den = 0;
    Complex fit_acc_lr(0), fit_acc_rr(0);
    for (const auto& smp : samples) {
        assert_off_discriminant(smp.l4, smp.l6);
        const long double l4 = smp.l4.to_long_double(), l6 = smp.l6.to_long_double();
        const SeriesG1 s = wp_coeffs(l4, l6, trunc);
        const G1Values v = eval_functions(s, smp.z);
        for (const auto& [name, what] : plan) {
            const auto [label, row] = what;
            // analytic side
            Complex lhs;
            auto base = [&](long double a, long double b) {
                const auto vv = eval_functions(wp_coeffs(a, b, trunc), smp.z);
                return row == 1 ? vv.wp : vv.wp1;
            };
            const Complex fz = row == 1 ? v.wp1 : v.wp2;  // d/dz of wp or wp'
            if (label == 1) {
                lhs = fz;
            } else if (label == 0) {
                const auto lp = lambda_partials(base, l4, l6);
                lhs = Complex(4 * l4) * lp.d_l4 + Complex(6 * l6) * lp.d_l6 - smp.z * fz;
            } else {
                const auto lp = lambda_partials(base, l4, l6);
                std::map<VarId, Rational> lam{{make_lambda(4, 1), smp.l4}, {make_lambda(6, 1), smp.l6}};
                const Complex a4(L2f.image(4).evaluate(lam).to_long_double());
                const Complex a6(L2f.image(6).evaluate(lam).to_long_double());
                lhs = a4 * lp.d_l4 + a6 * lp.d_l6 - v.zeta * fz;
            }
            const Complex rhs = detail::eval_symbolic(fields.at(label).image(row, 1), v, 1);
            NumericCheckRow r{name, smp.z, smp.l4, smp.l6, lhs, rhs, std::abs(lhs - rhs), false};
            r.pass = r.abs_error < tol;
            if (!r.pass && label == 2) {
                fit_acc_lr += lhs * std::conj(rhs);
                fit_acc_rr += rhs * std::conj(rhs);
                fit_num += 1;
                fit_den += 1;
            }
            rep.add(std::move(r));
        }
    }
    // Uniform scalar diagnostic on the FS2 rows.
    if (fit_den > 0 && std::abs(fit_acc_rr) > 0) {
        const Complex alpha = fit_acc_lr / fit_acc_rr;
        bool uniform = true;
        for (const auto& r : rep.rows)
            if (!r.pass && r.identity.rfind("FS2", 0) == 0 &&
                std::abs(r.lhs - alpha * r.rhs) >= tol * std::max(1.0L, std::abs(r.rhs)))
                uniform = false;
        if (uniform) {
            rep.scalar_mismatch = true;
            rep.fitted_scalar = std::abs(alpha);
        }
    }
    return rep;
}

// Bracket identities of the FS Lie algebra, applied to wp at each sample:
//   [FS0,FS1] wp = FS1 wp,  [FS0,FS2] wp = 2 FS2 wp,  [FS1,FS2] wp = wp * wp'.
inline NumericCheckReport verify_genus1_brackets(const FieldSet& fields, const std::vector<G1Sample>& samples,
                                                 long double tol, int trunc = 14) {
    if (fields.genus != 1) throw std::invalid_argument("verify_genus1_brackets: genus-1 field set required");
    NumericCheckReport rep;
    const AnalyticOperators ops(trunc);
    const AnalyticFn wp_fn = [trunc](Complex z, long double a, long double b) {
        return eval_functions(wp_coeffs(a, b, trunc), z).wp;
    };
    for (const auto& smp : samples) {
        assert_off_discriminant(smp.l4, smp.l6);
        const long double l4 = smp.l4.to_long_double(), l6 = smp.l6.to_long_double();
        const G1Values v = eval_functions(wp_coeffs(l4, l6, trunc), smp.z);
        const Complex fs2_wp = ops.apply_field(2, wp_fn)(smp.z, l4, l6);
        const struct {
            const char* name;
            int a, b;
            Complex rhs;
        } checks[] = {
            {"[FS0,FS1]wp = FS1.wp", 0, 1, v.wp1},
            {"[FS0,FS2]wp = 2 FS2.wp", 0, 2, Complex(2) * fs2_wp},
            {"[FS1,FS2]wp = wp*wp'", 1, 2, v.wp * v.wp1},
        };
        for (const auto& c : checks) {
            const Complex lhs = ops.bracket(c.a, c.b, wp_fn)(smp.z, l4, l6);
            NumericCheckRow r{c.name, smp.z, smp.l4, smp.l6, lhs, c.rhs, std::abs(lhs - c.rhs), false};
            r.pass = r.abs_error < tol;
            rep.add(std::move(r));
        }
    }
    // Anchor the transported structure constant: [L1,L2] = x_{1,1} L1 must
    // hold symbolically for the bracket rows to mean anything.
    const Derivation br = bracket(fields.at(1), fields.at(2));
    const Derivation expect = x_poly(1, 1, 1) * fields.at(1);
    NumericCheckRow r{"[L1,L2] = x[1,1]*L1 (symbolic)", Complex(0), Rational(0), Rational(0),
                      Complex(0), Complex(0), 0.0L, br == expect};
    rep.add(std::move(r));
    return rep;
}

}  // namespace hyperderiv

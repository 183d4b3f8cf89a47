#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

#include "hyperderiv/polynomial.hpp"
#include "hyperderiv/textio.hpp"

#include "json.hpp"

namespace hyperderiv {

using Json = nlohmann::ordered_json;

// LaTeX rendering maps the machine variables back to the classical notation:
// x[i,j] -> \wp_{i;j}, l[2s] -> \lambda_{2s}, w[a,b] -> \wp_{0;a,b},
// f(n) -> \Phi_2^{(n)}. Machine formats keep the x[i,j] grammar.
inline std::string latex_var(const VarId& v) {
    switch (v.kind) {
        case VarKind::X: return "\\wp_{" + std::to_string(v.a) + ";" + std::to_string(v.b) + "}";
        case VarKind::Lambda: return "\\lambda_{" + std::to_string(v.a) + "}";
        case VarKind::W: return "\\wp_{0;" + std::to_string(v.a) + "," + std::to_string(v.b) + "}";
        case VarKind::FreeChain: return "\\Phi_2^{(" + std::to_string(v.a) + ")}";
    }
    return "?";
}

inline std::string latex_poly(const Polynomial& p) {
    if (p.is_zero()) return "0";
    std::string out;
    const auto& ts = p.terms();
    for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
        const auto& [m, c] = *it;
        const bool neg = c.sign() < 0;
        if (it == ts.rbegin()) { if (neg) out += "-"; }
        else out += neg ? " - " : " + ";
        const Rational mag = c.abs();
        if (mag.is_integer()) {
            if (!(mag == Rational(1)) || m.is_unit()) out += mag.str();
        } else {
            out += "\\tfrac{" + mag.num_str() + "}{" + mag.den_str() + "}";
        }
        for (const auto& [v, e] : m.factors()) {
            const std::string var = latex_var(v);
            if (e == 1) { out += var; continue; }
            const std::string exp = e < 10 ? "^" + std::to_string(e) : "^{" + std::to_string(e) + "}";
            // braces avoid a double superscript on \Phi_2^{(n)}
            out += v.kind == VarKind::FreeChain ? "{" + var + "}" + exp : var + exp;
        }
    }
    return out;
}

// 17 significant digits, enough to round-trip a double.
inline std::string float_str(long double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(x));
    return buf;
}

inline std::string complex_str(const std::complex<long double>& z) {
    return float_str(z.real()) + (z.imag() < 0 ? "-" : "+") + float_str(std::fabs(static_cast<double>(z.imag()))) + "i";
}

inline std::string render_poly(const Polynomial& p, const std::string& format) {
    return format == "latex" ? latex_poly(p) : canonical_serialize(p);
}

}  // namespace hyperderiv

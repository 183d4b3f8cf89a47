#pragma once

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "hyperderiv/polynomial.hpp"

namespace hyperderiv {

// Canonical text form. Terms in descending canonical order, joined by
// " + " / " - "; coefficients printed as num or num/den with unit magnitudes
// omitted; factors in ascending variable order with "^" for exponents >= 2.
// The zero polynomial is "0". parse() accepts the same grammar with
// insignificant whitespace and reports the byte position of any error.

inline std::string canonical_serialize(const Polynomial& p) {
    if (p.is_zero()) return "0";
    std::string out;
    const auto& ts = p.terms();
    for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
        const auto& [m, c] = *it;
        const bool neg = c.sign() < 0;
        if (it == ts.rbegin()) { if (neg) out += "-"; }
        else out += neg ? " - " : " + ";
        const Rational mag = c.abs();
        const bool unit_coef = mag == Rational(1);
        if (!unit_coef || m.is_unit()) out += mag.str();
        bool need_star = !unit_coef && !m.is_unit();
        for (const auto& [v, e] : m.factors()) {
            if (need_star) out += "*";
            out += var_name(v);
            if (e > 1) out += "^" + std::to_string(e);
            need_star = true;
        }
    }
    return out;
}

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

namespace detail {

class PolyParser {
public:
    PolyParser(const std::string& text, int genus) : s_(text), genus_(genus) {}

    Polynomial run() {
        skip_ws();
        if (eof()) throw ParseError("empty input", pos_);
        Polynomial p(genus_);
        bool first = true;
        while (true) {
            int sign = 1;
            skip_ws();
            if (!first) {
                if (eof()) break;
                if (peek() == '+') ++pos_;
                else if (peek() == '-') { sign = -1; ++pos_; }
                else throw ParseError("expected '+' or '-'", pos_);
            } else if (peek() == '-') { sign = -1; ++pos_; }
            p += Rational(long(sign)) * term();
            first = false;
            skip_ws();
            if (eof()) break;
        }
        return p;
    }

private:
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    void skip_ws() { while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_; }

    long integer() {
        skip_ws();
        std::size_t start = pos_;
        if (!eof() && (peek() == '-' || peek() == '+')) ++pos_;
        if (eof() || !std::isdigit(static_cast<unsigned char>(peek()))) throw ParseError("expected integer", pos_);
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        return std::stol(s_.substr(start, pos_ - start));
    }

    void expect(char c) {
        skip_ws();
        if (eof() || peek() != c) throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    Polynomial factor() {
        skip_ws();
        if (eof()) throw ParseError("expected variable", pos_);
        const std::size_t at = pos_;
        try {
            return factor_inner();
        } catch (const ParseError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), at);
        }
    }

    Polynomial factor_inner() {
        const char k = peek();
        VarId v{};
        if (k == 'x') {
            ++pos_; expect('[');
            long i = integer(); expect(',');
            long j = integer(); expect(']');
            v = make_x(static_cast<int>(i), static_cast<int>(j), genus_);
        } else if (k == 'l') {
            ++pos_; expect('[');
            long s = integer(); expect(']');
            v = make_lambda(static_cast<int>(s), genus_);
        } else if (k == 'w') {
            ++pos_; expect('[');
            long a = integer(); expect(',');
            long b = integer(); expect(']');
            v = make_w(static_cast<int>(a), static_cast<int>(b), genus_);
        } else if (k == 'f') {
            ++pos_; expect('(');
            long n = integer(); expect(')');
            v = make_f(static_cast<int>(n));
        } else {
            throw ParseError("expected variable", pos_);
        }
        int e = 1;
        skip_ws();
        if (!eof() && peek() == '^') {
            ++pos_;
            e = static_cast<int>(integer());
            if (e < 1) throw ParseError("exponent must be positive", pos_);
        }
        return Polynomial::from_terms(genus_, {{Monomial(v, e), Rational(1)}});
    }

    bool at_variable() {
        skip_ws();
        if (eof()) return false;
        const char c = peek();
        return c == 'x' || c == 'l' || c == 'w' || c == 'f';
    }

    Polynomial term() {
        skip_ws();
        Rational coef(1);
        bool have_coef = false;
        if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
            long num = integer();
            skip_ws();
            if (!eof() && peek() == '/') {
                ++pos_;
                long den = integer();
                if (den <= 0) throw ParseError("denominator must be positive", pos_);
                coef = Rational(num, den);
            } else {
                coef = Rational(num);
            }
            have_coef = true;
        }
        Polynomial p = Polynomial::constant(genus_, coef);
        bool have_factor = false;
        while (true) {
            skip_ws();
            if (!eof() && peek() == '*') {
                ++pos_;
                p *= factor();
                have_factor = true;
                continue;
            }
            if ((!have_coef && !have_factor) && at_variable()) {
                p *= factor();
                have_factor = true;
                continue;
            }
            break;
        }
        if (!have_coef && !have_factor) throw ParseError("expected term", pos_);
        return p;
    }

    const std::string& s_;
    int genus_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Polynomial canonical_parse(const std::string& text, int genus) {
    // "0" (and only a bare integer zero) denotes the zero polynomial.
    detail::PolyParser parser(text, genus);
    return parser.run();
}

}  // namespace hyperderiv

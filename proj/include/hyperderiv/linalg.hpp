#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hyperderiv/rational.hpp"

namespace hyperderiv {

using RationalMatrix = std::vector<std::vector<Rational>>;
using RationalVector = std::vector<Rational>;

struct LinearSolveResult {
    enum class Kind { Unique, None, Underdetermined };
    Kind kind;
    // Unique: the solution. Underdetermined: a kernel basis vector, scaled so
    // its first nonzero entry is positive. None: empty.
    RationalVector values;
};

// Exact solve of A x = b by fraction-free (Bareiss) elimination after
// clearing row denominators. All outcomes are values, never exceptions.
inline LinearSolveResult solve_rational_linear_system(const RationalMatrix& A, const RationalVector& b) {
    const std::size_t rows = A.size();
    const std::size_t cols = rows ? A[0].size() : 0;
    if (b.size() != rows) throw std::invalid_argument("solve: dimension mismatch");
    for (const auto& r : A)
        if (r.size() != cols) throw std::invalid_argument("solve: ragged matrix");

    // Augmented integer matrix: scale each row by the lcm of denominators.
    std::vector<std::vector<mpz_class>> M(rows, std::vector<mpz_class>(cols + 1));
    for (std::size_t i = 0; i < rows; ++i) {
        mpz_class l = 1;
        for (std::size_t j = 0; j < cols; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), A[i][j].raw().get_den().get_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), b[i].raw().get_den().get_mpz_t());
        for (std::size_t j = 0; j < cols; ++j) M[i][j] = A[i][j].raw().get_num() * (l / A[i][j].raw().get_den());
        M[i][cols] = b[i].raw().get_num() * (l / b[i].raw().get_den());
    }

    std::vector<std::size_t> pivot_col;
    mpz_class prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pr = r;
        while (pr < rows && M[pr][c] == 0) ++pr;
        if (pr == rows) continue;
        std::swap(M[r], M[pr]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j <= cols; ++j) {
                mpz_class t = M[r][c] * M[i][j] - M[i][c] * M[r][j];
                mpz_divexact(M[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            M[i][c] = 0;
        }
        prev = M[r][c];
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (M[i][cols] != 0) return {LinearSolveResult::Kind::None, {}};

    const std::size_t rank = r;
    // Back-substitution on the echelon form, in exact rationals.
    auto back_solve = [&](const std::vector<Rational>& rhs_extra, bool kernel, std::size_t free_col) {
        RationalVector x(cols, Rational(0));
        if (kernel) x[free_col] = Rational(1);
        for (std::size_t k = rank; k-- > 0;) {
            const std::size_t c = pivot_col[k];
            Rational acc = kernel ? Rational(0) : rhs_extra[k];
            for (std::size_t j = c + 1; j < cols; ++j) {
                if (M[k][j] == 0 || x[j].is_zero()) continue;
                acc -= Rational(mpq_class(M[k][j])) * x[j];
            }
            x[c] = acc / Rational(mpq_class(M[k][c]));
        }
        return x;
    };

    if (rank < cols) {
        std::vector<bool> is_pivot(cols, false);
        for (auto c : pivot_col) is_pivot[c] = true;
        std::size_t free_col = 0;
        while (is_pivot[free_col]) ++free_col;
        RationalVector w = back_solve({}, true, free_col);
        for (auto& v : w)
            if (!v.is_zero()) {
                if (v.sign() < 0)
                    for (auto& u : w) u = -u;
                break;
            }
        return {LinearSolveResult::Kind::Underdetermined, std::move(w)};
    }

    std::vector<Rational> rhs(rank);
    for (std::size_t k = 0; k < rank; ++k) rhs[k] = Rational(mpq_class(M[k][cols]));
    return {LinearSolveResult::Kind::Unique, back_solve(rhs, false, 0)};
}

// Incremental sparse row-echelon form over the rationals. Rows are reduced
// against stored pivot rows on insertion; pivots are normalized to 1. Used by
// the larger structured solves (formal integration, even-field systems) and
// for exact rank computation.
class SparseEchelon {
public:
    using Row = std::vector<std::pair<int, Rational>>;  // sorted by column

    enum class AddOutcome { NewPivot, ReducedToZero, Inconsistent };

    // The right-hand side rides along as virtual column `rhs_col` (must be
    // larger than every unknown column).
    explicit SparseEchelon(int rhs_col) : rhs_col_(rhs_col) {}

    AddOutcome add_row(Row row, const Rational& rhs) {
        if (!rhs.is_zero()) row.emplace_back(rhs_col_, rhs);
        reduce(row);
        if (row.empty()) return AddOutcome::ReducedToZero;
        if (row.front().first == rhs_col_) return AddOutcome::Inconsistent;
        normalize(row);
        rows_.emplace(row.front().first, std::move(row));
        return AddOutcome::NewPivot;
    }

    std::size_t rank() const { return rows_.size(); }
    bool has_pivot(int col) const { return rows_.count(col) != 0; }

    // Unique solution for unknowns 0..n-1; nullopt when some column has no
    // pivot (underdetermined). Inconsistency is reported at add_row time.
    std::optional<RationalVector> solve(int n_unknowns) const {
        RationalVector x(n_unknowns, Rational(0));
        for (int c = n_unknowns - 1; c >= 0; --c) {
            auto it = rows_.find(c);
            if (it == rows_.end()) return std::nullopt;
            Rational acc(0);
            for (const auto& [col, val] : it->second) {
                if (col == c) continue;
                if (col == rhs_col_) acc += val;
                else acc -= val * x[col];
            }
            x[c] = acc;
        }
        return x;
    }

    // First column in [0, n) without a pivot, if any.
    std::optional<int> first_free_column(int n_unknowns) const {
        for (int c = 0; c < n_unknowns; ++c)
            if (!rows_.count(c)) return c;
        return std::nullopt;
    }

private:
    void reduce(Row& row) const {
        while (!row.empty()) {
            auto it = rows_.find(row.front().first);
            if (it == rows_.end()) return;
            axpy(row, -row.front().second, it->second);
        }
    }
    static void normalize(Row& row) {
        const Rational inv = row.front().second.inverse();
        for (auto& [c, v] : row) v *= inv;
    }
    // row += s * other, keeping sorted sparse form; drops zeros.
    static void axpy(Row& row, const Rational& s, const Row& other) {
        Row out;
        out.reserve(row.size() + other.size());
        auto i = row.begin();
        auto j = other.begin();
        while (i != row.end() && j != other.end()) {
            if (i->first < j->first) out.push_back(*i++);
            else if (j->first < i->first) { out.emplace_back(j->first, s * j->second); ++j; }
            else {
                Rational v = i->second + s * j->second;
                if (!v.is_zero()) out.emplace_back(i->first, std::move(v));
                ++i; ++j;
            }
        }
        out.insert(out.end(), i, row.end());
        for (; j != other.end(); ++j) out.emplace_back(j->first, s * j->second);
        row = std::move(out);
    }

    int rhs_col_;
    std::map<int, Row> rows_;  // pivot column -> normalized row
};

// Exact determinant by rational Gaussian elimination.
inline Rational rational_determinant(RationalMatrix M) {
    const std::size_t n = M.size();
    for (const auto& r : M)
        if (r.size() != n) throw std::invalid_argument("rational_determinant: not square");
    Rational det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pr = c;
        while (pr < n && M[pr][c].is_zero()) ++pr;
        if (pr == n) return Rational(0);
        if (pr != c) { std::swap(M[pr], M[c]); det = -det; }
        det *= M[c][c];
        const Rational inv = M[c][c].inverse();
        for (std::size_t i = c + 1; i < n; ++i) {
            if (M[i][c].is_zero()) continue;
            const Rational f = M[i][c] * inv;
            for (std::size_t j = c; j < n; ++j) M[i][j] -= f * M[c][j];
        }
    }
    return det;
}

// Exact inverse via Gauss-Jordan; nullopt when singular.
inline std::optional<RationalMatrix> rational_inverse(RationalMatrix M) {
    const std::size_t n = M.size();
    RationalMatrix I(n, RationalVector(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        if (M[i].size() != n) throw std::invalid_argument("rational_inverse: not square");
        I[i][i] = Rational(1);
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pr = c;
        while (pr < n && M[pr][c].is_zero()) ++pr;
        if (pr == n) return std::nullopt;
        if (pr != c) { std::swap(M[pr], M[c]); std::swap(I[pr], I[c]); }
        const Rational inv = M[c][c].inverse();
        for (std::size_t j = 0; j < n; ++j) { M[c][j] *= inv; I[c][j] *= inv; }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || M[i][c].is_zero()) continue;
            const Rational f = M[i][c];
            for (std::size_t j = 0; j < n; ++j) { M[i][j] -= f * M[c][j]; I[i][j] -= f * I[c][j]; }
        }
    }
    return I;
}

// Exact rank of a dense rational matrix.
inline std::size_t rational_rank(const RationalMatrix& A) {
    if (A.empty()) return 0;
    const int cols = static_cast<int>(A[0].size());
    SparseEchelon ech(cols + 1);
    for (const auto& r : A) {
        SparseEchelon::Row row;
        for (int c = 0; c < cols; ++c)
            if (!r[c].is_zero()) row.emplace_back(c, r[c]);
        ech.add_row(std::move(row), Rational(0));
    }
    return ech.rank();
}

}  // namespace hyperderiv

#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyperderiv {

// The variable alphabet, indexed by genus g:
//   X(i,j)    coordinates x_{i,j}, i in {1,2,3}, j odd in [1, 2g-1], weight i+j
//   Lambda(2s) curve parameters, 2s even in [4, 4g+2],              weight 2s
//   W(a,b)    auxiliary second-log-derivative symbols, odd 3<=a<=b<=2g-1, weight a+b
//   FreeChain(n) the free differential ring chain f(n),             weight n+2
enum class VarKind : std::uint8_t { X = 0, Lambda = 1, W = 2, FreeChain = 3 };

struct VarId {
    VarKind kind;
    std::int16_t a = 0;  // X: i, Lambda: 2s, W: smaller index, FreeChain: n
    std::int16_t b = 0;  // X: j, W: larger index

    friend auto operator<=>(const VarId&, const VarId&) = default;
};

inline int weight(const VarId& v) {
    switch (v.kind) {
        case VarKind::X: return v.a + v.b;
        case VarKind::Lambda: return v.a;
        case VarKind::W: return v.a + v.b;
        case VarKind::FreeChain: return v.a + 2;
    }
    throw std::logic_error("VarId: bad kind");
}

inline VarId make_x(int i, int j, int genus) {
    if (genus < 1) throw std::invalid_argument("make_x: genus must be >= 1");
    if (i < 1 || i > 3) throw std::invalid_argument("make_x: i must be 1, 2 or 3");
    if (j < 1 || j % 2 == 0 || j > 2 * genus - 1)
        throw std::invalid_argument("make_x: j must be odd in [1, 2g-1], got j=" + std::to_string(j));
    return VarId{VarKind::X, static_cast<std::int16_t>(i), static_cast<std::int16_t>(j)};
}

inline VarId make_lambda(int two_s, int genus) {
    if (two_s % 2 != 0 || two_s < 4 || two_s > 4 * genus + 2)
        throw std::invalid_argument("make_lambda: index must be even in [4, 4g+2], got " + std::to_string(two_s));
    return VarId{VarKind::Lambda, static_cast<std::int16_t>(two_s), 0};
}

inline VarId make_w(int a, int b, int genus) {
    if (a > b) std::swap(a, b);
    if (a % 2 == 0 || b % 2 == 0 || a < 3 || b > 2 * genus - 1)
        throw std::invalid_argument("make_w: indices must be odd in [3, 2g-1]");
    return VarId{VarKind::W, static_cast<std::int16_t>(a), static_cast<std::int16_t>(b)};
}

inline VarId make_f(int n) {
    if (n < 0) throw std::invalid_argument("make_f: order must be >= 0");
    return VarId{VarKind::FreeChain, static_cast<std::int16_t>(n), 0};
}

inline std::string var_name(const VarId& v) {
    switch (v.kind) {
        case VarKind::X: return "x[" + std::to_string(v.a) + "," + std::to_string(v.b) + "]";
        case VarKind::Lambda: return "l[" + std::to_string(v.a) + "]";
        case VarKind::W: return "w[" + std::to_string(v.a) + "," + std::to_string(v.b) + "]";
        case VarKind::FreeChain: return "f(" + std::to_string(v.a) + ")";
    }
    throw std::logic_error("VarId: bad kind");
}

// All 3g coordinates of C^{3g}, in canonical order.
inline std::vector<VarId> x_coordinates(int genus) {
    std::vector<VarId> out;
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 2 * genus - 1; j += 2) out.push_back(make_x(i, j, genus));
    return out;
}

inline std::vector<VarId> x_alphabet(int genus) { return x_coordinates(genus); }

inline std::vector<VarId> lambda_alphabet(int genus) {
    std::vector<VarId> out;
    for (int s = 2; s <= 2 * genus + 1; ++s) out.push_back(make_lambda(2 * s, genus));
    return out;
}

inline std::vector<VarId> free_chain_alphabet(int max_order) {
    std::vector<VarId> out;
    for (int n = 0; n <= max_order; ++n) out.push_back(make_f(n));
    return out;
}

}  // namespace hyperderiv

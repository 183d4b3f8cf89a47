#pragma once

namespace hyperderiv {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// Default seed for all randomized checks, fixed for reproducibility.
// ("HYDE" in ASCII.)
inline constexpr unsigned long long kDefaultSeed = 0x48594445ull;

}  // namespace hyperderiv

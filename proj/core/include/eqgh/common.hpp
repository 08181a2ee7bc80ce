#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace eqgh {

using Index = std::uint32_t;

// Float slack added to the right-hand side of every bound assertion.
inline constexpr double kTol = 1e-9;

// Tolerance for metric-axiom checks on construction.
inline constexpr double kMetricTol = 1e-9;

// Thrown when a caller violates a documented precondition.
class precondition_error : public std::invalid_argument {
public:
    explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when an operation refuses an input outside its supported range
// (size guards, non-hyperbolic matrices, exhausted horizons).
class refusal_error : public std::runtime_error {
public:
    explicit refusal_error(const std::string& what) : std::runtime_error(what) {}
};

// A certified inequality failed. These are theorems; a throw here is a bug.
class certificate_error : public std::logic_error {
public:
    explicit certificate_error(const std::string& what) : std::logic_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw precondition_error(msg);
}

inline void certify(bool cond, const std::string& msg) {
    if (!cond) throw certificate_error(msg);
}

// Deterministic 64-bit mix, used for seeded sampling without dragging in <random>.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform double in [0,1).
inline double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace eqgh

#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qamem {

using Complex = std::complex<double>;
using Index = std::uint64_t;

// Tolerances shared across modules.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kMatchTol = 1e-9;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

// Largest register width simulated with a dense amplitude vector.
inline constexpr int kMaxRegisterQubits = 24;

//-----------------------------------------------------------------------------
// Error hierarchy. Every failure raised by the library derives from Error so
// callers (the CLI in particular) can map categories onto exit codes.
//-----------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (non-normalized vectors, duplicate
/// patterns, width mismatches, non-unitary gates).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Requested size exceeds what the dense simulator supports.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Qubit id or basis index out of range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// A nonlinear gate was asked to act on a state outside the set of
/// conditional states for which its action is defined.
class SemanticsError : public Error {
public:
    using Error::Error;
};

class DivisionError : public Error {
public:
    using Error::Error;
};

inline constexpr Index pow2(int k) { return Index{1} << k; }

/// Smallest c with 2^c >= v (v >= 1).
inline constexpr int ceil_log2(Index v) { return v <= 1 ? 0 : std::bit_width(v - 1); }

/// Integer part of log2(v); 0 for v <= 1.
inline constexpr int floor_log2(Index v) { return v <= 1 ? 0 : std::bit_width(v) - 1; }

/// Renders the low `width` bits of `value`, most significant first.
inline std::string to_binary(Index value, int width) {
    std::string s(static_cast<std::size_t>(width), '0');
    for (int b = 0; b < width; ++b) {
        if ((value >> b) & 1U) s[static_cast<std::size_t>(width - 1 - b)] = '1';
    }
    return s;
}

}  // namespace qamem

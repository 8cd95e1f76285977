#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <charconv>
#include <optional>
#include <stdexcept>
#include <string>

namespace evac {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat(long long n, long long d = 1) { return Rat(Int(n), Int(d)); }

inline bool is_integral(const Rat& r) { return denominator(r) == 1; }

inline Int rat_floor(const Rat& r) {
    Int q = numerator(r) / denominator(r);
    if (numerator(r) < 0 && q * denominator(r) != numerator(r)) --q;
    return q;
}

inline Int rat_ceil(const Rat& r) { return -rat_floor(-r); }

// Parses a decimal or fractional literal ("0.4", "-3", "2/5", "1e-3") into an
// exact rational. Throws std::invalid_argument on malformed input.
Rat rat_from_string(const std::string& text);

// Exact rational from a double via its shortest round-trip decimal form, so a
// JSON 0.4 becomes 2/5 rather than the nearest binary fraction.
Rat rat_from_double(double value);

// Plain decimal string when the denominator is a power of 2*5, else "p/q".
std::string rat_to_string(const Rat& r);

double rat_to_double(const Rat& r);

}  // namespace evac

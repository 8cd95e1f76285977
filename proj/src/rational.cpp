#include "evac/rational.hpp"

#include <cmath>
#include <cstdio>

namespace evac {

namespace {

Int pow10(long exp) {
    Int r = 1;
    for (long i = 0; i < exp; ++i) r *= 10;
    return r;
}

// "123.456" with optional sign -> exact rational; no exponent part.
Rat parse_plain_decimal(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty number");
    size_t pos = 0;
    bool neg = false;
    if (s[pos] == '+' || s[pos] == '-') {
        neg = s[pos] == '-';
        ++pos;
    }
    Int num = 0;
    long frac_digits = 0;
    bool seen_dot = false, seen_digit = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("malformed number: " + s);
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            num = num * 10 + (c - '0');
            if (seen_dot) ++frac_digits;
            seen_digit = true;
        } else {
            throw std::invalid_argument("malformed number: " + s);
        }
    }
    if (!seen_digit) throw std::invalid_argument("malformed number: " + s);
    Rat r(num, pow10(frac_digits));
    return neg ? Rat(-r) : r;
}

}  // namespace

Rat rat_from_string(const std::string& text) {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Rat num = parse_plain_decimal(text.substr(0, slash));
        Rat den = parse_plain_decimal(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + text);
        return num / den;
    }
    auto epos = text.find_first_of("eE");
    if (epos != std::string::npos) {
        Rat mant = parse_plain_decimal(text.substr(0, epos));
        long exp = std::stol(text.substr(epos + 1));
        if (exp >= 0) return mant * pow10(exp);
        return mant / pow10(-exp);
    }
    return parse_plain_decimal(text);
}

Rat rat_from_double(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite number");
    // Shortest decimal that round-trips back to the same double.
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return rat_from_string(buf);
}

std::string rat_to_string(const Rat& r) {
    Int num = numerator(r), den = denominator(r);
    Int d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d == 1) {
        int digits = std::max(twos, fives);
        Int scale = 1;
        for (int i = twos; i < digits; ++i) scale *= 2;
        for (int i = fives; i < digits; ++i) scale *= 5;
        Int scaled = num * scale;  // now value = scaled / 10^digits
        bool neg = scaled < 0;
        if (neg) scaled = -scaled;
        std::string s = scaled.str();
        if (digits > 0) {
            if ((long)s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
            s.insert(s.size() - digits, ".");
        }
        return neg ? "-" + s : s;
    }
    return num.str() + "/" + den.str();
}

double rat_to_double(const Rat& r) { return static_cast<double>(r); }

}  // namespace evac

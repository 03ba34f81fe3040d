#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace voxbox {

using Int = boost::multiprecision::cpp_int;
// Exact rational arithmetic everywhere; cpp_rational keeps values in
// canonical reduced form (gcd(num,den)=1, den>0).
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

inline const Int num(const Rat& x) { return numerator(x); }
inline const Int den(const Rat& x) { return denominator(x); }

// Number of binary digits of a non-negative integer; bits(0) == 1.
inline std::uint64_t magnitude_bits(const Int& m) {
    if (m == 0) return 1;
    return static_cast<std::uint64_t>(msb(m)) + 1;
}

// Encoded length of one self-delimiting number record:
// sign pair + numerator digit pairs + separator pair + denominator digit
// pairs + terminator pair.  See codec.hpp for the wire layout.
inline std::uint64_t encoded_bits(const Rat& x) {
    return 2 * (magnitude_bits(abs(numerator(x))) + magnitude_bits(denominator(x))) + 6;
}

// Canonical text: "p/q", or just "p" when q == 1.
inline std::string rat_to_string(const Rat& x) {
    std::string s = numerator(x).str();
    if (denominator(x) != 1) {
        s += '/';
        s += denominator(x).str();
    }
    return s;
}

// Strict parse of a rational literal: "p", "p/q", or a finite decimal such
// as "-12.5" (converted exactly).  Exponents, NaN/Inf and empty strings are
// rejected.  Returns false on any malformed input.
inline bool try_parse_rational(std::string_view text, Rat& out) {
    if (text.empty()) return false;
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = (text[pos] == '-');
        ++pos;
    }
    auto read_digits = [&](Int& value) -> std::size_t {
        std::size_t count = 0;
        value = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            value = value * 10 + (text[pos] - '0');
            ++pos;
            ++count;
        }
        return count;
    };
    Int ipart;
    if (read_digits(ipart) == 0) return false;
    if (pos == text.size()) {
        out = Rat(ipart);
        if (negative) out = -out;
        return true;
    }
    if (text[pos] == '/') {
        ++pos;
        Int q;
        if (read_digits(q) == 0 || pos != text.size() || q == 0) return false;
        out = Rat(ipart, q);
        if (negative) out = -out;
        return true;
    }
    if (text[pos] == '.') {
        ++pos;
        Int frac = 0;
        std::size_t places = read_digits(frac);
        if (places == 0 || pos != text.size()) return false;
        Int scale = 1;
        for (std::size_t i = 0; i < places; ++i) scale *= 10;
        out = Rat(ipart * scale + frac, scale);
        if (negative) out = -out;
        return true;
    }
    return false;
}

inline Rat parse_rational(std::string_view text) {
    Rat r;
    if (!try_parse_rational(text, r))
        throw std::invalid_argument("malformed rational literal: '" + std::string(text) + "'");
    return r;
}

}  // namespace voxbox

#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>

#include "errors.hpp"

namespace hkit {

// All coefficients in the library are exact rationals. Values are kept
// canonicalized (reduced, positive denominator) at every construction site.
using Rational = mpq_class;
using Integer = mpz_class;

inline bool is_zero(const Rational& x) { return sgn(x) == 0; }

namespace detail {
inline bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}
} // namespace detail

// Parses "num" or "num/den" with optional leading '-'. Rejects anything else,
// including a zero denominator.
inline Rational parse_rational(const std::string& text) {
    std::string s = text;
    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        negative = (s[0] == '-');
        s = s.substr(1);
    }
    std::string num = s, den = "1";
    if (auto slash = s.find('/'); slash != std::string::npos) {
        num = s.substr(0, slash);
        den = s.substr(slash + 1);
    }
    if (!detail::all_digits(num) || !detail::all_digits(den))
        throw SchemaError("bad rational '" + text + "'");
    Integer n(num), d(den);
    if (sgn(d) == 0) throw SchemaError("bad rational '" + text + "' (zero denominator)");
    Rational r(n, d);
    r.canonicalize();
    if (negative) r = -r;
    return r;
}

// Canonical form: reduced, denominator omitted when 1, sign on the numerator.
inline std::string rational_str(const Rational& x) {
    Rational c = x;
    c.canonicalize();
    return c.get_str();
}

inline Integer binomial(unsigned long n, unsigned long k) {
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline Rational rational_pow(const Rational& base, int e) {
    Rational r(1);
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

} // namespace hkit

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mlcache {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

namespace detail {

inline BigInt parse_integer(std::string_view text, std::string_view whole) {
    if (text.empty())
        throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    std::size_t pos = 0;
    bool negative = false;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        pos = 1;
    }
    if (pos == text.size())
        throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    BigInt value = 0;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (c < '0' || c > '9')
            throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
        value = value * 10 + (c - '0');
    }
    return negative ? BigInt(-value) : value;
}

}  // namespace detail

/// Parses "p/q" or "n". Whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return Rational(detail::parse_integer(text, text));
    const BigInt num = detail::parse_integer(text.substr(0, slash), text);
    const BigInt den = detail::parse_integer(text.substr(slash + 1), text);
    if (den == 0)
        throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
}

/// Canonical exact form: "n" for integers, "p/q" otherwise (q > 0, reduced).
inline std::string to_string(const Rational& q) {
    const BigInt den = denominator_of(q);
    if (den == 1)
        return numerator_of(q).str();
    return numerator_of(q).str() + "/" + den.str();
}

/// Locale-independent decimal rendering with 17 significant digits.
inline std::string to_decimal(const Rational& q) {
    const double value = q.convert_to<double>();
    char buffer[64];
    // Shortest representation that round-trips; always '.' as separator.
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{})
        throw std::runtime_error("decimal conversion failed");
    return std::string(buffer, end);
}

inline BigInt floor_of(const Rational& q) {
    BigInt num = numerator_of(q);
    const BigInt den = denominator_of(q);
    BigInt quotient = num / den;
    if (num % den != 0 && num < 0)
        quotient -= 1;
    return quotient;
}

inline bool is_integer(const Rational& q) { return denominator_of(q) == 1; }

inline BigInt lcm_of(const BigInt& a, const BigInt& b) {
    return boost::multiprecision::lcm(a, b);
}

inline Rational rational_min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational rational_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

inline BigInt binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n)
        return 0;
    k = std::min(k, n - k);
    BigInt result = 1;
    for (std::int64_t i = 1; i <= k; ++i)
        result = result * (n - k + i) / i;
    return result;
}

}  // namespace mlcache

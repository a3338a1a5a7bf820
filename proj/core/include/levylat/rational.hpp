#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace levylat {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int int_pow(Int base, long e) {
    if (e < 0) throw std::invalid_argument("int_pow: negative exponent");
    Int out = 1;
    while (e > 0) {
        if (e & 1) out *= base;
        base *= base;
        e >>= 1;
    }
    return out;
}

inline Rat rat_pow(const Rat& base, long e) {
    if (e >= 0) {
        return Rat(int_pow(numerator(base), e), int_pow(denominator(base), e));
    }
    if (base == 0) throw std::domain_error("rat_pow: 0 to negative power");
    return Rat(int_pow(denominator(base), -e), int_pow(numerator(base), -e));
}

/// Rising factorial x(x+1)...(x+n-1); empty product for n = 0.
inline Rat pochhammer(const Rat& x, long n) {
    Rat out = 1;
    for (long t = 0; t < n; ++t) out *= x + t;
    return out;
}

inline Int factorial(long n) {
    Int out = 1;
    for (long t = 2; t <= n; ++t) out *= t;
    return out;
}

inline Int binomial(const Int& n, long k) {
    if (k < 0) return 0;
    Int out = 1;
    for (long t = 0; t < k; ++t) {
        out *= n - t;
        out /= t + 1;  // exact: product of t+1 consecutive integers
    }
    return out;
}

inline Int double_factorial_odd(long i) {
    // (2i-1)!! = (2i)!/(2^i i!)
    Int out = 1;
    for (long t = 1; t <= i; ++t) out *= 2 * t - 1;
    return out;
}

inline Int multinomial(const std::vector<long>& parts) {
    long total = 0;
    for (long p : parts) total += p;
    Int out = factorial(total);
    for (long p : parts) out /= factorial(p);
    return out;
}

inline double to_double(const Rat& x) { return x.convert_to<double>(); }

/// "p/q" when non-integer, plain integer string otherwise.
inline std::string rat_string(const Rat& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

}  // namespace levylat

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace jetforms {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rational_of(long num, long den = 1)
{
    if (den == 0)
        throw std::domain_error("rational with zero denominator");
    return Rational(Integer(num), Integer(den));
}

// "3", "-3", "3/4"
inline Rational parse_rational(const std::string& s)
{
    auto slash = s.find('/');
    if (slash == std::string::npos)
        return Rational(Integer(s));
    Integer num(s.substr(0, slash));
    Integer den(s.substr(slash + 1));
    if (den == 0)
        throw std::domain_error("rational with zero denominator");
    return Rational(num, den);
}

inline std::string to_string(const Rational& r)
{
    if (denominator(r) == 1)
        return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational factorial(int n)
{
    Integer f = 1;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return Rational(f);
}

inline Rational binomial(int n, int k)
{
    if (k < 0 || k > n)
        return Rational(0);
    Integer num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
        num *= (n - i);
        den *= (i + 1);
    }
    return Rational(num, den);
}

} // namespace jetforms

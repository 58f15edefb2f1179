#pragma once

// Wigner 3j and 6j symbols from the Racah factorial formulas, evaluated with
// exact big-integer/rational arithmetic and rounded to double once at the end.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlqi/errors.hpp"

namespace nlqi {

// Largest admissible angular momentum; guards the factorial tables.
inline constexpr double kWignerJCap = 20.0;

namespace detail {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;
using BigFloat = boost::multiprecision::cpp_bin_float_100;

// Doubled angular momentum, validated to be a non-negative (half-)integer.
inline int to_two_j(double j, const char* what) {
    const double twice = 2.0 * j;
    const double rounded = std::round(twice);
    if (std::abs(twice - rounded) > 1e-9)
        throw DomainError(std::string(what) + " is not a half-integer");
    if (rounded < 0 || j > kWignerJCap)
        throw DomainError(std::string(what) + " outside [0, cap]");
    return static_cast<int>(rounded);
}

// Doubled projection; may be negative.
inline int to_two_m(double m, const char* what) {
    const double twice = 2.0 * m;
    const double rounded = std::round(twice);
    if (std::abs(twice - rounded) > 1e-9)
        throw DomainError(std::string(what) + " is not a half-integer");
    return static_cast<int>(rounded);
}

inline BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// (a+b-c)! (a-b+c)! (-a+b+c)! / (a+b+c+1)!  with doubled arguments.
// Returns 0/1 when the triangle rule fails or the perimeter is half-odd.
inline BigRat triangle_coefficient(int ta, int tb, int tc) {
    const int p1 = (ta + tb - tc) / 2;
    const int p2 = (ta - tb + tc) / 2;
    const int p3 = (-ta + tb + tc) / 2;
    if ((ta + tb + tc) % 2 != 0) return BigRat(0);
    if (p1 < 0 || p2 < 0 || p3 < 0) return BigRat(0);
    const int s = (ta + tb + tc) / 2 + 1;
    return BigRat(factorial(p1) * factorial(p2) * factorial(p3), factorial(s));
}

inline double rounded_sqrt_product(const BigRat& sum, const BigRat& radicand) {
    if (sum == 0 || radicand == 0) return 0.0;
    const BigFloat s(sum);
    const BigFloat r(radicand);
    return static_cast<double>(s * sqrt(r));
}

}  // namespace detail

inline double wigner3j(double j1, double j2, double j3,
                       double m1, double m2, double m3) {
    using namespace detail;
    const int tj1 = to_two_j(j1, "j1"), tj2 = to_two_j(j2, "j2"), tj3 = to_two_j(j3, "j3");
    const int tm1 = to_two_m(m1, "m1"), tm2 = to_two_m(m2, "m2"), tm3 = to_two_m(m3, "m3");
    if ((tj1 + tm1) % 2 || (tj2 + tm2) % 2 || (tj3 + tm3) % 2)
        throw DomainError("j+m is not an integer");
    if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3) return 0.0;
    if (tm1 + tm2 + tm3 != 0) return 0.0;

    const BigRat tri = triangle_coefficient(tj1, tj2, tj3);
    if (tri == 0) return 0.0;

    // All of the following are guaranteed integers by the checks above.
    const int a1 = (tj1 + tm1) / 2, a2 = (tj1 - tm1) / 2;
    const int b1 = (tj2 + tm2) / 2, b2 = (tj2 - tm2) / 2;
    const int c1 = (tj3 + tm3) / 2, c2 = (tj3 - tm3) / 2;

    BigRat radicand = tri;
    radicand *= BigRat(factorial(a1) * factorial(a2) * factorial(b1) *
                       factorial(b2) * factorial(c1) * factorial(c2));

    const int p12 = (tj1 + tj2 - tj3) / 2;        // j1+j2-j3
    const int g31 = (tj3 - tj2 + tm1) / 2;        // j3-j2+m1
    const int g32 = (tj3 - tj1 - tm2) / 2;        // j3-j1-m2

    const int kmin = std::max({0, -g31, -g32});
    const int kmax = std::min({p12, a2, b1});

    BigRat sum = 0;
    for (int k = kmin; k <= kmax; ++k) {
        BigRat term(BigInt(1), factorial(k) * factorial(p12 - k) * factorial(a2 - k) *
                                   factorial(b1 - k) * factorial(g31 + k) *
                                   factorial(g32 + k));
        if (k % 2) term = -term;
        sum += term;
    }
    if (sum == 0) return 0.0;

    // Phase (-1)^(j1-j2-m3); the exponent is an integer whenever the symbol survives.
    const int phase_exp = (tj1 - tj2 - tm3) / 2;
    double result = rounded_sqrt_product(sum, radicand);
    if (phase_exp % 2 != 0) result = -result;
    return result;
}

inline double wigner6j(double j1, double j2, double j3,
                       double j4, double j5, double j6) {
    using namespace detail;
    const int t1 = to_two_j(j1, "j1"), t2 = to_two_j(j2, "j2"), t3 = to_two_j(j3, "j3");
    const int t4 = to_two_j(j4, "j4"), t5 = to_two_j(j5, "j5"), t6 = to_two_j(j6, "j6");

    const BigRat w1 = triangle_coefficient(t1, t2, t3);
    const BigRat w2 = triangle_coefficient(t1, t5, t6);
    const BigRat w3 = triangle_coefficient(t4, t2, t6);
    const BigRat w4 = triangle_coefficient(t4, t5, t3);
    if (w1 == 0 || w2 == 0 || w3 == 0 || w4 == 0) return 0.0;

    const int s1 = (t1 + t2 + t3) / 2;
    const int s2 = (t1 + t5 + t6) / 2;
    const int s3 = (t4 + t2 + t6) / 2;
    const int s4 = (t4 + t5 + t3) / 2;
    const int q1 = (t1 + t2 + t4 + t5) / 2;
    const int q2 = (t2 + t3 + t5 + t6) / 2;
    const int q3 = (t3 + t1 + t6 + t4) / 2;

    const int kmin = std::max(std::max(s1, s2), std::max(s3, s4));
    const int kmax = std::min(q1, std::min(q2, q3));

    BigRat sum = 0;
    for (int k = kmin; k <= kmax; ++k) {
        BigRat term(factorial(k + 1),
                    factorial(k - s1) * factorial(k - s2) * factorial(k - s3) *
                        factorial(k - s4) * factorial(q1 - k) * factorial(q2 - k) *
                        factorial(q3 - k));
        if (k % 2) term = -term;
        sum += term;
    }
    if (sum == 0) return 0.0;

    const BigRat radicand = w1 * w2 * w3 * w4;
    return rounded_sqrt_product(sum, radicand);
}

}  // namespace nlqi

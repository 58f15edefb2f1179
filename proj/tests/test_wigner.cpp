#include <doctest.h>

#include <cmath>
#include <vector>

#include "nlqi/wigner.hpp"
#include "support/cg_oracle.hpp"

using nlqi::wigner3j;
using nlqi::wigner6j;

TEST_CASE("3j closed-form values and selection rules") {
    CHECK(wigner3j(1, 1, 0, 0, 0, 0) == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(wigner3j(1, 1, 1, 1, 0, 0) == 0.0);      // m-sum violated
    CHECK(wigner3j(1, 1, 3, 0, 0, 0) == 0.0);      // triangle violated
    CHECK(wigner3j(2, 1, 1, 2, 0, -2) == 0.0);     // |m| exceeds j in column 3
    CHECK(wigner3j(0.5, 0.5, 0.5, 0.5, -0.5, 0.5) == 0.0);  // half-odd perimeter
}

TEST_CASE("3j rejects malformed half-integers") {
    CHECK_THROWS_AS(wigner3j(1.3, 1, 1, 0, 0, 0), nlqi::DomainError);
    CHECK_THROWS_AS(wigner3j(0.5, 1, 0.5, 0.0, 0, 0.0), nlqi::DomainError);  // j+m not integral
    CHECK_THROWS_AS(wigner3j(25, 25, 25, 0, 0, 0), nlqi::DomainError);       // beyond cap
}

TEST_CASE("3j agrees with the ladder-recursion oracle") {
    const double tol = 1e-12;
    CHECK(std::abs(wigner3j(1.5, 1, 0.5, 0.5, 0, -0.5) -
                   oracle::three_j(1.5, 1, 0.5, 0.5, 0, -0.5)) < tol);
    for (double j1 : {0.5, 1.0, 1.5, 2.0})
        for (double j2 : {0.5, 1.0, 1.5})
            for (double j3 = std::abs(j1 - j2); j3 <= j1 + j2 + 1e-9; j3 += 1.0)
                for (double m1 = -j1; m1 <= j1 + 1e-9; m1 += 1.0)
                    for (double m2 = -j2; m2 <= j2 + 1e-9; m2 += 1.0) {
                        const double m3 = -m1 - m2;
                        if (std::abs(m3) > j3 + 1e-9) continue;
                        CHECK(std::abs(wigner3j(j1, j2, j3, m1, m2, m3) -
                                       oracle::three_j(j1, j2, j3, m1, m2, m3)) < tol);
                    }
}

TEST_CASE("3j symmetries") {
    const double j1 = 1.5, j2 = 2, j3 = 2.5, m1 = 0.5, m2 = -1, m3 = 0.5;
    const double base = wigner3j(j1, j2, j3, m1, m2, m3);
    const double odd_sign = std::pow(-1.0, j1 + j2 + j3);
    // cyclic permutation: invariant
    CHECK(wigner3j(j2, j3, j1, m2, m3, m1) == doctest::Approx(base).epsilon(1e-13));
    CHECK(wigner3j(j3, j1, j2, m3, m1, m2) == doctest::Approx(base).epsilon(1e-13));
    // odd permutation: (-1)^(j1+j2+j3)
    CHECK(wigner3j(j2, j1, j3, m2, m1, m3) == doctest::Approx(odd_sign * base).epsilon(1e-13));
    // m negation: same factor
    CHECK(wigner3j(j1, j2, j3, -m1, -m2, -m3) ==
          doctest::Approx(odd_sign * base).epsilon(1e-13));
}

TEST_CASE("6j closed-form values and triangle rule") {
    CHECK(wigner6j(1, 1, 0, 1, 1, 1) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
    // {a a 0; b b c} = (-1)^(a+b+c) / sqrt((2a+1)(2b+1))
    CHECK(wigner6j(1.5, 1.5, 0, 1, 1, 1.5) ==
          doctest::Approx(std::pow(-1.0, 4.0) / std::sqrt(4.0 * 3.0)).epsilon(1e-14));
    CHECK(wigner6j(1, 1, 3, 1, 1, 1) == 0.0);  // triangle violated in the top triad
    CHECK(wigner6j(0.5, 0.5, 0.5, 0.5, 0.5, 0.5) == 0.0);  // no valid coupling
}

TEST_CASE("6j agrees with the four-3j contraction oracle") {
    const double tol = 1e-12;
    // the contraction oracle itself reproduces a closed form
    CHECK(std::abs(oracle::six_j(1, 1, 0, 1, 1, 1) - (-1.0 / 3.0)) < tol);

    const double sets[][6] = {
        {0.5, 0.5, 1, 0.5, 0.5, 1},
        {1, 1, 1, 1, 1, 1},
        {1.5, 1, 1.5, 1, 0.5, 1},
        {1.5, 0, 1.5, 1, 0.5, 1},
        {1.5, 1, 0.5, 1, 1.5, 1},
        {2, 1, 1, 1, 1, 1},
        {1.5, 1.5, 1, 1.5, 1.5, 2},
    };
    for (const auto& s : sets)
        CHECK(std::abs(wigner6j(s[0], s[1], s[2], s[3], s[4], s[5]) -
                       oracle::six_j(s[0], s[1], s[2], s[3], s[4], s[5])) < tol);
}

#pragma once

// Test-only oracles built without factorial formulas: Clebsch-Gordan
// coefficients from the ladder-operator recursion, 3j symbols from them,
// 6j symbols from the four-3j contraction, and the hyperfine dipole factor
// from explicit basis coupling. Independent of the library implementations
// they are used to check.

#include <cmath>
#include <map>

namespace oracle {

inline double a_plus(double j, double m) { return std::sqrt((j - m) * (j + m + 1.0)); }
inline double a_minus(double j, double m) { return std::sqrt((j + m) * (j - m + 1.0)); }

// Expansion of |J,M> over |j1 m1>|j2 M-m1>, keyed by 2*m1. Built by solving
// J+ |J,J> = 0 with the Condon-Shortley sign and lowering to M.
inline std::map<int, double> cg_row(double j1, double j2, double J, double M) {
    std::map<int, double> c;
    const double top = std::min(j1, J + j2);
    const double bot = std::max(-j1, J - j2);
    c[static_cast<int>(std::lround(2 * top))] = 1.0;
    for (double m1 = top - 1; m1 >= bot - 1e-9; m1 -= 1.0) {
        const double up = c[static_cast<int>(std::lround(2 * (m1 + 1)))];
        c[static_cast<int>(std::lround(2 * m1))] =
            -up * a_plus(j2, J - m1 - 1) / a_plus(j1, m1);
    }
    double norm = 0;
    for (auto& [k, v] : c) {
        (void)k;
        norm += v * v;
    }
    for (auto& [k, v] : c) {
        (void)k;
        v /= std::sqrt(norm);
    }
    for (double mc = J; mc > M + 1e-9; mc -= 1.0) {
        std::map<int, double> d;
        const double b = std::sqrt((J + mc) * (J - mc + 1));
        for (auto& [key, v] : c) {
            const double m1 = key / 2.0;
            const double m2 = mc - m1;
            if (m1 - 1 >= -j1 - 1e-9)
                d[static_cast<int>(std::lround(2 * (m1 - 1)))] += v * a_minus(j1, m1) / b;
            if (m2 - 1 >= -j2 - 1e-9)
                d[static_cast<int>(std::lround(2 * m1))] += v * a_minus(j2, m2) / b;
        }
        c = d;
    }
    return c;
}

inline double cg(double j1, double m1, double j2, double m2, double J, double M) {
    if (std::abs(m1 + m2 - M) > 1e-9) return 0.0;
    if (J < std::abs(j1 - j2) - 1e-9 || J > j1 + j2 + 1e-9) return 0.0;
    if (std::abs(m1) > j1 + 1e-9 || std::abs(m2) > j2 + 1e-9 || std::abs(M) > J + 1e-9)
        return 0.0;
    auto row = cg_row(j1, j2, J, M);
    auto it = row.find(static_cast<int>(std::lround(2 * m1)));
    return it == row.end() ? 0.0 : it->second;
}

inline double three_j(double j1, double j2, double j3, double m1, double m2, double m3) {
    if (std::abs(m1 + m2 + m3) > 1e-9) return 0.0;
    const double phase = std::pow(-1.0, j1 - j2 - m3);
    return phase / std::sqrt(2 * j3 + 1) * cg(j1, m1, j2, m2, j3, -m3);
}

// Contraction of four 3j symbols over all projections.
inline double six_j(double j1, double j2, double j3, double j4, double j5, double j6) {
    double sum = 0.0;
    for (double m1 = -j1; m1 <= j1 + 1e-9; m1 += 1.0)
        for (double m2 = -j2; m2 <= j2 + 1e-9; m2 += 1.0)
            for (double m3 = -j3; m3 <= j3 + 1e-9; m3 += 1.0)
                for (double m4 = -j4; m4 <= j4 + 1e-9; m4 += 1.0)
                    for (double m5 = -j5; m5 <= j5 + 1e-9; m5 += 1.0)
                        for (double m6 = -j6; m6 <= j6 + 1e-9; m6 += 1.0) {
                            const double t1 = three_j(j1, j2, j3, -m1, -m2, -m3);
                            if (t1 == 0.0) continue;
                            const double t2 = three_j(j1, j5, j6, m1, -m5, m6);
                            if (t2 == 0.0) continue;
                            const double t3 = three_j(j4, j2, j6, m4, m2, -m6);
                            if (t3 == 0.0) continue;
                            const double t4 = three_j(j4, j5, j3, -m4, m5, m3);
                            if (t4 == 0.0) continue;
                            const double phase = std::pow(
                                -1.0, (j1 - m1) + (j2 - m2) + (j3 - m3) + (j4 - m4) +
                                          (j5 - m5) + (j6 - m6));
                            sum += phase * t1 * t2 * t3 * t4;
                        }
    return sum;
}

// Hyperfine dipole factor by explicit (J x I) basis coupling, normalized so
// the (F'=0,0) <- (F=1,-1), q=+1 entry equals +1/sqrt(6).
inline double direct_dipole_factor(int Fp, int mp, int F, int m, int q) {
    const double J = 0.5, Jp = 1.5;
    auto raw = [&](int fp, int mpp, int f, int mm, int qq) {
        double sum = 0.0;
        for (double mI = -1.5; mI <= 1.5 + 1e-9; mI += 1.0) {
            const double mJ = mm - mI, mJp = mpp - mI;
            if (std::abs(mJ) > J + 1e-9 || std::abs(mJp) > Jp + 1e-9) continue;
            sum += cg(Jp, mJp, 1.5, mI, fp, mpp) * cg(J, mJ, 1.5, mI, f, mm) *
                   cg(J, mJ, 1.0, qq, Jp, mJp);
        }
        return sum;
    };
    const double reference = raw(0, 0, 1, -1, 1);
    return raw(Fp, mp, F, m, q) * (1.0 / std::sqrt(6.0)) / reference;
}

}  // namespace oracle

#pragma once

// Small numerical helpers: least-squares slope fits, bisection, golden search.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "nlqi/errors.hpp"

namespace nlqi {

// Least-squares slope of y vs x.
inline double fit_slope(const std::vector<std::pair<double, double>>& xy) {
    if (xy.size() < 2) throw DomainError("slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xy.size());
    for (const auto& [x, y] : xy) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw DomainError("slope fit: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

// Slope of log10(y) vs log10(x); inputs must be positive.
inline double fit_loglog_slope(const std::vector<std::pair<double, double>>& xy) {
    std::vector<std::pair<double, double>> logs;
    logs.reserve(xy.size());
    for (const auto& [x, y] : xy) {
        if (!(x > 0.0) || !(y > 0.0))
            throw DomainError("log-log fit requires positive data");
        logs.emplace_back(std::log10(x), std::log10(y));
    }
    return fit_slope(logs);
}

// Refine a sign change of f inside [lo, hi] to the given abscissa tolerance.
// Requires f(lo) and f(hi) of opposite sign.
inline double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                          double xtol) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0) == (fhi < 0)) throw DomainError("bisection: no sign change in bracket");
    while (hi - lo > xtol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Maximize a unimodal function on [lo, hi] by golden-section search.
inline double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                 double xtol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace nlqi

#pragma once

// One-dimensional root finding, extremum search and quadrature used by the
// reduced model and the constructions.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace chb::numerics {

struct BisectionOptions {
    double rel_tol = 1e-12;
    int max_iter = 200;
};

/// Root of f on a sign-changing bracket [lo, hi].
template <class F>
double bisect(F&& f, double lo, double hi, BisectionOptions opts = {}) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw std::invalid_argument("bisect: bracket does not change sign");
    }
    for (int it = 0; it < opts.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if (hi - lo <= opts.rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

struct Extremum {
    double x;
    double value;
};

/// Golden-section search for the maximum of a unimodal f on [a, b].
template <class F>
Extremum golden_section_max(F&& f, double a, double b, double tol = 1e-10,
                            int max_iter = 500) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
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
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

template <class F>
Extremum golden_section_min(F&& f, double a, double b, double tol = 1e-10,
                            int max_iter = 500) {
    auto neg = [&](double x) { return -f(x); };
    auto e = golden_section_max(neg, a, b, tol, max_iter);
    return {e.x, -e.value};
}

namespace detail {
template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance tol.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, int max_depth = 50) {
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace chb::numerics

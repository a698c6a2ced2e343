#pragma once

// Adaptive Simpson quadrature for smooth scalar integrands.

#include <cmath>
#include <complex>
#include <functional>

namespace cmt {

namespace detail {
template <class F, class V>
V simpson_step(const F& f, double a, double b, V fa, V fm, V fb, V whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    V flm = f(lm), frm = f(rm);
    V left = (b - a) / 12.0 * (fa + 4.0 * flm + fm);
    V right = (b - a) / 12.0 * (fm + 4.0 * frm + fb);
    V delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta * (1.0 / 15.0);
    return simpson_step(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}
} // namespace detail

template <class F>
auto adaptive_simpson(const F& f, double a, double b, double tol = 1e-12, int depth = 24)
    -> decltype(f(a)) {
    using V = decltype(f(a));
    V fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    V whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

} // namespace cmt

#pragma once

// Truncated power series over a generic coefficient ring. Division assumes
// unit constant term, which every generating series used here has; that
// keeps the arithmetic exact over rationals.

#include <vector>

#include "scalar.hpp"

namespace cmt {

template <class R>
struct Series {
    std::vector<R> c; // c[k] = coefficient of x^k

    explicit Series(int order) : c(order + 1, ring_traits<R>::zero()) {}
    int order() const { return int(c.size()) - 1; }
};

template <class R>
Series<R> series_mul(const Series<R>& a, const Series<R>& b) {
    int K = std::min(a.order(), b.order());
    Series<R> r(K);
    for (int i = 0; i <= K; ++i)
        for (int j = 0; i + j <= K && j <= b.order(); ++j)
            if (i <= a.order()) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

// a / b with b[0] = 1.
template <class R>
Series<R> series_div(const Series<R>& a, const Series<R>& b) {
    int K = std::min(a.order(), b.order());
    Series<R> r(K);
    for (int n = 0; n <= K; ++n) {
        R s = (n <= a.order()) ? a.c[n] : ring_traits<R>::zero();
        for (int k = 1; k <= n; ++k) s -= b.c[k] * r.c[n - k];
        r.c[n] = s;
    }
    return r;
}

// log(1 + u) for u with zero constant term.
template <class R>
Series<R> series_log1p(const Series<R>& u) {
    int K = u.order();
    Series<R> r(K), p(K);
    p.c[0] = ring_traits<R>::one();
    for (int k = 1; k <= K; ++k) {
        p = series_mul(p, u);
        R f = ring_traits<R>::inv_int(k);
        if (!(k & 1)) f = -f;
        for (int j = 0; j <= K; ++j) r.c[j] += f * p.c[j];
    }
    return r;
}

// exp(u) for u with zero constant term.
template <class R>
Series<R> series_exp0(const Series<R>& u) {
    int K = u.order();
    Series<R> r(K), p(K);
    p.c[0] = ring_traits<R>::one();
    r.c[0] = ring_traits<R>::one();
    R fact = ring_traits<R>::one();
    for (int k = 1; k <= K; ++k) {
        p = series_mul(p, u);
        fact = fact * ring_traits<R>::inv_int(k);
        for (int j = 0; j <= K; ++j) r.c[j] += fact * p.c[j];
    }
    return r;
}

// (e^x - 1)/x = sum x^k/(k+1)!
template <class R>
Series<R> series_expm1_over_x(int K) {
    Series<R> r(K);
    R f = ring_traits<R>::one();
    for (int k = 0; k <= K; ++k) {
        f = f * ring_traits<R>::inv_int(k + 1);
        r.c[k] = f;
    }
    // note: after the loop f accumulated 1/(K+1)!, r.c[k] = 1/(k+1)! as built stepwise
    return r;
}

// Todd generating series x/(e^x - 1).
template <class R>
Series<R> series_todd(int K) {
    Series<R> one(K);
    one.c[0] = ring_traits<R>::one();
    return series_div(one, series_expm1_over_x<R>(K));
}

// sinh(x/2)/(x/2) = sum x^{2k} / (4^k (2k+1)!)
template <class R>
Series<R> series_sinhc_half(int K) {
    Series<R> r(K);
    R term = ring_traits<R>::one();
    r.c[0] = term;
    for (int k = 1; 2 * k <= K; ++k) {
        term = term * ring_traits<R>::inv_int(4) * ring_traits<R>::inv_int(2 * k) *
               ring_traits<R>::inv_int(2 * k + 1);
        r.c[2 * k] = term;
    }
    return r;
}

// cosh(x/2) = sum x^{2k} / (4^k (2k)!)
template <class R>
Series<R> series_cosh_half(int K) {
    Series<R> r(K);
    R term = ring_traits<R>::one();
    r.c[0] = term;
    for (int k = 1; 2 * k <= K; ++k) {
        term = term * ring_traits<R>::inv_int(4) * ring_traits<R>::inv_int(2 * k - 1) *
               ring_traits<R>::inv_int(2 * k);
        r.c[2 * k] = term;
    }
    return r;
}

// A-hat generating series (x/2)/sinh(x/2).
template <class R>
Series<R> series_ahat(int K) {
    Series<R> one(K);
    one.c[0] = ring_traits<R>::one();
    return series_div(one, series_sinhc_half<R>(K));
}

// (x/2) coth(x/2) = cosh(x/2) / (sinh(x/2)/(x/2)).
template <class R>
Series<R> series_coth_half(int K) {
    return series_div(series_cosh_half<R>(K), series_sinhc_half<R>(K));
}

// exp(x) about zero.
template <class R>
Series<R> series_exp(int K) {
    Series<R> r(K);
    R f = ring_traits<R>::one();
    r.c[0] = f;
    for (int k = 1; k <= K; ++k) {
        f = f * ring_traits<R>::inv_int(k);
        r.c[k] = f;
    }
    return r;
}

// Recenter a series about c: g_k = f^{(k)}(c)/k! = sum_j C(j,k) f_j c^{j-k}.
// Valid when |c| is well inside the truncation's reliable range.
template <class R>
Series<R> series_recenter(const Series<R>& f, const R& c) {
    int K = f.order();
    Series<R> g(K);
    std::vector<std::vector<R>> binom(K + 1, std::vector<R>(K + 1, ring_traits<R>::zero()));
    for (int j = 0; j <= K; ++j) {
        binom[j][0] = ring_traits<R>::one();
        for (int k = 1; k <= j; ++k)
            binom[j][k] = binom[j - 1][k - 1] + ((k <= j - 1) ? binom[j - 1][k] : ring_traits<R>::zero());
    }
    for (int k = 0; k <= K; ++k) {
        R s = ring_traits<R>::zero();
        R cpow = ring_traits<R>::one();
        for (int j = k; j <= K; ++j) {
            s += binom[j][k] * f.c[j] * cpow;
            cpow = cpow * c;
        }
        g.c[k] = s;
    }
    return g;
}

} // namespace cmt

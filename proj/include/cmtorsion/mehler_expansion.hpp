#pragma once

// Second, independent route to the oscillator kernel coefficients: the
// u-Taylor expansion of the closed form, assembled symbolically factor by
// factor. Shares no code with mehler_eval (pointwise matrix functions) or
// formal_coeffs (transport recursion); the suites compare the routes at the
// coefficient level.

#include <vector>

#include "mehler.hpp"
#include "series.hpp"

namespace cmt {

// u-polynomial with PolyMat coefficients
template <class C>
using USeries = std::vector<PolyMat<C>>;

template <class C>
USeries<C> useries_zero(int k_max, int m, int vars) {
    return USeries<C>(k_max + 1, PolyMat<C>(m, vars));
}

template <class C>
USeries<C> useries_mul(const USeries<C>& a, const USeries<C>& b, int k_max, int deg_cap) {
    int m = a[0].dim(), vars = a[0].vars();
    USeries<C> r = useries_zero<C>(k_max, m, vars);
    for (int i = 0; i <= k_max; ++i)
        for (int j = 0; i + j <= k_max && j < int(b.size()); ++j) {
            if (i >= int(a.size())) continue;
            PolyMat<C> prod = a[i] * b[j];
            // degree cap: drop monomials beyond deg_cap (they cannot affect
            // the compared coefficients)
            PolyMat<C> capped(m, vars);
            for (int d = 0; d <= deg_cap; ++d) capped += prod.degree_component(d);
            r[i + j] += capped;
        }
    return r;
}

// exp of a u-series whose u^0 part has zero degree-0 term (or is plainly
// nilpotent); truncates at u-order k_max and x-degree deg_cap.
template <class C>
USeries<C> useries_exp(const USeries<C>& ex, int k_max, int deg_cap, const C& one) {
    int m = ex[0].dim(), vars = ex[0].vars();
    USeries<C> acc = useries_zero<C>(k_max, m, vars);
    for (int a = 0; a < m; ++a) acc[0](a, a) = Poly<C>(vars, one);
    USeries<C> power = acc; // identity
    // bound the number of terms: each multiplication raises u-order or degree
    int max_terms = (k_max + 1) * (deg_cap + 2);
    double fact = 1;
    for (int k = 1; k <= max_terms; ++k) {
        power = useries_mul(power, ex, k_max, deg_cap);
        fact /= k;
        bool nonzero = false;
        for (int i = 0; i <= k_max; ++i) {
            PolyMat<C> scaled = power[i].scaled(fact);
            if (!scaled.is_zero()) nonzero = true;
            acc[i] += scaled;
        }
        if (!nonzero) break;
    }
    return acc;
}

// Closed-form expansion: coefficients Phi_k of q_u^{-1} p_u as polynomials.
template <class C>
USeries<C> closed_form_u_expansion(const MehlerParams<C>& pr, int k_max, int deg_cap,
                                 const C& zero, const C& one) {
    int n = pr.n, m = pr.m();
    // C and D parts
    std::vector<std::vector<C>> Cm(n, std::vector<C>(n, zero)), Dm = Cm;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Cm[i][j] = coeff_scale(pr.B[i][j] + pr.B[j][i], 0.5);
            Dm[i][j] = coeff_scale(pr.B[i][j] - pr.B[j][i], 0.5);
        }

    // powers of D (n x n in C), traces
    auto matmul = [&](const std::vector<std::vector<C>>& A, const std::vector<std::vector<C>>& B) {
        std::vector<std::vector<C>> R(n, std::vector<C>(n, zero));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j) R[i][j] += A[i][k] * B[k][j];
        return R;
    };
    std::vector<std::vector<std::vector<C>>> Dpow; // Dpow[k] = D^{k+1}
    Dpow.push_back(Dm);
    for (int k = 1; k <= k_max + 1; ++k) Dpow.push_back(matmul(Dpow.back(), Dm));

    // 1. A-hat factor: exp((1/2) sum_j la_j u^j tr(D^j)) as scalar u-series
    Series<cdouble> ag = series_ahat<cdouble>(k_max + 2);
    Series<cdouble> u_ag = ag;
    u_ag.c[0] = 0;
    Series<cdouble> la = series_log1p(u_ag);
    USeries<C> ahat_exponent = useries_zero<C>(k_max, m, n);
    for (int j = 2; j <= k_max; ++j) {
        if (la.c[j] == cdouble(0)) continue;
        C tr = zero;
        for (int i = 0; i < n; ++i) tr += Dpow[j - 1][i][i];
        C val = coeff_scale(tr, 0.5 * la.c[j].real());
        for (int a = 0; a < m; ++a) ahat_exponent[j](a, a) += Poly<C>(n, val);
    }
    USeries<C> ahat = useries_exp(ahat_exponent, k_max, deg_cap, one);

    // 2. symmetric factor exp(-(1/8) x^T C x), u-independent
    USeries<C> csym_exponent = useries_zero<C>(k_max, m, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (coeff_is_zero(Cm[i][j])) continue;
            std::vector<int> e(n, 0);
            e[i] += 1;
            e[j] += 1;
            Poly<C> t(n);
            t.add_term(Poly<C>::key(e), coeff_scale(Cm[i][j], -0.125));
            for (int a = 0; a < m; ++a) csym_exponent[0](a, a) += t;
        }
    USeries<C> csym = useries_exp(csym_exponent, k_max, deg_cap, one);

    // 3. Gaussian correction exp(-(1/4u)[(uD/2)coth(uD/2) - 1]x x)
    //    = exp(sum_{k>=1} -(1/4) cth_{2k} u^{2k-1} x^T D^{2k} x)
    Series<cdouble> cth = series_coth_half<cdouble>(k_max + 2);
    USeries<C> gcorr_exponent = useries_zero<C>(k_max, m, n);
    for (int k = 1; 2 * k - 1 <= k_max; ++k) {
        double coef = -0.25 * cth.c[2 * k].real();
        if (coef == 0) continue;
        const auto& D2k = Dpow[2 * k - 1]; // D^{2k}
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (coeff_is_zero(D2k[i][j])) continue;
                std::vector<int> e(n, 0);
                e[i] += 1;
                e[j] += 1;
                Poly<C> t(n);
                t.add_term(Poly<C>::key(e), coeff_scale(D2k[i][j], coef));
                for (int a = 0; a < m; ++a) gcorr_exponent[2 * k - 1](a, a) += t;
            }
    }
    USeries<C> gcorr = useries_exp(gcorr_exponent, k_max, deg_cap, one);

    // 4. exp(-uL) a0
    USeries<C> lfac = useries_zero<C>(k_max, m, n);
    std::vector<std::vector<C>> Lpow(m, std::vector<C>(m, zero));
    for (int a = 0; a < m; ++a) Lpow[a][a] = one;
    double fact = 1;
    for (int k = 0; k <= k_max; ++k) {
        if (k > 0) {
            std::vector<std::vector<C>> next(m, std::vector<C>(m, zero));
            for (int a = 0; a < m; ++a)
                for (int c = 0; c < m; ++c)
                    for (int b = 0; b < m; ++b) next[a][b] += Lpow[a][c] * pr.L[c][b];
            Lpow = next;
            fact /= k;
        }
        double sgn = (k & 1) ? -1.0 : 1.0;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                C v = coeff_scale(Lpow[a][b], sgn * fact);
                if (!coeff_is_zero(v)) lfac[k](a, b) += Poly<C>(n, v);
            }
    }
    // right-multiply by a0
    USeries<C> lfac_a0 = useries_zero<C>(k_max, m, n);
    for (int k = 0; k <= k_max; ++k)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                Poly<C> s(n);
                for (int c = 0; c < m; ++c) {
                    if (coeff_is_zero(pr.a0[c][b])) continue;
                    s += pr.a0[c][b] * lfac[k](a, c);
                }
                lfac_a0[k](a, b) = s;
            }

    USeries<C> out = useries_mul(ahat, csym, k_max, deg_cap);
    out = useries_mul(out, gcorr, k_max, deg_cap);
    out = useries_mul(out, lfac_a0, k_max, deg_cap);
    return out;
}

} // namespace cmt

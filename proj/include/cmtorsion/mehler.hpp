#pragma once

// Generalized harmonic oscillator H = -sum_i (d_i + (1/4) B_ij x_j)^2 + L
// and its closed-form heat kernel
//   p_u(x) = (4 pi u)^{-n/2} Ahat(uD) exp(-(1/8) x^T C x)
//            exp(-(1/4u) x^T [(uD/2) coth(uD/2)] x) exp(-uL) a0,
// C and D the symmetric/antisymmetric parts of B. The sign on the x^T C x
// factor is the one that actually solves (d_u + H) p = 0; it matters only
// when B has a symmetric part, which the geometric applications never
// produce. Two back ends: spectral calculus for numeric antisymmetric D,
// terminating power series for nilpotent form-valued entries.
//
// formal_coeffs solves the transport recursion obtained by inserting
// q_u(x) sum_k u^k Phi_k(x) into the heat equation:
//   (k + x.grad + (1/4) x^T C x) Phi_k = -H Phi_{k-1},   Phi_0(0) = a0.

#include <vector>

#include "chern_weil.hpp"
#include "form_matrix.hpp"
#include "matrix.hpp"
#include "poly.hpp"

namespace cmt {

template <class C>
struct MehlerParams {
    int n = 1;                          // space dimension
    std::vector<std::vector<C>> B;      // n x n
    std::vector<std::vector<C>> L;      // m x m
    std::vector<std::vector<C>> a0;     // m x m
    GeneratorSpace space;               // meaningful for form-valued C only

    int m() const { return int(L.size()); }
};

using MehlerNumeric = MehlerParams<cdouble>;
using MehlerForm = MehlerParams<Multivector<cdouble>>;

template <class C>
std::vector<std::vector<C>> zero_block(int r, int c_, const C& zero) {
    return std::vector<std::vector<C>>(r, std::vector<C>(c_, zero));
}

// ---------------------------------------------------------------------------
// Numeric back end

namespace detail {

inline CMat to_cmat(const std::vector<std::vector<cdouble>>& a) {
    int r = int(a.size()), c = r ? int(a[0].size()) : 0;
    CMat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = a[i][j];
    return m;
}

// sinc-like guards: value at theta -> 0 is 1
inline double half_cot_half(double z) { // (z/2) cot(z/2)
    if (std::abs(z) < 1e-8) return 1.0 - z * z / 12.0;
    return 0.5 * z / std::tan(0.5 * z);
}
inline double half_over_sin_half(double z) { // (z/2)/sin(z/2)
    if (std::abs(z) < 1e-8) return 1.0 + z * z / 24.0;
    return 0.5 * z / std::sin(0.5 * z);
}

} // namespace detail

struct KernelValueNumeric {
    CMat value;
    double u;
    std::vector<double> x;
};

// Closed-form evaluation, numeric entries. D must be real antisymmetric.
inline KernelValueNumeric mehler_eval(double u, const std::vector<double>& x,
                                      const MehlerNumeric& params) {
    if (!(u > 0)) throw std::domain_error("mehler_eval: u must be positive");
    int n = params.n;
    CMat B = detail::to_cmat(params.B);
    CMat Bt = B.transpose();
    CMat Cm = 0.5 * (B + Bt);
    CMat Dm = 0.5 * (B - Bt);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(Dm(i, j).imag()) > 1e-14)
                throw std::domain_error("mehler_eval: numeric D must be real antisymmetric");

    // S = -D^2 is symmetric PSD; eigenpairs give theta_j^2
    CMat S = cdouble(-1) * (Dm * Dm);
    CMat V(n, n);
    std::vector<double> s = hermitian_eigen(S, &V);

    // Ahat(uD) = prod_j [(u theta_j/2)/sin(u theta_j/2)]^{1/2} over all
    // eigenvalues of S (each +-i theta pair contributes the value once).
    double ahat = 1.0;
    for (int j = 0; j < n; ++j) {
        double th = std::sqrt(std::max(0.0, s[j]));
        ahat *= std::sqrt(detail::half_over_sin_half(u * th));
    }

    // G = (uD/2) coth(uD/2) = V diag((u theta/2) cot(u theta/2)) V^*
    CMat G(n, n);
    for (int j = 0; j < n; ++j) {
        double th = std::sqrt(std::max(0.0, s[j]));
        double f = detail::half_cot_half(u * th);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) G(a, b) += f * V(a, j) * std::conj(V(b, j));
    }

    double xGx = 0, xCx = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            xGx += (G(a, b) * x[a] * x[b]).real();
            xCx += (Cm(a, b) * x[a] * x[b]).real();
        }

    double gauss = std::pow(4.0 * M_PI * u, -0.5 * n) * std::exp(-xGx / (4.0 * u));
    double csym = std::exp(-0.125 * xCx);

    CMat fiber = expm(cdouble(-u) * detail::to_cmat(params.L)) * detail::to_cmat(params.a0);
    KernelValueNumeric out{cdouble(gauss * ahat * csym) * fiber, u, x};
    return out;
}

// ---------------------------------------------------------------------------
// Form-valued back end (nilpotent even entries; terminating series)

struct KernelValueForm {
    FormMatrix<cdouble> value;
    double u;
    std::vector<double> x;
};

inline KernelValueForm mehler_eval_form(double u, const std::vector<double>& x,
                                        const MehlerForm& params) {
    if (!(u > 0)) throw std::domain_error("mehler_eval_form: u must be positive");
    int n = params.n, m = params.m();
    GeneratorSpace sp = params.space;
    using MV = Multivector<cdouble>;

    FormMatrix<cdouble> B(sp, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = params.B[i][j];
    FormMatrix<cdouble> Cm(sp, n), Dm(sp, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Cm(i, j) = ring_traits<cdouble>::inv_int(2) * (B(i, j) + B(j, i));
            Dm(i, j) = ring_traits<cdouble>::inv_int(2) * (B(i, j) - B(j, i));
        }

    FormMatrix<cdouble> uD = cdouble(u) * Dm;
    MV ahat = a_hat(uD);

    int K = 2 * sp.n_frame + sp.q_cap + 4;
    FormMatrix<cdouble> G = mat_series(series_coth_half<cdouble>(K), uD);

    // -(1/4u) x^T G x splits off the plain Gaussian through G's unit scalar
    // part; the rest is a nilpotent exponent.
    double x2 = 0;
    MV nil_expo(sp);
    for (int a = 0; a < n; ++a) {
        x2 += x[a] * x[a];
        for (int b = 0; b < n; ++b) {
            MV gab = G(a, b);
            if (a == b) gab = gab - MV(sp, ring_traits<cdouble>::one());
            nil_expo += cdouble(-x[a] * x[b] / (4.0 * u)) * gab;
        }
    }
    MV csym_expo(sp);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) csym_expo += cdouble(-0.125 * x[a] * x[b]) * Cm(a, b);

    double gauss = std::pow(4.0 * M_PI * u, -0.5 * n) * std::exp(-x2 / (4.0 * u));
    MV scalar_factor = cdouble(gauss) * (ahat * mv_exp(nil_expo) * mv_exp(csym_expo));

    FormMatrix<cdouble> L(sp, m), A0(sp, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            L(i, j) = params.L[i][j];
            A0(i, j) = params.a0[i][j];
        }
    FormMatrix<cdouble> fiber = mat_exp(cdouble(-u) * L) * A0;
    return KernelValueForm{scalar_factor * fiber, u, x};
}

// ---------------------------------------------------------------------------
// PDE residual by central differences: returns ||(d_u + H) p||_max, which is
// O(h^2) for the exact kernel.

inline double heat_residual(double u, const std::vector<double>& x, const MehlerNumeric& params,
                            double h) {
    if (!(u > h && h > 0)) throw std::domain_error("heat_residual: need u > h > 0");
    int n = params.n;
    auto eval = [&](double uu, const std::vector<double>& xx) {
        return mehler_eval(uu, xx, params).value;
    };
    CMat p0 = eval(u, x);
    CMat du = (1.0 / (2 * h)) * (eval(u + h, x) - eval(u - h, x));

    CMat B = detail::to_cmat(params.B);
    std::vector<double> Bx(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Bx[i] += (B(i, j)).real() * x[j];
    double bx2 = 0, trB = 0;
    for (int i = 0; i < n; ++i) { bx2 += Bx[i] * Bx[i]; trB += B(i, i).real(); }

    CMat lap(p0.rows(), p0.cols()), grad_term(p0.rows(), p0.cols());
    for (int i = 0; i < n; ++i) {
        std::vector<double> xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        CMat pp = eval(u, xp), pm = eval(u, xm);
        lap += (1.0 / (h * h)) * (pp - 2.0 * p0 + pm);
        grad_term += (Bx[i] / (2.0 * (2 * h))) * (pp - pm); // (1/2)(Bx)_i d_i p
    }
    CMat Hp = cdouble(-1) * lap - grad_term -
              cdouble(0.25 * trB + bx2 / 16.0) * p0 +
              detail::to_cmat(params.L) * p0;
    return (du + Hp).max_abs();
}

// ---------------------------------------------------------------------------
// Transport recursion for the formal solution coefficients Phi_k(x).
// Generic over the coefficient ring C (numbers or nilpotent multivectors).

template <class C>
struct TransportProblem {
    int n = 1;
    std::vector<std::vector<C>> B, L, a0;
    C zero, one;
    int degree_cap = 24;
};

template <class C>
PolyMat<C> apply_oscillator(const TransportProblem<C>& pr, const PolyMat<C>& f) {
    int n = pr.n, m = f.dim();
    PolyMat<C> out(m, n);
    // -(d_i + (1/4)(Bx)_i)^2 summed over i
    for (int i = 0; i < n; ++i) {
        auto once = [&](const PolyMat<C>& g) {
            PolyMat<C> r = g.derivative(i);
            for (int j = 0; j < n; ++j) {
                if (coeff_is_zero(pr.B[i][j])) continue;
                PolyMat<C> xg(m, n);
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b) xg(a, b) = (pr.B[i][j] * g(a, b).mul_x(j)).scaled(0.25);
                r += xg;
            }
            return r;
        };
        out -= once(once(f));
    }
    // + L f
    PolyMat<C> lf(m, n);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            Poly<C> s(n);
            for (int k = 0; k < m; ++k) {
                if (coeff_is_zero(pr.L[a][k])) continue;
                s += pr.L[a][k] * f(k, b);
            }
            lf(a, b) = s;
        }
    out += lf;
    return out;
}

// Solve (k + x.grad + (1/4) x^T C x) Phi_k = rhs degree by degree.
template <class C>
PolyMat<C> solve_transport_level(const TransportProblem<C>& pr, int k, const PolyMat<C>& rhs,
                                 const Poly<C>& xCx_quarter) {
    int m = int(pr.L.size()), n = pr.n;
    PolyMat<C> phi(m, n);
    for (int d = 0; d <= pr.degree_cap; ++d) {
        if (k == 0 && d == 0) continue; // seeded by caller
        PolyMat<C> num = (-rhs).degree_component(d);
        // subtract (1/4) x^T C x * phi^{(d-2)}
        if (d >= 2) {
            PolyMat<C> low = phi.degree_component(d - 2);
            PolyMat<C> mix(m, n);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) mix(a, b) = xCx_quarter * low(a, b);
            num -= mix;
        }
        if (k + d == 0) continue;
        PolyMat<C> comp = num.scaled(1.0 / double(k + d));
        phi += comp;
    }
    return phi;
}

template <class C>
std::vector<PolyMat<C>> formal_coeffs(const TransportProblem<C>& pr, int k_max) {
    int n = pr.n, m = int(pr.L.size());
    // (1/4) x^T C x as a polynomial
    Poly<C> xCx_quarter(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            C cij = pr.B[i][j] + pr.B[j][i]; // 2 C_ij
            if (coeff_is_zero(cij)) continue;
            std::vector<int> e(n, 0);
            e[i] += 1;
            e[j] += 1;
            Poly<C> t(n);
            t.add_term(Poly<C>::key(e), cij);
            xCx_quarter += t.scaled(0.125); // (1/4) * C_ij = (1/8) * (2C_ij)
        }

    std::vector<PolyMat<C>> phis;
    // Phi_0: seeded with a0 at degree 0, then homogeneous transport
    PolyMat<C> phi0(m, n);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) phi0(a, b) = Poly<C>(n, pr.a0[a][b]);
    for (int d = 2; d <= pr.degree_cap; d += 2) {
        PolyMat<C> low = phi0.degree_component(d - 2);
        PolyMat<C> mix(m, n);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) mix(a, b) = xCx_quarter * low(a, b);
        if (mix.is_zero()) break;
        phi0 += mix.scaled(-1.0 / double(d));
    }
    phis.push_back(phi0);

    for (int k = 1; k <= k_max; ++k) {
        PolyMat<C> rhs = apply_oscillator(pr, phis.back());
        phis.push_back(solve_transport_level(pr, k, rhs, xCx_quarter));
    }
    return phis;
}

} // namespace cmt

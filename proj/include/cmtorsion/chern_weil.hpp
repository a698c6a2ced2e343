#pragma once

// Characteristic forms by functional calculus on matrices of nilpotent even
// forms: td, sigma_p, td_p, ch, A-hat, the dual-parameter derivative
// d/db|_0 td_p(R + bU), and the transgression integral over a metric family.
// Everything reduces to exactly terminating series plus quadrature in the
// family parameter.

#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include "dual.hpp"
#include "form_matrix.hpp"
#include "matrix.hpp"

namespace cmt {

// Exponential of a multivector: numeric exponential of the scalar part
// times the terminating series on the nilpotent remainder.
template <class R>
Multivector<R> mv_exp(const Multivector<R>& v, int max_order = 0) {
    const GeneratorSpace& sp = v.space();
    int K = max_order > 0 ? max_order : sp.n_frame + sp.q_cap + 2;
    R c = v.scalar_part();
    Multivector<R> nil = v - Multivector<R>(sp, c);
    Multivector<R> acc(sp, ring_traits<R>::one());
    Multivector<R> p = acc;
    bool done = false;
    for (int k = 1; k <= K; ++k) {
        p = ring_traits<R>::inv_int(k) * (p * nil); // nil^k / k!
        if (p.is_zero()) { done = true; break; }
        acc += p;
    }
    if (!done && !(p * nil).is_zero())
        throw std::domain_error("mv_exp: element not nilpotent within order bound");
    if (!ring_traits<R>::is_zero(c)) acc = ring_traits<R>::exp_scalar(c) * acc;
    return acc;
}

// td(M) = det(M/(e^M - 1)) computed as exp(tr log(M/(e^M - 1))).
template <class R>
Multivector<R> todd(const FormMatrix<R>& M, int order_hint = 0) {
    int K = order_hint > 0 ? order_hint : 2 * M.space().n_frame + M.space().q_cap + 4;
    Series<R> tg = series_todd<R>(K);
    Series<R> u = tg;
    u.c[0] = ring_traits<R>::zero(); // tg - 1
    Series<R> lt = series_log1p(u);  // log(x/(e^x-1)) as a series in x
    return mv_exp(mat_series(lt, M).trace());
}

// A-hat(M) = det^{1/2}((M/2)/sinh(M/2)) = exp((1/2) tr log(...)).
template <class R>
Multivector<R> a_hat(const FormMatrix<R>& M, int order_hint = 0) {
    int K = order_hint > 0 ? order_hint : 2 * M.space().n_frame + M.space().q_cap + 4;
    Series<R> ag = series_ahat<R>(K);
    Series<R> u = ag;
    u.c[0] = ring_traits<R>::zero();
    Series<R> la = series_log1p(u);
    return mv_exp(ring_traits<R>::inv_int(2) * mat_series(la, M).trace());
}

// Coefficient of t^p in det(I + tM).
template <class R>
Multivector<R> sigma_p(int p, const FormMatrix<R>& M) {
    if (p < 0 || p > M.dim()) throw std::out_of_range("sigma_p: p out of range");
    return elementary_symmetric_all(M)[p];
}

// td_p(M) = td(M) sigma_p(exp M).
template <class R>
Multivector<R> td_p(int p, const FormMatrix<R>& M) {
    return todd(M) * sigma_p(p, mat_exp(M));
}

// ch(E, nabla^E) = tr exp(-R^E / 2 pi i); degree-0 part is rank(E).
inline Multivector<cdouble> chern_char(const FormMatrix<cdouble>& r_e) {
    cdouble scale = cdouble(0, 1) / (2.0 * M_PI); // -1/(2 pi i)
    return mat_exp(scale * r_e).trace();
}

// ---------------------------------------------------------------------------
// Dual-parameter derivative d/db|_{b=0} td_p(R + bU), exact via b^2 = 0.

template <class R>
FormMatrix<Dual<R>> dual_pair(const FormMatrix<R>& value, const FormMatrix<R>& slope) {
    FormMatrix<Dual<R>> out(value.space(), value.dim());
    for (int i = 0; i < value.dim(); ++i)
        for (int j = 0; j < value.dim(); ++j) {
            Multivector<Dual<R>> m(value.space());
            for (const auto& [mask, c] : value(i, j).terms())
                m.add_term(mask, Dual<R>(c, R(0)));
            for (const auto& [mask, c] : slope(i, j).terms())
                m.add_term(mask, Dual<R>(R(0), c));
            out(i, j) = m;
        }
    return out;
}

template <class R>
Multivector<R> dual_derivative_part(const Multivector<Dual<R>>& m, GeneratorSpace sp) {
    Multivector<R> out(sp);
    for (const auto& [mask, c] : m.terms()) out.add_term(mask, c.der);
    return out;
}

inline Multivector<cdouble> td_p_b_derivative(int p, const FormMatrix<cdouble>& R_mat,
                                              const FormMatrix<cdouble>& U_mat) {
    auto M = dual_pair(R_mat, U_mat);
    return dual_derivative_part(td_p(p, M), R_mat.space());
}

// ---------------------------------------------------------------------------
// Trace identity: tr over Lambda^p(C^n) of exp(X), X = sum A_ji w^i ^ i_{w_j},
// versus sigma_p(exp A). Returns both sides.

namespace detail {
// basis of p-subsets of {0..n-1} in lexicographic order
inline std::vector<uint32_t> subsets_of_size(int n, int p) {
    std::vector<uint32_t> out;
    for (uint32_t m = 0; m < (1u << n); ++m)
        if (std::popcount(m) == p) out.push_back(m);
    return out;
}
inline int wedge_replace_sign(uint32_t mask, int out_g, int in_g, uint32_t& result) {
    // i_{w_j} then w^i ^ .  on the monomial 'mask'; returns 0 sign if it dies
    if (!(mask & (1u << out_g))) return 0;
    uint32_t t = mask & ~(1u << out_g);
    int s1 = std::popcount(t & ((1u << out_g) - 1)); // sign from contraction
    if (t & (1u << in_g)) return 0;
    int s2 = std::popcount(t & ((1u << in_g) - 1)); // sign from exterior mult
    result = t | (1u << in_g);
    return ((s1 + s2) & 1) ? -1 : 1;
}
} // namespace detail

struct TracePair {
    cdouble lhs, rhs;
};

inline TracePair sigma_p_trace_identity_check(int p, const CMat& A) {
    int n = A.rows();
    auto basis = detail::subsets_of_size(n, p);
    int d = int(basis.size());
    std::vector<int> where(1u << n, -1);
    for (int k = 0; k < d; ++k) where[basis[k]] = k;
    CMat X(d, d);
    for (int k = 0; k < d; ++k) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                uint32_t res;
                int s = detail::wedge_replace_sign(basis[k], j, i, res);
                if (s == 0) continue;
                // coefficient <A w_i, wbar_j> = A_{ji}
                X(where[res], k) += double(s) * A(j, i);
            }
    }
    TracePair out;
    out.lhs = expm(X).trace();
    out.rhs = elementary_symmetric(expm(A), p);
    return out;
}

// ---------------------------------------------------------------------------
// Curvature data for a one-parameter family of metrics, sampled per ell.

struct CurvatureData {
    FormMatrix<cdouble> r_plus; // n x n, 2-form entries
    FormMatrix<cdouble> r_e;    // rank x rank, 2-form entries
    FormMatrix<cdouble> u_plus; // n x n, 0-form entries
    CMat theta_dot;             // 2n x 2n real antisymmetric, 0-forms
};

// Gauss-Legendre nodes/weights on [0,1].
inline void gauss_legendre_01(int k, std::vector<double>& x, std::vector<double>& w) {
    x.assign(k, 0.0);
    w.assign(k, 0.0);
    for (int i = 0; i < (k + 1) / 2; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (k + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            // Legendre P_k(t) and derivative by recurrence
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= k; ++j) {
                double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = k * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = 0.5 * (1.0 - t);
        x[k - 1 - i] = 0.5 * (1.0 + t);
        double ww = 1.0 / ((1.0 - t * t) * dp * dp);
        w[i] = ww;
        w[k - 1 - i] = ww;
    }
}

struct QuadratureError : std::runtime_error {
    double achieved;
    QuadratureError(const std::string& what, double delta)
        : std::runtime_error(what), achieved(delta) {}
};

struct QuadratureSpec {
    double tol = 1e-10;
    int init_nodes = 8;
    int max_doublings = 8;
};

// Transgression form for a family ell -> (R+_ell, U+_ell) with fixed E-factor:
//   (2 pi i)^{-n} Int_0^1 d/db|_0 td_p(R+_ell + b U+_ell) d ell * tr[exp(-R^E)].
// Node count doubles until two successive quadratures agree to spec.tol.
inline Multivector<cdouble> transgression_form(
    const std::function<CurvatureData(double)>& family, int p, const QuadratureSpec& spec = {}) {
    CurvatureData at0 = family(0.0);
    GeneratorSpace sp = at0.r_plus.space();
    int n = at0.r_plus.dim();

    auto integral_with = [&](int nodes) {
        std::vector<double> x, w;
        gauss_legendre_01(nodes, x, w);
        Multivector<cdouble> acc(sp);
        for (int i = 0; i < nodes; ++i) {
            CurvatureData cd = family(x[i]);
            acc += cdouble(w[i]) * td_p_b_derivative(p, cd.r_plus, cd.u_plus);
        }
        return acc;
    };

    int nodes = spec.init_nodes;
    Multivector<cdouble> prev = integral_with(nodes);
    double delta = 1e300;
    for (int d = 0; d < spec.max_doublings; ++d) {
        nodes *= 2;
        Multivector<cdouble> cur = integral_with(nodes);
        delta = (cur - prev).sup_norm();
        prev = cur;
        if (delta < spec.tol) {
            Multivector<cdouble> efac = mat_exp(-at0.r_e).trace();
            cdouble pref = 1; // (2 pi i)^{-n}
            for (int k = 0; k < n; ++k) pref *= cdouble(0, -1.0 / (2.0 * M_PI));
            return pref * (prev * efac);
        }
    }
    throw QuadratureError("transgression_form: quadrature did not reach tolerance; delta=" +
                              std::to_string(delta),
                          delta);
}

// Integral of a constant-coefficient form over a flat model: top-degree
// frame coefficient times the volume.
inline cdouble integrate_top(const Multivector<cdouble>& form, double volume) {
    const GeneratorSpace& sp = form.space();
    return form.coeff(sp.frame_mask()) * volume;
}

} // namespace cmt

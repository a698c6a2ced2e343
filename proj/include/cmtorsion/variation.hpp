#pragma once

// Metric-variation machinery on the torus models. For a Kahler family with
// variation form thetadot, the Hodge-star logarithmic derivative splits as
//   Q1 = (i/4) thetadot(e_i,e_j) c(e_i) c(e_j) + (1/4) thetadot(e_i, J e_i)
//   Q2 = i thetadot(w_j, wbar_i) w^j ^ i_{w_i}
// acting fiberwise; on the flat torus the heat operator is diagonal in the
// Fourier basis and mode-independent on the fiber, so graded traces factor
// into a fiber supertrace times scalar heat sums. The variation trace uses
// the e^{-t box} clock (= e^{-t D^2/2}).

#include <functional>

#include "chern_weil.hpp"
#include "clifford_rep.hpp"
#include "torus.hpp"
#include "zeta.hpp"

namespace cmt {

// Scaling family g_ell = e^ell g: thetadot equals the Kahler form, i.e.
// block-diagonal [[0,1],[-1,0]] in the orthonormal frame.
inline CMat scaling_theta_dot(int n) {
    CMat m(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        m(2 * j, 2 * j + 1) = 1.0;
        m(2 * j + 1, 2 * j) = -1.0;
    }
    return m;
}

inline CMat q1_fiber(int n, const CMat& theta_dot) {
    int d = 1 << n;
    CMat out(d, d);
    for (int i = 1; i <= 2 * n; ++i)
        for (int j = 1; j <= 2 * n; ++j) {
            cdouble th = theta_dot(i - 1, j - 1);
            if (th == cdouble(0)) continue;
            out += (cdouble(0, 0.25) * th) * (clifford_matrix(n, i) * clifford_matrix(n, j));
        }
    // (1/4) thetadot(e_i, J e_i) = (1/2) sum_j thetadot(e_{2j-1}, e_{2j})
    cdouble s = 0;
    for (int j = 0; j < n; ++j) s += theta_dot(2 * j, 2 * j + 1);
    out += (0.5 * s) * CMat::identity(d);
    return out;
}

// thetadot(w_j, wbar_i) from the real frame matrix:
//   (1/2)[ th(2j-1,2i-1) + i th(2j-1,2i) - i th(2j,2i-1) + th(2j,2i) ]
inline CMat q2_coefficients(int n, const CMat& theta_dot) {
    CMat c(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            cdouble v = 0.5 * (theta_dot(2 * j, 2 * i) +
                               cdouble(0, 1) * theta_dot(2 * j, 2 * i + 1) -
                               cdouble(0, 1) * theta_dot(2 * j + 1, 2 * i) +
                               theta_dot(2 * j + 1, 2 * i + 1));
            c(j, i) = v;
        }
    return c;
}

// Q2 on the Lambda^p(C^n) factor: i * sum c_{ji} w^j ^ i_{w_i}.
inline CMat q2_fiber(int n, int p, const CMat& theta_dot) {
    CMat coef = q2_coefficients(n, theta_dot);
    auto basis = detail::subsets_of_size(n, p);
    int d = int(basis.size());
    std::vector<int> where(1u << n, -1);
    for (int k = 0; k < d; ++k) where[basis[k]] = k;
    CMat out(d, d);
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                uint32_t res;
                int s = detail::wedge_replace_sign(basis[k], i, j, res); // i_{w_i} then w^j
                if (s == 0) continue;
                out(where[res], k) += cdouble(0, 1) * coef(j, i) * double(s);
            }
    return out;
}

struct VariationParts {
    cdouble q1_part; // tr_s[Q1 e^{-t box}]
    cdouble q2_part; // tr_s[Q2 e^{-t box}]
    cdouble total() const { return q1_part + q2_part; }
};

// Graded fiber traces factor off the scalar heat sum: a fiber operator
// X x Id contributes str(X) * C(n,p) * prod T_i and Id x Y contributes
// str(Id_{2^n}) * tr(Y) * prod T_i.
inline VariationParts variation_trace_parts(const TorusConfig& config, const CMat& theta_dot,
                                            double t, bool theta_route = true) {
    config.validate();
    int n = config.n();
    cdouble T = product_function_trace(config, t, theta_route && config.unitary());

    CMat q1 = q1_fiber(n, theta_dot);
    cdouble str_q1 = graded_trace(n, q1);
    cdouble str_id = graded_trace(n, CMat::identity(1 << n));
    CMat q2 = q2_fiber(n, config.p, theta_dot);

    VariationParts out;
    out.q1_part = str_q1 * double(binom(n, config.p)) * T;
    out.q2_part = str_id * q2.trace() * T;
    return out;
}

inline cdouble variation_trace(const TorusConfig& config, const CMat& theta_dot, double t,
                               bool theta_route = true) {
    return variation_trace_parts(config, theta_dot, t, theta_route).total();
}

// ---------------------------------------------------------------------------
// Dirac operator on a Fourier mode: D = sum_k c(e_k) (2 pi i kappa_k) with
// kappa the frame components of the mode covector. Returns the 2^n matrix.

struct FourierMode {
    std::vector<long> a, b; // per factor
};

inline CMat dirac_matrix(const TorusConfig& config, const FourierMode& mode) {
    int n = config.n();
    int d = 1 << n;
    CMat D(d, d);
    for (int j = 0; j < n; ++j) {
        const TorusFactor& f = config.factors[j];
        cdouble u = f.alpha + cdouble(double(mode.a[j]));
        cdouble v = (f.beta + cdouble(double(mode.b[j])) - u * f.tau.real()) / f.tau.imag();
        double s = std::sqrt(f.scale);
        D += (cdouble(0, 2 * M_PI) * u / s) * clifford_matrix(n, 2 * j + 1);
        D += (cdouble(0, 2 * M_PI) * v / s) * clifford_matrix(n, 2 * j + 2);
    }
    return D;
}

inline cdouble box_eigenvalue(const TorusConfig& config, const FourierMode& mode) {
    cdouble mu = 0;
    for (int j = 0; j < config.n(); ++j) mu += config.factors[j].eigenvalue(mode.a[j], mode.b[j]);
    return mu;
}

// ---------------------------------------------------------------------------
// Laurent fit of variation-trace samples: sum_{j=-n}^{k} M_j t^j.

struct M0Fit {
    std::vector<cdouble> coeffs; // M_{-n}..M_k
    cdouble m0;
    double cond = 0;
    double residual = 0;
};

inline M0Fit m0_extract(const std::vector<double>& ts, const std::vector<cdouble>& values, int n,
                        int k_max = 2) {
    if (ts.size() != values.size() || ts.size() < size_t(n + k_max + 2))
        throw std::invalid_argument("m0_extract: need more samples than coefficients");
    double tmax = *std::max_element(ts.begin(), ts.end());
    double tmin = *std::min_element(ts.begin(), ts.end());
    if (!(tmin > 0) || tmax / tmin < 9.0)
        throw std::invalid_argument("m0_extract: grid must span at least a decade in (0,1]");
    int cols = n + k_max + 1;
    int rows = int(ts.size());
    CMat A(rows, cols);
    std::vector<cdouble> b(rows);
    for (int r = 0; r < rows; ++r) {
        double u = ts[r] / tmax;
        b[r] = std::pow(ts[r], n) * values[r];
        for (int c = 0; c < cols; ++c) A(r, c) = std::pow(u, c);
    }
    double cond = 0;
    std::vector<cdouble> d = least_squares(A, b, &cond);
    M0Fit fit;
    fit.cond = cond;
    fit.coeffs.resize(cols);
    for (int c = 0; c < cols; ++c) fit.coeffs[c] = d[c] / std::pow(tmax, c);
    fit.m0 = fit.coeffs[n];
    for (int r = 0; r < rows; ++r) {
        cdouble model = 0;
        for (int c = 0; c < cols; ++c) model += fit.coeffs[c] * std::pow(ts[r], c - n);
        fit.residual = std::max(fit.residual, std::abs(model - values[r]));
    }
    return fit;
}

// Variation trace sampled on a grid, fitted, M0 extracted.
inline M0Fit m0_from_variation(const TorusConfig& config, const CMat& theta_dot,
                               const std::vector<double>& ts) {
    std::vector<cdouble> vals;
    vals.reserve(ts.size());
    for (double t : ts) vals.push_back(variation_trace(config, theta_dot, t));
    return m0_extract(ts, vals, config.n());
}

// ---------------------------------------------------------------------------
// Anomaly check for the flat scaling family between two metric scales:
// LHS = log torsion(scale1) - log torsion(scale0); RHS = the transgression
// integral, which vanishes identically for flat families by degree counting
// (the integrand has no 2n-form component when R+ = 0).

struct AnomalyReport {
    cdouble lhs;
    cdouble rhs;
    double tol;
    bool pass;
    ZetaResult at0, at1;
};

inline AnomalyReport anomaly_check(const TorusConfig& base, double scale0, double scale1,
                                   double a_cut, double tol = 1e-6,
                                   const ZetaOptions& opt = {}) {
    if (!(scale0 > 0 && scale1 > 0))
        throw std::invalid_argument("anomaly_check: scales must be positive");
    AnomalyReport rep;
    rep.tol = tol;
    rep.at0 = zeta_torsion(base.rescaled(scale0), a_cut / scale0, opt);
    rep.at1 = zeta_torsion(base.rescaled(scale1), a_cut / scale1, opt);
    rep.lhs = rep.at1.torsion_log - rep.at0.torsion_log;

    // transgression side, computed honestly over the family
    int n = base.n();
    GeneratorSpace sp = GeneratorSpace::frames(2 * n);
    double r0 = std::log(scale0), r1 = std::log(scale1);
    auto family = [&](double ell) {
        CurvatureData cd{FormMatrix<cdouble>(sp, n), FormMatrix<cdouble>(sp, 1),
                         FormMatrix<cdouble>(sp, n), CMat(2 * n, 2 * n)};
        // g_ell = e^{r0 + ell(r1 - r0)} g: U+ = (r1 - r0) Id, R+ = 0
        for (int i = 0; i < n; ++i)
            cd.u_plus(i, i) = Multivector<cdouble>(sp, cdouble(r1 - r0));
        return cd;
    };
    Multivector<cdouble> varpi = transgression_form(family, base.p);
    rep.rhs = integrate_top(varpi, base.volume());
    rep.pass = std::abs(rep.lhs - rep.rhs) < tol;
    return rep;
}

} // namespace cmt

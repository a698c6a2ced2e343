#pragma once

// Zeta-regularized torsion on the flat torus models.
//
// zeta_a(s) = tr_s[N box^{-s} P_a] is evaluated through the Mellin transform
// of theta_a(t) = tr_s[N e^{-t box} P_a], split at delta:
//
//   Gamma(s) zeta_a(s) = Int_0^delta t^{s-1} theta_a dt + J(s),
//   J entire, J(0) = Int_delta^inf theta_a(t)/t dt.
//
// The small-t integrand expands as sum_{j>=-n} c_j t^j; coefficients come
// from a least-squares fit against theta samples on a window below delta
// (the window stays at small t, where lattice wrap-around corrections are
// below 1e-12 relative; see ledger). Term-by-term continuation gives
//
//   zeta_a(0)  = c_0
//   zeta_a'(0) = c_0 (gamma + log delta) + sum_{j != 0} c_j delta^j / j
//                + Int_0^delta (theta_a - fit)/t dt + J(0).
//
// The finite small-spectrum factor below the cut combines with exp(zeta')
// so the total is independent of the admissible cut a.
//
// An independent route for one factor: summing the shifted-lattice Epstein
// series row by row yields the convergent product formula
//   zeta'(0) = -2 pi Im(tau) B2(frac(alpha))
//              + sum_{m>=0} log|1 - e^{-2 pi i beta} Q^{frac(alpha)+m}|^2
//              + sum_{m>=0} log|1 - e^{+2 pi i beta} Q^{1-frac(alpha)+m}|^2,
// Q = e^{2 pi i tau}, B2(x) = x^2 - x + 1/6 (the Kronecker limit formula in
// Siegel-function form). The two routes share no code.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "matrix.hpp"
#include "quad.hpp"
#include "torus.hpp"

namespace cmt {

constexpr double kEulerGamma = 0.5772156649015328606;

struct ZetaOptions {
    // The window sits at small t so lattice wrap-around terms vanish below
    // 1e-12 relative, and the split point delta is small enough that the
    // polynomial order captures e^{-t mu} for every below-cut mode mu
    // (delta * mu_max <~ 0.05 keeps the order-6 remainder near 1e-11).
    double fit_lo = 2e-4;  // fit window in t
    double fit_hi = 2e-3;  // also the Mellin split point delta
    int fit_points = 40;
    int fit_k_max = 5;     // highest fitted power t^k
    double quad_tol = 1e-13;
    double spectral_margin = 1e-9; // reject cuts this close to an eigenvalue
};

struct ZetaResult {
    cdouble zeta0{};
    cdouble zeta0_prime{};
    cdouble log_small_factor{};
    cdouble torsion_log{};
    double err = 0;
    long small_modes = 0;
    bool branch_flagged = false;
    std::vector<cdouble> fit_coeffs; // c_{-n}..c_{k}
};

namespace detail {

// Small-spectrum data below the cut: (mu, graded weight * multiplicity).
struct SmallModes {
    std::vector<std::pair<cdouble, long>> modes; // per q already weighted by (-1)^q q mult
    long count = 0;
};

inline SmallModes small_modes_below(const TorusConfig& config, double a_cut) {
    SmallModes sm;
    int n = config.n();
    SpectrumSlice s0 = spectrum(config, 0, a_cut + 1.0); // function-space values
    for (const auto& [mu, mult_q0] : s0.eigenvalues) {
        if (mu.real() >= a_cut) continue;
        long base = mult_q0 / std::max(1L, binom(n, config.p) * binom(n, 0));
        for (int q = 0; q <= n; ++q) {
            long w = ((q & 1) ? -1L : 1L) * q;
            long mult = base * binom(n, config.p) * binom(n, q);
            if (w != 0) sm.modes.push_back({mu, w * mult});
        }
        sm.count += base * binom(n, config.p) * (1L << n);
    }
    return sm;
}

} // namespace detail

// theta_a(t) = tr_s[N e^{-t box} P_a]
inline cdouble theta_a(const TorusConfig& config, const detail::SmallModes& sm, double t,
                       bool theta_route = true) {
    cdouble full = heat_supertrace_N(config, t, theta_route);
    for (const auto& [mu, w] : sm.modes) full -= double(w) * std::exp(-t * mu);
    return full;
}

inline void check_cut(const TorusConfig& config, double a_cut, double margin) {
    if (!(a_cut > 0)) throw std::invalid_argument("zeta_torsion: cut must be positive");
    SpectrumSlice s0 = spectrum(config, 0, a_cut + 10.0);
    for (const auto& [mu, m] : s0.eigenvalues)
        if (std::abs(mu.real() - a_cut) < margin)
            throw std::invalid_argument("zeta_torsion: cut within margin of an eigenvalue");
}

// Laurent-coefficient fit: theta(t) ~ sum_{j=-n}^{k} c_j t^j on the window.
// Fits t^n theta against powers of u = t/fit_hi in [fit_lo/fit_hi, 1], which
// keeps the Vandermonde well conditioned, then unscales.
inline std::vector<cdouble> fit_small_t(const TorusConfig& config, const detail::SmallModes& sm,
                                        const ZetaOptions& opt) {
    int n = config.n();
    int cols = n + opt.fit_k_max + 1;
    int rows = opt.fit_points;
    CMat A(rows, cols);
    std::vector<cdouble> b(rows);
    for (int r = 0; r < rows; ++r) {
        double t = opt.fit_lo * std::pow(opt.fit_hi / opt.fit_lo, double(r) / (rows - 1));
        double u = t / opt.fit_hi;
        b[r] = std::pow(t, n) * theta_a(config, sm, t);
        for (int c = 0; c < cols; ++c) A(r, c) = std::pow(u, c);
    }
    std::vector<cdouble> d = least_squares(A, b);
    std::vector<cdouble> cj(cols);
    for (int c = 0; c < cols; ++c) cj[c] = d[c] / std::pow(opt.fit_hi, c); // c_{c-n}
    return cj;
}

// Full machinery; works for any admissible cut.
inline ZetaResult zeta_torsion(const TorusConfig& config, double a_cut,
                               const ZetaOptions& opt = {}) {
    config.validate();
    check_cut(config, a_cut, opt.spectral_margin);
    int n = config.n();
    auto sm = detail::small_modes_below(config, a_cut);

    ZetaResult res;
    // branch sanity for non-unitary twists
    if (!config.unitary()) {
        SpectrumSlice s0 = spectrum(config, 0, a_cut + 50.0);
        for (const auto& [mu, m] : s0.eigenvalues) {
            if (mu.real() <= 0 || std::abs(std::arg(mu)) > M_PI - 0.1)
                throw std::domain_error("zeta_torsion: eigenvalue outside principal branch");
        }
        res.branch_flagged = true;
    }

    std::vector<cdouble> c = fit_small_t(config, sm, opt); // c[j+n] = c_j
    res.fit_coeffs = c;
    double delta = opt.fit_hi;

    // zeta(0) = c_0
    res.zeta0 = c[n];

    // sum_{j != 0} c_j delta^j / j
    cdouble sum_j = 0;
    for (int j = -n; j <= opt.fit_k_max; ++j) {
        if (j == 0) continue;
        sum_j += c[j + n] * std::pow(delta, j) / double(j);
    }

    // residual mass of the fit on [fit_lo, delta]
    auto fit_eval = [&](double t) {
        cdouble v = 0;
        for (int j = -n; j <= opt.fit_k_max; ++j) v += c[j + n] * std::pow(t, j);
        return v;
    };
    cdouble eps0 = adaptive_simpson(
        [&](double t) { return (theta_a(config, sm, t) - fit_eval(t)) / t; }, opt.fit_lo, delta,
        opt.quad_tol);

    // J(0) = Int_delta^T theta/t, T from the smallest eigenvalue above the cut
    SpectrumSlice above = spectrum(config, 0, a_cut + 80.0);
    double mu1 = 0;
    for (const auto& [mu, m] : above.eigenvalues)
        if (mu.real() > a_cut) { mu1 = mu.real(); break; }
    if (mu1 == 0) throw std::runtime_error("zeta_torsion: no spectrum above cut in range");
    double Tmax = 46.0 / mu1;
    cdouble J0 = 0;
    if (Tmax > delta)
        J0 = adaptive_simpson([&](double t) { return theta_a(config, sm, t) / t; }, delta,
                              Tmax, opt.quad_tol);

    res.zeta0_prime = res.zeta0 * (kEulerGamma + std::log(delta)) + sum_j + eps0 + J0;

    // finite product below the cut: log Prod_q det(box|_{<a,q})^{(-1)^{q+1} q}
    cdouble logsmall = 0;
    for (const auto& [mu, w] : sm.modes) logsmall -= double(w) * std::log(mu);
    res.log_small_factor = logsmall;
    res.small_modes = sm.count;
    res.torsion_log = res.zeta0_prime + logsmall;

    // error: fit residual + quadrature tolerance (rough, honest scale)
    double resid = 0;
    for (int r = 0; r < 8; ++r) {
        double t = opt.fit_lo * std::pow(delta / opt.fit_lo, r / 7.0);
        resid = std::max(resid, std::abs(theta_a(config, sm, t) - fit_eval(t)));
    }
    res.err = resid * std::log(delta / opt.fit_lo) + 10 * opt.quad_tol;
    return res;
}

// zeta_a(s) at real s (away from poles), same split.
inline cdouble zeta_at(const TorusConfig& config, double a_cut, double s,
                       const ZetaOptions& opt = {}) {
    config.validate();
    int n = config.n();
    auto sm = detail::small_modes_below(config, a_cut);
    std::vector<cdouble> c = fit_small_t(config, sm, opt);
    double delta = opt.fit_hi;

    cdouble small_part = 0;
    for (int j = -n; j <= opt.fit_k_max; ++j) small_part += c[j + n] * std::pow(delta, s + j) / (s + j);
    auto fit_eval = [&](double t) {
        cdouble v = 0;
        for (int j = -n; j <= opt.fit_k_max; ++j) v += c[j + n] * std::pow(t, j);
        return v;
    };
    small_part += adaptive_simpson(
        [&](double t) { return std::pow(t, s - 1) * (theta_a(config, sm, t) - fit_eval(t)); },
        opt.fit_lo, delta, opt.quad_tol);

    SpectrumSlice above = spectrum(config, 0, a_cut + 80.0);
    double mu1 = 0;
    for (const auto& [mu, m] : above.eigenvalues)
        if (mu.real() > a_cut) { mu1 = mu.real(); break; }
    double Tmax = 46.0 / mu1;
    cdouble J = adaptive_simpson(
        [&](double t) { return std::pow(t, s - 1) * theta_a(config, sm, t); }, delta, Tmax,
        opt.quad_tol);
    return (small_part + J) / std::tgamma(s);
}

// ---------------------------------------------------------------------------
// Kronecker-limit route (independent oracle, one factor, unitary twist,
// cut below the whole spectrum).

inline double kronecker_limit_torsion(const TorusFactor& f) {
    if (!f.unitary()) throw std::domain_error("kronecker_limit_torsion: unitary only");
    if (f.trivial_character()) throw std::domain_error("kronecker_limit_torsion: trivial twist");
    double y = f.tau.imag();
    auto frac = [](double v) { return v - std::floor(v); };
    double al = frac(f.alpha.real());
    double be = f.beta.real();
    double b2 = al * al - al + 1.0 / 6.0;

    cdouble Q = std::exp(cdouble(0, 2 * M_PI) * f.tau); // |Q| = e^{-2 pi y} < 1
    auto qpow = [&](double w) { return std::exp(cdouble(0, 2 * M_PI) * f.tau * w); };
    cdouble em = std::exp(cdouble(0, -2 * M_PI * be));
    cdouble ep = std::exp(cdouble(0, 2 * M_PI * be));

    double sum = 0;
    for (int m = 0; m < 200; ++m) {
        double t1 = std::norm(cdouble(1) - em * qpow(al + m));
        double t2 = std::norm(cdouble(1) - ep * qpow(1.0 - al + m));
        double inc = std::log(t1) + std::log(t2);
        sum += inc;
        if (m > 2 && std::abs(inc) < 1e-18) break;
    }
    return -2.0 * M_PI * y * b2 + sum;
}

} // namespace cmt

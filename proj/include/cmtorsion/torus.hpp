#pragma once

// Fully explicit spectral model: flat complex tori C/(Z + tau Z) with metric
// lambda |dz|^2, twisted by a flat character e^{2 pi i (alpha m + beta k)} on
// the lattice vector m + tau k, and products of such factors.
//
// On functions, the Dolbeault Laplacian diagonalizes over the shifted dual
// lattice: with A = alpha + a, B = beta + b (a,b integers),
//   mu_{a,b} = (2 pi^2 / lambda) [ A^2 + ((B - A Re tau)/Im tau)^2 ].
// Flat parallel transport trivializes Lambda(T^{*(0,1)}), so every (p,q)
// spectrum is the function spectrum with multiplicity C(n,p) C(n,q).
// Characters with complex alpha, beta (non-unitary flat twists) use the same
// formula with complex squares, not absolute values.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "matrix.hpp"

namespace cmt {

struct TorusFactor {
    cdouble tau{0.0, 1.0};
    double scale = 1.0;     // lambda
    cdouble alpha{0.5, 0.0};
    cdouble beta{0.0, 0.0};

    bool unitary() const { return alpha.imag() == 0.0 && beta.imag() == 0.0; }
    bool trivial_character() const {
        if (!unitary()) return false;
        auto frac = [](double x) { return x - std::floor(x); };
        return frac(alpha.real()) == 0.0 && frac(beta.real()) == 0.0;
    }
    double volume() const { return scale * tau.imag(); }

    cdouble eigenvalue(long a, long b) const {
        cdouble A = alpha + cdouble(double(a));
        cdouble B = beta + cdouble(double(b));
        cdouble v = (B - A * tau.real()) / tau.imag();
        return (2.0 * M_PI * M_PI / scale) * (A * A + v * v);
    }

    // Function-space heat trace sum_{a,b} e^{-t mu}, eigenvalue route.
    cdouble heat_trace_eigen(double t) const {
        // need Re mu <= 42/t: bound the (a,b) ranges
        double c = 2.0 * M_PI * M_PI / scale;
        double y = tau.imag();
        double ra = std::sqrt(42.0 / (t * c)) + std::abs(alpha) + 1;
        double rb = y * std::sqrt(42.0 / (t * c)) + std::abs(beta) +
                    std::abs(tau.real()) * ra + 1;
        cdouble sum = 0;
        for (long a = -(long)std::ceil(ra); a <= (long)std::ceil(ra); ++a)
            for (long b = -(long)std::ceil(rb); b <= (long)std::ceil(rb); ++b) {
                cdouble mu = eigenvalue(a, b);
                if (mu.real() * t > 46.0) continue;
                sum += std::exp(-t * mu);
            }
        return sum;
    }

    // Poisson-dual route: (Vol / 2 pi t) sum_{m,k} chi(m + k tau)
    // exp(-lambda |m + k tau|^2 / (2 t)). Unitary characters only.
    cdouble heat_trace_theta(double t) const {
        if (!unitary())
            throw std::domain_error("heat_trace_theta: non-unitary twist not supported");
        double y = tau.imag(), x = tau.real();
        double pref = volume() / (2.0 * M_PI * t);
        // need lambda |w|^2 / 2t <= 42
        double rad = std::sqrt(2.0 * t * 42.0 / scale);
        long Km = (long)std::ceil(rad) + 1;
        long Kk = (long)std::ceil(rad / y) + 1;
        double sum = 0;
        for (long k = -Kk; k <= Kk; ++k)
            for (long m = -(Km + (long)std::ceil(std::abs(x) * std::abs(double(k))));
                 m <= Km + (long)std::ceil(std::abs(x) * std::abs(double(k))); ++m) {
                double re = m + k * x, im = k * y;
                double n2 = re * re + im * im;
                if (scale * n2 / (2.0 * t) > 46.0) continue;
                double phase = 2.0 * M_PI * (alpha.real() * m + beta.real() * k);
                sum += std::cos(phase) * std::exp(-scale * n2 / (2.0 * t));
            }
        return pref * sum;
    }
};

struct TorusConfig {
    std::vector<TorusFactor> factors;
    int p = 0; // holomorphic form degree

    int n() const { return int(factors.size()); }
    double volume() const {
        double v = 1;
        for (const auto& f : factors) v *= f.volume();
        return v;
    }
    bool unitary() const {
        for (const auto& f : factors)
            if (!f.unitary()) return false;
        return true;
    }
    void validate() const {
        if (factors.empty()) throw std::invalid_argument("TorusConfig: no factors");
        for (const auto& f : factors) {
            if (!(f.tau.imag() > 0)) throw std::invalid_argument("TorusConfig: Im tau <= 0");
            if (!(f.scale > 0)) throw std::invalid_argument("TorusConfig: scale <= 0");
            if (f.trivial_character())
                throw std::invalid_argument("TorusConfig: trivial character has a zero mode");
        }
        if (p < 0 || p > n()) throw std::invalid_argument("TorusConfig: p out of range");
    }
    TorusConfig rescaled(double lambda_factor) const {
        TorusConfig c = *this;
        for (auto& f : c.factors) f.scale *= lambda_factor;
        return c;
    }
};

inline long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

// ---------------------------------------------------------------------------
// Spectrum slices

struct SpectrumSlice {
    int q = 0;
    std::vector<std::pair<cdouble, long>> eigenvalues; // (value, multiplicity), Re ascending
    double cutoff = 0;        // listed up to Re mu <= cutoff
    double density_at_cutoff = 0;

    double tail_bound(double t) const {
        // crude Weyl-slope bound: density * e^{-t cutoff} / t
        return density_at_cutoff * std::exp(-t * cutoff) / std::max(t, 1e-12);
    }
};

// Function-space eigenvalues of one factor up to Re mu <= lmax.
inline std::vector<cdouble> factor_eigenvalues(const TorusFactor& f, double lmax) {
    double c = 2.0 * M_PI * M_PI / f.scale;
    double y = f.tau.imag();
    double ra = std::sqrt(lmax / c) + std::abs(f.alpha) + 2;
    double rb = y * std::sqrt(lmax / c) + std::abs(f.beta) + std::abs(f.tau.real()) * ra + 2;
    std::vector<cdouble> out;
    for (long a = -(long)std::ceil(ra); a <= (long)std::ceil(ra); ++a)
        for (long b = -(long)std::ceil(rb); b <= (long)std::ceil(rb); ++b) {
            cdouble mu = f.eigenvalue(a, b);
            if (mu.real() <= lmax) out.push_back(mu);
        }
    return out;
}

// Spectrum of the Dolbeault Laplacian on (p,q)-forms up to cutoff lmax.
inline SpectrumSlice spectrum(const TorusConfig& config, int q, double lmax) {
    config.validate();
    if (q < 0 || q > config.n()) throw std::invalid_argument("spectrum: q out of range");
    int n = config.n();

    // combine per-factor function spectra by summing
    std::vector<cdouble> acc = {cdouble(0)};
    for (const auto& f : config.factors) {
        std::vector<cdouble> evs = factor_eigenvalues(f, lmax);
        std::vector<cdouble> next;
        next.reserve(acc.size() * evs.size() / 4 + 16);
        for (cdouble base : acc)
            for (cdouble mu : evs)
                if ((base + mu).real() <= lmax) next.push_back(base + mu);
        acc = std::move(next);
    }
    std::sort(acc.begin(), acc.end(), [](cdouble x, cdouble y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });

    long mult = binom(n, config.p) * binom(n, q);
    SpectrumSlice s;
    s.q = q;
    s.cutoff = lmax;
    for (size_t i = 0; i < acc.size();) {
        size_t j = i;
        while (j < acc.size() && std::abs(acc[j] - acc[i]) < 1e-9) ++j;
        s.eigenvalues.push_back({acc[i], mult * long(j - i)});
        i = j;
    }
    // eigenvalue density near the cutoff, from the top half of the list
    long cnt = 0;
    for (const auto& [mu, m] : s.eigenvalues)
        if (mu.real() > 0.5 * lmax) cnt += m;
    s.density_at_cutoff = double(cnt) / std::max(0.5 * lmax, 1e-12);
    return s;
}

// ---------------------------------------------------------------------------
// Graded heat traces

// Product over factors of the function heat trace.
inline cdouble product_function_trace(const TorusConfig& config, double t, bool theta_route) {
    cdouble prod = 1;
    for (const auto& f : config.factors)
        prod *= theta_route ? f.heat_trace_theta(t) : f.heat_trace_eigen(t);
    return prod;
}

// tr_s[N e^{-t box}] over Omega^{p,*}: C(n,p) sum_q (-1)^q q C(n,q) (prod T_i).
inline cdouble heat_supertrace_N(const TorusConfig& config, double t, bool theta_route = true) {
    config.validate();
    int n = config.n();
    long w = 0;
    for (int q = 0; q <= n; ++q) w += ((q & 1) ? -1L : 1L) * q * binom(n, q);
    if (w == 0) return 0; // n >= 2: exact cancellation
    bool use_theta = theta_route && config.unitary();
    return double(w * binom(n, config.p)) * product_function_trace(config, t, use_theta);
}

// ---------------------------------------------------------------------------
// Finite-difference discretization of box on one factor (oracle for the
// closed-form spectrum). Fourth-order stencils on an N x N twisted-periodic
// grid over the (s, r) unit cell, z = sqrt(lambda)(s + r tau):
//   box = (1/2 lambda) [ -(1 + x0^2/y0^2) d_s^2 - (1/y0^2) d_r^2
//                        + (2 x0/y0^2) d_s d_r ].
inline CMat fd_box_matrix(const TorusFactor& f, int N) {
    if (!f.unitary()) throw std::domain_error("fd_box_matrix: unitary characters only");
    int dim = N * N;
    double h = 1.0 / N;
    double x0 = f.tau.real(), y0 = f.tau.imag();
    cdouble ps = std::exp(cdouble(0, 2 * M_PI * f.alpha.real())); // wrap phase in s
    cdouble pr = std::exp(cdouble(0, 2 * M_PI * f.beta.real()));  // wrap phase in r

    auto idx = [N](int i, int j) { return ((i % N) + N) % N * N + ((j % N) + N) % N; };
    auto wrap_phase_s = [&](int i) {
        if (i >= N) return ps;
        if (i < 0) return std::conj(ps);
        return cdouble(1);
    };
    auto wrap_phase_r = [&](int j) {
        if (j >= N) return pr;
        if (j < 0) return std::conj(pr);
        return cdouble(1);
    };

    // one-dimensional 4th-order stencils
    const double d2w[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
    const double d1w[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};

    CMat Ds(dim, dim), Dr(dim, dim), Dss(dim, dim), Drr(dim, dim);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            int row = idx(i, j);
            for (int o = -2; o <= 2; ++o) {
                cdouble phs = wrap_phase_s(i + o), phr = wrap_phase_r(j + o);
                Dss(row, idx(i + o, j)) += d2w[o + 2] / (h * h) * phs;
                Drr(row, idx(i, j + o)) += d2w[o + 2] / (h * h) * phr;
                Ds(row, idx(i + o, j)) += d1w[o + 2] / h * phs;
                Dr(row, idx(i, j + o)) += d1w[o + 2] / h * phr;
            }
        }
    CMat mixed = Ds * Dr;
    double as = (1.0 + x0 * x0 / (y0 * y0)), ar = 1.0 / (y0 * y0), am = 2.0 * x0 / (y0 * y0);
    CMat H(dim, dim);
    H = cdouble(-as) * Dss + cdouble(-ar) * Drr + cdouble(am) * mixed;
    return cdouble(1.0 / (2.0 * f.scale)) * H;
}

} // namespace cmt

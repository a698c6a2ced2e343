#include "doctest.h"

#include "cmtorsion/zeta.hpp"

using namespace cmt;

namespace {

TorusConfig one_factor(cdouble tau, double scale, double alpha, double beta, int p = 0) {
    TorusFactor f;
    f.tau = tau;
    f.scale = scale;
    f.alpha = alpha;
    f.beta = beta;
    TorusConfig c;
    c.factors = {f};
    c.p = p;
    return c;
}

} // namespace

TEST_CASE("zeta: cut below the spectrum has an empty small complex") {
    auto cfg = one_factor(cdouble(0, 1), 1.0, 0.5, 0.5);
    auto res = zeta_torsion(cfg, 1.0); // smallest eigenvalue is 2 pi^2/2 ~ 9.87
    CHECK(res.small_modes == 0);
    CHECK(std::abs(res.log_small_factor) == 0.0);
    CHECK(std::abs(res.torsion_log - res.zeta0_prime) == 0.0);
    CHECK(std::abs(res.zeta0) < 1e-9);
}

TEST_CASE("zeta: cut collisions and bad cuts are rejected") {
    auto cfg = one_factor(cdouble(0, 1), 1.0, 0.5, 0.0);
    double mu1 = 2 * M_PI * M_PI * 0.25;
    CHECK_THROWS_AS(zeta_torsion(cfg, mu1), std::invalid_argument);
    CHECK_THROWS_AS(zeta_torsion(cfg, -1.0), std::invalid_argument);
}

TEST_CASE("torsion is independent of the spectral cut") {
    auto cfg = one_factor(cdouble(0, 1), 1.0, 0.5, 0.0);
    // gaps: below mu1 (4.93), between 4.93 and 24.67, between 24.67 and 44.4
    auto r1 = zeta_torsion(cfg, 2.0);
    auto r2 = zeta_torsion(cfg, 10.0);
    auto r3 = zeta_torsion(cfg, 30.0);
    CHECK(r2.small_modes > 0);
    CHECK(r3.small_modes > r2.small_modes);
    CHECK(std::abs(r1.torsion_log - r2.torsion_log) < 1e-8);
    CHECK(std::abs(r1.torsion_log - r3.torsion_log) < 1e-8);
    // zeta0 shifts by the graded count of removed modes; here q = 1 carries
    // weight -(-1) = +1 per mode
    CHECK(std::abs(r2.zeta0 - cdouble(2.0)) < 1e-8);
}

TEST_CASE("torsion: Mellin route equals the Kronecker-limit route") {
    for (auto [al, be] : {std::pair{0.5, 0.5}, std::pair{0.5, 0.0}, std::pair{0.0, 0.5},
                          std::pair{0.3, 0.7}}) {
        for (cdouble tau : {cdouble(0, 1), cdouble(0.3, 1.2)}) {
            auto cfg = one_factor(tau, 1.0, al, be);
            auto mellin = zeta_torsion(cfg, 0.5 * spectrum(cfg, 0, 100.0).eigenvalues[0].first.real());
            double kron = kronecker_limit_torsion(cfg.factors[0]);
            CHECK(std::abs(mellin.torsion_log - cdouble(kron)) < 1e-8);
        }
    }
}

TEST_CASE("torsion: scale invariance on the flat acyclic torus") {
    auto cfg = one_factor(cdouble(0.2, 0.9), 1.0, 0.5, 0.25);
    auto r1 = zeta_torsion(cfg, 1.0);
    auto r2 = zeta_torsion(cfg.rescaled(2.0), 0.5);
    auto r3 = zeta_torsion(cfg.rescaled(0.5), 2.0);
    CHECK(std::abs(r1.torsion_log - r2.torsion_log) < 1e-7);
    CHECK(std::abs(r1.torsion_log - r3.torsion_log) < 1e-7);
    // Kronecker route is manifestly scale-free
    CHECK(std::abs(r1.torsion_log - cdouble(kronecker_limit_torsion(cfg.factors[0]))) < 1e-8);
}

TEST_CASE("zeta scaling covariance: zeta_a(s; lambda g) = lambda^s zeta_{a/lambda}(s; g)") {
    auto cfg = one_factor(cdouble(0, 1), 1.0, 0.5, 0.0);
    double lam = 1.7;
    for (double s : {0.35, 0.6, 1.6}) {
        cdouble lhs = zeta_at(cfg.rescaled(lam), 1.0 / lam, s);
        cdouble rhs = std::pow(lam, s) * zeta_at(cfg, 1.0, s);
        CHECK(std::abs(lhs - rhs) < 1e-9 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("modular invariance: tau -> -1/tau with transported character") {
    for (auto [al, be] : {std::pair{0.5, 0.0}, std::pair{0.3, 0.7}}) {
        cdouble tau(0.25, 1.15);
        auto cfg = one_factor(tau, 1.0, al, be);
        cdouble tau2 = -1.0 / tau;
        auto frac = [](double x) { return x - std::floor(x); };
        auto cfg2 = one_factor(tau2, std::norm(tau), frac(be), frac(-al));
        auto r1 = zeta_torsion(cfg, 1.0);
        auto r2 = zeta_torsion(cfg2, 1.0 / std::norm(tau));
        CHECK(std::abs(r1.torsion_log - r2.torsion_log) < 1e-8);
    }
}

TEST_CASE("non-unitary twist: torsion machinery runs behind the flag") {
    TorusFactor f;
    f.tau = cdouble(0, 1);
    f.scale = 1.0;
    f.alpha = cdouble(0.5, 0.03);
    f.beta = cdouble(0.25, -0.02);
    TorusConfig c;
    c.factors = {f};
    auto res = zeta_torsion(c, 1.0);
    CHECK(res.branch_flagged);
    CHECK(std::abs(res.torsion_log.imag()) > 1e-12); // genuinely complex
    // cut independence still holds for the complex torsion
    auto res2 = zeta_torsion(c, 12.0);
    CHECK(std::abs(res.torsion_log - res2.torsion_log) < 1e-7);
}

TEST_CASE("product tori: graded cancellation makes the torsion trivial") {
    auto cfg = one_factor(cdouble(0, 1), 1.0, 0.5, 0.0);
    TorusConfig prod;
    prod.factors = {cfg.factors[0], cfg.factors[0]};
    prod.p = 1;
    auto res = zeta_torsion(prod, 3.0);
    CHECK(std::abs(res.zeta0_prime) < 1e-10);
    CHECK(std::abs(res.torsion_log) < 1e-10);
}

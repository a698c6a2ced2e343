#include "doctest.h"

#include "cmtorsion/mehler.hpp"
#include "cmtorsion/rng.hpp"
#include "cmtorsion/mehler_expansion.hpp"

using namespace cmt;
using MV = Multivector<cdouble>;

namespace {

MehlerNumeric free_params(int n, int m) {
    MehlerNumeric p;
    p.n = n;
    p.B = zero_block(n, n, cdouble(0));
    p.L = zero_block(m, m, cdouble(0));
    p.a0 = zero_block(m, m, cdouble(0));
    for (int i = 0; i < m; ++i) p.a0[i][i] = 1;
    return p;
}

TransportProblem<cdouble> to_transport(const MehlerNumeric& p) {
    TransportProblem<cdouble> tr;
    tr.n = p.n;
    tr.B = p.B;
    tr.L = p.L;
    tr.a0 = p.a0;
    tr.zero = 0;
    tr.one = 1;
    return tr;
}

} // namespace

TEST_CASE("mehler closed form: free case is the plain Gaussian") {
    auto p = free_params(2, 1);
    double u = 0.7;
    std::vector<double> x{0.3, -0.8};
    auto kv = mehler_eval(u, x, p);
    double expect = std::pow(4 * M_PI * u, -1.0) * std::exp(-(x[0] * x[0] + x[1] * x[1]) / (4 * u));
    CHECK(std::abs(kv.value(0, 0) - cdouble(expect)) < 1e-15);
    CHECK_THROWS_AS(mehler_eval(0.0, x, p), std::domain_error);
    CHECK_THROWS_AS(mehler_eval(-1.0, x, p), std::domain_error);
}

TEST_CASE("mehler closed form: B = 0 factorizes into Gaussian times exp(-uL) a0") {
    auto p = free_params(1, 2);
    p.L[0][0] = cdouble(0.5, 0.2);
    p.L[0][1] = cdouble(-0.3, 0);
    p.L[1][1] = cdouble(0.1, -0.4);
    p.a0[0][1] = cdouble(2, 1);
    double u = 0.45;
    std::vector<double> x{-0.6};
    auto kv = mehler_eval(u, x, p);
    double gauss = std::pow(4 * M_PI * u, -0.5) * std::exp(-x[0] * x[0] / (4 * u));
    CMat L(2, 2), A0(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) { L(i, j) = p.L[i][j]; A0(i, j) = p.a0[i][j]; }
    CMat expect = cdouble(gauss) * (expm(cdouble(-u) * L) * A0);
    CHECK((kv.value - expect).max_abs() < 1e-13);
}

TEST_CASE("mehler closed form: leading small-u diagonal behavior") {
    auto p = free_params(2, 1);
    p.B[0][1] = 0.8;
    p.B[1][0] = -0.8;
    p.L[0][0] = 0.3;
    std::vector<double> x{0.0, 0.0};
    for (double u : {1e-3, 1e-4}) {
        auto kv = mehler_eval(u, x, p);
        double lead = std::pow(4 * M_PI * u, -1.0);
        CHECK(std::abs(kv.value(0, 0) / lead - cdouble(1)) < 10 * u);
    }
}

TEST_CASE("mehler closed form is even in D") {
    auto rng = split(97, "mehler-even");
    auto p = free_params(3, 1);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            double v = rng.uniform(-1, 1);
            p.B[i][j] = v;
            p.B[j][i] = -v;
        }
    auto q = p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) q.B[i][j] = -p.B[i][j];
    std::vector<double> x{0.4, -0.2, 0.9};
    auto a = mehler_eval(0.8, x, p), b = mehler_eval(0.8, x, q);
    CHECK((a.value - b.value).max_abs() < 1e-13);
}

TEST_CASE("heat residual: second-order convergence and exactness scales") {
    // free case: pure discretization error
    auto pfree = free_params(2, 1);
    CHECK(heat_residual(1.0, {0.0, 0.0}, pfree, 1e-3) < 1e-6);

    // scalar L
    auto pl = free_params(1, 1);
    pl.L[0][0] = 0.7;
    CHECK(heat_residual(1.0, {0.2}, pl, 1e-3) < 1e-6);

    // numeric antisymmetric B: residual(h)/residual(h/2) ~ 4
    auto pb = free_params(2, 1);
    pb.B[0][1] = 1.1;
    pb.B[1][0] = -1.1;
    std::vector<double> x{0.5, -0.3};
    double r1 = heat_residual(0.8, x, pb, 2e-2);
    double r2 = heat_residual(0.8, x, pb, 1e-2);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.08));
    CHECK_THROWS_AS(heat_residual(1e-4, x, pb, 1e-3), std::domain_error);
}

TEST_CASE("heat residual: the symmetric-part sign actually solves the equation") {
    // 1x1 pure symmetric B: the kernel with exp(-x^2 B/8) must satisfy the
    // heat equation; the opposite sign would leave an O(1) residual.
    auto p = free_params(1, 1);
    p.B[0][0] = 0.9;
    double r = heat_residual(0.7, {0.6}, p, 1e-3);
    CHECK(r < 1e-5);
}

TEST_CASE("formal coefficients: seed and separable case") {
    auto p = free_params(1, 2);
    p.L[0][0] = cdouble(0.4, 0.1);
    p.L[1][0] = cdouble(0.2, 0);
    p.a0[0][1] = cdouble(1, 1);
    auto phis = formal_coeffs(to_transport(p), 4);
    // Phi_0(0) = a0
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            cdouble v = phis[0](a, b).eval({0.0}, cdouble(0));
            CHECK(std::abs(v - p.a0[a][b]) < 1e-14);
        }
    // B = 0: Phi_k = (-L)^k a0 / k!
    CMat L(2, 2), A0(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) { L(i, j) = p.L[i][j]; A0(i, j) = p.a0[i][j]; }
    CMat Lk = CMat::identity(2);
    double fact = 1;
    for (int k = 1; k <= 4; ++k) {
        Lk = cdouble(-1) * (L * Lk);
        fact /= k;
        CMat want = cdouble(fact) * (Lk * A0);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                cdouble v = phis[k](a, b).eval({0.37}, cdouble(0)); // x-independent
                CHECK(std::abs(v - want(a, b)) < 1e-13);
            }
    }
}

TEST_CASE("formal coefficients match the closed-form expansion, numeric antisymmetric B") {
    auto p = free_params(2, 1);
    p.B[0][1] = 0.9;
    p.B[1][0] = -0.9;
    p.L[0][0] = cdouble(0.25, -0.15);
    auto phis = formal_coeffs(to_transport(p), 4);
    auto oracle = closed_form_u_expansion<cdouble>(p, 4, 12, cdouble(0), cdouble(1));
    auto rng = split(101, "mehler-match");
    for (int k = 0; k <= 4; ++k) {
        PolyMat<cdouble> diff = phis[k] - oracle[k];
        CHECK(diff.sup_norm() < 1e-10);
        // and pointwise
        for (int rep = 0; rep < 3; ++rep) {
            std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            cdouble a = phis[k](0, 0).eval(x, cdouble(0));
            cdouble b = oracle[k](0, 0).eval(x, cdouble(0));
            CHECK(std::abs(a - b) < 1e-10);
        }
    }
}

TEST_CASE("formal coefficients match the closed form exactly for nilpotent 2-form input") {
    // n = 2 with D = theta J, theta a 2-form: all series terminate
    auto sp = GeneratorSpace::frames(6);
    MV theta = MV::monomial(sp, 0b110000, cdouble(0.6, -0.2)); // e5^e6
    MV zero(sp), one(sp, cdouble(1));

    MehlerForm p;
    p.n = 2;
    p.space = sp;
    p.B = zero_block(2, 2, zero);
    p.L = zero_block(1, 1, zero);
    p.a0 = zero_block(1, 1, zero);
    p.B[0][1] = theta;
    p.B[1][0] = -theta;
    p.L[0][0] = MV::monomial(sp, 0b001100, cdouble(0.4)); // e3^e4
    p.a0[0][0] = one;

    TransportProblem<MV> tr;
    tr.n = 2;
    tr.B = p.B;
    tr.L = p.L;
    tr.a0 = p.a0;
    tr.zero = zero;
    tr.one = one;
    auto phis = formal_coeffs(tr, 4);
    auto oracle = closed_form_u_expansion<MV>(p, 4, 12, zero, one);
    for (int k = 0; k <= 4; ++k) CHECK((phis[k] - oracle[k]).sup_norm() < 1e-14);

    // and the pointwise closed form agrees with the series (it terminates)
    double u = 0.9;
    std::vector<double> x{0.3, -0.7};
    auto kv = mehler_eval_form(u, x, p);
    double q = std::pow(4 * M_PI * u, -1.0) * std::exp(-(x[0] * x[0] + x[1] * x[1]) / (4 * u));
    MV series_sum(sp);
    double upow = 1;
    for (int k = 0; k <= 4; ++k) {
        series_sum += cdouble(upow) * phis[k](0, 0).eval(x, zero);
        upow *= u;
    }
    CHECK((kv.value(0, 0) - cdouble(q) * series_sum).sup_norm() < 1e-12);
}

TEST_CASE("semigroup at B = 0: convolution reproduces the kernel") {
    auto p = free_params(1, 1);
    p.L[0][0] = 0.35;
    double u = 0.4, v = 0.7;
    double xx = 0.25;
    // numeric convolution over R
    double R = 14.0, h = 1e-3;
    cdouble acc = 0;
    for (double xi = -R; xi <= R; xi += h) {
        auto a = mehler_eval(u, {xx - xi}, p);
        auto b = mehler_eval(v, {xi}, p);
        acc += a.value(0, 0) * b.value(0, 0) * h;
    }
    auto direct = mehler_eval(u + v, {xx}, p);
    CHECK(std::abs(acc - direct.value(0, 0)) < 1e-8);
}

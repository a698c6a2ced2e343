#include "doctest.h"

#include "cmtorsion/getzler.hpp"
#include "cmtorsion/multivector.hpp"
#include "cmtorsion/rng.hpp"

using namespace cmt;
using MV = Multivector<cdouble>;
using MQ = Multivector<CxQ>;

namespace {

MQ random_rational_mv(const GeneratorSpace& sp, SplitMix64& rng, int terms) {
    MQ m(sp);
    for (int k = 0; k < terms; ++k) {
        uint64_t mask = rng.next() & sp.all_mask();
        m.add_term(mask, CxQ(Rational(rng.small_int(5)), Rational(rng.small_int(5))));
    }
    return m;
}

} // namespace

TEST_CASE("wedge: repeated generator vanishes") {
    auto sp = GeneratorSpace::frames(4);
    MV e1 = MV::generator(sp, 0), e2 = MV::generator(sp, 1);
    MV w = e1 * e2;
    CHECK((w * w).is_zero());
}

TEST_CASE("wedge: da eta1 ^ dab eta2 = da dab eta1 eta2 for scalar etas") {
    auto sp = GeneratorSpace::frames_da(2);
    MV da = MV::generator(sp, sp.da_index()), dab = MV::generator(sp, sp.dabar_index());
    cdouble a(2.0, 1.0), b(-3.0, 0.5);
    MV lhs = (da * MV(sp, a)) * (dab * MV(sp, b));
    MV rhs = (da * dab) * MV(sp, a * b);
    CHECK(lhs.approx_equal(rhs, 0.0));
}

TEST_CASE("wedge: products past q_cap vanish") {
    auto sp = GeneratorSpace::frames_thetas(2, 3, 2);
    MQ t1 = MQ::generator(sp, 2), t2 = MQ::generator(sp, 3), t3 = MQ::generator(sp, 4);
    CHECK((t1 * t2 * t3).is_zero());
    CHECK(!(t1 * t2).is_zero());
}

TEST_CASE("wedge: mismatched generator spaces rejected") {
    MV a(GeneratorSpace::frames(2), cdouble(1));
    MV b(GeneratorSpace::frames(4), cdouble(1));
    CHECK_THROWS_AS(a * b, std::invalid_argument);
}

TEST_CASE("interior: contraction values and signs") {
    auto sp = GeneratorSpace::frames(4);
    MV e1 = MV::generator(sp, 0), e2 = MV::generator(sp, 1);
    MV w = e1 * e2;
    CHECK(interior(1, w).approx_equal(e2, 0.0));
    CHECK(interior(2, w).approx_equal(-e1, 0.0));
    CHECK_THROWS_AS(interior(7, w), std::out_of_range);
}

TEST_CASE("interior: nilpotency i_v i_v = 0 on random elements") {
    auto sp = GeneratorSpace::frames(6);
    auto rng = split(13, "interior-nilpotent");
    for (int rep = 0; rep < 20; ++rep) {
        MV x(sp);
        for (int k = 0; k < 6; ++k)
            x.add_term(rng.next() & sp.all_mask(), cdouble(rng.uniform(-1, 1), rng.uniform(-1, 1)));
        CHECK(interior(3, interior(3, x)).is_zero());
    }
}

TEST_CASE("clifford symbol: relation c(v)c(v) = -1 and anticommutators") {
    auto sp = GeneratorSpace::frames(4);
    auto rng = split(17, "clifford-relation");
    for (int rep = 0; rep < 20; ++rep) {
        MV x(sp);
        for (int k = 0; k < 5; ++k)
            x.add_term(rng.next() & sp.all_mask(), cdouble(rng.uniform(-1, 1), rng.uniform(-1, 1)));
        MV cc = clifford_symbol(1, clifford_symbol(1, x));
        CHECK((cc + x).sup_norm() < 1e-14);
        MV anti = clifford_symbol(1, clifford_symbol(2, x)) + clifford_symbol(2, clifford_symbol(1, x));
        CHECK(anti.sup_norm() < 1e-14);
    }
    CHECK(clifford_symbol(1, MV(sp, cdouble(1))).approx_equal(MV::generator(sp, 0), 0.0));
}

TEST_CASE("extract da dab coefficient") {
    auto sp = GeneratorSpace::frames_da(2);
    MV e1 = MV::generator(sp, 0), e2 = MV::generator(sp, 1);
    MV da = MV::generator(sp, sp.da_index()), dab = MV::generator(sp, sp.dabar_index());
    CHECK(extract_da_dabar(da * dab * e1).approx_equal(e1, 0.0));
    CHECK(extract_da_dabar(e1 * e2 + da * e1).is_zero());
    MV x = e1 * e2; // even
    MV both = x * (da * dab) + (da * dab) * x;
    CHECK(extract_da_dabar(both).approx_equal(cdouble(2) * x, 0.0));
    MV noda(GeneratorSpace::frames(2), cdouble(1));
    CHECK_THROWS_AS(extract_da_dabar(noda), std::invalid_argument);
}

TEST_CASE("psi_t: generator scaling and homomorphism") {
    auto sp = GeneratorSpace::frames_thetas(2, 2, 2);
    MV t1 = MV::generator(sp, 2), t2 = MV::generator(sp, 3);
    double t = 4.0;
    CHECK(psi_t(t, t1).approx_equal(cdouble(0.5) * t1, 1e-15));
    CHECK(psi_t(t, t1 * t2).approx_equal(cdouble(0.25) * (t1 * t2), 1e-15));
    CHECK(psi_t(1.0, t1 * t2 + t1).approx_equal(t1 * t2 + t1, 0.0));
    CHECK_THROWS_AS(psi_t(0.0, t1), std::domain_error);
    CHECK_THROWS_AS(psi_t(-2.0, t1), std::domain_error);
}

TEST_CASE("psi_t: multiplicative on random rational elements, exactly") {
    auto sp = GeneratorSpace::frames_thetas(3, 3, 3);
    auto rng = split(29, "psi-homomorphism");
    CxQ inv_sqrt(Rational(2, 3)); // t = 9/4
    for (int rep = 0; rep < 50; ++rep) {
        MQ a = random_rational_mv(sp, rng, 4), b = random_rational_mv(sp, rng, 4);
        CHECK(psi_scale(inv_sqrt, a * b) == psi_scale(inv_sqrt, a) * psi_scale(inv_sqrt, b));
    }
}

TEST_CASE("getzler rescale: grading weights and composition") {
    auto sp = GeneratorSpace::frames(4);
    MVFunction<cdouble> f = [sp](double t, const std::vector<double>& x) {
        MV m(sp, cdouble(3.0));                                   // degree 0
        m += cdouble(t * x[0]) * MV::generator(sp, 0);            // degree 1
        m += cdouble(x[1] * x[1]) * (MV::generator(sp, 0) * MV::generator(sp, 1));
        return m;
    };
    double eps = 0.5;
    auto g = getzler_rescale(eps, f);
    std::vector<double> x{0.7, -0.3};
    MV v = g(2.0, x);
    // scalar passes through with argument scaling only
    CHECK(v.scalar_part() == cdouble(3.0));
    // degree-1 term: eps^{-1} * (eps^2 t)(eps x0)
    CHECK(std::abs(v.coeff(1) - cdouble(eps * eps * 2.0 * eps * x[0] / eps)) < 1e-15);

    // composition delta_eps . delta_eps' = delta_{eps eps'} on random data
    auto rng = split(31, "getzler-compose");
    for (int rep = 0; rep < 10; ++rep) {
        double e1 = rng.uniform(0.3, 1.8), e2 = rng.uniform(0.3, 1.8);
        auto lhs = getzler_rescale(e1, getzler_rescale(e2, f));
        auto rhs = getzler_rescale(e1 * e2, f);
        std::vector<double> xx{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        double tt = rng.uniform(0.1, 2.0);
        CHECK((lhs(tt, xx) - rhs(tt, xx)).sup_norm() < 1e-12);
    }
}

TEST_CASE("getzler monomial weight: exact rational composition") {
    auto rng = split(37, "getzler-exact");
    for (int rep = 0; rep < 50; ++rep) {
        CxQ e1(Rational(rng.small_int(4) + 6, 5)), e2(Rational(rng.small_int(4) + 7, 4));
        CxQ i1(Rational(5, e1.re.num())), i2(Rational(4, e2.re.num()));
        int tp = int(rng.below(3)), xd = int(rng.below(4)), fd = int(rng.below(5));
        CxQ w1 = getzler_monomial_weight(e1, i1, tp, xd, fd);
        CxQ w2 = getzler_monomial_weight(e2, i2, tp, xd, fd);
        CxQ w12 = getzler_monomial_weight(e1 * e2, i1 * i2, tp, xd, fd);
        CHECK(w1 * w2 == w12);
    }
}

TEST_CASE("anticommutativity of all generators") {
    auto sp = GeneratorSpace::full(3, 2, 4);
    for (int g = 0; g < sp.total(); ++g)
        for (int h = 0; h < sp.total(); ++h) {
            MQ a = MQ::generator(sp, g), b = MQ::generator(sp, h);
            CHECK((a * b + b * a).is_zero());
        }
}

TEST_CASE("truncation soundness: q_cap Q results match projected q_cap Q+1 results") {
    auto rng = split(41, "truncation");
    auto spQ = GeneratorSpace::frames_thetas(2, 4, 2);
    auto spQ1 = GeneratorSpace::frames_thetas(2, 4, 3);
    for (int rep = 0; rep < 30; ++rep) {
        MQ aQ(spQ), bQ(spQ), aQ1(spQ1), bQ1(spQ1);
        for (int k = 0; k < 5; ++k) {
            uint64_t mask = rng.next() & spQ.all_mask();
            CxQ c(Rational(rng.small_int(4)), Rational(rng.small_int(4)));
            if (MQ::aux_degree(spQ, mask) <= 2) { // inputs within the smaller cap
                aQ.add_term(mask, c);
                aQ1.add_term(mask, c);
            }
            mask = rng.next() & spQ.all_mask();
            CxQ c2(Rational(rng.small_int(4)), Rational(rng.small_int(4)));
            if (MQ::aux_degree(spQ, mask) <= 2) {
                bQ.add_term(mask, c2);
                bQ1.add_term(mask, c2);
            }
        }
        MQ prodQ = aQ * bQ;
        MQ prodQ1 = (aQ1 * bQ1).aux_truncate(2);
        // compare term maps directly (spaces differ only in q_cap)
        REQUIRE(prodQ.terms().size() == prodQ1.terms().size());
        for (const auto& [mask, c] : prodQ.terms()) CHECK(prodQ1.coeff(mask) == c);
    }
}

TEST_CASE("canonical dump: one term per line in generator order") {
    auto sp = GeneratorSpace::full(2, 1, 3);
    MV m = MV::generator(sp, 0) * MV::generator(sp, 2) * MV::generator(sp, 3);
    std::string d = m.dump();
    CHECK(d.find("e1^th1^da") != std::string::npos);
}

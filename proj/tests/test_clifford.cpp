#include "doctest.h"

#include "cmtorsion/clifford_rep.hpp"
#include "cmtorsion/rng.hpp"
#include "cmtorsion/super_op.hpp"

using namespace cmt;
using MV = Multivector<cdouble>;

TEST_CASE("complex clifford matrices satisfy the bilinear relation") {
    // c(U)c(V) + c(V)c(U) = -2 <U,V> on the 2^n module, n <= 3
    for (int n = 1; n <= 3; ++n) {
        auto rng = split(7, "clifford-matrix-relation");
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<cdouble> u(2 * n), v(2 * n);
            cdouble bil = 0;
            for (int k = 0; k < 2 * n; ++k) {
                u[k] = cdouble(rng.uniform(-1, 1), rng.uniform(-1, 1));
                v[k] = cdouble(rng.uniform(-1, 1), rng.uniform(-1, 1));
                bil += u[k] * v[k]; // C-bilinear, not Hermitian
            }
            CMat cu = complex_clifford(n, u), cv = complex_clifford(n, v);
            CMat anti = cu * cv + cv * cu + (2.0 * bil) * CMat::identity(1 << n);
            CHECK(anti.max_abs() < 1e-13);
        }
    }
}

TEST_CASE("complex clifford annihilates constants in the antiholomorphic direction") {
    // the contraction part of c(wbar_1-direction) kills Lambda^0
    int n = 1;
    // v = e1 + i e2 has vanishing (1,0) part, so c(v) = -sqrt(2) i_{v^{(0,1)}}
    CMat cv = complex_clifford(n, {cdouble(1, 0), cdouble(0, 1)});
    // column of the vacuum state |emptyset> must vanish
    for (int i = 0; i < 2; ++i) CHECK(std::abs(cv(i, 0)) < 1e-15);
}

TEST_CASE("symbol and quantization are mutually inverse") {
    for (int n = 1; n <= 2; ++n) {
        auto sp = GeneratorSpace::frames(2 * n);
        auto rng = split(11, "symbol-quantize");
        for (int rep = 0; rep < 10; ++rep) {
            MV m(sp);
            for (int k = 0; k < 5; ++k)
                m.add_term(rng.next() & sp.all_mask(),
                           cdouble(rng.uniform(-1, 1), rng.uniform(-1, 1)));
            MV back = symbol(n, quantize(n, m), sp);
            CHECK((back - m).sup_norm() < 1e-12);
        }
    }
}

TEST_CASE("4x4 symbol action of c(e_k) for n=1 is equivalent to the 2x2 module with multiplicity two") {
    // The symbol action c(e_k) = e^k ^ . - i_{e_k} on Lambda(V* (x) C) (dim 4)
    // decomposes as two copies of the complex Clifford module. Construct the
    // intertwiner from the vacua of the annihilator a = -(1/2)(c(e1)+i c(e2)),
    // build each copy with the creator b = (1/2)(c(e1)-i c(e2)), and check
    // C_real(e_k) T = T (C_module(e_k) (x) I) for k = 1, 2.
    auto sp = GeneratorSpace::frames(2);
    std::vector<uint64_t> basis = {0b00, 0b01, 0b10, 0b11};

    auto op_matrix = [&](auto&& op) {
        CMat M(4, 4);
        for (int col = 0; col < 4; ++col) {
            MV v = MV::monomial(sp, basis[col], cdouble(1));
            MV w = op(v);
            for (int row = 0; row < 4; ++row) M(row, col) = w.coeff(basis[row]);
        }
        return M;
    };
    CMat C1 = op_matrix([](const MV& v) { return clifford_symbol(1, v); });
    CMat C2 = op_matrix([](const MV& v) { return clifford_symbol(2, v); });
    CMat a = cdouble(-0.5) * (C1 + cdouble(0, 1) * C2);
    CMat b = cdouble(0.5) * (C1 - cdouble(0, 1) * C2);

    // vacua: 1 + i e1^e2 and e1 + i e2 (kernel of a)
    std::vector<std::vector<cdouble>> vac = {
        {1, 0, 0, cdouble(0, 1)}, {0, 1, cdouble(0, 1), 0}};
    auto apply = [&](const CMat& M, const std::vector<cdouble>& v) {
        std::vector<cdouble> w(4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) w[i] += M(i, j) * v[j];
        return w;
    };
    for (const auto& v : vac) {
        auto av = apply(a, v);
        for (auto z : av) CHECK(std::abs(z) < 1e-14);
    }

    // intertwiner columns: (vacuum, b vacuum) per copy; S-index fast
    CMat T(4, 4);
    for (int w = 0; w < 2; ++w) {
        auto v0 = vac[w];
        auto v1 = apply(b, v0);
        for (int i = 0; i < 4; ++i) {
            T(i, 0 + 2 * w) = v0[i];
            T(i, 1 + 2 * w) = v1[i];
        }
    }
    // T invertible: det = e_4 of T nonzero
    CHECK(std::abs(elementary_symmetric(T, 4)) > 1e-6);

    for (int k = 1; k <= 2; ++k) {
        CMat Creal = (k == 1) ? C1 : C2;
        CMat Cmod = clifford_matrix(1, k); // 2x2 module matrix
        CMat rhs(4, 4);
        for (int s = 0; s < 2; ++s)
            for (int sp2 = 0; sp2 < 2; ++sp2)
                for (int w = 0; w < 2; ++w) rhs(s + 2 * w, sp2 + 2 * w) = Cmod(s, sp2);
        CMat lhs = Creal * T, want = T * rhs;
        CHECK((lhs - want).max_abs() < 1e-13);
    }
}

TEST_CASE("supertrace: identity, odd elements, and the top monomial rule") {
    for (int n = 1; n <= 2; ++n) {
        auto sp = GeneratorSpace::frames(2 * n);
        FormMatrix<cdouble> id(sp, 1);
        id(0, 0) = MV(sp, cdouble(1));
        CHECK(std::abs(supertrace(CliffordElement(n, id))) < 1e-15);

        // odd element e1
        FormMatrix<cdouble> odd(sp, 1);
        odd(0, 0) = MV::generator(sp, 0);
        CHECK(std::abs(supertrace(CliffordElement(n, odd))) < 1e-15);
        CHECK(std::abs(supertrace_matrix_route(CliffordElement(n, odd))) < 1e-12);

        // c(e1)...c(e_{2n}): symbol is the top monomial; supertrace (-2i)^n w
        for (int w = 1; w <= 2; ++w) {
            FormMatrix<cdouble> top(sp, w);
            for (int k = 0; k < w; ++k) top(k, k) = MV::monomial(sp, sp.frame_mask(), cdouble(1));
            cdouble expect = 1;
            for (int k = 0; k < n; ++k) expect *= cdouble(0, -2);
            expect *= double(w);
            CHECK(std::abs(supertrace(CliffordElement(n, top)) - expect) < 1e-13);
            CHECK(std::abs(supertrace_matrix_route(CliffordElement(n, top)) - expect) < 1e-12);
        }
    }
}

TEST_CASE("supertrace: symbol route equals matrix route on random elements") {
    for (int n = 1; n <= 2; ++n) {
        auto sp = GeneratorSpace::frames(2 * n);
        auto rng = split(19, "supertrace-routes");
        for (int rep = 0; rep < 20; ++rep) {
            int w = 1 + int(rng.below(2));
            FormMatrix<cdouble> m(sp, w);
            for (int a = 0; a < w; ++a)
                for (int b = 0; b < w; ++b)
                    for (int k = 0; k < 4; ++k)
                        m(a, b).add_term(rng.next() & sp.all_mask(),
                                         cdouble(rng.uniform(-1, 1), rng.uniform(-1, 1)));
            CliffordElement x(n, m);
            CHECK(std::abs(supertrace(x) - supertrace_matrix_route(x)) < 1e-11);
        }
    }
}

TEST_CASE("supertrace is tracial on even elements (brute force, n <= 2)") {
    for (int n = 1; n <= 2; ++n) {
        auto sp = GeneratorSpace::frames(2 * n);
        auto rng = split(23, "supertrace-tracial");
        int d = 1 << n;
        for (int rep = 0; rep < 10; ++rep) {
            // x even (products of pairs of Clifford generators), y arbitrary
            CMat x = CMat::identity(d);
            for (int k = 0; k < 2; ++k) {
                int i = 1 + int(rng.below(2 * n)), j = 1 + int(rng.below(2 * n));
                x = x * (clifford_matrix(n, i) * clifford_matrix(n, j));
            }
            CMat y(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) y(i, j) = cdouble(rng.uniform(-1, 1), rng.uniform(-1, 1));
            cdouble lhs = graded_trace(n, x * y), rhs = graded_trace(n, y * x);
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
    }
}

TEST_CASE("conjugation by a unipotent aux-exponent preserves the supertrace") {
    // h = exp(-A) with A carrying auxiliary degree >= 1; str(h X h^{-1}) = str(X)
    auto sp = GeneratorSpace::frames_da(2); // n = 1, frame e1,e2 plus da,dab
    int letters = 2;
    int d = 1 << letters; // operators on Lambda(R^2)
    CMat parity = parity_matrix(letters);
    auto rng = split(43, "conjugation-supertrace");

    // A = da x (E_1) + dab x (E_2): odd matrices with odd parameters
    FormMatrix<cdouble> A(sp, d);
    add_super_term(A, uint64_t(1) << sp.da_index(), wedge_matrix(letters, 0), parity);
    add_super_term(A, uint64_t(1) << sp.dabar_index(), wedge_matrix(letters, 1), parity);

    // exp(+-A) terminate at aux degree 2
    auto expm_form = [&](const FormMatrix<cdouble>& M) {
        FormMatrix<cdouble> acc = FormMatrix<cdouble>::identity(sp, d);
        FormMatrix<cdouble> p = FormMatrix<cdouble>::identity(sp, d);
        for (int k = 1; k <= 4; ++k) {
            p = ring_traits<cdouble>::inv_int(k) * (p * M);
            if (p.is_zero()) break;
            acc += p;
        }
        return acc;
    };
    FormMatrix<cdouble> h = expm_form(-A), hinv = expm_form(A);

    for (int rep = 0; rep < 10; ++rep) {
        FormMatrix<cdouble> X(sp, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                X(i, j).add_term(rng.next() & sp.all_mask(),
                                 cdouble(rng.uniform(-1, 1), rng.uniform(-1, 1)));
        FormMatrix<cdouble> Y = h * X * hinv;
        // graded trace over the Lambda factor, per Grassmann monomial
        for (uint64_t g : {uint64_t(0), uint64_t(1) << sp.da_index(),
                           uint64_t(1) << sp.dabar_index(),
                           (uint64_t(1) << sp.da_index()) | (uint64_t(1) << sp.dabar_index())}) {
            CMat cx = super_coefficient(X, g, parity), cy = super_coefficient(Y, g, parity);
            cdouble sx = 0, sy = 0;
            for (uint32_t s = 0; s < (uint32_t)d; ++s) {
                double sgn = (std::popcount(s) & 1) ? -1.0 : 1.0;
                sx += sgn * cx(s, s);
                sy += sgn * cy(s, s);
            }
            CHECK(std::abs(sx - sy) < 1e-12);
        }
    }
}

#pragma once

// Operators on the exterior algebra with Grassmann-parameter coefficients.
//
// A term g (x) M (Grassmann monomial times endomorphism) multiplies by the
// super rule (g (x) M)(h (x) N) = (-1)^{|M||h|} gh (x) MN. Storing the
// twisted representative g (x) Gamma^{|g|} M, with Gamma the parity
// involution of the exterior algebra, turns the super product into the
// naive product of matrices with anticommuting entries:
//   hat(g (x) M) hat(h (x) N) = hat((g (x) M)(h (x) N)).
// So FormMatrix<cdouble> over the {da, dab} space does the bookkeeping once
// every inserted term is twisted on the way in and untwisted on the way out.

#include "clifford_rep.hpp"
#include "form_matrix.hpp"

namespace cmt {

// Parity involution on Lambda of `letters` generators (dimension 2^letters).
inline CMat parity_matrix(int letters) {
    int d = 1 << letters;
    CMat g(d, d);
    for (uint32_t s = 0; s < (uint32_t)d; ++s)
        g(s, s) = (std::popcount(s) & 1) ? -1.0 : 1.0;
    return g;
}

// Wedge and contraction operators on Lambda(R^letters); the Clifford pair
// {E_j, I_k} = delta_jk.
inline CMat wedge_matrix(int letters, int j) { return cliff::creation(letters, j); }
inline CMat contraction_matrix(int letters, int j) { return cliff::annihilation(letters, j); }

// Insert g (x) M into an operator accumulator with the parity twist.
inline void add_super_term(FormMatrix<cdouble>& acc, uint64_t gmask, const CMat& M,
                           const CMat& parity) {
    const GeneratorSpace& sp = acc.space();
    int deg = Multivector<cdouble>::aux_degree(sp, gmask);
    CMat T = M;
    for (int k = 0; k < (deg & 1); ++k) T = parity * T;
    for (int i = 0; i < acc.dim(); ++i)
        for (int j = 0; j < acc.dim(); ++j)
            if (T(i, j) != cdouble(0)) acc(i, j).add_term(gmask, T(i, j));
}

// Recover the plain coefficient matrix of a Grassmann monomial.
inline CMat super_coefficient(const FormMatrix<cdouble>& op, uint64_t gmask, const CMat& parity) {
    int d = op.dim();
    CMat M(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) M(i, j) = op(i, j).coeff(gmask);
    int deg = Multivector<cdouble>::aux_degree(op.space(), gmask);
    if (deg & 1) M = parity * M;
    return M;
}

} // namespace cmt

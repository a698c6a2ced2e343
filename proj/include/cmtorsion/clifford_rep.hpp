#pragma once

// The 2^n-dimensional representation of the complex Clifford algebra on
// Lambda(T^{*(0,1)}), the symbol/quantization pair, and the supertrace.
//
// Conventions, for complex dimension n (frame e_1..e_{2n}, e_{2j} = J e_{2j-1},
// wbar^j dual to wbar_j = (e_{2j-1} + i e_{2j})/sqrt(2)):
//   c(e_{2j-1}) = wbar^j ^ .  -  i_{wbar_j}
//   c(e_{2j})   = i ( wbar^j ^ .  +  i_{wbar_j} )
// Both follow from c(v) = sqrt(2) ( dual of v^{(1,0)} ^ . - i_{v^{(0,1)}} )
// with the C-bilinear pairing. Basis states are subsets S of {1..n}
// (monomials wbar^S in ascending order), even/odd graded by |S|.

#include <bit>
#include <cstdint>

#include "form_matrix.hpp"
#include "matrix.hpp"

namespace cmt {

namespace cliff {

inline int fermi_sign(uint32_t mask, int j) { // bits below j
    return (std::popcount(mask & ((1u << j) - 1)) & 1) ? -1 : 1;
}

// creation a_j = wbar^j ^ .   annihilation b_j = i_{wbar_j}
inline CMat creation(int n, int j) {
    int d = 1 << n;
    CMat m(d, d);
    for (uint32_t s = 0; s < (uint32_t)d; ++s)
        if (!(s & (1u << j))) m(s | (1u << j), s) = double(fermi_sign(s, j));
    return m;
}
inline CMat annihilation(int n, int j) {
    int d = 1 << n;
    CMat m(d, d);
    for (uint32_t s = 0; s < (uint32_t)d; ++s)
        if (s & (1u << j)) m(s & ~(1u << j), s) = double(fermi_sign(s, j));
    return m;
}

} // namespace cliff

// Matrix of c(e_k), k in 1..2n, on the 2^n-dimensional module.
inline CMat clifford_matrix(int n, int k) {
    if (k < 1 || k > 2 * n) throw std::out_of_range("clifford_matrix: index");
    int j = (k - 1) / 2;
    CMat a = cliff::creation(n, j), b = cliff::annihilation(n, j);
    if (k % 2 == 1) return a - b;                    // c(e_{2j-1})
    return cdouble(0, 1) * (a + b);                  // c(e_{2j})
}

// Matrix of the complex Clifford action of a real tangent vector given by
// frame components v = sum v_k e_k.
inline CMat complex_clifford(int n, const std::vector<cdouble>& v) {
    int d = 1 << n;
    CMat m(d, d);
    for (int k = 1; k <= 2 * n; ++k)
        if (v[k - 1] != cdouble(0)) m += v[k - 1] * clifford_matrix(n, k);
    return m;
}

// Quantization: frame monomial e^{i1}^...^e^{ik} (ascending) maps to the
// ordered product c(e_{i1})...c(e_{ik}). Auxiliary generators are not
// representable here; masks containing them are rejected.
inline CMat quantize(int n, const Multivector<cdouble>& mv) {
    int d = 1 << n;
    CMat out(d, d);
    const GeneratorSpace& sp = mv.space();
    if (sp.n_frame != 2 * n) throw std::invalid_argument("quantize: frame count mismatch");
    for (const auto& [mask, c] : mv.terms()) {
        if (mask & sp.aux_mask())
            throw std::invalid_argument("quantize: auxiliary generators not representable");
        CMat p = CMat::identity(d);
        uint64_t mm = mask;
        while (mm) {
            int g = std::countr_zero(mm);
            mm &= mm - 1;
            p = p * clifford_matrix(n, g + 1);
        }
        out += c * p;
    }
    return out;
}

// Full symbol: inverse of quantize. Coefficient of the monomial e^S is
// tr(c_S^{-1} M) / 2^n; Clifford monomials are trace-orthogonal.
inline Multivector<cdouble> symbol(int n, const CMat& M, GeneratorSpace sp) {
    int d = 1 << n;
    Multivector<cdouble> out(sp);
    for (uint64_t mask = 0; mask < (uint64_t(1) << (2 * n)); ++mask) {
        // c_S^{-1} = (-1)^{|S|} c(e_{ik}) ... c(e_{i1})
        CMat p = CMat::identity(d);
        for (int g = 2 * n - 1; g >= 0; --g)
            if (mask & (uint64_t(1) << g)) p = p * clifford_matrix(n, g + 1);
        int k = std::popcount(mask);
        cdouble coeff = (p * M).trace() / double(d);
        if (k & 1) coeff = -coeff;
        if (std::abs(coeff) > 0) out.add_term(mask, coeff);
    }
    return out;
}

// Graded trace on the module: + on even |S|, - on odd.
inline cdouble graded_trace(int n, const CMat& M) {
    cdouble t = 0;
    for (uint32_t s = 0; s < (1u << n); ++s)
        t += (std::popcount(s) & 1) ? -M(s, s) : M(s, s);
    return t;
}

// A Clifford-algebra element with fiber: w x w matrix of frame multivectors
// interpreted through the symbol map.
struct CliffordElement {
    int n = 1; // complex dimension; frame generators number 2n
    FormMatrix<cdouble> mat;

    CliffordElement(int n_, FormMatrix<cdouble> m) : n(n_), mat(std::move(m)) {}
    int w_dim() const { return mat.dim(); }
};

// Supertrace via the symbol: (-2i)^n * (coefficient of e^1^...^e^{2n} of the
// symbol) * fiber trace.
inline cdouble supertrace(const CliffordElement& x) {
    const GeneratorSpace& sp = x.mat.space();
    uint64_t top = sp.frame_mask();
    cdouble fiber = 0;
    for (int k = 0; k < x.w_dim(); ++k) fiber += x.mat(k, k).coeff(top);
    cdouble pref = 1;
    for (int k = 0; k < x.n; ++k) pref *= cdouble(0, -2);
    return pref * fiber;
}

// Supertrace via the explicit matrix representation (oracle route): quantize
// each fiber diagonal entry and take the graded trace.
inline cdouble supertrace_matrix_route(const CliffordElement& x) {
    cdouble t = 0;
    for (int k = 0; k < x.w_dim(); ++k) t += graded_trace(x.n, quantize(x.n, x.mat(k, k)));
    return t;
}

} // namespace cmt

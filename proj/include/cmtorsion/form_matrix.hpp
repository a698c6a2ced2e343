#pragma once

// Square matrices whose entries are multivectors. The characteristic-class
// calculus only ever feeds these matrices with even-degree entries, which
// commute pairwise and are nilpotent in positive degree, so power series in
// the non-scalar part terminate exactly.

#include <stdexcept>
#include <vector>

#include "multivector.hpp"
#include "series.hpp"

namespace cmt {

template <class R>
class FormMatrix {
public:
    using MV = Multivector<R>;

    FormMatrix() : dim_(0) {}
    FormMatrix(GeneratorSpace space, int dim)
        : space_(space), dim_(dim), e_(size_t(dim) * dim, MV(space)) {}

    static FormMatrix identity(GeneratorSpace space, int dim) {
        FormMatrix m(space, dim);
        for (int i = 0; i < dim; ++i) m(i, i) = MV(space, ring_traits<R>::one());
        return m;
    }
    static FormMatrix scalar(GeneratorSpace space, int dim, const R& c) {
        FormMatrix m(space, dim);
        for (int i = 0; i < dim; ++i) m(i, i) = MV(space, c);
        return m;
    }

    int dim() const { return dim_; }
    const GeneratorSpace& space() const { return space_; }

    MV& operator()(int i, int j) { return e_[size_t(i) * dim_ + j]; }
    const MV& operator()(int i, int j) const { return e_[size_t(i) * dim_ + j]; }

    friend FormMatrix operator+(const FormMatrix& a, const FormMatrix& b) {
        a.check(b);
        FormMatrix r(a.space_, a.dim_);
        for (size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = a.e_[k] + b.e_[k];
        return r;
    }
    friend FormMatrix operator-(const FormMatrix& a, const FormMatrix& b) {
        a.check(b);
        FormMatrix r(a.space_, a.dim_);
        for (size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = a.e_[k] - b.e_[k];
        return r;
    }
    FormMatrix operator-() const {
        FormMatrix r(space_, dim_);
        for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = -e_[k];
        return r;
    }
    friend FormMatrix operator*(const FormMatrix& a, const FormMatrix& b) {
        a.check(b);
        FormMatrix r(a.space_, a.dim_);
        for (int i = 0; i < a.dim_; ++i)
            for (int k = 0; k < a.dim_; ++k) {
                if (a(i, k).is_zero()) continue;
                for (int j = 0; j < a.dim_; ++j) {
                    if (b(k, j).is_zero()) continue;
                    r(i, j) += a(i, k) * b(k, j);
                }
            }
        return r;
    }
    friend FormMatrix operator*(const MV& s, const FormMatrix& a) {
        FormMatrix r(a.space_, a.dim_);
        for (size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = s * a.e_[k];
        return r;
    }
    friend FormMatrix operator*(const R& s, const FormMatrix& a) {
        FormMatrix r(a.space_, a.dim_);
        for (size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = s * a.e_[k];
        return r;
    }
    FormMatrix& operator+=(const FormMatrix& o) { return *this = *this + o; }

    MV trace() const {
        MV t(space_);
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    bool is_zero() const {
        for (const auto& m : e_)
            if (!m.is_zero()) return false;
        return true;
    }

    double sup_norm() const {
        double v = 0;
        for (const auto& m : e_) v = std::max(v, m.sup_norm());
        return v;
    }

    FormMatrix strip_scalar(const R& c) const {
        FormMatrix r = *this;
        for (int i = 0; i < dim_; ++i) r(i, i) = r(i, i) - MV(space_, c);
        return r;
    }

private:
    GeneratorSpace space_;
    int dim_;
    std::vector<MV> e_;

    void check(const FormMatrix& o) const {
        if (dim_ != o.dim_ || space_ != o.space_)
            throw std::invalid_argument("FormMatrix: mismatched shapes or spaces");
    }
};

// Evaluate a scalar power series on M = cI + N, where c is the mean of the
// degree-0 diagonal (the scalar part must be c I plus a nilpotent matrix,
// e.g. strictly triangular numeric entries are fine). The series is
// recentered at c; the sum in N terminates exactly because positive-degree
// entries are nilpotent forms and any numeric remainder must be nilpotent
// as a matrix, which the termination check enforces.
template <class R>
FormMatrix<R> mat_series(const Series<R>& f, const FormMatrix<R>& M) {
    R c = ring_traits<R>::zero();
    for (int i = 0; i < M.dim(); ++i) c += M(i, i).scalar_part();
    c = c * ring_traits<R>::inv_int(M.dim());
    Series<R> g = ring_traits<R>::is_zero(c) ? f : series_recenter(f, c);
    FormMatrix<R> N = M.strip_scalar(c);
    FormMatrix<R> acc = FormMatrix<R>::scalar(M.space(), M.dim(), g.c[0]);
    FormMatrix<R> P = FormMatrix<R>::identity(M.space(), M.dim());
    for (int k = 1; k <= g.order(); ++k) {
        P = P * N;
        if (P.is_zero()) return acc;
        acc += g.c[k] * P;
    }
    if (!(P * N).is_zero())
        throw std::domain_error(
            "mat_series: scalar part is not a multiple of the identity plus nilpotent");
    return acc;
}

// exp(M) with the scalar part handled exactly: exp(c) times the terminating
// series on M - cI. Unlike generic mat_series this stays valid for scalar
// parts of any size. Termination tolerates a roundoff-floor remainder when
// the stripped scalar part was only numerically a multiple of the identity.
template <class R>
FormMatrix<R> mat_exp(const FormMatrix<R>& M, int order_hint = 0) {
    int K = order_hint > 0 ? order_hint
                           : 2 * M.space().n_frame + M.space().q_cap + M.dim() + 8;
    R c = ring_traits<R>::zero();
    for (int i = 0; i < M.dim(); ++i) c += M(i, i).scalar_part();
    c = c * ring_traits<R>::inv_int(M.dim());
    FormMatrix<R> N = M.strip_scalar(c);
    double scale = std::max(1.0, N.sup_norm());
    FormMatrix<R> acc = FormMatrix<R>::identity(M.space(), M.dim());
    FormMatrix<R> P = acc;
    bool done = false;
    for (int k = 1; k <= K; ++k) {
        P = ring_traits<R>::inv_int(k) * (P * N);
        if (P.is_zero() || P.sup_norm() < 1e-15 * scale) { done = true; break; }
        acc += P;
    }
    if (!done && !(P * N).is_zero() && (P * N).sup_norm() > 1e-14 * scale)
        throw std::domain_error("mat_exp: scalar part is not a multiple of the identity plus nilpotent");
    if (!ring_traits<R>::is_zero(c)) acc = ring_traits<R>::exp_scalar(c) * acc;
    return acc;
}

// Determinant by Leibniz expansion; valid for commuting (even) entries.
template <class R>
Multivector<R> det_leibniz(const FormMatrix<R>& M) {
    int n = M.dim();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    Multivector<R> det(M.space());
    // iterate permutations with sign tracking
    std::vector<int> c(n, 0);
    int sign = 1;
    auto add_term = [&](int sg) {
        Multivector<R> p(M.space(), ring_traits<R>::one());
        for (int i = 0; i < n; ++i) p = p * M(i, perm[i]);
        det += sg > 0 ? p : -p;
    };
    add_term(sign);
    int i = 0;
    while (i < n) {
        if (c[i] < i) {
            if (i % 2 == 0) std::swap(perm[0], perm[i]);
            else std::swap(perm[c[i]], perm[i]);
            sign = -sign;
            add_term(sign);
            c[i]++;
            i = 0;
        } else {
            c[i++] = 0;
        }
    }
    return det;
}

// Elementary symmetric functions e_p(M) = coefficient of t^p in det(I + tM),
// by Newton's identities on power-sum traces. Requires commuting entries.
template <class R>
std::vector<Multivector<R>> elementary_symmetric_all(const FormMatrix<R>& M) {
    int n = M.dim();
    std::vector<Multivector<R>> p(n + 1, Multivector<R>(M.space()));
    FormMatrix<R> P = M;
    for (int k = 1; k <= n; ++k) {
        p[k] = P.trace();
        if (k < n) P = P * M;
    }
    std::vector<Multivector<R>> e(n + 1, Multivector<R>(M.space()));
    e[0] = Multivector<R>(M.space(), ring_traits<R>::one());
    for (int k = 1; k <= n; ++k) {
        Multivector<R> s(M.space());
        for (int i = 1; i <= k; ++i) {
            Multivector<R> term = e[k - i] * p[i];
            s += (i & 1) ? term : -term;
        }
        e[k] = ring_traits<R>::inv_int(k) * s;
    }
    return e;
}

} // namespace cmt

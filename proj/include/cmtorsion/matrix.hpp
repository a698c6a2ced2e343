#pragma once

// Small dense complex linear algebra: exactly what the spectral models and
// oracles need, nothing more. Sizes stay in the hundreds, so the cyclic
// Jacobi eigensolver and series matrix exponential are the right tools.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "scalar.hpp"

namespace cmt {

class CMat {
public:
    CMat() : n_(0), m_(0) {}
    CMat(int rows, int cols) : n_(rows), m_(cols), a_(size_t(rows) * cols) {}

    static CMat identity(int n) {
        CMat I(n, n);
        for (int i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }

    int rows() const { return n_; }
    int cols() const { return m_; }

    cdouble& operator()(int i, int j) { return a_[size_t(i) * m_ + j]; }
    const cdouble& operator()(int i, int j) const { return a_[size_t(i) * m_ + j]; }

    friend CMat operator+(const CMat& a, const CMat& b) {
        CMat r(a.n_, a.m_);
        for (size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = a.a_[k] + b.a_[k];
        return r;
    }
    friend CMat operator-(const CMat& a, const CMat& b) {
        CMat r(a.n_, a.m_);
        for (size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = a.a_[k] - b.a_[k];
        return r;
    }
    friend CMat operator*(const cdouble& s, const CMat& a) {
        CMat r(a.n_, a.m_);
        for (size_t k = 0; k < a.a_.size(); ++k) r.a_[k] = s * a.a_[k];
        return r;
    }
    friend CMat operator*(const CMat& a, const CMat& b) {
        if (a.m_ != b.n_) throw std::invalid_argument("CMat: shape mismatch");
        CMat r(a.n_, b.m_);
        for (int i = 0; i < a.n_; ++i)
            for (int k = 0; k < a.m_; ++k) {
                cdouble aik = a(i, k);
                if (aik == cdouble(0)) continue;
                for (int j = 0; j < b.m_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }
    CMat& operator+=(const CMat& o) { return *this = *this + o; }
    CMat& operator-=(const CMat& o) { return *this = *this - o; }

    cdouble trace() const {
        cdouble t = 0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    CMat transpose() const {
        CMat r(m_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < m_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }
    CMat adjoint() const {
        CMat r(m_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < m_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    double max_abs() const {
        double v = 0;
        for (const auto& z : a_) v = std::max(v, std::abs(z));
        return v;
    }

private:
    int n_, m_;
    std::vector<cdouble> a_;
};

// exp(A) by scaling and squaring with a plain Taylor series on the scaled
// matrix; fine at these sizes and norms.
inline CMat expm(const CMat& A) {
    int n = A.rows();
    double nrm = A.max_abs() * n;
    int s = 0;
    while (nrm > 0.5) { nrm *= 0.5; ++s; }
    CMat X = std::pow(0.5, s) * A;
    CMat term = CMat::identity(n), sum = CMat::identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = cdouble(1.0 / k) * (term * X);
        sum += term;
        if (term.max_abs() < 1e-18) break;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi with complex
// rotations: A = V diag(ev) V^*. Eigenvalues come back ascending with the
// matching eigenvector columns; pass vectors = nullptr to skip accumulation.
inline std::vector<double> hermitian_eigen(CMat A, CMat* vectors, int max_sweeps = 60) {
    int n = A.rows();
    if (A.cols() != n) throw std::invalid_argument("hermitian_eigen: not square");
    CMat V = CMat::identity(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(A(p, q));
        if (off < 1e-26 * std::max(1, n)) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                cdouble apq = A(p, q);
                double a = std::abs(apq);
                if (a < 1e-300) continue;
                cdouble phase = apq / a;
                double app = A(p, p).real(), aqq = A(q, q).real();
                // annihilates A(p,q) for U = [[c, s phase], [-s conj(phase), c]]
                double theta = 0.5 * std::atan2(2.0 * a, aqq - app);
                double c = std::cos(theta), s = std::sin(theta);
                cdouble sp = s * phase;
                // A <- U^* A U with U = [[c, sp],[-conj(sp), c]] acting on (p,q)
                for (int k = 0; k < n; ++k) {
                    cdouble akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - std::conj(sp) * akq;
                    A(k, q) = sp * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    cdouble apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - sp * aqk;
                    A(q, k) = std::conj(sp) * apk + c * aqk;
                }
                if (vectors) {
                    for (int k = 0; k < n; ++k) {
                        cdouble vkp = V(k, p), vkq = V(k, q);
                        V(k, p) = c * vkp - std::conj(sp) * vkq;
                        V(k, q) = sp * vkp + c * vkq;
                    }
                }
            }
        }
    }
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int i, int j) { return A(i, i).real() < A(j, j).real(); });
    std::vector<double> ev(n);
    CMat Vs(n, n);
    for (int j = 0; j < n; ++j) {
        ev[j] = A(idx[j], idx[j]).real();
        for (int i = 0; i < n; ++i) Vs(i, j) = V(i, idx[j]);
    }
    if (vectors) *vectors = Vs;
    return ev;
}

inline std::vector<double> hermitian_eigenvalues(const CMat& A, int max_sweeps = 60) {
    return hermitian_eigen(A, nullptr, max_sweeps);
}

// Characteristic-polynomial coefficients by Faddeev-LeVerrier:
// det(tI - A) = t^n + c[1] t^{n-1} + ... + c[n]. Elementary symmetric
// functions follow as e_k = (-1)^k c[k].
inline std::vector<cdouble> char_poly(const CMat& A) {
    int n = A.rows();
    std::vector<cdouble> c(n + 1);
    c[0] = 1.0;
    CMat M = CMat::identity(n);
    for (int k = 1; k <= n; ++k) {
        M = A * M;
        c[k] = -M.trace() / double(k);
        for (int i = 0; i < n; ++i) M(i, i) += c[k];
    }
    return c;
}

inline cdouble elementary_symmetric(const CMat& A, int p) {
    auto c = char_poly(A);
    cdouble e = c[p];
    if (p & 1) e = -e;
    return e;
}

// Least squares min ||A x - b|| by Householder QR; A is real-valued here in
// all uses but kept complex for uniformity. Also reports an estimate of the
// condition number of R's diagonal.
inline std::vector<cdouble> least_squares(CMat A, std::vector<cdouble> b, double* cond = nullptr) {
    int n = A.rows(), m = A.cols();
    if ((int)b.size() != n || n < m) throw std::invalid_argument("least_squares: bad shapes");
    for (int k = 0; k < m; ++k) {
        double alpha = 0;
        for (int i = k; i < n; ++i) alpha += std::norm(A(i, k));
        alpha = std::sqrt(alpha);
        if (alpha == 0) throw std::domain_error("least_squares: rank deficient");
        cdouble akk = A(k, k);
        cdouble phase = (std::abs(akk) > 0) ? akk / std::abs(akk) : cdouble(1);
        cdouble vk = akk + phase * alpha;
        std::vector<cdouble> v(n - k);
        v[0] = vk;
        for (int i = k + 1; i < n; ++i) v[i - k] = A(i, k);
        double vv = 0;
        for (auto& z : v) vv += std::norm(z);
        for (int j = k; j < m; ++j) {
            cdouble dot = 0;
            for (int i = k; i < n; ++i) dot += std::conj(v[i - k]) * A(i, j);
            cdouble f = 2.0 * dot / vv;
            for (int i = k; i < n; ++i) A(i, j) -= f * v[i - k];
        }
        cdouble dotb = 0;
        for (int i = k; i < n; ++i) dotb += std::conj(v[i - k]) * b[i];
        cdouble fb = 2.0 * dotb / vv;
        for (int i = k; i < n; ++i) b[i] -= fb * v[i - k];
    }
    if (cond) {
        double dmax = 0, dmin = 1e300;
        for (int k = 0; k < m; ++k) {
            double d = std::abs(A(k, k));
            dmax = std::max(dmax, d);
            dmin = std::min(dmin, d);
        }
        *cond = (dmin > 0) ? dmax / dmin : 1e300;
    }
    std::vector<cdouble> x(m);
    for (int k = m - 1; k >= 0; --k) {
        cdouble s = b[k];
        for (int j = k + 1; j < m; ++j) s -= A(k, j) * x[j];
        x[k] = s / A(k, k);
    }
    return x;
}

} // namespace cmt

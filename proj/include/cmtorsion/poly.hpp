#pragma once

// Multivariate polynomials in x_1..x_d with coefficients in an arbitrary
// ring (numbers, multivectors, or matrices of either). Exponent vectors are
// packed 8 bits per variable, which is far beyond the degrees the transport
// recursions produce.

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "multivector.hpp"

namespace cmt {

// coefficient shims ---------------------------------------------------------
inline bool coeff_is_zero(const cdouble& c) { return c == cdouble(0); }
inline double coeff_norm(const cdouble& c) { return std::abs(c); }
inline cdouble coeff_scale(const cdouble& c, double s) { return c * s; }
template <class R>
bool coeff_is_zero(const Multivector<R>& c) { return c.is_zero(); }
template <class R>
double coeff_norm(const Multivector<R>& c) { return c.sup_norm(); }
template <class R>
Multivector<R> coeff_scale(const Multivector<R>& c, double s) {
    return ring_traits<R>::from_double(s) * c;
}

template <class C>
class Poly {
public:
    using Key = uint64_t; // 8 bits per variable, up to 8 variables

    Poly() : d_(0) {}
    explicit Poly(int dim) : d_(dim) {
        if (dim > 8) throw std::invalid_argument("Poly: at most 8 variables");
    }
    Poly(int dim, const C& constant) : d_(dim) {
        if (!coeff_is_zero(constant)) terms_[0] = constant;
    }

    static Key key(const std::vector<int>& exps) {
        Key k = 0;
        for (size_t i = 0; i < exps.size(); ++i) k |= Key(exps[i] & 0xff) << (8 * i);
        return k;
    }
    static int exp_of(Key k, int var) { return int((k >> (8 * var)) & 0xff); }
    static int total_degree(Key k) {
        int d = 0;
        while (k) { d += int(k & 0xff); k >>= 8; }
        return d;
    }

    int dim() const { return d_; }
    const std::map<Key, C>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(Key k, const C& c) {
        if (coeff_is_zero(c)) return;
        auto [it, fresh] = terms_.try_emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (coeff_is_zero(it->second)) terms_.erase(it);
        }
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r = a;
        if (r.d_ == 0) r.d_ = b.d_;
        for (const auto& [k, c] : b.terms_) r.add_term(k, c);
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
    Poly operator-() const {
        Poly r(d_);
        for (const auto& [k, c] : terms_) r.terms_[k] = -c;
        return r;
    }
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r(a.d_ ? a.d_ : b.d_);
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) r.add_term(add_keys(ka, kb), ca * cb);
        return r;
    }
    friend Poly operator*(const C& s, const Poly& a) {
        Poly r(a.d_);
        for (const auto& [k, c] : a.terms_) r.add_term(k, s * c);
        return r;
    }

    Poly scaled(double s) const {
        Poly r(d_);
        for (const auto& [k, c] : terms_) r.add_term(k, coeff_scale(c, s));
        return r;
    }

    Poly derivative(int var) const {
        Poly r(d_);
        for (const auto& [k, c] : terms_) {
            int e = exp_of(k, var);
            if (e == 0) continue;
            r.add_term(k - (Key(1) << (8 * var)), coeff_scale(c, double(e)));
        }
        return r;
    }

    Poly mul_x(int var) const {
        Poly r(d_);
        for (const auto& [k, c] : terms_) r.add_term(k + (Key(1) << (8 * var)), c);
        return r;
    }

    Poly degree_component(int deg) const {
        Poly r(d_);
        for (const auto& [k, c] : terms_)
            if (total_degree(k) == deg) r.terms_[k] = c;
        return r;
    }

    int max_degree() const {
        int d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, total_degree(k));
        return d;
    }

    C eval(const std::vector<double>& x, const C& zero) const {
        C acc = zero;
        for (const auto& [k, c] : terms_) {
            double m = 1;
            for (int v = 0; v < d_; ++v) {
                int e = exp_of(k, v);
                for (int j = 0; j < e; ++j) m *= x[v];
            }
            acc += coeff_scale(c, m);
        }
        return acc;
    }

    double sup_norm() const {
        double n = 0;
        for (const auto& [k, c] : terms_) n = std::max(n, coeff_norm(c));
        return n;
    }

private:
    int d_;
    std::map<Key, C> terms_;

    static Key add_keys(Key a, Key b) { return a + b; } // no per-slot overflow at our degrees
};

// Square matrix of polynomials; the generic container used by the transport
// recursion and the rescaled-operator checks.
template <class C>
class PolyMat {
public:
    PolyMat() : dim_(0), vars_(0) {}
    PolyMat(int dim, int vars) : dim_(dim), vars_(vars), e_(size_t(dim) * dim, Poly<C>(vars)) {}

    static PolyMat identity(int dim, int vars, const C& one) {
        PolyMat m(dim, vars);
        for (int i = 0; i < dim; ++i) m(i, i) = Poly<C>(vars, one);
        return m;
    }

    int dim() const { return dim_; }
    int vars() const { return vars_; }

    Poly<C>& operator()(int i, int j) { return e_[size_t(i) * dim_ + j]; }
    const Poly<C>& operator()(int i, int j) const { return e_[size_t(i) * dim_ + j]; }

    friend PolyMat operator+(const PolyMat& a, const PolyMat& b) {
        PolyMat r(a.dim_, a.vars_);
        for (size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = a.e_[k] + b.e_[k];
        return r;
    }
    friend PolyMat operator-(const PolyMat& a, const PolyMat& b) {
        PolyMat r(a.dim_, a.vars_);
        for (size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = a.e_[k] - b.e_[k];
        return r;
    }
    PolyMat operator-() const {
        PolyMat r(dim_, vars_);
        for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = -e_[k];
        return r;
    }
    friend PolyMat operator*(const PolyMat& a, const PolyMat& b) {
        PolyMat r(a.dim_, a.vars_);
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
    friend PolyMat operator*(const Poly<C>& s, const PolyMat& a) {
        PolyMat r(a.dim_, a.vars_);
        for (size_t k = 0; k < a.e_.size(); ++k) r.e_[k] = s * a.e_[k];
        return r;
    }
    PolyMat& operator+=(const PolyMat& o) { return *this = *this + o; }
    PolyMat& operator-=(const PolyMat& o) { return *this = *this - o; }

    PolyMat scaled(double s) const {
        PolyMat r(dim_, vars_);
        for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k].scaled(s);
        return r;
    }

    PolyMat derivative(int var) const {
        PolyMat r(dim_, vars_);
        for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k].derivative(var);
        return r;
    }

    PolyMat degree_component(int deg) const {
        PolyMat r(dim_, vars_);
        for (size_t k = 0; k < e_.size(); ++k) r.e_[k] = e_[k].degree_component(deg);
        return r;
    }

    int max_degree() const {
        int d = 0;
        for (const auto& p : e_) d = std::max(d, p.max_degree());
        return d;
    }

    double sup_norm() const {
        double n = 0;
        for (const auto& p : e_) n = std::max(n, p.sup_norm());
        return n;
    }

    bool is_zero() const {
        for (const auto& p : e_)
            if (!p.is_zero()) return false;
        return true;
    }

private:
    int dim_, vars_;
    std::vector<Poly<C>> e_;
};

} // namespace cmt

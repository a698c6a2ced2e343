#pragma once

// Scalar-ring abstraction for the graded algebra. The algebra layer is
// parametric over the coefficient ring: std::complex<double> for numerics,
// Cx<Rational> for exact sign bookkeeping, Dual<...> for derivative
// extraction. ring_traits<R> supplies the handful of operations the
// containers need beyond +,-,*.

#include <cmath>
#include <complex>
#include <string>

#include "rational.hpp"

namespace cmt {

using cdouble = std::complex<double>;

// Generic complex pair over an arbitrary commutative ring.
template <class T>
struct Cx {
    T re{}, im{};

    Cx() = default;
    Cx(T r) : re(std::move(r)), im(T(0)) {}
    Cx(T r, T i) : re(std::move(r)), im(std::move(i)) {}

    friend Cx operator+(const Cx& a, const Cx& b) { return {a.re + b.re, a.im + b.im}; }
    friend Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
    friend Cx operator*(const Cx& a, const Cx& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    Cx operator-() const { return {-re, -im}; }
    Cx& operator+=(const Cx& o) { return *this = *this + o; }
    Cx& operator-=(const Cx& o) { return *this = *this - o; }
    Cx& operator*=(const Cx& o) { return *this = *this * o; }
    friend bool operator==(const Cx& a, const Cx& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Cx& a, const Cx& b) { return !(a == b); }
};

using CxQ = Cx<Rational>;

template <class R>
struct ring_traits;

template <>
struct ring_traits<std::complex<double>> {
    using R = std::complex<double>;
    static R zero() { return {0.0, 0.0}; }
    static R one() { return {1.0, 0.0}; }
    static R from_int(long long n) { return {double(n), 0.0}; }
    static R from_double(double x) { return {x, 0.0}; }
    static R inv_int(long long n) { return {1.0 / double(n), 0.0}; }
    static R imag_unit() { return {0.0, 1.0}; }
    static R exp_scalar(const R& x) { return std::exp(x); }
    static bool is_zero(const R& x) { return x.real() == 0.0 && x.imag() == 0.0; }
    static double norm(const R& x) { return std::abs(x); }
    static std::string str(const R& x) {
        return "(" + std::to_string(x.real()) + "," + std::to_string(x.imag()) + ")";
    }
};

template <>
struct ring_traits<CxQ> {
    using R = CxQ;
    static R zero() { return {Rational(0), Rational(0)}; }
    static R one() { return {Rational(1), Rational(0)}; }
    static R from_int(long long n) { return {Rational(n), Rational(0)}; }
    static R inv_int(long long n) { return {Rational(1, n), Rational(0)}; }
    static R imag_unit() { return {Rational(0), Rational(1)}; }
    static R exp_scalar(const R&) {
        throw std::domain_error("exp_scalar: transcendental value has no exact rational form");
    }
    static bool is_zero(const R& x) { return x.re == Rational(0) && x.im == Rational(0); }
    static double norm(const R& x) {
        double a = x.re.to_double(), b = x.im.to_double();
        return std::sqrt(a * a + b * b);
    }
    static std::string str(const R& x) { return "(" + x.re.str() + "," + x.im.str() + ")"; }
};

} // namespace cmt

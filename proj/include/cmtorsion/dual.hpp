#pragma once

// First-order dual numbers a + eps*b with eps^2 = 0. Adjoining eps to the
// coefficient ring turns any polynomial evaluation into an exact directional
// derivative; this is how the b-derivative of td_p is computed without
// finite differencing.

#include "scalar.hpp"

namespace cmt {

template <class T>
struct Dual {
    T val{}, der{};

    Dual() = default;
    Dual(T v) : val(std::move(v)), der(T(0)) {}
    Dual(T v, T d) : val(std::move(v)), der(std::move(d)) {}

    friend Dual operator+(const Dual& a, const Dual& b) { return {a.val + b.val, a.der + b.der}; }
    friend Dual operator-(const Dual& a, const Dual& b) { return {a.val - b.val, a.der - b.der}; }
    friend Dual operator*(const Dual& a, const Dual& b) {
        return {a.val * b.val, a.val * b.der + a.der * b.val};
    }
    Dual operator-() const { return {-val, -der}; }
    Dual& operator+=(const Dual& o) { return *this = *this + o; }
    Dual& operator-=(const Dual& o) { return *this = *this - o; }
    Dual& operator*=(const Dual& o) { return *this = *this * o; }
    friend bool operator==(const Dual& a, const Dual& b) { return a.val == b.val && a.der == b.der; }
    friend bool operator!=(const Dual& a, const Dual& b) { return !(a == b); }
};

using DualC = Dual<std::complex<double>>;

template <>
struct ring_traits<DualC> {
    using R = DualC;
    using B = ring_traits<std::complex<double>>;
    static R zero() { return {B::zero(), B::zero()}; }
    static R one() { return {B::one(), B::zero()}; }
    static R from_int(long long n) { return {B::from_int(n), B::zero()}; }
    static R from_double(double x) { return {B::from_double(x), B::zero()}; }
    static R inv_int(long long n) { return {B::inv_int(n), B::zero()}; }
    static R imag_unit() { return {B::imag_unit(), B::zero()}; }
    static R exp_scalar(const R& x) {
        auto e = B::exp_scalar(x.val);
        return {e, e * x.der};
    }
    static bool is_zero(const R& x) { return B::is_zero(x.val) && B::is_zero(x.der); }
    static double norm(const R& x) { return B::norm(x.val) + B::norm(x.der); }
    static std::string str(const R& x) { return B::str(x.val) + "+eps*" + B::str(x.der); }
};

} // namespace cmt

#pragma once

// Grading-weighted rescaling of multivector-valued functions of (t, x):
//   (delta_eps f)(t, x) = sum_i eps^{-i} f(eps^2 t, eps x)_{[i]}
// where [i] is the frame-degree component. Auxiliary degree is untouched.

#include <cmath>
#include <functional>
#include <vector>

#include "multivector.hpp"

namespace cmt {

template <class R>
using MVFunction = std::function<Multivector<R>(double, const std::vector<double>&)>;

template <class R>
MVFunction<R> getzler_rescale(double eps, MVFunction<R> f) {
    return [eps, f = std::move(f)](double t, const std::vector<double>& x) {
        std::vector<double> sx(x.size());
        for (size_t i = 0; i < x.size(); ++i) sx[i] = eps * x[i];
        Multivector<R> v = f(eps * eps * t, sx);
        Multivector<R> out(v.space());
        for (const auto& [m, c] : v.terms()) {
            int i = Multivector<R>::frame_degree(v.space(), m);
            out.add_term(m, c * ring_traits<R>::from_double(std::pow(eps, -i)));
        }
        return out;
    };
}

// Exact weight that delta_eps applies to a monomial term t^a x^B m with
// |B| = x_degree and frame degree i: eps^{2a + |B|} * inv_eps^{i}.
// Caller supplies inv_eps so rational arithmetic stays exact.
template <class R>
R getzler_monomial_weight(const R& eps, const R& inv_eps, int t_pow, int x_degree,
                          int frame_degree) {
    R w = ring_traits<R>::one();
    for (int k = 0; k < 2 * t_pow + x_degree; ++k) w = w * eps;
    for (int k = 0; k < frame_degree; ++k) w = w * inv_eps;
    return w;
}

} // namespace cmt

#pragma once

// Flat model geometries: circles, flat tori from a modulus, and products.
// Everything is a quotient of R^d by a lattice with the Euclidean metric;
// geodesics are straight lines mod lattice and j(x) = 1 identically.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "matrix.hpp"

namespace cmt {

struct ModelGeometry {
    int dim = 1;
    std::vector<std::vector<double>> lattice; // rows are generators
    std::vector<double> char_alpha;           // holonomy exponent per generator

    static ModelGeometry circle(double circumference, double alpha = 0.0) {
        ModelGeometry g;
        g.dim = 1;
        g.lattice = {{circumference}};
        g.char_alpha = {alpha};
        return g;
    }

    // Flat torus C/(Z + tau Z) with metric lambda |dz|^2, i.e. Euclidean
    // R^2 / sqrt(lambda)(Z + tau Z). Character e^{2 pi i (alpha m + beta k)}
    // on the lattice vector m + tau k.
    static ModelGeometry torus(cdouble tau, double lambda, double alpha, double beta) {
        if (!(tau.imag() > 0) || !(lambda > 0))
            throw std::invalid_argument("ModelGeometry::torus: need Im tau > 0, lambda > 0");
        double s = std::sqrt(lambda);
        ModelGeometry g;
        g.dim = 2;
        g.lattice = {{s, 0.0}, {s * tau.real(), s * tau.imag()}};
        g.char_alpha = {alpha, beta};
        return g;
    }

    static ModelGeometry product(const ModelGeometry& a, const ModelGeometry& b) {
        ModelGeometry g;
        g.dim = a.dim + b.dim;
        for (const auto& v : a.lattice) {
            std::vector<double> w(g.dim, 0.0);
            for (int i = 0; i < a.dim; ++i) w[i] = v[i];
            g.lattice.push_back(w);
        }
        for (const auto& v : b.lattice) {
            std::vector<double> w(g.dim, 0.0);
            for (int i = 0; i < b.dim; ++i) w[a.dim + i] = v[i];
            g.lattice.push_back(w);
        }
        g.char_alpha = a.char_alpha;
        g.char_alpha.insert(g.char_alpha.end(), b.char_alpha.begin(), b.char_alpha.end());
        return g;
    }

    double volume() const {
        // |det| of the generator matrix (square: rank = dim)
        int d = dim;
        std::vector<std::vector<double>> m = lattice;
        double det = 1.0;
        for (int c = 0; c < d; ++c) {
            int piv = c;
            for (int r = c + 1; r < d; ++r)
                if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
            if (m[piv][c] == 0.0) return 0.0;
            if (piv != c) { std::swap(m[piv], m[c]); det = -det; }
            det *= m[c][c];
            for (int r = c + 1; r < d; ++r) {
                double f = m[r][c] / m[c][c];
                for (int k = c; k < d; ++k) m[r][k] -= f * m[c][k];
            }
        }
        return std::abs(det);
    }

    double shortest_vector() const {
        double best = 1e300;
        enumerate_images(2, [&](const std::vector<double>& v, double /*chi_re*/, double /*chi_im*/) {
            double n2 = 0;
            for (double c : v) n2 += c * c;
            if (n2 > 1e-18) best = std::min(best, std::sqrt(n2));
        });
        return best;
    }

    double injectivity_radius() const { return 0.5 * shortest_vector(); }

    // Apply f to lattice vectors with integer coefficients in [-K,K]^rank,
    // passing the character value chi = e^{2 pi i sum k_j alpha_j}.
    template <class F>
    void enumerate_images(int K, F&& f) const {
        int rank = int(lattice.size());
        std::vector<int> k(rank, -K);
        while (true) {
            std::vector<double> v(dim, 0.0);
            double phase = 0;
            for (int j = 0; j < rank; ++j) {
                for (int i = 0; i < dim; ++i) v[i] += k[j] * lattice[j][i];
                phase += k[j] * char_alpha[j];
            }
            f(v, std::cos(2 * M_PI * phase), std::sin(2 * M_PI * phase));
            int j = 0;
            while (j < rank && k[j] == K) { k[j] = -K; ++j; }
            if (j == rank) break;
            ++k[j];
        }
    }

    // Wrapped difference: representative of x - y of minimal norm.
    std::vector<double> wrapped_diff(const std::vector<double>& x,
                                     const std::vector<double>& y, int K = 3) const {
        std::vector<double> d(dim);
        for (int i = 0; i < dim; ++i) d[i] = x[i] - y[i];
        std::vector<double> best = d;
        double bn = 1e300;
        enumerate_images(K, [&](const std::vector<double>& v, double, double) {
            double n2 = 0;
            std::vector<double> c(dim);
            for (int i = 0; i < dim; ++i) { c[i] = d[i] + v[i]; n2 += c[i] * c[i]; }
            if (n2 < bn) { bn = n2; best = c; }
        });
        return best;
    }

    double dist(const std::vector<double>& x, const std::vector<double>& y) const {
        auto d = wrapped_diff(x, y);
        double n2 = 0;
        for (double c : d) n2 += c * c;
        return std::sqrt(n2);
    }
};

} // namespace cmt

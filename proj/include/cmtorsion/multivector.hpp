#pragma once

// Graded algebra generated by real frame covectors e^1..e^{2n}, auxiliary
// Grassmann parameters th_1..th_iota, and optionally the pair da, dab.
// All generators mutually anticommute; products with more than q_cap
// auxiliary generators are truncated to zero. Terms are stored as a sorted
// map from generator bitmasks to coefficients, so every element has a unique
// normal form and equality is exact.
//
// Canonical generator order: frame block (ascending), theta block
// (ascending), then da, then dab. Bit g of a mask selects generator g in
// that order. The bilinear pairing used by the Clifford action is the
// C-bilinear one, not the Hermitian one.

#include <bit>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "scalar.hpp"

namespace cmt {

struct GeneratorSpace {
    int n_frame = 0;       // count of frame covectors e^1..e^{2n}
    int n_theta = 0;       // count of auxiliary parameters th_j
    bool has_da_dabar = false;
    int q_cap = 0;         // max total degree in auxiliary generators

    GeneratorSpace() = default;
    GeneratorSpace(int nf, int nt, bool da, int cap)
        : n_frame(nf), n_theta(nt), has_da_dabar(da), q_cap(cap) {
        if (nf < 0 || nt < 0 || total() > 62)
            throw std::invalid_argument("GeneratorSpace: unsupported generator count");
    }

    static GeneratorSpace frames(int nf) { return GeneratorSpace(nf, 0, false, 0); }
    // q_cap defaults to 2 when the auxiliary set is exactly {da,dab}.
    static GeneratorSpace frames_da(int nf) { return GeneratorSpace(nf, 0, true, 2); }
    static GeneratorSpace frames_thetas(int nf, int nt, int cap) {
        return GeneratorSpace(nf, nt, false, cap);
    }
    static GeneratorSpace full(int nf, int nt, int cap) {
        return GeneratorSpace(nf, nt, true, cap);
    }

    int total() const { return n_frame + n_theta + (has_da_dabar ? 2 : 0); }
    int da_index() const { return n_frame + n_theta; }
    int dabar_index() const { return n_frame + n_theta + 1; }
    bool is_aux(int g) const { return g >= n_frame; }

    uint64_t frame_mask() const { return (n_frame == 0) ? 0 : ((uint64_t(1) << n_frame) - 1); }
    uint64_t all_mask() const { return (total() == 0) ? 0 : ((uint64_t(1) << total()) - 1); }
    uint64_t aux_mask() const { return all_mask() & ~frame_mask(); }

    friend bool operator==(const GeneratorSpace& a, const GeneratorSpace& b) {
        return a.n_frame == b.n_frame && a.n_theta == b.n_theta &&
               a.has_da_dabar == b.has_da_dabar && a.q_cap == b.q_cap;
    }
    friend bool operator!=(const GeneratorSpace& a, const GeneratorSpace& b) { return !(a == b); }

    std::string gen_name(int g) const {
        if (g < n_frame) return "e" + std::to_string(g + 1);
        if (g < n_frame + n_theta) return "th" + std::to_string(g - n_frame + 1);
        return g == da_index() ? "da" : "dab";
    }
};

template <class R>
class Multivector {
public:
    using traits = ring_traits<R>;

    Multivector() = default;
    explicit Multivector(GeneratorSpace space) : space_(space) {}
    Multivector(GeneratorSpace space, const R& scalar) : space_(space) {
        if (!traits::is_zero(scalar)) terms_[0] = scalar;
    }

    static Multivector generator(GeneratorSpace space, int g) {
        if (g < 0 || g >= space.total())
            throw std::out_of_range("Multivector::generator: index out of range");
        Multivector m(space);
        m.terms_[uint64_t(1) << g] = traits::one();
        return m;
    }
    static Multivector monomial(GeneratorSpace space, uint64_t mask, const R& coeff) {
        Multivector m(space);
        m.add_term(mask, coeff);
        return m;
    }

    const GeneratorSpace& space() const { return space_; }
    const std::map<uint64_t, R>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    R coeff(uint64_t mask) const {
        auto it = terms_.find(mask);
        return it == terms_.end() ? traits::zero() : it->second;
    }
    R scalar_part() const { return coeff(0); }

    static int frame_degree(const GeneratorSpace& s, uint64_t mask) {
        return std::popcount(mask & s.frame_mask());
    }
    static int aux_degree(const GeneratorSpace& s, uint64_t mask) {
        return std::popcount(mask & s.aux_mask());
    }

    void add_term(uint64_t mask, const R& c) {
        if (traits::is_zero(c)) return;
        auto [it, fresh] = terms_.try_emplace(mask, c);
        if (!fresh) {
            it->second += c;
            if (traits::is_zero(it->second)) terms_.erase(it);
        }
    }

    friend Multivector operator+(const Multivector& a, const Multivector& b) {
        check_spaces(a, b);
        Multivector r(a.space_.total() ? a.space_ : b.space_);
        r.terms_ = a.terms_;
        for (const auto& [m, c] : b.terms_) r.add_term(m, c);
        return r;
    }
    friend Multivector operator-(const Multivector& a, const Multivector& b) { return a + (-b); }
    Multivector operator-() const {
        Multivector r(space_);
        for (const auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }
    Multivector& operator+=(const Multivector& o) { return *this = *this + o; }
    Multivector& operator-=(const Multivector& o) { return *this = *this - o; }

    friend Multivector operator*(const R& s, const Multivector& a) {
        Multivector r(a.space_);
        for (const auto& [m, c] : a.terms_) r.add_term(m, s * c);
        return r;
    }
    friend Multivector operator*(const Multivector& a, const R& s) { return s * a; }

    // Graded product. Repeated generators vanish; auxiliary degree above
    // q_cap truncates to zero.
    friend Multivector operator*(const Multivector& a, const Multivector& b) {
        check_spaces(a, b);
        const GeneratorSpace sp = a.space_.total() ? a.space_ : b.space_;
        Multivector r(sp);
        const uint64_t aux = sp.aux_mask();
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                if (ma & mb) continue;
                uint64_t m = ma | mb;
                if (std::popcount(m & aux) > sp.q_cap) continue;
                R c = ca * cb;
                if (product_sign(ma, mb) < 0) c = -c;
                r.add_term(m, c);
            }
        }
        return r;
    }
    Multivector& operator*=(const Multivector& o) { return *this = *this * o; }

    friend bool operator==(const Multivector& a, const Multivector& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const Multivector& a, const Multivector& b) { return !(a == b); }

    // Projection onto terms of frame degree k.
    Multivector frame_component(int k) const {
        Multivector r(space_);
        for (const auto& [m, c] : terms_)
            if (frame_degree(space_, m) == k) r.terms_[m] = c;
        return r;
    }
    // Projection onto terms of auxiliary degree <= k.
    Multivector aux_truncate(int k) const {
        Multivector r(space_);
        for (const auto& [m, c] : terms_)
            if (aux_degree(space_, m) <= k) r.terms_[m] = c;
        return r;
    }

    int max_frame_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, frame_degree(space_, m));
        return d;
    }

    // Max coefficient magnitude over generator monomials (one slot each).
    double sup_norm() const {
        double n = 0;
        for (const auto& [m, c] : terms_) n = std::max(n, traits::norm(c));
        return n;
    }

    bool approx_equal(const Multivector& o, double tol) const {
        return (*this - o).sup_norm() <= tol;
    }

    // One term per line, canonical order: coeff * g1^g2^...
    std::string dump() const {
        std::ostringstream os;
        for (const auto& [m, c] : terms_) {
            os << traits::str(c);
            uint64_t mm = m;
            bool first = true;
            while (mm) {
                int g = std::countr_zero(mm);
                mm &= mm - 1;
                os << (first ? " * " : "^") << space_.gen_name(g);
                first = false;
            }
            if (m == 0) os << " * 1";
            os << "\n";
        }
        return os.str();
    }

    // Sign of merging disjoint ascending monomials a*b into ascending order:
    // (-1)^{sum over generators g of b of #(bits of a above g)}.
    static int product_sign(uint64_t ma, uint64_t mb) {
        int total = 0;
        while (mb) {
            int g = std::countr_zero(mb);
            mb &= mb - 1;
            total += std::popcount(ma >> (g + 1));
        }
        return (total & 1) ? -1 : 1;
    }

private:
    GeneratorSpace space_;
    std::map<uint64_t, R> terms_;

    static void check_spaces(const Multivector& a, const Multivector& b) {
        if (a.space_.total() && b.space_.total() && a.space_ != b.space_)
            throw std::invalid_argument("Multivector: mismatched generator spaces");
    }
};

// Interior multiplication by the frame vector dual to e^v (1-based index):
// graded derivation of degree -1 with i_v(e^v) = 1.
template <class R>
Multivector<R> interior(int v, const Multivector<R>& a) {
    const GeneratorSpace& sp = a.space();
    if (v < 1 || v > sp.n_frame)
        throw std::out_of_range("interior: frame index out of range");
    const uint64_t bit = uint64_t(1) << (v - 1);
    Multivector<R> r(sp);
    for (const auto& [m, c] : a.terms()) {
        if (!(m & bit)) continue;
        int below = std::popcount(m & (bit - 1));
        r.add_term(m & ~bit, (below & 1) ? -c : c);
    }
    return r;
}

// Symbol-level Clifford action c(e^v) = e^v ^ . - i_{e_v}.
template <class R>
Multivector<R> clifford_symbol(int v, const Multivector<R>& a) {
    const GeneratorSpace& sp = a.space();
    if (v < 1 || v > sp.n_frame)
        throw std::out_of_range("clifford_symbol: frame index out of range");
    return Multivector<R>::generator(sp, v - 1) * a - interior(v, a);
}

// Coefficient of da dab: eta = eta0 + da eta1 + dab eta2 + da dab eta3 -> eta3.
// da and dab sit last in canonical order; pulling the pair out front moves an
// even number of transpositions, so coefficients carry over unchanged.
template <class R>
Multivector<R> extract_da_dabar(const Multivector<R>& a) {
    const GeneratorSpace& sp = a.space();
    if (!sp.has_da_dabar)
        throw std::invalid_argument("extract_da_dabar: space lacks da,dab");
    const uint64_t da = uint64_t(1) << sp.da_index();
    const uint64_t db = uint64_t(1) << sp.dabar_index();
    Multivector<R> r(sp);
    for (const auto& [m, c] : a.terms())
        if ((m & da) && (m & db)) r.add_term(m & ~(da | db), c);
    return r;
}

// Rescaling homomorphism: every auxiliary generator (thetas and da,dab)
// scales by inv_sqrt_t = t^{-1/2}. Multiplicative by construction; the
// ring-level entry point keeps rational inputs exact.
template <class R>
Multivector<R> psi_scale(const R& inv_sqrt_t, const Multivector<R>& a) {
    const GeneratorSpace& sp = a.space();
    Multivector<R> r(sp);
    for (const auto& [m, c] : a.terms()) {
        int k = Multivector<R>::aux_degree(sp, m);
        R f = ring_traits<R>::one();
        for (int j = 0; j < k; ++j) f = f * inv_sqrt_t;
        r.add_term(m, f * c);
    }
    return r;
}

inline Multivector<std::complex<double>> psi_t(double t,
                                               const Multivector<std::complex<double>>& a) {
    if (!(t > 0)) throw std::domain_error("psi_t: t must be positive");
    return psi_scale(std::complex<double>(1.0 / std::sqrt(t), 0.0), a);
}

} // namespace cmt

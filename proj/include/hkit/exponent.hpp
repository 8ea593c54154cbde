#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace hkit {

using Multiindex = std::vector<int>;

inline int degree_of(const Multiindex& a) {
    return std::accumulate(a.begin(), a.end(), 0);
}

inline Multiindex add(const Multiindex& a, const Multiindex& b) {
    Multiindex r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Multiindex sub(const Multiindex& a, const Multiindex& b) {
    Multiindex r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline bool leq_componentwise(const Multiindex& a, const Multiindex& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

// The universal index of a series vector: a multiindex plus a 1-based
// component slot. Addition with a multiindex acts on alpha only.
struct Exponent {
    Multiindex alpha;
    int j = 1;

    friend bool operator==(const Exponent& a, const Exponent& b) {
        return a.j == b.j && a.alpha == b.alpha;
    }
    friend bool operator!=(const Exponent& a, const Exponent& b) { return !(a == b); }
};

inline int degree_of(const Exponent& e) { return degree_of(e.alpha); }

inline Exponent operator+(const Exponent& e, const Multiindex& beta) {
    return Exponent{add(e.alpha, beta), e.j};
}

// v divides e: same component and v.alpha <= e.alpha componentwise.
inline bool divides(const Exponent& v, const Exponent& e) {
    return v.j == e.j && leq_componentwise(v.alpha, e.alpha);
}

enum class Ordering { Less, Equal, Greater };

// Total order on exponents with comparison key (L(alpha), j, alpha), compared
// lexicographically; L is a positive linear form. Unit weights give the
// lex(|alpha|, j, alpha) order. Compatible with addition: adding a nonzero
// multiindex strictly increases the key.
class MonomialOrder {
public:
    MonomialOrder(int n, int p) : MonomialOrder(n, p, std::vector<Rational>(n, Rational(1))) {}

    MonomialOrder(int n, int p, std::vector<Rational> weights)
        : n_(n), p_(p), weights_(std::move(weights)) {
        if (n_ < 1 || p_ < 1) throw DimensionMismatch("monomial order needs n >= 1, p >= 1");
        if (static_cast<int>(weights_.size()) != n_)
            throw DimensionMismatch("weight vector length does not match n");
        for (const auto& w : weights_)
            if (sgn(w) <= 0) throw Error("order weights must be strictly positive");
        uniform_ = std::all_of(weights_.begin(), weights_.end(),
                               [&](const Rational& w) { return w == weights_[0]; });
    }

    int n() const { return n_; }
    int p() const { return p_; }
    const std::vector<Rational>& weights() const { return weights_; }
    // True when all weights coincide, so L-comparisons refine total degree.
    bool degree_compatible() const { return uniform_; }

    Rational weight(const Multiindex& a) const {
        Rational s(0);
        for (int i = 0; i < n_; ++i)
            if (a[i] != 0) s += weights_[i] * a[i];
        return s;
    }

    void check(const Exponent& e) const {
        if (static_cast<int>(e.alpha.size()) != n_)
            throw DimensionMismatch("exponent has wrong number of variables");
        if (e.j < 1 || e.j > p_)
            throw DimensionMismatch("component index out of range");
        for (int a : e.alpha)
            if (a < 0) throw DimensionMismatch("negative exponent entry");
    }

    Ordering compare(const Exponent& a, const Exponent& b) const {
        check(a);
        check(b);
        return compare_unchecked(a, b);
    }

    bool less(const Exponent& a, const Exponent& b) const {
        return compare_unchecked(a, b) == Ordering::Less;
    }

    Ordering compare_unchecked(const Exponent& a, const Exponent& b) const {
        if (uniform_) {
            const int da = degree_of(a.alpha), db = degree_of(b.alpha);
            if (da != db) return da < db ? Ordering::Less : Ordering::Greater;
        } else {
            const Rational la = weight(a.alpha), lb = weight(b.alpha);
            const int c = cmp(la, lb);
            if (c != 0) return c < 0 ? Ordering::Less : Ordering::Greater;
        }
        if (a.j != b.j) return a.j < b.j ? Ordering::Less : Ordering::Greater;
        for (int i = 0; i < n_; ++i)
            if (a.alpha[i] != b.alpha[i])
                return a.alpha[i] < b.alpha[i] ? Ordering::Less : Ordering::Greater;
        return Ordering::Equal;
    }

    friend bool operator==(const MonomialOrder& a, const MonomialOrder& b) {
        return a.n_ == b.n_ && a.p_ == b.p_ && a.weights_ == b.weights_;
    }
    friend bool operator!=(const MonomialOrder& a, const MonomialOrder& b) { return !(a == b); }

private:
    int n_, p_;
    std::vector<Rational> weights_;
    bool uniform_ = true;
};

inline Ordering order_compare(const Exponent& a, const Exponent& b, const MonomialOrder& ord) {
    return ord.compare(a, b);
}

// Map comparator; dimensions are validated at insertion sites, not here.
struct ExpLess {
    MonomialOrder ord;
    bool operator()(const Exponent& a, const Exponent& b) const { return ord.less(a, b); }
};

namespace detail {
inline void enumerate_rec(int n, int pos, int remaining, Multiindex& cur,
                          std::vector<Multiindex>& out) {
    if (pos == n - 1) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        cur[pos] = k;
        enumerate_rec(n, pos + 1, remaining - k, cur, out);
    }
}
} // namespace detail

// All multiindices of total degree <= d, listed by degree then lex.
inline std::vector<Multiindex> multiindices_up_to(int n, int d) {
    std::vector<Multiindex> out;
    Multiindex cur(n, 0);
    for (int deg = 0; deg <= d; ++deg)
        detail::enumerate_rec(n, 0, deg, cur, out);
    return out;
}

inline long long count_multiindices(int n, int d) {
    // C(n + d, n)
    long long r = 1;
    for (int i = 1; i <= n; ++i) r = r * (d + i) / i;
    return r;
}

} // namespace hkit

#pragma once

#include <map>
#include <utility>
#include <vector>

#include "series.hpp"

namespace hkit {

// An exact polynomial in n variables over Q. Unlike a jet it carries no
// truncation semantics; it is the carrier for matrix entries, mapping
// components and right-hand sides.
class Polynomial {
public:
    using TermMap = std::map<Multiindex, Rational>;

    explicit Polynomial(int n) : n_(n) {
        if (n_ < 1) throw DimensionMismatch("polynomial needs n >= 1 variables");
    }

    static Polynomial constant(int n, const Rational& c) {
        Polynomial f(n);
        f.add_term(Multiindex(n, 0), c);
        return f;
    }

    // 0-based variable index.
    static Polynomial variable(int n, int k) {
        Polynomial f(n);
        Multiindex a(n, 0);
        a[k] = 1;
        f.add_term(a, Rational(1));
        return f;
    }

    int n() const { return n_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [a, c] : terms_) d = std::max(d, degree_of(a));
        return d;
    }

    Rational coeff(const Multiindex& a) const {
        auto it = terms_.find(a);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(const Multiindex& a, const Rational& c) {
        if (static_cast<int>(a.size()) != n_)
            throw DimensionMismatch("multiindex length does not match polynomial");
        for (int e : a)
            if (e < 0) throw DimensionMismatch("negative exponent entry");
        if (hkit::is_zero(c)) return;
        auto [it, inserted] = terms_.emplace(a, c);
        if (!inserted) {
            it->second += c;
            if (hkit::is_zero(it->second)) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_vars(o);
        for (const auto& [a, c] : o.terms_) add_term(a, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        check_vars(o);
        for (const auto& [a, c] : o.terms_) add_term(a, -c);
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_vars(b);
        Polynomial r(a.n_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) r.add_term(add(ea, eb), ca * cb);
        return r;
    }

    friend Polynomial operator*(const Rational& c, const Polynomial& f) {
        Polynomial r(f.n_);
        for (const auto& [a, v] : f.terms_) r.add_term(a, c * v);
        return r;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    Rational eval(const std::vector<Rational>& at) const {
        if (static_cast<int>(at.size()) != n_)
            throw DimensionMismatch("evaluation point has wrong dimension");
        Rational s(0);
        for (const auto& [a, c] : terms_) {
            Rational t = c;
            for (int i = 0; i < n_; ++i)
                if (a[i] != 0) t *= rational_pow(at[i], a[i]);
            s += t;
        }
        return s;
    }

    Polynomial derivative(int var) const {
        Polynomial r(n_);
        for (const auto& [a, c] : terms_) {
            if (a[var] == 0) continue;
            Multiindex b = a;
            --b[var];
            r.add_term(b, c * a[var]);
        }
        return r;
    }

    Polynomial derivative(const Multiindex& alpha) const {
        Polynomial r = *this;
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < alpha[i]; ++k) r = r.derivative(i);
        return r;
    }

    // Substitutes subs[i] (all in the same variable set) for variable i.
    Polynomial compose(const std::vector<Polynomial>& subs) const {
        if (static_cast<int>(subs.size()) != n_)
            throw DimensionMismatch("substitution list does not match variable count");
        const int m = subs.front().n();
        for (const auto& s : subs)
            if (s.n() != m) throw DimensionMismatch("substituted polynomials disagree on variables");
        // per-variable power tables
        std::vector<std::vector<Polynomial>> pow(n_, {Polynomial::constant(m, Rational(1))});
        Polynomial result(m);
        for (const auto& [a, c] : terms_) {
            Polynomial t = Polynomial::constant(m, c);
            for (int i = 0; i < n_; ++i) {
                while (static_cast<int>(pow[i].size()) <= a[i])
                    pow[i].push_back(pow[i].back() * subs[i]);
                if (a[i] != 0) t = t * pow[i][a[i]];
            }
            result += t;
        }
        return result;
    }

private:
    void check_vars(const Polynomial& o) const {
        if (n_ != o.n_) throw DimensionMismatch("polynomials disagree on variables");
    }

    int n_;
    TermMap terms_;
};

// Degree-D jet of x |-> f(a + x), with exact rational coefficients.
inline SeriesVec taylor_expand_at(const Polynomial& f, const std::vector<Rational>& a, int d,
                                  const MonomialOrder& ord) {
    if (static_cast<int>(a.size()) != f.n())
        throw DimensionMismatch("expansion point has wrong dimension");
    if (ord.n() != f.n() || ord.p() != 1)
        throw DimensionMismatch("order dimensions do not match polynomial");
    SeriesVec r(ord, d);
    Multiindex gamma(f.n(), 0);
    for (const auto& term : f.terms()) {
        // expand prod_i (a_i + x_i)^{alpha_i}
        const Multiindex& alpha = term.first;
        auto walk = [&](auto&& self, int i, const Rational& acc) -> void {
            if (i == f.n()) {
                r.add_term(Exponent{gamma, 1}, acc);
                return;
            }
            for (int g = 0; g <= alpha[i]; ++g) {
                gamma[i] = g;
                Rational factor(binomial(alpha[i], g));
                factor *= rational_pow(a[i], alpha[i] - g);
                if (!is_zero(factor)) self(self, i + 1, acc * factor);
            }
            gamma[i] = 0;
        };
        walk(walk, 0, term.second);
    }
    return r;
}

inline SeriesVec taylor_expand_at(const Polynomial& f, const std::vector<Rational>& a, int d) {
    return taylor_expand_at(f, a, d, MonomialOrder(f.n(), 1));
}

// Exact truncation of f as a jet (the expansion at the origin).
inline SeriesVec to_series(const Polynomial& f, int d, const MonomialOrder& ord) {
    SeriesVec r(ord, d);
    for (const auto& [a, c] : f.terms()) r.add_term(Exponent{a, 1}, c);
    return r;
}

} // namespace hkit

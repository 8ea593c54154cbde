#pragma once

#include <map>
#include <utility>
#include <vector>

#include "exponent.hpp"

namespace hkit {

// A degree-D jet of an element of Q[[x]]^p: a sparse map Exponent -> nonzero
// rational, sorted by the ambient monomial order. The truncation degree is
// part of the value; binary operations refuse to mix truncation degrees or
// orders. Values are immutable in spirit: every operation returns a new jet.
class SeriesVec {
public:
    using TermMap = std::map<Exponent, Rational, ExpLess>;

    SeriesVec(MonomialOrder ord, int trunc)
        : ord_(std::move(ord)), trunc_(trunc), terms_(ExpLess{ord_}) {
        if (trunc_ < 0) throw Error("truncation degree must be nonnegative");
    }

    int n() const { return ord_.n(); }
    int p() const { return ord_.p(); }
    int trunc() const { return trunc_; }
    const MonomialOrder& order() const { return ord_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Rational coeff(const Exponent& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    // Accumulates c at e; erases the entry when it cancels. Terms of degree
    // beyond the truncation are discarded, which is what truncation means.
    void add_term(const Exponent& e, const Rational& c) {
        ord_.check(e);
        if (hkit::is_zero(c) || degree_of(e) > trunc_) return;
        auto [it, inserted] = terms_.emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (hkit::is_zero(it->second)) terms_.erase(it);
        }
    }

    void erase_term(const Exponent& e) { terms_.erase(e); }

    // Lowest-degree term of the support; -1 for the zero jet.
    int min_degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) {
            const int de = degree_of(e);
            if (d < 0 || de < d) d = de;
        }
        return d;
    }

    SeriesVec& operator+=(const SeriesVec& other) {
        check_compatible(other);
        for (const auto& [e, c] : other.terms_) add_term(e, c);
        return *this;
    }

    SeriesVec& operator-=(const SeriesVec& other) {
        check_compatible(other);
        for (const auto& [e, c] : other.terms_) add_term(e, -c);
        return *this;
    }

    friend SeriesVec operator+(SeriesVec a, const SeriesVec& b) { return a += b; }
    friend SeriesVec operator-(SeriesVec a, const SeriesVec& b) { return a -= b; }

    friend SeriesVec operator*(const Rational& c, const SeriesVec& f) {
        SeriesVec r(f.ord_, f.trunc_);
        if (hkit::is_zero(c)) return r;
        for (const auto& [e, v] : f.terms_) r.terms_.emplace(e, c * v);
        return r;
    }

    // Coefficient-wise equality of jets with the same dimensions and
    // truncation degree; the sort order is irrelevant.
    friend bool operator==(const SeriesVec& a, const SeriesVec& b) {
        if (a.n() != b.n() || a.p() != b.p() || a.trunc_ != b.trunc_) return false;
        if (a.terms_.size() != b.terms_.size()) return false;
        for (const auto& [e, c] : a.terms_)
            if (b.coeff(e) != c) return false;
        return true;
    }
    friend bool operator!=(const SeriesVec& a, const SeriesVec& b) { return !(a == b); }

    void check_compatible(const SeriesVec& other) const {
        if (n() != other.n() || p() != other.p())
            throw DimensionMismatch("series dimensions differ");
        if (trunc_ != other.trunc_)
            throw TruncationMismatch("series truncation degrees differ");
        if (ord_ != other.ord_)
            throw Error("series monomial orders differ");
    }

private:
    MonomialOrder ord_;
    int trunc_;
    TermMap terms_;
};

// Initial exponent and coefficient: the minimal support element.
inline std::pair<Exponent, Rational> leading_term(const SeriesVec& f) {
    if (f.is_zero()) throw ZeroSeries("leading term of the zero series");
    const auto& t = *f.terms().begin();
    return {t.first, t.second};
}

// c * x^beta * F, truncated at F's degree.
inline SeriesVec monomial_multiply(const SeriesVec& f, const Multiindex& beta,
                                   const Rational& c) {
    if (static_cast<int>(beta.size()) != f.n())
        throw DimensionMismatch("multiindex length does not match series");
    SeriesVec r(f.order(), f.trunc());
    if (is_zero(c)) return r;
    for (const auto& [e, v] : f.terms()) r.add_term(e + beta, c * v);
    return r;
}

// F minus its degree-0 terms.
inline SeriesVec drop_constant(const SeriesVec& f) {
    SeriesVec r = f;
    for (int j = 1; j <= f.p(); ++j)
        r.erase_term(Exponent{Multiindex(f.n(), 0), j});
    return r;
}

// Product of two scalar jets (p = 1), truncated.
inline SeriesVec multiply(const SeriesVec& a, const SeriesVec& b) {
    a.check_compatible(b);
    if (a.p() != 1) throw DimensionMismatch("multiply expects scalar jets");
    SeriesVec r(a.order(), a.trunc());
    for (const auto& [ea, ca] : a.terms()) {
        const int da = degree_of(ea);
        for (const auto& [eb, cb] : b.terms()) {
            if (da + degree_of(eb) > a.trunc()) continue;
            r.add_term(Exponent{add(ea.alpha, eb.alpha), 1}, ca * cb);
        }
    }
    return r;
}

// Scalar jet times vector jet.
inline SeriesVec multiply_scalar_vector(const SeriesVec& s, const SeriesVec& f) {
    if (s.p() != 1) throw DimensionMismatch("left factor must be a scalar jet");
    if (s.n() != f.n()) throw DimensionMismatch("series dimensions differ");
    if (s.trunc() != f.trunc()) throw TruncationMismatch("series truncation degrees differ");
    if (s.order().weights() != f.order().weights())
        throw Error("series monomial orders differ");
    SeriesVec r(f.order(), f.trunc());
    for (const auto& [es, cs] : s.terms()) {
        const int ds = degree_of(es);
        for (const auto& [ef, cf] : f.terms()) {
            if (ds + degree_of(ef) > f.trunc()) continue;
            r.add_term(Exponent{add(es.alpha, ef.alpha), ef.j}, cs * cf);
        }
    }
    return r;
}

// Degree-D jet of W(u_1,...,u_m): substitutes the scalar jets u_k (all of
// positive order) for the variables of W. Terms of W of degree > D cannot
// contribute and are skipped.
inline SeriesVec jet_compose(const SeriesVec& w, const std::vector<SeriesVec>& u, int d) {
    const int m = static_cast<int>(u.size());
    if (w.n() != m) throw DimensionMismatch("substitution list does not match variable count");
    if (m == 0) throw DimensionMismatch("empty substitution list");
    for (const auto& uk : u) {
        u.front().check_compatible(uk);
        if (uk.p() != 1) throw DimensionMismatch("substituted jets must be scalar");
        if (uk.trunc() != d) throw TruncationMismatch("substituted jets must be degree-D jets");
        if (!is_zero(uk.coeff(Exponent{Multiindex(uk.n(), 0), 1})))
            throw NonzeroConstantTerm("substituted jet has a nonzero constant term");
    }
    const MonomialOrder out_ord(u.front().n(), w.p(), u.front().order().weights());
    SeriesVec result(out_ord, d);

    const MonomialOrder scalar_ord(u.front().n(), 1, u.front().order().weights());
    std::map<Multiindex, SeriesVec> powers;
    SeriesVec one(scalar_ord, d);
    one.add_term(Exponent{Multiindex(u.front().n(), 0), 1}, Rational(1));
    powers.emplace(Multiindex(m, 0), one);

    auto power_of = [&](auto&& self, const Multiindex& beta) -> const SeriesVec& {
        auto it = powers.find(beta);
        if (it != powers.end()) return it->second;
        int k = 0;
        while (beta[k] == 0) ++k;
        Multiindex below = beta;
        --below[k];
        const SeriesVec& base = self(self, below);
        return powers.emplace(beta, multiply(base, u[k])).first->second;
    };

    for (const auto& [e, c] : w.terms()) {
        if (degree_of(e) > d) continue;
        const SeriesVec& pw = power_of(power_of, e.alpha);
        for (const auto& [pe, pc] : pw.terms())
            result.add_term(Exponent{pe.alpha, e.j}, c * pc);
    }
    return result;
}

} // namespace hkit

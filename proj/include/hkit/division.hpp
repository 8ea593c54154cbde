#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "series.hpp"

namespace hkit {

// A region N in N^n x {1..p} with N + N^n = N, stored by its minimal vertex
// set. The region is only certified on total degrees <= certified_degree;
// vertices beyond that are invisible to a jet computation.
class Diagram {
public:
    Diagram(int n, int p, std::vector<Exponent> points, int certified_degree)
        : n_(n), p_(p), certified_degree_(certified_degree) {
        const MonomialOrder def(n, p);
        for (const auto& e : points) def.check(e);
        // keep the minimal elements under componentwise divisibility
        for (const auto& e : points) {
            bool dominated = false;
            for (const auto& f : points)
                if (f != e && divides(f, e)) {
                    dominated = true;
                    break;
                }
            if (!dominated && std::find(vertices_.begin(), vertices_.end(), e) == vertices_.end())
                vertices_.push_back(e);
        }
        std::sort(vertices_.begin(), vertices_.end(),
                  [&](const Exponent& a, const Exponent& b) { return def.less(a, b); });
    }

    int n() const { return n_; }
    int p() const { return p_; }
    int certified_degree() const { return certified_degree_; }
    const std::vector<Exponent>& vertices() const { return vertices_; }
    bool empty() const { return vertices_.empty(); }

    bool contains(const Exponent& e) const {
        for (const auto& v : vertices_)
            if (divides(v, e)) return true;
        return false;
    }

    bool same_vertices(const Diagram& other) const {
        return n_ == other.n_ && p_ == other.p_ && vertices_ == other.vertices_;
    }

private:
    int n_, p_;
    std::vector<Exponent> vertices_;
    int certified_degree_;
};

// Total order on diagrams: lexicographic comparison of the vertex sequences
// (listed increasingly, padded with infinity). More vertices early means a
// bigger region and a smaller diagram.
inline Ordering compare_diagrams(const Diagram& n1, const Diagram& n2) {
    if (n1.n() != n2.n() || n1.p() != n2.p())
        throw DimensionMismatch("diagrams have different dimensions");
    const MonomialOrder def(n1.n(), n1.p());
    const auto& v1 = n1.vertices();
    const auto& v2 = n2.vertices();
    const std::size_t len = std::max(v1.size(), v2.size());
    for (std::size_t i = 0; i < len; ++i) {
        if (i >= v1.size()) return Ordering::Greater; // infinity on the left
        if (i >= v2.size()) return Ordering::Less;
        const Ordering c = def.compare(v1[i], v2[i]);
        if (c != Ordering::Equal) return c;
    }
    return Ordering::Equal;
}

struct DivisionResult {
    std::vector<SeriesVec> quotients; // scalar jets, one per divisor
    SeriesVec remainder;
    std::vector<Exponent> initial_exponents; // (alpha_i, j_i), defining the partition
};

// Formal division of the jet F by the jets Phi_1..Phi_q: the unique
// decomposition F = sum Q_i Phi_i + R with supp Q_i confined to the slice of
// (alpha_i,j_i) + N^n not claimed by an earlier divisor, and supp R in the
// complement. Each reduction step cancels the current minimal term against
// the first divisor whose initial exponent divides it; discarded product
// terms all have degree > D, so the output jets equal the degree-D jets of
// the infinite-precision division.
inline DivisionResult hironaka_divide(const SeriesVec& f, const std::vector<SeriesVec>& divisors) {
    const MonomialOrder& ord = f.order();
    const int d = f.trunc();
    std::vector<Exponent> ini;
    std::vector<Rational> ini_coeff;
    ini.reserve(divisors.size());
    for (const auto& phi : divisors) {
        f.check_compatible(phi);
        if (phi.is_zero()) throw ZeroDivisor("division by the zero series");
        auto [e, c] = leading_term(phi);
        ini.push_back(e);
        ini_coeff.push_back(c);
    }

    const MonomialOrder scalar_ord(ord.n(), 1, ord.weights());
    std::vector<SeriesVec> q(divisors.size(), SeriesVec(scalar_ord, d));
    SeriesVec r(ord, d);
    SeriesVec h = f;

    while (!h.is_zero()) {
        const auto [e, c] = leading_term(h);
        int target = -1;
        for (std::size_t i = 0; i < ini.size(); ++i)
            if (divides(ini[i], e)) {
                target = static_cast<int>(i);
                break;
            }
        if (target < 0) {
            r.add_term(e, c);
            h.erase_term(e);
            continue;
        }
        const Multiindex gamma = sub(e.alpha, ini[target].alpha);
        Rational coef = c / ini_coeff[target];
        q[target].add_term(Exponent{gamma, 1}, coef);
        h -= monomial_multiply(divisors[target], gamma, coef);
    }
    return {std::move(q), std::move(r), std::move(ini)};
}

namespace detail {

// Echelonized span of the truncated monomial multiples of the generators:
// columns are all exponents of degree <= D sorted increasingly, pivots are
// the initial exponents realized by the jet module.
struct ModuleEchelon {
    std::vector<Exponent> col_exps;
    RrefResult ech;
    int trunc = 0;
};

inline ModuleEchelon echelonize_module(const std::vector<SeriesVec>& gens,
                                       const MonomialOrder& ord, int d) {
    for (const auto& g : gens) {
        if (g.order() != ord) throw DimensionMismatch("generator does not match the ambient order");
        if (g.trunc() != d) throw TruncationMismatch("generator truncation degree differs");
    }
    ModuleEchelon out;
    out.trunc = d;
    for (const auto& a : multiindices_up_to(ord.n(), d))
        for (int j = 1; j <= ord.p(); ++j) out.col_exps.push_back(Exponent{a, j});
    std::sort(out.col_exps.begin(), out.col_exps.end(),
              [&](const Exponent& a, const Exponent& b) { return ord.less(a, b); });
    std::map<Exponent, int, ExpLess> col_index{ExpLess{ord}};
    for (std::size_t i = 0; i < out.col_exps.size(); ++i)
        col_index.emplace(out.col_exps[i], static_cast<int>(i));

    std::vector<SeriesVec> rows;
    for (const auto& g : gens) {
        if (g.is_zero()) continue;
        const int slack = d - g.min_degree();
        for (const auto& gamma : multiindices_up_to(ord.n(), std::max(slack, 0))) {
            SeriesVec row = monomial_multiply(g, gamma, Rational(1));
            if (!row.is_zero()) rows.push_back(std::move(row));
        }
    }
    RationalMatrix m(static_cast<int>(rows.size()), static_cast<int>(out.col_exps.size()));
    for (int r = 0; r < m.rows(); ++r)
        for (const auto& [e, c] : rows[r].terms()) m.at(r, col_index.at(e)) = c;
    m.set_col_labels(out.col_exps);
    out.ech = rref(std::move(m));
    return out;
}

// Degrees d with d*max(w) < (D+1)*min(w) are certified: no truncated tail can
// fake or hide an initial exponent there. Equals D for uniform weights.
inline int certified_degree_for(const MonomialOrder& ord, int d) {
    if (ord.degree_compatible()) return d;
    const auto& w = ord.weights();
    Rational wmin = w.front(), wmax = w.front();
    for (const auto& x : w) {
        if (x < wmin) wmin = x;
        if (x > wmax) wmax = x;
    }
    int cd = d;
    while (cd > 0 && !(Rational(cd) * wmax < Rational(d + 1) * wmin)) --cd;
    return cd;
}

} // namespace detail

// The diagram of initial exponents of the module spanned by the generators,
// certified on total degrees up to the reported certified_degree.
inline Diagram compute_diagram(const std::vector<SeriesVec>& gens, const MonomialOrder& ord,
                               int d) {
    auto mod = detail::echelonize_module(gens, ord, d);
    const int cd = detail::certified_degree_for(ord, d);
    std::vector<Exponent> pivots;
    for (int c : mod.ech.pivot_cols) {
        const Exponent& e = mod.col_exps[c];
        if (degree_of(e) <= cd) pivots.push_back(e);
    }
    return Diagram(ord.n(), ord.p(), std::move(pivots), cd);
}

// The unique monic vertex representatives: Psi_i = x^{(alpha_i,j_i)} + tail
// with the tail supported in the complement of the diagram (as degree-D
// jets). Taken straight from the fully reduced echelon rows, so the result
// does not depend on the generating set presented.
inline std::vector<SeriesVec> standard_basis(const std::vector<SeriesVec>& gens,
                                             const MonomialOrder& ord, int d) {
    auto mod = detail::echelonize_module(gens, ord, d);
    const int cd = detail::certified_degree_for(ord, d);
    std::vector<Exponent> certified;
    for (int c : mod.ech.pivot_cols) {
        const Exponent& e = mod.col_exps[c];
        if (degree_of(e) <= cd) certified.push_back(e);
    }
    Diagram diagram(ord.n(), ord.p(), std::move(certified), cd);
    std::vector<SeriesVec> basis;
    for (std::size_t k = 0; k < mod.ech.pivot_cols.size(); ++k) {
        const Exponent& pe = mod.col_exps[mod.ech.pivot_cols[k]];
        bool is_vertex = false;
        for (const auto& v : diagram.vertices())
            if (v == pe) {
                is_vertex = true;
                break;
            }
        if (!is_vertex) continue;
        SeriesVec row(ord, d);
        for (int c = 0; c < static_cast<int>(mod.col_exps.size()); ++c)
            if (!is_zero(mod.ech.mat.at(static_cast<int>(k), c)))
                row.add_term(mod.col_exps[c], mod.ech.mat.at(static_cast<int>(k), c));
        basis.push_back(std::move(row));
    }
    return basis;
}

struct MembershipResult {
    bool member = false;
    SeriesVec remainder;
};

// G lies in the module modulo (x)^{D+1} iff its division remainder by the
// standard basis vanishes as a degree-D jet.
inline MembershipResult membership_test(const SeriesVec& g, const std::vector<SeriesVec>& gens,
                                        const MonomialOrder& ord, int d) {
    if (g.order() != ord) throw DimensionMismatch("candidate does not match the ambient order");
    if (g.trunc() != d) throw TruncationMismatch("candidate truncation degree differs");
    auto basis = standard_basis(gens, ord, d);
    if (basis.empty()) return {g.is_zero(), g};
    auto div = hironaka_divide(g, basis);
    return {div.remainder.is_zero(), std::move(div.remainder)};
}

// Monomial basis of a linear complement of the module plus (x)^{r+1}: the
// complement-of-diagram exponents of degree <= r, sorted by the order.
inline std::vector<Exponent> complement_basis(const std::vector<SeriesVec>& gens,
                                              const MonomialOrder& ord, int d, int r) {
    Diagram diagram = compute_diagram(gens, ord, d);
    if (r > diagram.certified_degree())
        throw InsufficientTruncation("complement requested beyond the certified degree");
    std::vector<Exponent> out;
    for (const auto& a : multiindices_up_to(ord.n(), r))
        for (int j = 1; j <= ord.p(); ++j) {
            Exponent e{a, j};
            if (!diagram.contains(e)) out.push_back(e);
        }
    std::sort(out.begin(), out.end(),
              [&](const Exponent& a, const Exponent& b) { return ord.less(a, b); });
    return out;
}

// The Artin-Rees exponent: the maximal total degree of a diagram vertex
// (0 for the zero module). Flags InsufficientTruncation when the staircase
// still gains vertices in the top two certified degree layers, a heuristic
// sign that deeper truncation could reveal more.
inline int artin_rees_lambda(const std::vector<SeriesVec>& gens, const MonomialOrder& ord, int d) {
    Diagram diagram = compute_diagram(gens, ord, d);
    if (diagram.empty()) return 0;
    int lambda = 0;
    for (const auto& v : diagram.vertices()) lambda = std::max(lambda, degree_of(v));
    if (lambda >= diagram.certified_degree() - 1)
        throw InsufficientTruncation("vertices near the truncation boundary; the staircase may be incomplete");
    return lambda;
}

// Verifies M `intersect` m^{l+lambda} `subset` m^l M on degree-D jets by exact
// rank computations: every jet-module element supported in degrees >= l+lambda
// must lie in the span of the generator multiples by monomials of degree >= l.
inline bool check_chevalley_estimate(const std::vector<SeriesVec>& gens, const MonomialOrder& ord,
                                     int d, int l) {
    bool all_zero = true;
    for (const auto& g : gens)
        if (!g.is_zero()) all_zero = false;
    if (gens.empty() || all_zero) return true; // zero module
    const int lambda = artin_rees_lambda(gens, ord, d);
    if (l + lambda > d)
        throw InsufficientTruncation("l + lambda exceeds the truncation degree");

    auto mod = detail::echelonize_module(gens, ord, d);
    const int cols = static_cast<int>(mod.col_exps.size());
    std::map<Exponent, int, ExpLess> index{ExpLess{ord}};
    for (int c = 0; c < cols; ++c) index.emplace(mod.col_exps[c], c);
    auto row_of = [&](const SeriesVec& s) {
        std::vector<Rational> v(cols, Rational(0));
        for (const auto& [e, c] : s.terms()) v[index.at(e)] = c;
        return v;
    };

    std::vector<std::vector<Rational>> full_rows, shifted_rows;
    for (const auto& g : gens) {
        if (g.is_zero()) continue;
        const int slack = std::max(d - g.min_degree(), 0);
        for (const auto& gamma : multiindices_up_to(ord.n(), slack)) {
            SeriesVec mult = monomial_multiply(g, gamma, Rational(1));
            if (mult.is_zero()) continue;
            auto v = row_of(mult);
            if (degree_of(gamma) >= l) shifted_rows.push_back(v);
            full_rows.push_back(std::move(v));
        }
    }
    Subspace full = Subspace::from_generators(cols, full_rows);
    Subspace shifted = Subspace::from_generators(cols, shifted_rows);

    std::vector<int> low_coords;
    for (int c = 0; c < cols; ++c)
        if (degree_of(mod.col_exps[c]) < l + lambda) low_coords.push_back(c);

    // coefficient combinations of the full basis vanishing on all low coords
    RationalMatrix cond(static_cast<int>(low_coords.size()), full.dim());
    for (std::size_t r = 0; r < low_coords.size(); ++r)
        for (int k = 0; k < full.dim(); ++k) cond.at(static_cast<int>(r), k) = full.basis()[k][low_coords[r]];
    Subspace combos = nullspace(cond);
    for (const auto& combo : combos.basis()) {
        std::vector<Rational> v(cols, Rational(0));
        for (int k = 0; k < full.dim(); ++k) {
            if (is_zero(combo[k])) continue;
            for (int c = 0; c < cols; ++c)
                if (!is_zero(full.basis()[k][c])) v[c] += combo[k] * full.basis()[k][c];
        }
        if (!shifted.contains(v)) return false;
    }
    return true;
}

} // namespace hkit

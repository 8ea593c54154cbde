#pragma once

// Shared helpers for the unit and acceptance suites: deterministic random
// instance generators and independent brute-force oracles. The oracles use
// plain rational Gauss-Jordan elimination and derivative/evaluate Taylor
// coefficients, deliberately avoiding the library's Bareiss echelon and
// binomial-shift paths.

#include <hkit/relations.hpp>
#include <hkit/whitney.hpp>

#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace support {

using hkit::EquationData;
using hkit::Exponent;
using hkit::FibrePoint;
using hkit::MonomialOrder;
using hkit::Multiindex;
using hkit::Polynomial;
using hkit::Rational;
using hkit::SeriesVec;

struct Rng {
    std::mt19937_64 eng;

    explicit Rng(unsigned long long seed) : eng(seed) {}

    int uniform(int lo, int hi) {
        std::uniform_int_distribution<int> d(lo, hi);
        return d(eng);
    }

    Rational coeff(int lo, int hi) { return Rational(uniform(lo, hi)); }

    Rational nonzero_coeff(int lo, int hi) {
        for (;;) {
            Rational c = coeff(lo, hi);
            if (!hkit::is_zero(c)) return c;
        }
    }

    Multiindex multiindex(int n, int max_degree) {
        Multiindex a(n, 0);
        const int d = uniform(0, max_degree);
        for (int k = 0; k < d; ++k) ++a[uniform(0, n - 1)];
        return a;
    }
};

inline SeriesVec random_series(Rng& rng, const MonomialOrder& ord, int trunc, int max_terms,
                               bool ensure_nonzero, int clo = -9, int chi = 9) {
    for (;;) {
        SeriesVec s(ord, trunc);
        const int terms = rng.uniform(1, max_terms);
        for (int t = 0; t < terms; ++t)
            s.add_term(Exponent{rng.multiindex(ord.n(), trunc), rng.uniform(1, ord.p())},
                       rng.coeff(clo, chi));
        if (!ensure_nonzero || !s.is_zero()) return s;
    }
}

inline Polynomial random_poly(Rng& rng, int n, int max_degree, int max_terms, int clo = -9,
                              int chi = 9) {
    Polynomial f(n);
    const int terms = rng.uniform(1, max_terms);
    for (int t = 0; t < terms; ++t) f.add_term(rng.multiindex(n, max_degree), rng.coeff(clo, chi));
    return f;
}

inline std::vector<Rational> random_point(Rng& rng, int n, int lo = -3, int hi = 3) {
    std::vector<Rational> b(n);
    for (auto& x : b) x = rng.coeff(lo, hi);
    return b;
}

namespace oracle {

using Mat = std::vector<std::vector<Rational>>;

// Plain rational Gauss-Jordan with immediate division; no fraction-free
// tricks shared with the library path.
inline std::pair<Mat, std::vector<int>> gauss_jordan(Mat m) {
    std::vector<int> pivots;
    if (m.empty()) return {m, pivots};
    const std::size_t cols = m.front().size();
    std::size_t pr = 0;
    for (std::size_t c = 0; c < cols && pr < m.size(); ++c) {
        std::size_t sel = pr;
        while (sel < m.size() && hkit::is_zero(m[sel][c])) ++sel;
        if (sel == m.size()) continue;
        std::swap(m[sel], m[pr]);
        const Rational inv = m[pr][c];
        for (std::size_t jj = 0; jj < cols; ++jj)
            if (!hkit::is_zero(m[pr][jj])) m[pr][jj] /= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == pr || hkit::is_zero(m[i][c])) continue;
            const Rational f = m[i][c];
            for (std::size_t jj = 0; jj < cols; ++jj)
                if (!hkit::is_zero(m[pr][jj])) m[i][jj] -= f * m[pr][jj];
        }
        pivots.push_back(static_cast<int>(c));
        ++pr;
    }
    return {std::move(m), std::move(pivots)};
}

inline int rank_of(const Mat& m) { return static_cast<int>(gauss_jordan(m).second.size()); }

// Nullspace basis from the plain elimination (free coordinate set to 1).
inline Mat nullspace_of(const Mat& m) {
    Mat out;
    if (m.empty()) return out;
    const int cols = static_cast<int>(m.front().size());
    auto [red, pivots] = gauss_jordan(m);
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivots) is_pivot[c] = true;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(cols, Rational(0));
        v[f] = 1;
        for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -red[k][f];
        out.push_back(std::move(v));
    }
    return out;
}

// Consistency of M x = rhs by ranks of the plain elimination.
inline bool affine_consistent(const Mat& m, const std::vector<Rational>& rhs) {
    Mat aug = m;
    for (std::size_t r = 0; r < aug.size(); ++r) aug[r].push_back(rhs[r]);
    if (aug.empty()) {
        for (const auto& x : rhs)
            if (!hkit::is_zero(x)) return false;
        return true;
    }
    const int cols = static_cast<int>(m.front().size());
    for (int c : gauss_jordan(aug).second)
        if (c == cols) return false;
    return true;
}

// Brute-force diagram of a jet module: list every truncated monomial multiple
// of the generators as a dense row (raw term-map shifting, no SeriesVec
// arithmetic), echelonize with the plain Gauss-Jordan above, and read the
// pivot exponents.
inline std::set<std::pair<Multiindex, int>> diagram_points(const std::vector<SeriesVec>& gens,
                                                           const MonomialOrder& ord, int d) {
    std::vector<Exponent> cols;
    for (const auto& a : hkit::multiindices_up_to(ord.n(), d))
        for (int j = 1; j <= ord.p(); ++j) cols.push_back(Exponent{a, j});
    std::sort(cols.begin(), cols.end(),
              [&](const Exponent& x, const Exponent& y) { return ord.less(x, y); });
    std::map<std::pair<Multiindex, int>, int> col_index;
    for (std::size_t i = 0; i < cols.size(); ++i)
        col_index.emplace(std::make_pair(cols[i].alpha, cols[i].j), static_cast<int>(i));

    Mat rows;
    for (const auto& g : gens) {
        for (const auto& gamma : hkit::multiindices_up_to(ord.n(), d)) {
            std::vector<Rational> row(cols.size(), Rational(0));
            bool nonzero = false;
            for (const auto& [e, c] : g.terms()) {
                Multiindex shifted = hkit::add(e.alpha, gamma);
                if (hkit::degree_of(shifted) > d) continue;
                row[col_index.at({shifted, e.j})] = c;
                nonzero = true;
            }
            if (nonzero) rows.push_back(std::move(row));
        }
    }
    std::set<std::pair<Multiindex, int>> points;
    if (rows.empty()) return points;
    for (int c : gauss_jordan(rows).second) points.emplace(cols[c].alpha, cols[c].j);
    return points;
}

// Relation matrix by symbolic coefficient matching: the column of the unknown
// (beta, j) at a fibre point a is the exact polynomial A_ij * (phi - b)^beta,
// whose x^alpha Taylor coefficient at a is read off as d^alpha(.)(a)/alpha!.
inline Mat relation_matrix(const EquationData& data, const std::vector<Rational>& b,
                           const std::vector<FibrePoint>& fibre, int r, const MonomialOrder& ord) {
    std::vector<Exponent> cols;
    for (const auto& beta : hkit::multiindices_up_to(data.target_dim(), r))
        for (int j = 1; j <= data.q(); ++j) cols.push_back(Exponent{beta, j});
    std::sort(cols.begin(), cols.end(),
              [&](const Exponent& x, const Exponent& y) { return ord.less(x, y); });

    Mat out;
    for (const auto& fp : fibre) {
        const hkit::Chart& ch = data.charts().at(fp.chart);
        std::vector<Polynomial> shifted; // phi_k - b_k
        for (int k = 0; k < data.target_dim(); ++k) {
            Polynomial s = ch.phi[k];
            s -= Polynomial::constant(ch.dim, b[k]);
            shifted.push_back(s);
        }
        std::vector<std::vector<Polynomial>> col_polys; // per column, per i
        for (const auto& ce : cols) {
            Polynomial power = Polynomial::constant(ch.dim, Rational(1));
            for (int k = 0; k < data.target_dim(); ++k)
                for (int t = 0; t < ce.alpha[k]; ++t) power = power * shifted[k];
            std::vector<Polynomial> per_i;
            for (int i = 0; i < data.p(); ++i) per_i.push_back(ch.a[i][ce.j - 1] * power);
            col_polys.push_back(std::move(per_i));
        }
        for (const auto& alpha : hkit::multiindices_up_to(ch.dim, r)) {
            Rational fact(1);
            for (int i = 0; i < ch.dim; ++i)
                for (int k = 2; k <= alpha[i]; ++k) fact *= k;
            for (int i = 0; i < data.p(); ++i) {
                std::vector<Rational> row(cols.size(), Rational(0));
                for (std::size_t c = 0; c < cols.size(); ++c) {
                    Rational v = col_polys[c][i].derivative(alpha).eval(fp.point);
                    if (!hkit::is_zero(v)) row[c] = v / fact;
                }
                out.push_back(std::move(row));
            }
        }
    }
    return out;
}

// r-flatness of a polynomial at a point via derivative evaluation.
inline bool is_flat_to_order(const Polynomial& f, const std::vector<Rational>& a, int r) {
    for (const auto& alpha : hkit::multiindices_up_to(f.n(), r))
        if (!hkit::is_zero(f.derivative(alpha).eval(a))) return false;
    return true;
}

} // namespace oracle

// Convenience constructors for fixtures.

inline SeriesVec make_series(const MonomialOrder& ord, int trunc,
                             std::initializer_list<std::pair<Exponent, int>> terms) {
    SeriesVec s(ord, trunc);
    for (const auto& [e, c] : terms) s.add_term(e, Rational(c));
    return s;
}

inline Polynomial make_poly(int n, std::initializer_list<std::pair<Multiindex, int>> terms) {
    Polynomial f(n);
    for (const auto& [a, c] : terms) f.add_term(a, Rational(c));
    return f;
}

} // namespace support

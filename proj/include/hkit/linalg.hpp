#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "exponent.hpp"

namespace hkit {

// Dense exact rational matrix. Column labels, when set, tie columns to
// exponents so pivot sets can be read as initial exponents.
class RationalMatrix {
public:
    RationalMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, Rational(0)) {
        if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix dimensions");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rational& at(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    const Rational& at(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

    void swap_rows(int r1, int r2) {
        if (r1 == r2) return;
        for (int c = 0; c < cols_; ++c) std::swap(at(r1, c), at(r2, c));
    }

    void set_col_labels(std::vector<Exponent> labels) {
        if (!labels.empty() && static_cast<int>(labels.size()) != cols_)
            throw DimensionMismatch("column label count does not match");
        col_labels_ = std::move(labels);
    }
    const std::vector<Exponent>& col_labels() const { return col_labels_; }

    RationalMatrix submatrix_cols(const std::vector<int>& keep) const {
        RationalMatrix m(rows_, static_cast<int>(keep.size()));
        for (int r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < keep.size(); ++c) m.at(r, static_cast<int>(c)) = at(r, keep[c]);
        if (!col_labels_.empty()) {
            std::vector<Exponent> labels;
            labels.reserve(keep.size());
            for (int c : keep) labels.push_back(col_labels_[c]);
            m.set_col_labels(std::move(labels));
        }
        return m;
    }

private:
    int rows_, cols_;
    std::vector<Rational> a_;
    std::vector<Exponent> col_labels_;
};

struct RrefResult {
    RationalMatrix mat{0, 0};
    std::vector<int> pivot_cols;
};

// Reduced row echelon form. Forward elimination is fraction-free (one-step
// Bareiss on denominator-cleared rows, so intermediate entries are minors of
// an integer matrix); the reduction to RREF divides at the end.
inline RrefResult rref(RationalMatrix m) {
    const int rows = m.rows(), cols = m.cols();
    for (int r = 0; r < rows; ++r) {
        Integer l(1);
        for (int c = 0; c < cols; ++c)
            if (!is_zero(m.at(r, c))) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m.at(r, c).get_den_mpz_t());
        if (l != 1) {
            Rational f(l);
            for (int c = 0; c < cols; ++c)
                if (!is_zero(m.at(r, c))) m.at(r, c) *= f;
        }
    }

    std::vector<int> pivots;
    Rational prev(1);
    int pr = 0;
    for (int c = 0; c < cols && pr < rows; ++c) {
        int sel = -1;
        for (int r = pr; r < rows; ++r)
            if (!is_zero(m.at(r, c))) {
                sel = r;
                break;
            }
        if (sel < 0) continue;
        m.swap_rows(sel, pr);
        const Rational piv = m.at(pr, c);
        for (int i = pr + 1; i < rows; ++i) {
            const Rational mic = m.at(i, c);
            const bool mic_zero = is_zero(mic);
            for (int jj = c; jj < cols; ++jj) {
                if (jj == c) {
                    m.at(i, jj) = 0;
                    continue;
                }
                const bool mij_zero = is_zero(m.at(i, jj));
                if (mic_zero && mij_zero) continue;
                Rational t = mic_zero ? Rational(piv * m.at(i, jj))
                                      : Rational(piv * m.at(i, jj) - mic * m.at(pr, jj));
                t /= prev;
                m.at(i, jj) = t;
            }
        }
        prev = piv;
        pivots.push_back(c);
        ++pr;
    }

    for (int k = static_cast<int>(pivots.size()) - 1; k >= 0; --k) {
        const int pc = pivots[k];
        const Rational piv = m.at(k, pc);
        for (int jj = pc; jj < cols; ++jj)
            if (!is_zero(m.at(k, jj))) m.at(k, jj) /= piv;
        for (int i = 0; i < k; ++i) {
            const Rational f = m.at(i, pc);
            if (is_zero(f)) continue;
            for (int jj = pc; jj < cols; ++jj)
                if (!is_zero(m.at(k, jj))) m.at(i, jj) -= f * m.at(k, jj);
        }
    }
    return {std::move(m), std::move(pivots)};
}

inline int rank(const RationalMatrix& m) {
    return static_cast<int>(rref(m).pivot_cols.size());
}

// A linear subspace of Q^ambient in canonical form: the basis rows are in
// reduced echelon form with pivots ascending, so equal subspaces have
// identical representations.
class Subspace {
public:
    static Subspace zero(int ambient) { return Subspace(ambient, {}); }

    static Subspace from_generators(int ambient, const std::vector<std::vector<Rational>>& gens) {
        for (const auto& g : gens)
            if (static_cast<int>(g.size()) != ambient)
                throw DimensionMismatch("generator has wrong ambient dimension");
        if (gens.empty()) return zero(ambient);
        RationalMatrix m(static_cast<int>(gens.size()), ambient);
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < ambient; ++c) m.at(r, c) = gens[r][c];
        auto ech = rref(std::move(m));
        std::vector<std::vector<Rational>> basis;
        basis.reserve(ech.pivot_cols.size());
        for (std::size_t k = 0; k < ech.pivot_cols.size(); ++k) {
            std::vector<Rational> row(ambient);
            for (int c = 0; c < ambient; ++c) row[c] = ech.mat.at(static_cast<int>(k), c);
            basis.push_back(std::move(row));
        }
        return Subspace(ambient, std::move(basis));
    }

    int ambient() const { return ambient_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<std::vector<Rational>>& basis() const { return basis_; }

    // Pivot column of each basis row (ascending).
    std::vector<int> pivots() const {
        std::vector<int> pc;
        pc.reserve(basis_.size());
        for (const auto& row : basis_) {
            int c = 0;
            while (c < ambient_ && is_zero(row[c])) ++c;
            pc.push_back(c);
        }
        return pc;
    }

    bool contains(std::vector<Rational> v) const {
        if (static_cast<int>(v.size()) != ambient_)
            throw DimensionMismatch("vector has wrong ambient dimension");
        const auto pc = pivots();
        for (std::size_t k = 0; k < basis_.size(); ++k) {
            const Rational f = v[pc[k]];
            if (is_zero(f)) continue;
            for (int c = pc[k]; c < ambient_; ++c)
                if (!is_zero(basis_[k][c])) v[c] -= f * basis_[k][c];
        }
        for (const auto& x : v)
            if (!is_zero(x)) return false;
        return true;
    }

    bool contains(const Subspace& other) const {
        if (other.ambient_ != ambient_)
            throw DimensionMismatch("subspaces have different ambient dimensions");
        for (const auto& row : other.basis_)
            if (!contains(row)) return false;
        return true;
    }

    friend bool subspace_equal(const Subspace& a, const Subspace& b) {
        if (a.ambient_ != b.ambient_)
            throw DimensionMismatch("subspaces have different ambient dimensions");
        return a.basis_ == b.basis_;
    }

private:
    Subspace(int ambient, std::vector<std::vector<Rational>> basis)
        : ambient_(ambient), basis_(std::move(basis)) {
        if (ambient < 0) throw DimensionMismatch("negative ambient dimension");
    }

    int ambient_;
    std::vector<std::vector<Rational>> basis_;
};

inline Subspace nullspace(const RationalMatrix& m) {
    auto ech = rref(m);
    const int cols = m.cols();
    std::vector<bool> is_pivot(cols, false);
    for (int c : ech.pivot_cols) is_pivot[c] = true;
    std::vector<std::vector<Rational>> gens;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(cols, Rational(0));
        v[f] = 1;
        for (std::size_t k = 0; k < ech.pivot_cols.size(); ++k)
            v[ech.pivot_cols[k]] = -ech.mat.at(static_cast<int>(k), f);
        gens.push_back(std::move(v));
    }
    return Subspace::from_generators(cols, gens);
}

// Image of s under the coordinate projection selecting `coords` (in order).
inline Subspace project(const Subspace& s, const std::vector<int>& coords) {
    for (int c : coords)
        if (c < 0 || c >= s.ambient()) throw DimensionMismatch("projection coordinate out of range");
    std::vector<std::vector<Rational>> gens;
    gens.reserve(s.dim());
    for (const auto& row : s.basis()) {
        std::vector<Rational> g;
        g.reserve(coords.size());
        for (int c : coords) g.push_back(row[c]);
        gens.push_back(std::move(g));
    }
    return Subspace::from_generators(static_cast<int>(coords.size()), gens);
}

// Particular solution of M x = rhs with all free coordinates set to zero;
// nullopt when the system is inconsistent.
inline std::optional<std::vector<Rational>> solve_affine(const RationalMatrix& m,
                                                         const std::vector<Rational>& rhs) {
    if (static_cast<int>(rhs.size()) != m.rows())
        throw DimensionMismatch("right-hand side has wrong dimension");
    RationalMatrix aug(m.rows(), m.cols() + 1);
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) aug.at(r, c) = m.at(r, c);
        aug.at(r, m.cols()) = rhs[r];
    }
    auto ech = rref(std::move(aug));
    for (int c : ech.pivot_cols)
        if (c == m.cols()) return std::nullopt;
    std::vector<Rational> x(m.cols(), Rational(0));
    for (std::size_t k = 0; k < ech.pivot_cols.size(); ++k)
        x[ech.pivot_cols[k]] = ech.mat.at(static_cast<int>(k), m.cols());
    return x;
}

} // namespace hkit

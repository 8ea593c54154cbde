#pragma once

#include <atomic>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "division.hpp"
#include "polynomial.hpp"

namespace hkit {

// One affine chart of the source: a p x q matrix A of polynomials, the
// mapping phi into R^n, and optionally a right-hand side f, all exact.
struct Chart {
    int dim = 1; // chart dimension n'
    std::vector<std::vector<Polynomial>> a;
    std::vector<Polynomial> phi;
    std::optional<std::vector<Polynomial>> f;
};

class EquationData {
public:
    EquationData(int target_dim, int p, int q, std::vector<Chart> charts)
        : n_(target_dim), p_(p), q_(q), charts_(std::move(charts)) {
        if (n_ < 1 || p_ < 1 || q_ < 1)
            throw DimensionMismatch("equation data needs n, p, q >= 1");
        if (charts_.empty()) throw DimensionMismatch("equation data needs at least one chart");
        for (const auto& ch : charts_) {
            if (ch.dim < 1) throw DimensionMismatch("chart dimension must be >= 1");
            if (static_cast<int>(ch.a.size()) != p_)
                throw DimensionMismatch("matrix A has wrong row count");
            for (const auto& row : ch.a) {
                if (static_cast<int>(row.size()) != q_)
                    throw DimensionMismatch("matrix A has wrong column count");
                for (const auto& entry : row)
                    if (entry.n() != ch.dim)
                        throw DimensionMismatch("matrix entry has wrong variable count");
            }
            if (static_cast<int>(ch.phi.size()) != n_)
                throw DimensionMismatch("phi has wrong component count");
            for (const auto& c : ch.phi)
                if (c.n() != ch.dim) throw DimensionMismatch("phi component has wrong variable count");
            if (ch.f) {
                if (static_cast<int>(ch.f->size()) != p_)
                    throw DimensionMismatch("f has wrong component count");
                for (const auto& c : *ch.f)
                    if (c.n() != ch.dim) throw DimensionMismatch("f component has wrong variable count");
            }
        }
    }

    int target_dim() const { return n_; }
    int p() const { return p_; }
    int q() const { return q_; }
    const std::vector<Chart>& charts() const { return charts_; }

    bool phi_is_identity(int chart_idx) const {
        const Chart& ch = charts_.at(chart_idx);
        if (ch.dim != n_) return false;
        for (int k = 0; k < n_; ++k)
            if (ch.phi[k] != Polynomial::variable(ch.dim, k)) return false;
        return true;
    }

private:
    int n_, p_, q_;
    std::vector<Chart> charts_;
};

// A user-supplied preimage of the query point under phi.
struct FibrePoint {
    int chart = 0;
    std::vector<Rational> point;
};

struct RelationRowKey {
    int nu = 0; // fibre point index
    Multiindex alpha;
    int i = 1; // equation component
};

// The exact linear system cutting out the degree-<= r coefficients of the
// relation module at b: one block of rows per fibre point, one column per
// unknown coefficient (beta, j), columns sorted by the monomial order.
struct RelationSystem {
    int r = 0;
    std::vector<Rational> b;
    MonomialOrder order;            // on (beta, j): dims (n, q)
    std::vector<Exponent> col_exps;
    std::vector<RelationRowKey> row_keys;
    RationalMatrix matrix{0, 0};
    int fibre_count = 0;
};

namespace detail {

inline void validate_fibre_point(const EquationData& data, const std::vector<Rational>& b,
                                 const FibrePoint& fp) {
    if (fp.chart < 0 || fp.chart >= static_cast<int>(data.charts().size()))
        throw DimensionMismatch("fibre point references a missing chart");
    const Chart& ch = data.charts()[fp.chart];
    if (static_cast<int>(fp.point.size()) != ch.dim)
        throw DimensionMismatch("fibre point has wrong chart dimension");
    for (int k = 0; k < data.target_dim(); ++k)
        if (ch.phi[k].eval(fp.point) != b[k])
            throw FibreMismatch("fibre point does not map to the query point under phi");
}

} // namespace detail

// Assembles the linear system whose solutions are the degree-<= r coefficient
// vectors of relations at b: for every fibre point a, Taylor-expand A and phi
// at a to order r, drop phi's constant term, and read off, per unknown
// monomial (beta, j), the degree-<= r coefficients of A * ((phi-jet)^beta e_j).
// `unknown_degree` enlarges the column range past r when nonnegative (the
// constraints stay mod (x)^{r+1}); by default it equals r.
inline RelationSystem assemble_relation_system(const EquationData& data,
                                               const std::vector<Rational>& b,
                                               const std::vector<FibrePoint>& fibre, int r,
                                               const MonomialOrder& ord,
                                               int unknown_degree = -1) {
    if (r < 0) throw Error("order r must be nonnegative");
    if (ord.n() != data.target_dim() || ord.p() != data.q())
        throw DimensionMismatch("order dimensions must be (n, q)");
    if (static_cast<int>(b.size()) != data.target_dim())
        throw DimensionMismatch("query point has wrong dimension");
    if (fibre.empty()) throw Error("at least one fibre point is required");
    const int ud = unknown_degree < 0 ? r : unknown_degree;

    RelationSystem sys{r, b, ord, {}, {}, RationalMatrix(0, 0), static_cast<int>(fibre.size())};
    for (const auto& beta : multiindices_up_to(data.target_dim(), ud))
        for (int j = 1; j <= data.q(); ++j) sys.col_exps.push_back(Exponent{beta, j});
    std::sort(sys.col_exps.begin(), sys.col_exps.end(),
              [&](const Exponent& x, const Exponent& y) { return ord.less(x, y); });

    for (std::size_t nu = 0; nu < fibre.size(); ++nu) {
        detail::validate_fibre_point(data, b, fibre[nu]);
        const Chart& ch = data.charts()[fibre[nu].chart];
        for (const auto& alpha : multiindices_up_to(ch.dim, r))
            for (int i = 1; i <= data.p(); ++i)
                sys.row_keys.push_back(RelationRowKey{static_cast<int>(nu), alpha, i});
    }

    RationalMatrix m(static_cast<int>(sys.row_keys.size()), static_cast<int>(sys.col_exps.size()));
    m.set_col_labels(sys.col_exps);

    int row_offset = 0;
    for (std::size_t nu = 0; nu < fibre.size(); ++nu) {
        const Chart& ch = data.charts()[fibre[nu].chart];
        const auto& a = fibre[nu].point;
        const MonomialOrder xord(ch.dim, 1);
        const auto alphas = multiindices_up_to(ch.dim, r);
        std::map<Multiindex, int> alpha_index;
        for (std::size_t k = 0; k < alphas.size(); ++k)
            alpha_index.emplace(alphas[k], static_cast<int>(k));

        std::vector<std::vector<SeriesVec>> ajet;
        ajet.reserve(data.p());
        for (int i = 0; i < data.p(); ++i) {
            std::vector<SeriesVec> row;
            row.reserve(data.q());
            for (int j = 0; j < data.q(); ++j)
                row.push_back(taylor_expand_at(ch.a[i][j], a, r, xord));
            ajet.push_back(std::move(row));
        }
        std::vector<SeriesVec> phijet;
        phijet.reserve(data.target_dim());
        for (int k = 0; k < data.target_dim(); ++k)
            phijet.push_back(drop_constant(taylor_expand_at(ch.phi[k], a, r, xord)));

        std::map<Multiindex, SeriesVec> powers;
        SeriesVec one(xord, r);
        one.add_term(Exponent{Multiindex(ch.dim, 0), 1}, Rational(1));
        powers.emplace(Multiindex(data.target_dim(), 0), one);
        auto power_of = [&](auto&& self, const Multiindex& beta) -> const SeriesVec& {
            auto it = powers.find(beta);
            if (it != powers.end()) return it->second;
            int k = 0;
            while (beta[k] == 0) ++k;
            Multiindex below = beta;
            --below[k];
            const SeriesVec& base = self(self, below);
            return powers.emplace(beta, multiply(base, phijet[k])).first->second;
        };

        for (std::size_t col = 0; col < sys.col_exps.size(); ++col) {
            const Exponent& be = sys.col_exps[col];
            const SeriesVec& pw = power_of(power_of, be.alpha);
            if (pw.is_zero()) continue;
            for (int i = 1; i <= data.p(); ++i) {
                SeriesVec prod = multiply(ajet[i - 1][be.j - 1], pw);
                for (const auto& [e, c] : prod.terms()) {
                    const int rrow = row_offset + alpha_index.at(e.alpha) * data.p() + (i - 1);
                    m.at(rrow, static_cast<int>(col)) = c;
                }
            }
        }
        row_offset += static_cast<int>(alphas.size()) * data.p();
    }
    sys.matrix = std::move(m);
    return sys;
}

// The projected relation module pi_r(R_r(b)) as a canonical subspace of the
// coefficient space.
struct RelationBasis {
    int r = 0;
    std::vector<Rational> b;
    MonomialOrder order;
    std::vector<Exponent> col_exps;
    Subspace space = Subspace::zero(0);
};

inline RelationBasis relation_basis(const RelationSystem& sys) {
    return {sys.r, sys.b, sys.order, sys.col_exps, nullspace(sys.matrix)};
}

inline std::vector<int> coords_up_to_degree(const std::vector<Exponent>& exps, int l) {
    std::vector<int> coords;
    for (std::size_t c = 0; c < exps.size(); ++c)
        if (degree_of(exps[c]) <= l) coords.push_back(static_cast<int>(c));
    return coords;
}

// pi_l applied to the basis: image of the subspace under the coordinate
// projection onto the unknowns of degree <= l.
inline Subspace project_relations(const RelationBasis& basis, int l) {
    if (l > basis.r) throw Error("projection degree exceeds the basis order");
    if (l < 0) throw Error("projection degree must be nonnegative");
    return project(basis.space, coords_up_to_degree(basis.col_exps, l));
}

inline int rank_rho0(const RelationSystem& sys) { return rank(sys.matrix); }

// Rank of the submatrix keeping only columns with l < |beta| <= r.
inline int rank_rho1(const RelationSystem& sys, int l) {
    if (l > sys.r) throw Error("l must not exceed r");
    std::vector<int> keep;
    for (std::size_t c = 0; c < sys.col_exps.size(); ++c) {
        const int d = degree_of(sys.col_exps[c]);
        if (d > l && d <= sys.r) keep.push_back(static_cast<int>(c));
    }
    if (keep.empty()) return 0;
    return rank(sys.matrix.submatrix_cols(keep));
}

// Dimensions of pi_l(R_r(b)) over a window of orders, with the first order
// from which the projected subspace is constant across the rest of the
// window. Stability over the window is evidence, not a proof, except when
// the projection is zero (monotonicity pins it forever).
struct ChevalleyReport {
    std::vector<Rational> b;
    int l = 0;
    int r_max = 0;
    std::vector<int> dims; // r = l .. r_max
    std::optional<int> stabilization_r;
    int fibre_count = 0;
    Subspace final_projection = Subspace::zero(0);
    std::vector<Exponent> projection_exps;
};

inline ChevalleyReport chevalley_function(const EquationData& data, const std::vector<Rational>& b,
                                          const std::vector<FibrePoint>& fibre, int l, int r_max,
                                          const MonomialOrder& ord) {
    if (l < 0 || l > r_max) throw Error("need 0 <= l <= r_max");
    ChevalleyReport rep;
    rep.b = b;
    rep.l = l;
    rep.r_max = r_max;
    rep.fibre_count = static_cast<int>(fibre.size());

    std::vector<Subspace> projections;
    for (int r = l; r <= r_max; ++r) {
        RelationSystem sys = assemble_relation_system(data, b, fibre, r, ord);
        RelationBasis basis = relation_basis(sys);
        if (r == l)
            for (int c : coords_up_to_degree(basis.col_exps, l))
                rep.projection_exps.push_back(basis.col_exps[c]);
        projections.push_back(project_relations(basis, l));
        rep.dims.push_back(projections.back().dim());
    }
    rep.final_projection = projections.back();

    int stab = static_cast<int>(projections.size()) - 1;
    while (stab > 0 && subspace_equal(projections[stab - 1], projections.back())) --stab;
    const bool tail_has_evidence = stab < static_cast<int>(projections.size()) - 1;
    const bool pinned_zero = projections.back().dim() == 0;
    if (tail_has_evidence || pinned_zero) rep.stabilization_r = l + stab;
    return rep;
}

// Result of solving A * (P `after` phi) = f to order r at the fibre of b:
// either the canonical polynomial solution (free coefficients zeroed) or
// unsolvable at that order.
struct FormalSolveResult {
    std::optional<std::vector<Polynomial>> solution; // q polynomials in y, degree <= r
};

inline FormalSolveResult formal_solve_at_point(const EquationData& data,
                                               const std::vector<Rational>& b,
                                               const std::vector<FibrePoint>& fibre, int r,
                                               const MonomialOrder& ord) {
    for (const auto& fp : fibre) {
        const Chart& ch = data.charts().at(fp.chart);
        if (!ch.f) throw Error("equation data has no right-hand side f for a referenced chart");
    }
    RelationSystem sys = assemble_relation_system(data, b, fibre, r, ord);

    std::vector<Rational> rhs(sys.row_keys.size(), Rational(0));
    int row_offset = 0;
    for (std::size_t nu = 0; nu < fibre.size(); ++nu) {
        const Chart& ch = data.charts()[fibre[nu].chart];
        const MonomialOrder xord(ch.dim, 1);
        const auto alphas = multiindices_up_to(ch.dim, r);
        std::map<Multiindex, int> alpha_index;
        for (std::size_t k = 0; k < alphas.size(); ++k)
            alpha_index.emplace(alphas[k], static_cast<int>(k));
        for (int i = 1; i <= data.p(); ++i) {
            SeriesVec fj = taylor_expand_at((*ch.f)[i - 1], fibre[nu].point, r, xord);
            for (const auto& [e, c] : fj.terms())
                rhs[row_offset + alpha_index.at(e.alpha) * data.p() + (i - 1)] = c;
        }
        row_offset += static_cast<int>(alphas.size()) * data.p();
    }

    auto w = solve_affine(sys.matrix, rhs);
    if (!w) return {std::nullopt};

    // P_j(y) = sum_beta W_{beta,j} (y - b)^beta
    const int n = data.target_dim();
    std::vector<Polynomial> shifted_vars;
    shifted_vars.reserve(n);
    for (int k = 0; k < n; ++k) {
        Polynomial yk = Polynomial::variable(n, k);
        yk += Polynomial::constant(n, -b[k]);
        shifted_vars.push_back(yk);
    }
    std::vector<Polynomial> p(data.q(), Polynomial(n));
    for (std::size_t c = 0; c < sys.col_exps.size(); ++c) {
        if (is_zero((*w)[c])) continue;
        const Exponent& e = sys.col_exps[c];
        Polynomial mono = Polynomial::constant(n, (*w)[c]);
        for (int k = 0; k < n; ++k)
            for (int t = 0; t < e.alpha[k]; ++t) mono = mono * shifted_vars[k];
        p[e.j - 1] += mono;
    }

    // direct jet verification: f - A (P `after` phi) must be r-flat at every
    // fibre point
    for (const auto& fp : fibre) {
        const Chart& ch = data.charts()[fp.chart];
        std::vector<Polynomial> p_phi;
        p_phi.reserve(data.q());
        for (int j = 0; j < data.q(); ++j) p_phi.push_back(p[j].compose(ch.phi));
        for (int i = 0; i < data.p(); ++i) {
            Polynomial defect = (*ch.f)[i];
            for (int j = 0; j < data.q(); ++j) defect -= ch.a[i][j] * p_phi[j];
            if (!taylor_expand_at(defect, fp.point, r).is_zero())
                throw Error("internal: solver produced a non-flat defect");
        }
    }
    return {std::move(p)};
}

// One grid point of a scan: the projected dimension, the rank of the system,
// the diagram of initial exponents of pi_r(R_r(b)), and the Chevalley window
// l..r, or a reason the point was skipped.
struct ScanPointResult {
    std::vector<Rational> b;
    bool skipped = false;
    std::string skip_reason;
    int dim_pi_l = 0;
    int rho0 = 0;
    std::vector<int> dims;
    std::optional<int> stabilization_r;
    std::optional<Diagram> diagram;
    int fibre_count = 0;
};

struct ScanGroup {
    std::vector<std::size_t> point_indices;
};

struct ScanReport {
    int l = 0, r = 0;
    std::vector<ScanPointResult> points; // lexicographically sorted by b
    std::vector<ScanGroup> groups;       // grouped by (diagram, dims, rho0, dim_pi_l)
    std::optional<int> min_candidate_r, max_candidate_r;
};

namespace detail {

inline bool point_less(const std::vector<Rational>& a, const std::vector<Rational>& b0) {
    for (std::size_t i = 0; i < a.size() && i < b0.size(); ++i) {
        const int c = cmp(a[i], b0[i]);
        if (c != 0) return c < 0;
    }
    return a.size() < b0.size();
}

inline std::string group_key(const ScanPointResult& p) {
    std::ostringstream os;
    if (p.diagram) {
        for (const auto& v : p.diagram->vertices()) {
            for (int x : v.alpha) os << x << ',';
            os << ':' << v.j << '|';
        }
    }
    os << ';';
    for (int d : p.dims) os << d << ',';
    os << ';' << p.rho0 << ';' << p.dim_pi_l;
    return os.str();
}

inline unsigned scan_thread_count(std::size_t tasks) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("HKIT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) n = static_cast<unsigned>(v);
    }
    if (n > tasks) n = tasks == 0 ? 1 : static_cast<unsigned>(tasks);
    return n;
}

} // namespace detail

// Evaluates the relation calculus at every grid point and groups points with
// identical (diagram, dims, rho0, dim pi_l). Fibres: user-supplied per point,
// or the point itself on identity charts. Skipped points are reported, never
// dropped. Grid points are processed concurrently; the report ordering is
// independent of scheduling.
inline ScanReport diagram_scan(const EquationData& data, std::vector<std::vector<Rational>> grid,
                               const std::map<std::vector<Rational>, std::vector<FibrePoint>>& fibres,
                               int l, int r, const MonomialOrder& ord) {
    if (l < 0 || l > r) throw Error("need 0 <= l <= r");
    ScanReport rep;
    rep.l = l;
    rep.r = r;
    std::sort(grid.begin(), grid.end(), detail::point_less);
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    rep.points.resize(grid.size());

    auto eval_point = [&](std::size_t idx) {
        ScanPointResult res;
        res.b = grid[idx];
        try {
            std::vector<FibrePoint> fibre;
            if (auto it = fibres.find(grid[idx]); it != fibres.end()) {
                fibre = it->second;
            } else {
                for (std::size_t ci = 0; ci < data.charts().size(); ++ci)
                    if (data.phi_is_identity(static_cast<int>(ci)))
                        fibre.push_back(FibrePoint{static_cast<int>(ci), grid[idx]});
                if (fibre.empty()) {
                    res.skipped = true;
                    res.skip_reason = "no fibre supplied and phi is not the identity";
                    rep.points[idx] = std::move(res);
                    return;
                }
            }
            res.fibre_count = static_cast<int>(fibre.size());
            RelationSystem sys = assemble_relation_system(data, grid[idx], fibre, r, ord);
            RelationBasis basis = relation_basis(sys);
            res.rho0 = static_cast<int>(sys.col_exps.size()) - basis.space.dim();
            res.dim_pi_l = project_relations(basis, l).dim();
            ChevalleyReport chev = chevalley_function(data, grid[idx], fibre, l, r, ord);
            res.dims = chev.dims;
            res.stabilization_r = chev.stabilization_r;
            // leading exponents of the echelon basis of pi_r(R_r(b))
            std::vector<Exponent> pivot_exps;
            for (int pc : basis.space.pivots())
                if (pc < static_cast<int>(basis.col_exps.size()))
                    pivot_exps.push_back(basis.col_exps[pc]);
            res.diagram = Diagram(data.target_dim(), data.q(), std::move(pivot_exps), r);
        } catch (const Error& e) {
            // bad fibre data for one point must not sink the whole scan
            res.skipped = true;
            res.skip_reason = e.what();
        }
        rep.points[idx] = std::move(res);
    };

    const unsigned workers = detail::scan_thread_count(grid.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) eval_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1))
                    eval_point(i);
            });
        for (auto& th : pool) th.join();
    }

    std::map<std::string, std::size_t> group_of;
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        if (rep.points[i].skipped) continue;
        const std::string key = detail::group_key(rep.points[i]);
        auto it = group_of.find(key);
        if (it == group_of.end()) {
            group_of.emplace(key, rep.groups.size());
            rep.groups.push_back(ScanGroup{{i}});
        } else {
            rep.groups[it->second].point_indices.push_back(i);
        }
        const auto& cand = rep.points[i].stabilization_r;
        if (cand) {
            if (!rep.min_candidate_r || *cand < *rep.min_candidate_r) rep.min_candidate_r = cand;
            if (!rep.max_candidate_r || *cand > *rep.max_candidate_r) rep.max_candidate_r = cand;
        }
    }
    std::sort(rep.groups.begin(), rep.groups.end(), [](const ScanGroup& a, const ScanGroup& b) {
        return a.point_indices.front() < b.point_indices.front();
    });
    return rep;
}

} // namespace hkit

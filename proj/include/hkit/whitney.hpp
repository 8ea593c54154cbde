#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "polynomial.hpp"

namespace hkit {

// An affine stratum a(t) = a0 + sum_k t_k u_k with linearly independent
// directions u_k in Q^n.
struct AffineStratum {
    std::vector<Rational> origin;
    std::vector<std::vector<Rational>> directions;

    int n() const { return static_cast<int>(origin.size()); }
    int dim() const { return static_cast<int>(directions.size()); }

    void validate() const {
        if (origin.empty()) throw DimensionMismatch("stratum needs ambient dimension >= 1");
        if (directions.empty()) throw DimensionMismatch("stratum needs at least one direction");
        for (const auto& u : directions)
            if (u.size() != origin.size())
                throw DimensionMismatch("stratum direction has wrong dimension");
        RationalMatrix m(dim(), n());
        for (int r = 0; r < dim(); ++r)
            for (int c = 0; c < n(); ++c) m.at(r, c) = directions[r][c];
        if (rank(m) != dim()) throw DimensionMismatch("stratum directions are linearly dependent");
    }
};

// Jet-field data on a polynomially parameterized affine stratum: one
// polynomial coefficient f_alpha(t) per |alpha| <= m. Coefficients are the
// derivative values themselves (no 1/alpha! normalization).
class JetField {
public:
    JetField(int n, int m, AffineStratum stratum, std::map<Multiindex, Polynomial> coeffs)
        : n_(n), m_(m), stratum_(std::move(stratum)), coeffs_(std::move(coeffs)) {
        if (n_ < 1 || m_ < 0) throw DimensionMismatch("jet field needs n >= 1 and m >= 0");
        stratum_.validate();
        if (stratum_.n() != n_) throw DimensionMismatch("stratum lives in the wrong ambient space");
        for (const auto& [alpha, f] : coeffs_) {
            if (static_cast<int>(alpha.size()) != n_)
                throw DimensionMismatch("coefficient multiindex has wrong length");
            for (int e : alpha)
                if (e < 0) throw DimensionMismatch("negative exponent entry");
            if (degree_of(alpha) > m_)
                throw DimensionMismatch("coefficient multiindex exceeds the field order");
            if (f.n() != stratum_.dim())
                throw DimensionMismatch("coefficient polynomial has wrong parameter count");
        }
    }

    int n() const { return n_; }
    int m() const { return m_; }
    const AffineStratum& stratum() const { return stratum_; }

    Polynomial coeff(const Multiindex& alpha) const {
        auto it = coeffs_.find(alpha);
        return it == coeffs_.end() ? Polynomial(stratum_.dim()) : it->second;
    }

private:
    int n_, m_;
    AffineStratum stratum_;
    std::map<Multiindex, Polynomial> coeffs_;
};

struct BorelFailure {
    Multiindex alpha;
    int direction = 1; // 1-based index k of the stratum direction
};

// Borel compatibility: differentiating the field along each stratum direction
// must agree with formal differentiation in x, i.e. for every direction u_k
// and every |alpha| <= m-1,
//     d/dt_k f_alpha(t) = sum_i (u_k)_i f_{alpha+e_i}(t)
// as exact polynomial identities. Returns the first failing (alpha, k) in
// (degree, lex, k) order, or nothing on success. m = 0 passes vacuously.
inline std::optional<BorelFailure> borel_check(const JetField& field) {
    if (field.m() == 0) return std::nullopt;
    const int n = field.n();
    const int d = field.stratum().dim();
    for (const auto& alpha : multiindices_up_to(n, field.m() - 1)) {
        for (int k = 0; k < d; ++k) {
            Polynomial lhs = field.coeff(alpha).derivative(k);
            Polynomial rhs(field.stratum().dim());
            for (int i = 0; i < n; ++i) {
                const Rational& ui = field.stratum().directions[k][i];
                if (is_zero(ui)) continue;
                Multiindex up = alpha;
                ++up[i];
                rhs += ui * field.coeff(up);
            }
            if (lhs != rhs) return BorelFailure{alpha, k + 1};
        }
    }
    return std::nullopt;
}

// The field of an honest polynomial g restricted to the stratum:
// f_alpha(t) = (d^alpha g)(a0 + sum t_k u_k), computed symbolically.
inline JetField field_of_function(const Polynomial& g, const AffineStratum& stratum, int m) {
    stratum.validate();
    if (g.n() != stratum.n())
        throw DimensionMismatch("function and stratum live in different spaces");
    const int d = stratum.dim();
    std::vector<Polynomial> param;
    param.reserve(stratum.n());
    for (int i = 0; i < stratum.n(); ++i) {
        Polynomial xi = Polynomial::constant(d, stratum.origin[i]);
        for (int k = 0; k < d; ++k) {
            if (is_zero(stratum.directions[k][i])) continue;
            xi += stratum.directions[k][i] * Polynomial::variable(d, k);
        }
        param.push_back(xi);
    }
    std::map<Multiindex, Polynomial> coeffs;
    for (const auto& alpha : multiindices_up_to(g.n(), m)) {
        Polynomial f_alpha = g.derivative(alpha).compose(param);
        if (!f_alpha.is_zero()) coeffs.emplace(alpha, f_alpha);
    }
    return JetField(g.n(), m, stratum, std::move(coeffs));
}

} // namespace hkit

#pragma once

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relations.hpp"
#include "whitney.hpp"

namespace hkit::io {

using json = nlohmann::json;

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                       const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw SchemaError(path, "unknown field '" + it.key() + "'");
    }
}

inline const json& need(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path, std::string("missing field '") + key + "'");
    return *it;
}

inline int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    return v.get<int>();
}

inline Rational as_rational(const json& v, const std::string& path) {
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (!v.is_string()) throw SchemaError(path, "expected a rational string");
    try {
        return parse_rational(v.get<std::string>());
    } catch (const SchemaError& e) {
        throw SchemaError(path, e.what());
    }
}

inline std::vector<Rational> as_rational_vector(const json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an array of rationals");
    std::vector<Rational> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_rational(v[i], path + "/" + std::to_string(i)));
    return out;
}

inline Multiindex as_multiindex(const json& v, int n, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an exponent array");
    if (static_cast<int>(v.size()) != n)
        throw SchemaError(path, "exponent array has wrong length");
    Multiindex a(n);
    for (int i = 0; i < n; ++i) {
        a[i] = as_int(v[i], path + "/" + std::to_string(i));
        if (a[i] < 0) throw SchemaError(path + "/" + std::to_string(i), "negative exponent");
    }
    return a;
}

// ---- serialization ---------------------------------------------------------

inline json rational_vec_json(const std::vector<Rational>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(rational_str(x));
    return a;
}

inline json exponent_json(const Exponent& e) {
    return json{{"alpha", e.alpha}, {"j", e.j}};
}

inline json series_json(const SeriesVec& s) {
    json a = json::array();
    for (const auto& [e, c] : s.terms())
        a.push_back(json{{"alpha", e.alpha}, {"coeff", rational_str(c)}, {"j", e.j}});
    return a;
}

inline json poly_json(const Polynomial& f) {
    json a = json::array();
    for (const auto& [al, c] : f.terms())
        a.push_back(json{{"alpha", al}, {"coeff", rational_str(c)}});
    return a;
}

inline json diagram_json(const Diagram& d) {
    json verts = json::array();
    for (const auto& v : d.vertices()) verts.push_back(exponent_json(v));
    return json{{"vertices", verts}, {"certified_degree", d.certified_degree()}};
}

// Basis rows rendered as term lists against the column labels.
inline json subspace_json(const Subspace& s, const std::vector<Exponent>& labels) {
    json rows = json::array();
    for (const auto& row : s.basis()) {
        json terms = json::array();
        for (std::size_t c = 0; c < row.size(); ++c)
            if (!is_zero(row[c]))
                terms.push_back(json{{"alpha", labels[c].alpha},
                                     {"coeff", rational_str(row[c])},
                                     {"j", labels[c].j}});
        rows.push_back(std::move(terms));
    }
    return json{{"dim", s.dim()}, {"basis", rows}};
}

// ---- parsing ----------------------------------------------------------------

inline SeriesVec series_from_json(const json& v, const MonomialOrder& ord, int trunc,
                                  const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an array of terms");
    SeriesVec s(ord, trunc);
    for (std::size_t t = 0; t < v.size(); ++t) {
        const std::string tp = path + "/" + std::to_string(t);
        const json& term = v[t];
        if (!term.is_object()) throw SchemaError(tp, "expected a term object");
        check_keys(term, {"coeff", "alpha", "j"}, tp);
        const Rational c = as_rational(need(term, "coeff", tp), tp + "/coeff");
        const Multiindex a = as_multiindex(need(term, "alpha", tp), ord.n(), tp + "/alpha");
        int j = 1;
        if (auto it = term.find("j"); it != term.end()) j = as_int(*it, tp + "/j");
        if (j < 1 || j > ord.p()) throw SchemaError(tp + "/j", "component index out of range");
        if (degree_of(a) > trunc)
            throw SchemaError(tp + "/alpha", "term degree exceeds the truncation degree");
        s.add_term(Exponent{a, j}, c);
    }
    return s;
}

inline Polynomial poly_from_json(const json& v, int nvars, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an array of terms");
    Polynomial f(nvars);
    for (std::size_t t = 0; t < v.size(); ++t) {
        const std::string tp = path + "/" + std::to_string(t);
        const json& term = v[t];
        if (!term.is_object()) throw SchemaError(tp, "expected a term object");
        check_keys(term, {"coeff", "alpha"}, tp);
        const Rational c = as_rational(need(term, "coeff", tp), tp + "/coeff");
        const Multiindex a = as_multiindex(need(term, "alpha", tp), nvars, tp + "/alpha");
        f.add_term(a, c);
    }
    return f;
}

inline FibrePoint fibre_from_json(const json& v, const std::string& path) {
    if (!v.is_object()) throw SchemaError(path, "expected a fibre point object");
    check_keys(v, {"chart", "point"}, path);
    FibrePoint fp;
    fp.chart = v.contains("chart") ? as_int(v["chart"], path + "/chart") : 0;
    if (fp.chart < 0) throw SchemaError(path + "/chart", "negative chart index");
    fp.point = as_rational_vector(need(v, "point", path), path + "/point");
    return fp;
}

// A parsed and structurally validated input document. Series payloads are
// kept as raw JSON because building a jet needs the final order and
// truncation degree, which command-line flags may override.
struct InputDocument {
    int schema = 1;
    std::vector<std::string> variables;
    int p = 1;
    std::optional<int> q;
    std::optional<int> trunc;
    std::optional<std::vector<Rational>> order_weights;
    std::optional<std::vector<Rational>> point;
    std::vector<FibrePoint> fibres;
    std::optional<std::vector<std::vector<Rational>>> grid;
    std::map<std::vector<Rational>, std::vector<FibrePoint>> grid_fibres;
    json dividend;   // null when absent
    json divisors;   // null when absent
    json generators; // null when absent
    json candidate;  // null when absent
    std::optional<EquationData> equation;
    std::optional<JetField> jetfield;

    int n() const { return static_cast<int>(variables.size()); }
};

namespace detail {

inline void validate_terms(const json& terms, int n, int p, const std::string& path) {
    if (!terms.is_array()) throw SchemaError(path, "expected an array of terms");
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const std::string tp = path + "/" + std::to_string(t);
        const json& term = terms[t];
        if (!term.is_object()) throw SchemaError(tp, "expected a term object");
        check_keys(term, {"coeff", "alpha", "j"}, tp);
        as_rational(need(term, "coeff", tp), tp + "/coeff");
        as_multiindex(need(term, "alpha", tp), n, tp + "/alpha");
        if (auto it = term.find("j"); it != term.end()) {
            const int j = as_int(*it, tp + "/j");
            if (j < 1 || j > p) throw SchemaError(tp + "/j", "component index out of range");
        }
    }
}

inline EquationData equation_from_json(const json& eq, int target_dim, std::optional<int> p_hint,
                                       std::optional<int> q_hint, const std::string& path) {
    if (!eq.is_object()) throw SchemaError(path, "expected an object");
    check_keys(eq, {"charts"}, path);
    const json& jcharts = need(eq, "charts", path);
    if (!jcharts.is_array() || jcharts.empty())
        throw SchemaError(path + "/charts", "expected a nonempty array of charts");
    int p = -1, q = -1;
    std::vector<Chart> charts;
    for (std::size_t ci = 0; ci < jcharts.size(); ++ci) {
        const std::string cp = path + "/charts/" + std::to_string(ci);
        const json& jc = jcharts[ci];
        if (!jc.is_object()) throw SchemaError(cp, "expected a chart object");
        check_keys(jc, {"variables", "A", "phi", "f"}, cp);
        const json& vars = need(jc, "variables", cp);
        if (!vars.is_array() || vars.empty())
            throw SchemaError(cp + "/variables", "expected a nonempty array of names");
        Chart ch;
        ch.dim = static_cast<int>(vars.size());
        const json& ja = need(jc, "A", cp);
        if (!ja.is_array() || ja.empty()) throw SchemaError(cp + "/A", "expected a matrix of polynomials");
        for (std::size_t r = 0; r < ja.size(); ++r) {
            const json& jrow = ja[r];
            if (!jrow.is_array() || jrow.empty())
                throw SchemaError(cp + "/A/" + std::to_string(r), "expected a row of polynomials");
            std::vector<Polynomial> row;
            for (std::size_t c = 0; c < jrow.size(); ++c)
                row.push_back(poly_from_json(jrow[c], ch.dim,
                                             cp + "/A/" + std::to_string(r) + "/" + std::to_string(c)));
            ch.a.push_back(std::move(row));
        }
        const json& jphi = need(jc, "phi", cp);
        if (!jphi.is_array() || static_cast<int>(jphi.size()) != target_dim)
            throw SchemaError(cp + "/phi", "phi needs one polynomial per target variable");
        for (std::size_t k = 0; k < jphi.size(); ++k)
            ch.phi.push_back(poly_from_json(jphi[k], ch.dim, cp + "/phi/" + std::to_string(k)));
        if (auto it = jc.find("f"); it != jc.end()) {
            if (!it->is_array()) throw SchemaError(cp + "/f", "expected an array of polynomials");
            std::vector<Polynomial> f;
            for (std::size_t k = 0; k < it->size(); ++k)
                f.push_back(poly_from_json((*it)[k], ch.dim, cp + "/f/" + std::to_string(k)));
            ch.f = std::move(f);
        }
        const int chp = static_cast<int>(ch.a.size());
        const int chq = static_cast<int>(ch.a.front().size());
        if (p < 0) {
            p = chp;
            q = chq;
        } else if (p != chp || q != chq) {
            throw SchemaError(cp + "/A", "charts disagree on the matrix shape");
        }
        charts.push_back(std::move(ch));
    }
    if (p_hint && *p_hint != p) throw SchemaError(path, "field p contradicts the matrix shape");
    if (q_hint && *q_hint != q) throw SchemaError(path, "field q contradicts the matrix shape");
    try {
        return EquationData(target_dim, p, q, std::move(charts));
    } catch (const Error& e) {
        throw SchemaError(path, e.what());
    }
}

inline JetField jetfield_from_json(const json& jf, int n, const std::string& path) {
    if (!jf.is_object()) throw SchemaError(path, "expected an object");
    check_keys(jf, {"order_m", "stratum", "parameters", "coefficients"}, path);
    const int m = as_int(need(jf, "order_m", path), path + "/order_m");
    if (m < 0) throw SchemaError(path + "/order_m", "order must be nonnegative");
    const json& js = need(jf, "stratum", path);
    if (!js.is_object()) throw SchemaError(path + "/stratum", "expected an object");
    check_keys(js, {"origin", "directions"}, path + "/stratum");
    AffineStratum stratum;
    stratum.origin = as_rational_vector(need(js, "origin", path + "/stratum"), path + "/stratum/origin");
    const json& jd = need(js, "directions", path + "/stratum");
    if (!jd.is_array() || jd.empty())
        throw SchemaError(path + "/stratum/directions", "expected a nonempty array");
    for (std::size_t k = 0; k < jd.size(); ++k)
        stratum.directions.push_back(
            as_rational_vector(jd[k], path + "/stratum/directions/" + std::to_string(k)));
    const int d = static_cast<int>(stratum.directions.size());
    if (auto it = jf.find("parameters"); it != jf.end()) {
        if (!it->is_array() || static_cast<int>(it->size()) != d)
            throw SchemaError(path + "/parameters", "expected one name per stratum direction");
    }
    const json& jcoeffs = need(jf, "coefficients", path);
    if (!jcoeffs.is_array()) throw SchemaError(path + "/coefficients", "expected an array");
    std::map<Multiindex, Polynomial> coeffs;
    for (std::size_t k = 0; k < jcoeffs.size(); ++k) {
        const std::string kp = path + "/coefficients/" + std::to_string(k);
        const json& jc = jcoeffs[k];
        if (!jc.is_object()) throw SchemaError(kp, "expected an object");
        check_keys(jc, {"alpha", "poly"}, kp);
        Multiindex alpha = as_multiindex(need(jc, "alpha", kp), n, kp + "/alpha");
        if (degree_of(alpha) > m) throw SchemaError(kp + "/alpha", "degree exceeds order_m");
        Polynomial f = poly_from_json(need(jc, "poly", kp), d, kp + "/poly");
        if (coeffs.count(alpha)) throw SchemaError(kp + "/alpha", "duplicate coefficient");
        coeffs.emplace(std::move(alpha), std::move(f));
    }
    try {
        return JetField(n, m, std::move(stratum), std::move(coeffs));
    } catch (const Error& e) {
        throw SchemaError(path, e.what());
    }
}

} // namespace detail

inline InputDocument parse_input(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("input is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("/", "expected a JSON object");
    check_keys(doc,
               {"schema", "variables", "p", "q", "trunc", "order", "point", "fibres", "grid",
                "grid_fibres", "dividend", "divisors", "generators", "candidate", "equation",
                "jetfield"},
               "/");

    InputDocument out;
    if (doc.contains("schema")) {
        out.schema = as_int(doc["schema"], "/schema");
        if (out.schema != 1) throw SchemaError("/schema", "unsupported schema version");
    }
    const json& vars = need(doc, "variables", "/");
    if (!vars.is_array() || vars.empty())
        throw SchemaError("/variables", "expected a nonempty array of names");
    for (const auto& v : vars) {
        if (!v.is_string()) throw SchemaError("/variables", "variable names must be strings");
        out.variables.push_back(v.get<std::string>());
    }
    const int n = out.n();

    if (doc.contains("p")) {
        out.p = as_int(doc["p"], "/p");
        if (out.p < 1) throw SchemaError("/p", "p must be >= 1");
    }
    if (doc.contains("q")) {
        out.q = as_int(doc["q"], "/q");
        if (*out.q < 1) throw SchemaError("/q", "q must be >= 1");
    }
    if (doc.contains("trunc")) {
        out.trunc = as_int(doc["trunc"], "/trunc");
        if (*out.trunc < 0) throw SchemaError("/trunc", "truncation degree must be nonnegative");
    }
    if (doc.contains("order")) {
        auto w = as_rational_vector(doc["order"], "/order");
        if (static_cast<int>(w.size()) != n)
            throw SchemaError("/order", "expected one weight per variable");
        for (const auto& x : w)
            if (sgn(x) <= 0) throw SchemaError("/order", "weights must be strictly positive");
        out.order_weights = std::move(w);
    }
    if (doc.contains("point")) {
        auto b = as_rational_vector(doc["point"], "/point");
        if (static_cast<int>(b.size()) != n)
            throw SchemaError("/point", "expected one coordinate per variable");
        out.point = std::move(b);
    }
    if (doc.contains("fibres")) {
        const json& jf = doc["fibres"];
        if (!jf.is_array()) throw SchemaError("/fibres", "expected an array");
        for (std::size_t i = 0; i < jf.size(); ++i)
            out.fibres.push_back(fibre_from_json(jf[i], "/fibres/" + std::to_string(i)));
    }
    if (doc.contains("grid")) {
        const json& jg = doc["grid"];
        if (!jg.is_object()) throw SchemaError("/grid", "expected an object");
        check_keys(jg, {"axes", "points"}, "/grid");
        std::vector<std::vector<Rational>> pts;
        if (jg.contains("points")) {
            const json& jp = jg["points"];
            if (!jp.is_array()) throw SchemaError("/grid/points", "expected an array of points");
            for (std::size_t i = 0; i < jp.size(); ++i) {
                auto b = as_rational_vector(jp[i], "/grid/points/" + std::to_string(i));
                if (static_cast<int>(b.size()) != n)
                    throw SchemaError("/grid/points/" + std::to_string(i), "wrong point dimension");
                pts.push_back(std::move(b));
            }
        } else if (jg.contains("axes")) {
            const json& ja = jg["axes"];
            if (!ja.is_array() || static_cast<int>(ja.size()) != n)
                throw SchemaError("/grid/axes", "expected one value list per variable");
            std::vector<std::vector<Rational>> axes;
            for (std::size_t i = 0; i < ja.size(); ++i)
                axes.push_back(as_rational_vector(ja[i], "/grid/axes/" + std::to_string(i)));
            pts.emplace_back();
            for (const auto& axis : axes) {
                if (axis.empty()) {
                    pts.clear();
                    break;
                }
                std::vector<std::vector<Rational>> next;
                for (const auto& prefix : pts)
                    for (const auto& v : axis) {
                        auto np = prefix;
                        np.push_back(v);
                        next.push_back(std::move(np));
                    }
                pts = std::move(next);
            }
        } else {
            throw SchemaError("/grid", "expected 'axes' or 'points'");
        }
        out.grid = std::move(pts);
    }
    if (doc.contains("grid_fibres")) {
        const json& jgf = doc["grid_fibres"];
        if (!jgf.is_array()) throw SchemaError("/grid_fibres", "expected an array");
        for (std::size_t i = 0; i < jgf.size(); ++i) {
            const std::string gp = "/grid_fibres/" + std::to_string(i);
            const json& entry = jgf[i];
            if (!entry.is_object()) throw SchemaError(gp, "expected an object");
            check_keys(entry, {"point", "fibres"}, gp);
            auto b = as_rational_vector(need(entry, "point", gp), gp + "/point");
            const json& fl = need(entry, "fibres", gp);
            if (!fl.is_array()) throw SchemaError(gp + "/fibres", "expected an array");
            std::vector<FibrePoint> fps;
            for (std::size_t k = 0; k < fl.size(); ++k)
                fps.push_back(fibre_from_json(fl[k], gp + "/fibres/" + std::to_string(k)));
            out.grid_fibres.emplace(std::move(b), std::move(fps));
        }
    }

    if (doc.contains("dividend")) {
        detail::validate_terms(doc["dividend"], n, out.p, "/dividend");
        out.dividend = doc["dividend"];
    }
    if (doc.contains("candidate")) {
        detail::validate_terms(doc["candidate"], n, out.p, "/candidate");
        out.candidate = doc["candidate"];
    }
    for (const char* key : {"divisors", "generators"}) {
        if (!doc.contains(key)) continue;
        const json& arr = doc[key];
        const std::string path = std::string("/") + key;
        if (!arr.is_array()) throw SchemaError(path, "expected an array of series");
        for (std::size_t i = 0; i < arr.size(); ++i)
            detail::validate_terms(arr[i], n, out.p, path + "/" + std::to_string(i));
        if (std::string(key) == "divisors") out.divisors = arr;
        else out.generators = arr;
    }
    if (doc.contains("equation")) {
        std::optional<int> p_hint;
        if (doc.contains("p")) p_hint = out.p;
        out.equation = detail::equation_from_json(doc["equation"], n, p_hint, out.q, "/equation");
    }
    if (doc.contains("jetfield"))
        out.jetfield = detail::jetfield_from_json(doc["jetfield"], n, "/jetfield");
    return out;
}

} // namespace hkit::io

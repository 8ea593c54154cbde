#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "io.hpp"

namespace hkit::cli {

using io::InputDocument;
using io::json;

// Exit codes: 0 success, 1 failure (bad input, usage, internal), 2 a negative
// mathematical verdict (UNSAT, FAIL, non-membership, estimate false, no
// stabilization). Scripts can branch on solvability without parsing.
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_verdict = 2;

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::vector<Rational> parse_rational_csv(const std::string& s, const std::string& what) {
    std::vector<Rational> out;
    for (const auto& tok : split(s, ',')) {
        if (tok.empty()) throw SchemaError(what, "empty entry in '" + s + "'");
        out.push_back(parse_rational(tok));
    }
    return out;
}

inline FibrePoint parse_fibre_spec(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw SchemaError("--fibre", "expected 'chart:v1,v2,...' in '" + s + "'");
    FibrePoint fp;
    try {
        fp.chart = std::stoi(s.substr(0, colon));
    } catch (const std::exception&) {
        throw SchemaError("--fibre", "bad chart index in '" + s + "'");
    }
    if (fp.chart < 0) throw SchemaError("--fibre", "negative chart index");
    fp.point = parse_rational_csv(s.substr(colon + 1), "--fibre");
    return fp;
}

inline std::vector<std::vector<Rational>> parse_grid_spec(const std::string& s, int n) {
    std::vector<std::vector<Rational>> axes;
    for (const auto& axis : split(s, 'x')) axes.push_back(parse_rational_csv(axis, "--grid"));
    if (static_cast<int>(axes.size()) != n)
        throw SchemaError("--grid", "expected one axis per variable");
    std::vector<std::vector<Rational>> pts(1);
    for (const auto& axis : axes) {
        std::vector<std::vector<Rational>> next;
        for (const auto& prefix : pts)
            for (const auto& v : axis) {
                auto np = prefix;
                np.push_back(v);
                next.push_back(std::move(np));
            }
        pts = std::move(next);
    }
    return pts;
}

inline std::string read_all(std::istream& in) {
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace detail

struct CommandIO {
    std::istream* in = nullptr;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
};

namespace detail {

struct Options {
    std::string input_path = "-";
    std::string out_path;
    std::optional<int> trunc, l, r, rmax;
    std::string order_csv, point_csv, grid_csv;
    std::vector<std::string> fibre_specs;
};

struct Context {
    InputDocument doc;
    Options opt;

    int n() const { return doc.n(); }

    int require_trunc() const {
        if (opt.trunc) return *opt.trunc;
        if (doc.trunc) return *doc.trunc;
        throw SchemaError("--trunc", "a truncation degree is required (flag or document field)");
    }

    std::vector<Rational> order_weights() const {
        if (!opt.order_csv.empty()) {
            auto w = parse_rational_csv(opt.order_csv, "--order");
            if (static_cast<int>(w.size()) != n())
                throw SchemaError("--order", "expected one weight per variable");
            for (const auto& x : w)
                if (sgn(x) <= 0) throw SchemaError("--order", "weights must be strictly positive");
            return w;
        }
        if (doc.order_weights) return *doc.order_weights;
        return std::vector<Rational>(n(), Rational(1));
    }

    std::vector<Rational> require_point() const {
        if (!opt.point_csv.empty()) {
            auto b = parse_rational_csv(opt.point_csv, "--point");
            if (static_cast<int>(b.size()) != n())
                throw SchemaError("--point", "expected one coordinate per variable");
            return b;
        }
        if (doc.point) return *doc.point;
        throw SchemaError("--point", "a query point is required (flag or document field)");
    }

    const EquationData& require_equation() const {
        if (!doc.equation) throw SchemaError("/equation", "this command needs equation data");
        return *doc.equation;
    }

    std::vector<FibrePoint> resolve_fibre(const EquationData& eq,
                                          const std::vector<Rational>& b) const {
        std::vector<FibrePoint> fibre;
        if (!opt.fibre_specs.empty()) {
            for (const auto& s : opt.fibre_specs) fibre.push_back(parse_fibre_spec(s));
        } else if (!doc.fibres.empty()) {
            fibre = doc.fibres;
        } else {
            for (std::size_t ci = 0; ci < eq.charts().size(); ++ci)
                if (eq.phi_is_identity(static_cast<int>(ci)))
                    fibre.push_back(FibrePoint{static_cast<int>(ci), b});
            if (fibre.empty())
                throw SchemaError("--fibre",
                                  "no fibre points: phi is not the identity, so supply them");
        }
        return fibre;
    }

    int require_flag(const std::optional<int>& v, const char* name) const {
        if (!v) throw SchemaError(name, "this command requires the flag");
        return *v;
    }
};

inline std::vector<SeriesVec> series_list(const json& arr, const MonomialOrder& ord, int trunc,
                                          const std::string& path) {
    std::vector<SeriesVec> out;
    if (arr.is_null()) return out;
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(io::series_from_json(arr[i], ord, trunc, path + "/" + std::to_string(i)));
    return out;
}

inline json order_json(const MonomialOrder& ord) {
    return io::rational_vec_json(ord.weights());
}

struct Outcome {
    json report;
    int code = exit_ok;
};

inline Outcome cmd_divide(const Context& ctx) {
    const int d = ctx.require_trunc();
    const MonomialOrder ord(ctx.n(), ctx.doc.p, ctx.order_weights());
    if (ctx.doc.dividend.is_null()) throw SchemaError("/dividend", "divide needs a dividend");
    if (ctx.doc.divisors.is_null()) throw SchemaError("/divisors", "divide needs divisors");
    SeriesVec f = io::series_from_json(ctx.doc.dividend, ord, d, "/dividend");
    auto divisors = series_list(ctx.doc.divisors, ord, d, "/divisors");
    DivisionResult res = hironaka_divide(f, divisors);
    json quotients = json::array();
    for (const auto& q : res.quotients) quotients.push_back(io::series_json(q));
    json inis = json::array();
    for (const auto& e : res.initial_exponents) inis.push_back(io::exponent_json(e));
    json rep{{"command", "divide"},
             {"trunc", d},
             {"order", order_json(ord)},
             {"initial_exponents", inis},
             {"quotients", quotients},
             {"remainder", io::series_json(res.remainder)}};
    return {rep, exit_ok};
}

inline Outcome cmd_diagram(const Context& ctx) {
    const int d = ctx.require_trunc();
    const MonomialOrder ord(ctx.n(), ctx.doc.p, ctx.order_weights());
    auto gens = series_list(ctx.doc.generators, ord, d, "/generators");
    Diagram diag = compute_diagram(gens, ord, d);
    json rep{{"command", "diagram"},
             {"trunc", d},
             {"order", order_json(ord)},
             {"diagram", io::diagram_json(diag)}};
    return {rep, exit_ok};
}

inline Outcome cmd_stdbasis(const Context& ctx) {
    const int d = ctx.require_trunc();
    const MonomialOrder ord(ctx.n(), ctx.doc.p, ctx.order_weights());
    auto gens = series_list(ctx.doc.generators, ord, d, "/generators");
    auto basis = standard_basis(gens, ord, d);
    json jb = json::array();
    for (const auto& s : basis) jb.push_back(io::series_json(s));
    json rep{{"command", "stdbasis"}, {"trunc", d}, {"order", order_json(ord)}, {"basis", jb}};
    return {rep, exit_ok};
}

inline Outcome cmd_member(const Context& ctx) {
    const int d = ctx.require_trunc();
    const MonomialOrder ord(ctx.n(), ctx.doc.p, ctx.order_weights());
    auto gens = series_list(ctx.doc.generators, ord, d, "/generators");
    if (ctx.doc.candidate.is_null()) throw SchemaError("/candidate", "member needs a candidate");
    SeriesVec g = io::series_from_json(ctx.doc.candidate, ord, d, "/candidate");
    MembershipResult res = membership_test(g, gens, ord, d);
    json rep{{"command", "member"},
             {"trunc", d},
             {"order", order_json(ord)},
             {"member", res.member},
             {"remainder", io::series_json(res.remainder)}};
    return {rep, res.member ? exit_ok : exit_verdict};
}

inline Outcome cmd_complement(const Context& ctx) {
    const int d = ctx.require_trunc();
    const int r = ctx.require_flag(ctx.opt.r, "--r");
    const MonomialOrder ord(ctx.n(), ctx.doc.p, ctx.order_weights());
    auto gens = series_list(ctx.doc.generators, ord, d, "/generators");
    auto exps = complement_basis(gens, ord, d, r);
    json je = json::array();
    for (const auto& e : exps) je.push_back(io::exponent_json(e));
    json rep{{"command", "complement"},
             {"trunc", d},
             {"r", r},
             {"order", order_json(ord)},
             {"complement", je}};
    return {rep, exit_ok};
}

inline Outcome cmd_lambda(const Context& ctx) {
    const int d = ctx.require_trunc();
    const MonomialOrder ord(ctx.n(), ctx.doc.p, ctx.order_weights());
    auto gens = series_list(ctx.doc.generators, ord, d, "/generators");
    const int lambda = artin_rees_lambda(gens, ord, d);
    json rep{{"command", "lambda"}, {"trunc", d}, {"order", order_json(ord)}, {"lambda", lambda}};
    return {rep, exit_ok};
}

inline Outcome cmd_chevalley_estimate(const Context& ctx) {
    const int d = ctx.require_trunc();
    const int l = ctx.require_flag(ctx.opt.l, "--l");
    const MonomialOrder ord(ctx.n(), ctx.doc.p, ctx.order_weights());
    auto gens = series_list(ctx.doc.generators, ord, d, "/generators");
    const bool holds = check_chevalley_estimate(gens, ord, d, l);
    bool nonzero = false;
    for (const auto& g : gens)
        if (!g.is_zero()) nonzero = true;
    json rep{{"command", "chevalley-estimate"},
             {"trunc", d},
             {"l", l},
             {"order", order_json(ord)},
             {"holds", holds}};
    if (nonzero) rep["lambda"] = artin_rees_lambda(gens, ord, d);
    return {rep, holds ? exit_ok : exit_verdict};
}

inline Outcome cmd_relations(const Context& ctx) {
    const EquationData& eq = ctx.require_equation();
    const int r = ctx.require_flag(ctx.opt.r, "--r");
    const auto b = ctx.require_point();
    const MonomialOrder ord(ctx.n(), eq.q(), ctx.order_weights());
    auto fibre = ctx.resolve_fibre(eq, b);
    RelationSystem sys = assemble_relation_system(eq, b, fibre, r, ord);
    RelationBasis basis = relation_basis(sys);
    json rep{{"command", "relations"},
             {"r", r},
             {"point", io::rational_vec_json(b)},
             {"order", order_json(ord)},
             {"s", sys.fibre_count},
             {"rows", sys.matrix.rows()},
             {"columns", sys.matrix.cols()},
             {"rho0", static_cast<int>(sys.col_exps.size()) - basis.space.dim()},
             {"relation_space", io::subspace_json(basis.space, basis.col_exps)}};
    return {rep, exit_ok};
}

inline Outcome cmd_chevalley(const Context& ctx) {
    const EquationData& eq = ctx.require_equation();
    const int l = ctx.require_flag(ctx.opt.l, "--l");
    const int rmax = ctx.require_flag(ctx.opt.rmax, "--rmax");
    const auto b = ctx.require_point();
    const MonomialOrder ord(ctx.n(), eq.q(), ctx.order_weights());
    auto fibre = ctx.resolve_fibre(eq, b);
    ChevalleyReport rep = chevalley_function(eq, b, fibre, l, rmax, ord);
    json jrep{{"command", "chevalley"},
              {"point", io::rational_vec_json(b)},
              {"l", l},
              {"r_max", rmax},
              {"order", order_json(ord)},
              {"s", rep.fibre_count},
              {"dims", rep.dims},
              {"window", json{{"from", l}, {"to", rmax}}},
              {"projection", io::subspace_json(rep.final_projection, rep.projection_exps)}};
    if (rep.stabilization_r) {
        jrep["stabilization_r"] = *rep.stabilization_r;
        jrep["verdict"] = "stable over tested window";
    } else {
        jrep["stabilization_r"] = nullptr;
        jrep["verdict"] = "NoStabilization";
    }
    return {jrep, rep.stabilization_r ? exit_ok : exit_verdict};
}

inline Outcome cmd_ranks(const Context& ctx) {
    const EquationData& eq = ctx.require_equation();
    const int r = ctx.require_flag(ctx.opt.r, "--r");
    const auto b = ctx.require_point();
    const MonomialOrder ord(ctx.n(), eq.q(), ctx.order_weights());
    auto fibre = ctx.resolve_fibre(eq, b);
    RelationSystem sys = assemble_relation_system(eq, b, fibre, r, ord);
    json rep{{"command", "ranks"},
             {"r", r},
             {"point", io::rational_vec_json(b)},
             {"order", order_json(ord)},
             {"s", sys.fibre_count},
             {"rho0", rank_rho0(sys)}};
    if (ctx.opt.l) rep["rho1"] = rank_rho1(sys, *ctx.opt.l);
    return {rep, exit_ok};
}

inline Outcome cmd_solve_jet(const Context& ctx) {
    const EquationData& eq = ctx.require_equation();
    const int r = ctx.require_flag(ctx.opt.r, "--r");
    const auto b = ctx.require_point();
    const MonomialOrder ord(ctx.n(), eq.q(), ctx.order_weights());
    auto fibre = ctx.resolve_fibre(eq, b);
    FormalSolveResult res = formal_solve_at_point(eq, b, fibre, r, ord);
    json rep{{"command", "solve-jet"},
             {"r", r},
             {"point", io::rational_vec_json(b)},
             {"order", order_json(ord)},
             {"s", static_cast<int>(fibre.size())}};
    if (res.solution) {
        json jp = json::array();
        for (const auto& pj : *res.solution) jp.push_back(io::poly_json(pj));
        rep["verdict"] = "SOLVED";
        rep["P"] = jp;
        return {rep, exit_ok};
    }
    rep["verdict"] = "UNSAT";
    return {rep, exit_verdict};
}

inline Outcome cmd_scan(const Context& ctx) {
    const EquationData& eq = ctx.require_equation();
    const int l = ctx.require_flag(ctx.opt.l, "--l");
    const int r = ctx.require_flag(ctx.opt.r, "--r");
    const MonomialOrder ord(ctx.n(), eq.q(), ctx.order_weights());
    std::vector<std::vector<Rational>> grid;
    if (!ctx.opt.grid_csv.empty()) grid = parse_grid_spec(ctx.opt.grid_csv, ctx.n());
    else if (ctx.doc.grid) grid = *ctx.doc.grid;
    else throw SchemaError("--grid", "scan needs a grid (flag or document field)");

    ScanReport rep = diagram_scan(eq, std::move(grid), ctx.doc.grid_fibres, l, r, ord);
    json jpoints = json::array();
    for (const auto& pt : rep.points) {
        json jp{{"b", io::rational_vec_json(pt.b)}, {"skipped", pt.skipped}};
        if (pt.skipped) {
            jp["reason"] = pt.skip_reason;
        } else {
            jp["dim_pi_l"] = pt.dim_pi_l;
            jp["rho0"] = pt.rho0;
            jp["dims"] = pt.dims;
            jp["s"] = pt.fibre_count;
            if (pt.stabilization_r) jp["stabilization_r"] = *pt.stabilization_r;
            else jp["stabilization_r"] = nullptr;
            jp["diagram"] = io::diagram_json(*pt.diagram);
        }
        jpoints.push_back(std::move(jp));
    }
    json jgroups = json::array();
    for (const auto& g : rep.groups) {
        const ScanPointResult& head = rep.points[g.point_indices.front()];
        json pts = json::array();
        for (std::size_t idx : g.point_indices) pts.push_back(io::rational_vec_json(rep.points[idx].b));
        jgroups.push_back(json{{"points", pts},
                               {"dim_pi_l", head.dim_pi_l},
                               {"rho0", head.rho0},
                               {"dims", head.dims},
                               {"diagram", io::diagram_json(*head.diagram)}});
    }
    json jrep{{"command", "scan"},
              {"l", l},
              {"r", r},
              {"order", order_json(ord)},
              {"points", jpoints},
              {"groups", jgroups},
              {"candidate_r",
               json{{"min", rep.min_candidate_r ? json(*rep.min_candidate_r) : json(nullptr)},
                    {"max", rep.max_candidate_r ? json(*rep.max_candidate_r) : json(nullptr)}}}};
    return {jrep, exit_ok};
}

inline Outcome cmd_borel(const Context& ctx) {
    if (!ctx.doc.jetfield) throw SchemaError("/jetfield", "borel needs a jet field");
    auto failure = borel_check(*ctx.doc.jetfield);
    json rep{{"command", "borel"},
             {"order_m", ctx.doc.jetfield->m()}};
    if (!failure) {
        rep["verdict"] = "PASS";
        return {rep, exit_ok};
    }
    rep["verdict"] = "FAIL";
    rep["failed_alpha"] = failure->alpha;
    rep["failed_direction"] = failure->direction;
    return {rep, exit_verdict};
}

} // namespace detail

// Parses argv (without the program name), runs one subcommand, writes the
// JSON report to `out` or to --out, diagnostics to `err`. Returns the exit
// code. Reports are byte-deterministic for fixed inputs.
inline int run_command(std::vector<std::string> args, std::istream& in, std::ostream& out,
                       std::ostream& err) {
    CLI::App app{"exact Hironaka division, standard bases and relation modules on jets"};
    app.require_subcommand(1);

    detail::Options opt;
    const char* kinds[] = {"divide",  "diagram",   "stdbasis",           "member",
                           "complement", "lambda", "chevalley-estimate", "relations",
                           "chevalley",  "ranks",  "solve-jet",          "scan",
                           "borel"};
    const char* descriptions[] = {
        "formal division of a jet by a list of divisor jets",
        "diagram of initial exponents of a jet module",
        "standard basis (monic vertex representatives)",
        "membership of a jet in the module modulo (x)^{D+1}",
        "monomial complement basis up to degree r",
        "Artin-Rees exponent (max vertex degree)",
        "verify the Chevalley estimate at level l",
        "assemble the relation system and its solution space at a point",
        "Chevalley function search over a window of orders",
        "ranks rho0 (and rho1 with --l) of the relation system",
        "solve A*(P after phi) = f to order r at a point",
        "scan a grid of points, grouping by diagram and dimensions",
        "Borel compatibility check of a jet field on an affine stratum",
    };
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(kinds); ++i) {
        CLI::App* sub = app.add_subcommand(kinds[i], descriptions[i]);
        sub->add_option("input", opt.input_path, "input JSON document ('-' for stdin)");
        sub->add_option("--out", opt.out_path, "write the report to this file instead of stdout");
        sub->add_option("--trunc", opt.trunc, "truncation degree D");
        sub->add_option("--order", opt.order_csv, "order weights w1,...,wn");
        sub->add_option("--l", opt.l, "degree l");
        sub->add_option("--r", opt.r, "order r");
        sub->add_option("--rmax", opt.rmax, "upper end of the order window");
        sub->add_option("--point", opt.point_csv, "query point b1,...,bn");
        sub->add_option("--fibre", opt.fibre_specs, "fibre point chart:v1,...,vk (repeatable)");
        sub->add_option("--grid", opt.grid_csv, "grid axes v,v,...[xv,v,...]");
        subs.push_back(sub);
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        std::string text;
        if (opt.input_path == "-") {
            text = detail::read_all(in);
        } else {
            std::ifstream file(opt.input_path);
            if (!file) throw SchemaError("cannot open input file '" + opt.input_path + "'");
            text = detail::read_all(file);
        }
        detail::Context ctx{io::parse_input(text), opt};

        detail::Outcome outcome;
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "divide") outcome = detail::cmd_divide(ctx);
        else if (sub == "diagram") outcome = detail::cmd_diagram(ctx);
        else if (sub == "stdbasis") outcome = detail::cmd_stdbasis(ctx);
        else if (sub == "member") outcome = detail::cmd_member(ctx);
        else if (sub == "complement") outcome = detail::cmd_complement(ctx);
        else if (sub == "lambda") outcome = detail::cmd_lambda(ctx);
        else if (sub == "chevalley-estimate") outcome = detail::cmd_chevalley_estimate(ctx);
        else if (sub == "relations") outcome = detail::cmd_relations(ctx);
        else if (sub == "chevalley") outcome = detail::cmd_chevalley(ctx);
        else if (sub == "ranks") outcome = detail::cmd_ranks(ctx);
        else if (sub == "solve-jet") outcome = detail::cmd_solve_jet(ctx);
        else if (sub == "scan") outcome = detail::cmd_scan(ctx);
        else if (sub == "borel") outcome = detail::cmd_borel(ctx);
        else throw Error("unknown subcommand");

        outcome.report["schema"] = 1;
        const std::string text_out = outcome.report.dump(2) + "\n";
        if (!opt.out_path.empty()) {
            std::ofstream file(opt.out_path, std::ios::binary);
            if (!file) throw Error("cannot open output file '" + opt.out_path + "'");
            file << text_out;
        } else {
            out << text_out;
        }
        return outcome.code;
    } catch (const SchemaError& e) {
        err << "hkit: schema error: " << e.what() << "\n";
        return exit_error;
    } catch (const Error& e) {
        err << "hkit: error: " << e.what() << "\n";
        return exit_error;
    } catch (const std::exception& e) {
        err << "hkit: error: " << e.what() << "\n";
        return exit_error;
    }
}

} // namespace hkit::cli

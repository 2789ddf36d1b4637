#include "pd/capi.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "pd/bench.hpp"
#include "pd/builder.hpp"
#include "pd/model.hpp"
#include "pd/parser.hpp"
#include "pd/reasoner.hpp"
#include "pd/solver.hpp"

using nlohmann::json;

struct pd_handle {
    pd::Framework fw;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

struct Options {
    pd::Mode mode = pd::Mode::Pcwa;
    std::string entropy = "max";
    pd::Backend solver = pd::Backend::Direct;
    bool solver_set = false;
    bool relax = false;
    double tol = 1e-3;
    std::uint64_t seed = 1;
    double epsilon = 1e-4;
    bool bounds = false;
    std::string literal;
};

Options parse_options(const char* options_json) {
    Options o;
    if (!options_json || !*options_json) return o;
    json j = json::parse(options_json);  // throws json::parse_error
    if (j.contains("mode")) o.mode = pd::mode_from_string(j["mode"]);
    if (j.contains("entropy")) {
        o.entropy = j["entropy"];
        if (o.entropy != "none" && o.entropy != "linear" && o.entropy != "max")
            throw pd::Error("unknown entropy mode \"" + o.entropy +
                            "\" (expected none, linear, or max)");
    }
    if (j.contains("solver")) {
        o.solver = pd::backend_from_string(j["solver"]);
        o.solver_set = true;
    }
    if (j.contains("relax")) o.relax = j["relax"];
    if (j.contains("tol")) o.tol = j["tol"];
    if (j.contains("seed")) o.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("epsilon")) o.epsilon = j["epsilon"];
    if (j.contains("bounds")) o.bounds = j["bounds"];
    if (j.contains("literal")) o.literal = j["literal"];
    return o;
}

pd::SolverConfig to_config(const Options& o) {
    pd::SolverConfig cfg;
    cfg.tol = o.tol;
    cfg.seed = o.seed;
    return cfg;
}

pd::Backend effective_backend(const Options& o) {
    if (o.solver_set) return o.solver;
    return o.entropy == "none" ? pd::Backend::Lp : pd::Backend::Direct;
}

// Names which consistency level broke: the plain rule system, or only the
// closed-world extension of it.
[[noreturn]] void throw_infeasible(const pd::Framework& fw, pd::Mode mode) {
    if (mode == pd::Mode::Pcwa) {
        pd::LinearSystem owa = pd::build_owa(fw);
        if (pd::feasible_vertex(owa).status == pd::LpStatus::Optimal)
            throw pd::SemanticError(
                "rules admit a distribution (Rule-PSAT holds) but the "
                "closed-world rows make the system infeasible");
    }
    throw pd::SemanticError(
        "no joint distribution satisfies the rules (Rule-PSAT fails)");
}

pd::SolveResult run_solve(const pd::Framework& fw, const pd::LinearSystem& sys,
                          const Options& o) {
    if (o.relax) return pd::solve_l1_relaxed(sys);
    pd::SolverConfig cfg = to_config(o);
    pd::Backend be = effective_backend(o);
    if (o.entropy == "max") {
        if (pd::feasible_vertex(sys).status != pd::LpStatus::Optimal)
            throw_infeasible(fw, o.mode == pd::Mode::Pcwa ? pd::Mode::Pcwa
                                                          : pd::Mode::Owa);
        return pd::solve_max_entropy(sys);
    }
    if (o.entropy == "linear") {
        pd::SolveResult r = pd::solve_max_linear_entropy(sys, cfg, be);
        if (!r.converged && be != pd::Backend::Sgd &&
            pd::feasible_vertex(sys).status != pd::LpStatus::Optimal)
            throw_infeasible(fw, o.mode);
        return r;
    }
    pd::SolveResult r;
    switch (be) {
        case pd::Backend::Sgd:
            return pd::solve_sgd(sys, cfg);
        case pd::Backend::Direct:
            r = pd::solve_direct(sys);
            break;
        default:
            r = pd::solve_lexmax(sys);
            break;
    }
    if (!r.converged &&
        pd::feasible_vertex(sys).status != pd::LpStatus::Optimal)
        throw_infeasible(fw, o.mode);
    return r;
}

pd::Literal parse_literal(const pd::Framework& fw, const std::string& text) {
    std::string name = text;
    bool positive = true;
    if (!name.empty() && name[0] == '~') {
        positive = false;
        name.erase(0, 1);
    }
    int atom = fw.find_atom(name);
    if (atom < 0)
        throw pd::Error("unknown literal \"" + text + "\"");
    return pd::Literal{atom, positive};
}

bool heads_rule(const pd::Framework& fw, pd::Literal l) {
    for (const pd::Rule& r : fw.rules())
        if (r.head == l) return true;
    return false;
}

json solve_json(const pd::Framework& fw, const pd::LinearSystem& sys,
                const Options& o, const pd::SolveResult& r) {
    json j;
    j["mode"] = pd::mode_name(o.mode);
    j["entropy"] = o.entropy;
    j["relax"] = o.relax;
    j["solver"] = pd::backend_name(effective_backend(o));
    j["method"] = r.method;
    j["converged"] = r.converged;
    j["residual"] = r.residual;
    j["epochs"] = r.epochs_used;
    j["entropy_bits"] = pd::vn_entropy_bits(r.pi);
    if (o.relax && r.objective) j["l1_objective"] = *r.objective;
    if (!r.lambda.empty()) j["lambda"] = r.lambda;
    j["atoms"] = fw.atom_names();
    j["pi"] = r.pi;
    json lits = json::array();
    for (int atom = 0; atom < fw.atom_count(); ++atom) {
        for (bool positive : {true, false}) {
            pd::Literal l{atom, positive};
            json e;
            e["literal"] = fw.literal_name(l);
            e["probability"] = pd::marginal(r.pi, sys.n_atoms, {l});
            if (o.mode == pd::Mode::Pcwa)
                e["no_deduction"] = !heads_rule(fw, l);
            lits.push_back(std::move(e));
        }
    }
    j["literals"] = std::move(lits);
    return j;
}

pd_status fail(pd_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <typename Fn>
pd_status guarded(Fn&& fn) {
    try {
        fn();
        return PD_OK;
    } catch (const pd::ParseError& e) {
        return fail(PD_ERR_PARSE, e.what());
    } catch (const pd::SemanticError& e) {
        return fail(PD_ERR_SEMANTIC, e.what());
    } catch (const pd::LimitError& e) {
        return fail(PD_ERR_LIMIT, e.what());
    } catch (const pd::IoError& e) {
        return fail(PD_ERR_IO, e.what());
    } catch (const json::parse_error& e) {
        return fail(PD_ERR_INVALID, std::string("bad options JSON: ") +
                                        e.what());
    } catch (const std::exception& e) {
        return fail(PD_ERR_INVALID, e.what());
    }
}

}  // namespace

extern "C" {

const char* pd_version(void) { return "0.1.0"; }

const char* pd_last_error(void) { return g_last_error.c_str(); }

pd_status pd_parse_text(const char* text, pd_handle** out) {
    if (!text || !out) return fail(PD_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto* h = new pd_handle{pd::parse_pd(text)};
        *out = h;
    });
}

pd_status pd_parse_file(const char* path, pd_handle** out) {
    if (!path || !out) return fail(PD_ERR_INVALID, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto* h = new pd_handle{pd::parse_pd_file(path)};
        *out = h;
    });
}

void pd_handle_free(pd_handle* h) { delete h; }

int pd_atom_count(const pd_handle* h) {
    return h ? h->fw.atom_count() : -1;
}

int pd_rule_count(const pd_handle* h) {
    return h ? static_cast<int>(h->fw.rules().size()) : -1;
}

pd_status pd_serialize(const pd_handle* h, char** out_text) {
    if (!h || !out_text) return fail(PD_ERR_INVALID, "null argument");
    return guarded([&] { *out_text = dup_string(pd::serialize_pd(h->fw)); });
}

pd_status pd_check(const pd_handle* h, const char* options_json,
                   char** out_json) {
    if (!h || !out_json) return fail(PD_ERR_INVALID, "null argument");
    return guarded([&] {
        Options o = parse_options(options_json);
        pd::LinearSystem sys = pd::build_system(h->fw, o.mode);
        pd::LpResult lp = pd::feasible_vertex(sys);
        bool feasible = lp.status == pd::LpStatus::Optimal;
        bool rule_psat = feasible;
        if (!feasible && o.mode == pd::Mode::Pcwa) {
            pd::LinearSystem owa = pd::build_owa(h->fw);
            rule_psat =
                pd::feasible_vertex(owa).status == pd::LpStatus::Optimal;
        }
        json j;
        j["mode"] = pd::mode_name(o.mode);
        j["feasible"] = feasible;
        j["rule_psat"] = rule_psat;
        j["residual"] = feasible
                            ? pd::max_abs_residual(sys.a, sys.b, lp.x)
                            : lp.value;
        j["n_atoms"] = h->fw.atom_count();
        j["n_rules"] = h->fw.rules().size();
        *out_json = dup_string(j.dump() + "\n");
    });
}

pd_status pd_solve(const pd_handle* h, const char* options_json,
                   char** out_json) {
    if (!h || !out_json) return fail(PD_ERR_INVALID, "null argument");
    return guarded([&] {
        Options o = parse_options(options_json);
        pd::LinearSystem sys = pd::build_system(h->fw, o.mode);
        pd::SolveResult r = run_solve(h->fw, sys, o);
        *out_json = dup_string(solve_json(h->fw, sys, o, r).dump() + "\n");
    });
}

pd_status pd_query(const pd_handle* h, const char* options_json,
                   char** out_json) {
    if (!h || !out_json) return fail(PD_ERR_INVALID, "null argument");
    return guarded([&] {
        Options o = parse_options(options_json);
        if (o.literal.empty())
            throw pd::Error("query needs a \"literal\" option");
        pd::Literal target = parse_literal(h->fw, o.literal);
        pd::LinearSystem sys = pd::build_system(h->fw, o.mode);
        pd::SolveResult r = run_solve(h->fw, sys, o);
        json j;
        j["literal"] = o.literal;
        j["mode"] = pd::mode_name(o.mode);
        j["entropy"] = o.entropy;
        j["probability"] = pd::marginal(r.pi, sys.n_atoms, {target});
        if (o.mode == pd::Mode::Pcwa)
            j["no_deduction"] = !heads_rule(h->fw, target);
        if (o.bounds) {
            auto lo = pd::optimize_bound(sys, {target}, false);
            auto hi = pd::optimize_bound(sys, {target}, true);
            if (!lo || !hi) throw_infeasible(h->fw, o.mode);
            j["bounds"] = json::array({*lo, *hi});
        }
        *out_json = dup_string(j.dump() + "\n");
    });
}

pd_status pd_arguments(const pd_handle* h, const char* options_json,
                       char** out_json) {
    if (!h || !out_json) return fail(PD_ERR_INVALID, "null argument");
    return guarded([&] {
        Options o = parse_options(options_json);
        pd::LinearSystem sys = pd::build_system(h->fw, o.mode);
        pd::SolveResult r = run_solve(h->fw, sys, o);
        std::vector<pd::Argument> args = pd::enumerate_arguments(h->fw);
        std::vector<double> probs;
        json ja = json::array();
        for (std::size_t i = 0; i < args.size(); ++i) {
            args[i].probability =
                pd::marginal(r.pi, sys.n_atoms, args[i].support);
            probs.push_back(args[i].probability);
            json e;
            e["id"] = i;
            e["claim"] = h->fw.literal_name(args[i].claim);
            json sup = json::array();
            for (const pd::Literal& l : args[i].support)
                sup.push_back(h->fw.literal_name(l));
            e["support"] = std::move(sup);
            e["probability"] = args[i].probability;
            ja.push_back(std::move(e));
        }
        json jt = json::array();
        for (const auto& [x, y] : pd::compute_attacks(args))
            jt.push_back(json{{"attacker", x}, {"attackee", y}});
        json jl = json::array();
        for (pd::ArgLabel l : pd::probabilistic_labelling(probs, o.epsilon))
            jl.push_back(pd::label_name(l));
        json j;
        j["mode"] = pd::mode_name(o.mode);
        j["entropy"] = o.entropy;
        j["epsilon"] = o.epsilon;
        j["arguments"] = std::move(ja);
        j["attacks"] = std::move(jt);
        j["labels"] = std::move(jl);
        *out_json = dup_string(j.dump() + "\n");
    });
}

pd_status pd_dump_system(const pd_handle* h, const char* options_json,
                         char** out_csv) {
    if (!h || !out_csv) return fail(PD_ERR_INVALID, "null argument");
    return guarded([&] {
        Options o = parse_options(options_json);
        pd::LinearSystem sys = pd::build_system(h->fw, o.mode);
        std::string out = "tag,b";
        for (std::size_t w = 0; w < sys.n_worlds; ++w)
            out += ",w" + std::to_string(w);
        out += "\n";
        char buf[32];
        for (std::size_t i = 0; i < sys.a.size(); ++i) {
            out += sys.row_tags[i];
            std::snprintf(buf, sizeof buf, ",%.12g", sys.b[i]);
            out += buf;
            for (double v : sys.a[i]) {
                std::snprintf(buf, sizeof buf, ",%.12g", v);
                out += buf;
            }
            out += "\n";
        }
        *out_csv = dup_string(out);
    });
}

pd_status pd_label_aa(const char* aaf_text, const char* options_json,
                      char** out_json) {
    if (!aaf_text || !out_json) return fail(PD_ERR_INVALID, "null argument");
    *out_json = nullptr;
    bool incomplete = false;
    pd_status st = guarded([&] {
        Options o = parse_options(options_json);
        pd::AaGraph g = pd::parse_aa(aaf_text);
        pd::Framework fw = pd::aa_to_pd(g);
        pd::LinearSystem sys = pd::build_system(fw, o.mode);
        pd::SolveResult r;
        try {
            r = run_solve(fw, sys, o);
        } catch (const pd::SemanticError&) {
            throw pd::SemanticError(
                "no consistent labelling under PD semantics: the mapped "
                "rules are not consistent under the closed-world reading");
        }
        // the argument mapped from AA argument i supports its own atom plus
        // the negation of every attacker
        std::vector<double> probs;
        for (std::size_t i = 0; i < g.arguments.size(); ++i) {
            std::vector<pd::Literal> conj{
                pd::Literal{static_cast<int>(i), true}};
            for (const auto& [x, y] : g.attacks)
                if (y == static_cast<int>(i))
                    conj.push_back(pd::Literal{x, false});
            probs.push_back(pd::marginal(r.pi, sys.n_atoms, conj));
        }
        std::vector<pd::ArgLabel> labels =
            pd::probabilistic_labelling(probs, o.epsilon);
        bool complete = pd::verify_complete_labelling(g, labels);
        json j;
        j["arguments"] = g.arguments;
        j["probabilities"] = probs;
        json jl = json::array();
        for (pd::ArgLabel l : labels) jl.push_back(pd::label_name(l));
        j["labels"] = std::move(jl);
        j["epsilon"] = o.epsilon;
        j["complete"] = complete;
        j["residual"] = r.residual;
        *out_json = dup_string(j.dump() + "\n");
        incomplete = !complete;
    });
    if (st != PD_OK) return st;
    if (incomplete)
        return fail(PD_ERR_SEMANTIC,
                    "thresholded labelling failed the completeness check");
    return PD_OK;
}

pd_status pd_convert_aa(const char* aaf_text, char** out_pd_text) {
    if (!aaf_text || !out_pd_text)
        return fail(PD_ERR_INVALID, "null argument");
    return guarded([&] {
        pd::AaGraph g = pd::parse_aa(aaf_text);
        *out_pd_text = dup_string(pd::serialize_pd(pd::aa_to_pd(g)));
    });
}

pd_status pd_bench(const char* spec_json, char** out_csv) {
    if (!out_csv) return fail(PD_ERR_INVALID, "null argument");
    return guarded([&] {
        pd::BenchSpec spec;
        if (spec_json && *spec_json) {
            json j = json::parse(spec_json);
            if (j.contains("n_literals")) spec.n_literals = j["n_literals"];
            if (j.contains("n_rules")) spec.n_rules = j["n_rules"];
            if (j.contains("max_body")) spec.max_body = j["max_body"];
            if (j.contains("seed"))
                spec.seed = j["seed"].get<std::uint64_t>();
            if (j.contains("backends"))
                spec.backends =
                    j["backends"].get<std::vector<std::string>>();
            if (j.contains("repetitions"))
                spec.repetitions = j["repetitions"];
            if (j.contains("include_build"))
                spec.include_build = j["include_build"];
        }
        *out_csv = dup_string(pd::bench_csv(pd::run_bench(spec)));
    });
}

void pd_string_free(char* s) { std::free(s); }

}  // extern "C"

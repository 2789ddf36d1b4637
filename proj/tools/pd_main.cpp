// pd: probabilistic deduction over p-rule files and AA frameworks.
// Machine-readable JSON (or CSV) goes to stdout, a human summary to stderr.
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pd/capi.h"

using nlohmann::json;

namespace {

struct Flags {
    std::string mode;
    std::string entropy;
    std::string solver;
    std::string literal;
    double tol = -1.0;
    long long seed = -1;
    double epsilon = -1.0;
    bool bounds = false;
    bool relax = false;
    std::string dump_path;
    std::string out_fmt;
};

void add_solver_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--mode", f.mode, "constraint mode (owa or pcwa)")
        ->check(CLI::IsMember({"owa", "pcwa"}));
    cmd->add_option("--entropy", f.entropy,
                    "entropy objective: none, linear, or max")
        ->check(CLI::IsMember({"none", "linear", "max"}));
    cmd->add_option("--solver", f.solver, "backend: sgd, direct, or lp")
        ->check(CLI::IsMember({"sgd", "direct", "lp"}));
    cmd->add_option("--tol", f.tol, "convergence tolerance");
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_flag("--relax", f.relax,
                  "minimize total L1 violation of the rule rows instead of "
                  "requiring exact feasibility");
    cmd->add_option("--dump-system", f.dump_path,
                    "write the constraint matrix as CSV to this path");
    cmd->add_option("--out", f.out_fmt, "output format on stdout")
        ->check(CLI::IsMember({"json", "csv"}));
}

std::string options_json(const Flags& f) {
    json j = json::object();
    if (!f.mode.empty()) j["mode"] = f.mode;
    if (!f.entropy.empty()) j["entropy"] = f.entropy;
    if (!f.solver.empty()) j["solver"] = f.solver;
    if (!f.literal.empty()) j["literal"] = f.literal;
    if (f.tol >= 0) j["tol"] = f.tol;
    if (f.seed >= 0) j["seed"] = static_cast<std::uint64_t>(f.seed);
    if (f.epsilon >= 0) j["epsilon"] = f.epsilon;
    if (f.bounds) j["bounds"] = true;
    if (f.relax) j["relax"] = true;
    return j.dump();
}

int status_to_exit(pd_status st) {
    if (st == PD_OK) return 0;
    if (st == PD_ERR_SEMANTIC) return 2;
    return 1;
}

int report_error(pd_status st) {
    std::fprintf(stderr, "pd: %s\n", pd_last_error());
    return status_to_exit(st);
}

bool slurp(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

struct Handle {
    pd_handle* h = nullptr;
    ~Handle() { pd_handle_free(h); }
};

struct OutString {
    char* s = nullptr;
    ~OutString() { pd_string_free(s); }
};

// Parses the input file and honors --dump-system before the verb runs.
int open_framework(const std::string& path, const std::string& opts,
                   const Flags& f, Handle& handle) {
    pd_status st = pd_parse_file(path.c_str(), &handle.h);
    if (st != PD_OK) return report_error(st);
    if (!f.dump_path.empty()) {
        OutString csv;
        st = pd_dump_system(handle.h, opts.c_str(), &csv.s);
        if (st != PD_OK) return report_error(st);
        std::ofstream out(f.dump_path, std::ios::binary);
        if (!out || !(out << csv.s)) {
            std::fprintf(stderr, "pd: cannot write %s\n",
                         f.dump_path.c_str());
            return 1;
        }
    }
    return -1;  // keep going
}

void print_csv_row(std::string& out, std::initializer_list<std::string> cs) {
    bool first = true;
    for (const std::string& c : cs) {
        if (!first) out += ',';
        out += c;
        first = false;
    }
    out += '\n';
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int run_check(const std::string& path, const Flags& f) {
    std::string opts = options_json(f);
    Handle handle;
    if (int rc = open_framework(path, opts, f, handle); rc >= 0) return rc;
    OutString out;
    pd_status st = pd_check(handle.h, opts.c_str(), &out.s);
    if (st != PD_OK) return report_error(st);
    json j = json::parse(out.s);
    if (f.out_fmt == "csv") {
        std::string csv = "key,value\n";
        for (auto& [k, v] : j.items())
            print_csv_row(csv, {k, v.is_string() ? v.get<std::string>()
                                                 : v.dump()});
        std::fputs(csv.c_str(), stdout);
    } else {
        std::fputs(out.s, stdout);
    }
    bool feasible = j["feasible"];
    std::fprintf(stderr, "%s: %s under %s (residual %.3e)\n", path.c_str(),
                 feasible ? "consistent" : "inconsistent",
                 j["mode"].get<std::string>().c_str(),
                 j["residual"].get<double>());
    if (!feasible && j["mode"] == "pcwa")
        std::fprintf(stderr, "  plain rule system is %s\n",
                     j["rule_psat"].get<bool>() ? "consistent (closed-world "
                                                  "rows broke it)"
                                                : "already inconsistent");
    return feasible ? 0 : 2;
}

int run_solve(const std::string& path, const Flags& f) {
    std::string opts = options_json(f);
    Handle handle;
    if (int rc = open_framework(path, opts, f, handle); rc >= 0) return rc;
    OutString out;
    pd_status st = pd_solve(handle.h, opts.c_str(), &out.s);
    if (st != PD_OK) return report_error(st);
    json j = json::parse(out.s);
    if (f.out_fmt == "csv") {
        std::string csv = "literal,probability\n";
        for (auto& e : j["literals"])
            print_csv_row(csv, {e["literal"].get<std::string>(),
                                num(e["probability"].get<double>())});
        std::fputs(csv.c_str(), stdout);
    } else {
        std::fputs(out.s, stdout);
    }
    std::fprintf(stderr, "method %s  converged %s  residual %.3e  %.4f bits\n",
                 j["method"].get<std::string>().c_str(),
                 j["converged"].get<bool>() ? "yes" : "no",
                 j["residual"].get<double>(),
                 j["entropy_bits"].get<double>());
    for (auto& e : j["literals"])
        std::fprintf(stderr, "  %-24s %.6f\n",
                     e["literal"].get<std::string>().c_str(),
                     e["probability"].get<double>());
    return 0;
}

int run_query(const std::string& path, const Flags& f) {
    std::string opts = options_json(f);
    Handle handle;
    if (int rc = open_framework(path, opts, f, handle); rc >= 0) return rc;
    OutString out;
    pd_status st = pd_query(handle.h, opts.c_str(), &out.s);
    if (st != PD_OK) return report_error(st);
    json j = json::parse(out.s);
    if (f.out_fmt == "csv") {
        std::string csv = "literal,probability,lower,upper\n";
        std::string lo, hi;
        if (j.contains("bounds")) {
            lo = num(j["bounds"][0].get<double>());
            hi = num(j["bounds"][1].get<double>());
        }
        print_csv_row(csv, {j["literal"].get<std::string>(),
                            num(j["probability"].get<double>()), lo, hi});
        std::fputs(csv.c_str(), stdout);
    } else {
        std::fputs(out.s, stdout);
    }
    std::fprintf(stderr, "Pr(%s) = %.6f\n",
                 j["literal"].get<std::string>().c_str(),
                 j["probability"].get<double>());
    if (j.contains("bounds"))
        std::fprintf(stderr, "bounds [%.6f, %.6f]\n",
                     j["bounds"][0].get<double>(),
                     j["bounds"][1].get<double>());
    return 0;
}

int run_args(const std::string& path, const Flags& f) {
    std::string opts = options_json(f);
    Handle handle;
    if (int rc = open_framework(path, opts, f, handle); rc >= 0) return rc;
    OutString out;
    pd_status st = pd_arguments(handle.h, opts.c_str(), &out.s);
    if (st != PD_OK) return report_error(st);
    json j = json::parse(out.s);
    if (f.out_fmt == "csv") {
        std::string csv = "id,claim,probability,label,support\n";
        for (auto& e : j["arguments"]) {
            std::string sup;
            for (auto& l : e["support"]) {
                if (!sup.empty()) sup += ';';
                sup += l.get<std::string>();
            }
            print_csv_row(
                csv, {std::to_string(e["id"].get<int>()),
                      e["claim"].get<std::string>(),
                      num(e["probability"].get<double>()),
                      j["labels"][e["id"].get<int>()].get<std::string>(),
                      sup});
        }
        std::fputs(csv.c_str(), stdout);
    } else {
        std::fputs(out.s, stdout);
    }
    for (auto& e : j["arguments"]) {
        std::string sup;
        for (auto& l : e["support"]) {
            if (!sup.empty()) sup += ", ";
            sup += l.get<std::string>();
        }
        std::fprintf(stderr, "  #%d  %-8s <{%s}>  Pr %.4f  %s\n",
                     e["id"].get<int>(),
                     e["claim"].get<std::string>().c_str(), sup.c_str(),
                     e["probability"].get<double>(),
                     j["labels"][e["id"].get<int>()]
                         .get<std::string>()
                         .c_str());
    }
    std::fprintf(stderr, "%zu arguments, %zu attacks\n",
                 j["arguments"].size(), j["attacks"].size());
    return 0;
}

int run_label(const std::string& path, const Flags& f) {
    std::string text;
    if (!slurp(path, text)) {
        std::fprintf(stderr, "pd: cannot read %s\n", path.c_str());
        return 1;
    }
    std::string opts = options_json(f);
    OutString out;
    pd_status st = pd_label_aa(text.c_str(), opts.c_str(), &out.s);
    // a labelling that failed verification still carries a JSON report
    if (out.s) {
        json j = json::parse(out.s);
        if (f.out_fmt == "csv") {
            std::string csv = "argument,probability,label\n";
            for (std::size_t i = 0; i < j["arguments"].size(); ++i)
                print_csv_row(
                    csv, {j["arguments"][i].get<std::string>(),
                          num(j["probabilities"][i].get<double>()),
                          j["labels"][i].get<std::string>()});
            std::fputs(csv.c_str(), stdout);
        } else {
            std::fputs(out.s, stdout);
        }
        for (std::size_t i = 0; i < j["arguments"].size(); ++i)
            std::fprintf(stderr, "  %-12s Pr %.4f  %s\n",
                         j["arguments"][i].get<std::string>().c_str(),
                         j["probabilities"][i].get<double>(),
                         j["labels"][i].get<std::string>().c_str());
        std::fprintf(stderr, "complete labelling: %s\n",
                     j["complete"].get<bool>() ? "yes" : "NO");
    }
    if (st != PD_OK) return report_error(st);
    return 0;
}

int run_convert(const std::string& path) {
    std::string text;
    if (!slurp(path, text)) {
        std::fprintf(stderr, "pd: cannot read %s\n", path.c_str());
        return 1;
    }
    OutString out;
    pd_status st = pd_convert_aa(text.c_str(), &out.s);
    if (st != PD_OK) return report_error(st);
    std::fputs(out.s, stdout);
    return 0;
}

struct BenchFlags {
    long long n_literals = -1;
    long long n_rules = -1;
    long long max_body = -1;
    long long seed = -1;
    long long repetitions = -1;
    std::vector<std::string> backends;
    bool include_build = false;
    std::string out_fmt;
};

int run_bench(const BenchFlags& bf) {
    json spec = json::object();
    if (bf.n_literals >= 0) spec["n_literals"] = bf.n_literals;
    if (bf.n_rules >= 0) spec["n_rules"] = bf.n_rules;
    if (bf.max_body >= 0) spec["max_body"] = bf.max_body;
    if (bf.seed >= 0) spec["seed"] = static_cast<std::uint64_t>(bf.seed);
    if (bf.repetitions >= 0) spec["repetitions"] = bf.repetitions;
    if (!bf.backends.empty()) spec["backends"] = bf.backends;
    if (bf.include_build) spec["include_build"] = true;
    OutString out;
    pd_status st = pd_bench(spec.dump().c_str(), &out.s);
    if (st != PD_OK) return report_error(st);
    if (bf.out_fmt == "json") {
        // reshape the CSV into an array of row objects
        std::istringstream in(out.s);
        std::string line;
        std::getline(in, line);
        std::vector<std::string> cols;
        std::istringstream hs(line);
        for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
        json rows = json::array();
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            json row = json::object();
            std::size_t i = 0;
            for (std::string c; std::getline(ls, c, ',') && i < cols.size();
                 ++i) {
                if (cols[i] == "backend")
                    row[cols[i]] = c;
                else
                    row[cols[i]] = std::stod(c);
            }
            rows.push_back(std::move(row));
        }
        std::fputs((rows.dump() + "\n").c_str(), stdout);
        std::fprintf(stderr, "%zu bench rows\n", rows.size());
    } else {
        std::fputs(out.s, stdout);
        std::size_t rows = 0;
        for (const char* p = out.s; *p; ++p)
            if (*p == '\n') ++rows;
        std::fprintf(stderr, "%zu bench rows\n", rows ? rows - 1 : 0);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"probabilistic deduction: consistency checks, joint "
                 "distributions, literal queries, arguments, and AA "
                 "labellings over p-rule files"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pd_version()));

    Flags f;
    std::string path;

    CLI::App* c_check = app.add_subcommand(
        "check", "decide whether a consistent distribution exists");
    c_check->add_option("file", path, "p-rule file")->required();
    add_solver_flags(c_check, f);

    CLI::App* c_solve = app.add_subcommand(
        "solve", "compute a joint distribution over the worlds");
    c_solve->add_option("file", path, "p-rule file")->required();
    add_solver_flags(c_solve, f);

    CLI::App* c_query = app.add_subcommand(
        "query", "probability of one literal under the chosen semantics");
    c_query->add_option("file", path, "p-rule file")->required();
    c_query->add_option("-l,--literal", f.literal,
                        "literal name, ~ prefix negates")
        ->required();
    c_query->add_flag("--bounds", f.bounds,
                      "also report the feasible [min,max] interval");
    add_solver_flags(c_query, f);

    CLI::App* c_args = app.add_subcommand(
        "args", "enumerate arguments, attacks, and their probabilities");
    c_args->add_option("file", path, "p-rule file")->required();
    c_args->add_option("--epsilon", f.epsilon,
                       "labelling threshold (in >= 1-eps, out <= eps)");
    add_solver_flags(c_args, f);

    CLI::App* c_label = app.add_subcommand(
        "label", "complete labelling of an abstract argumentation graph");
    c_label->add_option("file", path, "AA graph file (arg/att facts)")
        ->required();
    c_label->add_option("--epsilon", f.epsilon,
                        "labelling threshold (in >= 1-eps, out <= eps)");
    add_solver_flags(c_label, f);

    CLI::App* c_convert = app.add_subcommand(
        "convert", "translate an AA graph into an equivalent p-rule file");
    c_convert->add_option("file", path, "AA graph file")->required();

    BenchFlags bf;
    CLI::App* c_bench = app.add_subcommand(
        "bench", "time the solver backends on random satisfiable systems");
    c_bench->add_option("--n-literals", bf.n_literals, "language size");
    c_bench->add_option("--n-rules", bf.n_rules, "rules per instance");
    c_bench->add_option("--max-body", bf.max_body,
                        "max body length (0 = language size)");
    c_bench->add_option("--seed", bf.seed, "master seed");
    c_bench->add_option("--repetitions", bf.repetitions,
                        "instances per backend");
    c_bench->add_option("--backends", bf.backends,
                        "comma-separated: sgd, direct-entropy, max-entropy, "
                        "lp")
        ->delimiter(',');
    c_bench->add_flag("--include-build", bf.include_build,
                      "include parse and matrix build in the timing");
    c_bench->add_option("--out", bf.out_fmt, "output format on stdout")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (app.got_subcommand(c_check)) return run_check(path, f);
    if (app.got_subcommand(c_solve)) return run_solve(path, f);
    if (app.got_subcommand(c_query)) return run_query(path, f);
    if (app.got_subcommand(c_args)) return run_args(path, f);
    if (app.got_subcommand(c_label)) return run_label(path, f);
    if (app.got_subcommand(c_convert)) return run_convert(path);
    if (app.got_subcommand(c_bench)) return run_bench(bf);
    return 1;
}

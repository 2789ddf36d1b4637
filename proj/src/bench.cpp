#include "pd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <random>

#include "pd/builder.hpp"
#include "pd/solver.hpp"

namespace pd {

Framework generate_satisfiable(int n_literals, int n_rules, int max_body,
                               std::uint64_t seed,
                               std::vector<double>* generating_pi) {
    check_world_cap(n_literals);
    if (n_literals < 1 || n_rules < 1)
        throw Error("bench spec needs at least one literal and one rule");
    int n = n_literals;
    std::uint64_t nw = world_count(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> gen(nw);
    double sum = 0.0;
    for (double& g : gen) {
        g = unit(rng);
        sum += g;
    }
    for (double& g : gen) g /= sum;
    if (generating_pi) *generating_pi = gen;

    Framework fw;
    for (int i = 0; i < n; ++i) fw.intern("s" + std::to_string(i));

    int body_cap = std::min(max_body > 0 ? max_body : n, n - 1);
    std::vector<int> others(n);
    int made = 0;
    long guard = 0;
    long budget = 200L * n_rules;
    while (made < n_rules) {
        if (++guard > budget)
            throw Error("resampling budget exhausted while generating rules");
        int head_atom = std::uniform_int_distribution<int>(0, n - 1)(rng);
        Literal head{head_atom, unit(rng) < 0.7};
        int blen = body_cap >= 1
                       ? std::uniform_int_distribution<int>(1, body_cap)(rng)
                       : 0;
        others.clear();
        for (int a = 0; a < n; ++a)
            if (a != head_atom) others.push_back(a);
        std::shuffle(others.begin(), others.end(), rng);
        std::vector<Literal> body;
        for (int i = 0; i < blen; ++i)
            body.push_back(Literal{others[i], unit(rng) < 0.5});
        double pb = body.empty() ? 1.0 : marginal(gen, n, body);
        if (pb < 1e-9) continue;
        std::vector<Literal> conj{head};
        conj.insert(conj.end(), body.begin(), body.end());
        double theta = marginal(gen, n, conj) / pb;
        if (theta < 1e-9) continue;
        fw.add_rule(head, std::move(body), std::min(theta, 1.0));
        ++made;
    }
    return fw;
}

namespace {

SolveResult run_backend(const std::string& backend, const LinearSystem& sys,
                        std::uint64_t seed) {
    SolverConfig cfg;
    cfg.seed = seed;
    if (backend == "sgd") return solve_sgd(sys, cfg);
    if (backend == "direct-entropy")
        return solve_max_linear_entropy(sys, cfg, Backend::Direct);
    if (backend == "max-entropy") return solve_max_entropy(sys);
    if (backend == "lp") {
        LpResult lp = feasible_vertex(sys);
        SolveResult r;
        r.method = "lp";
        if (lp.status == LpStatus::Optimal) {
            r.pi = std::move(lp.x);
            r.residual = max_abs_residual(sys.a, sys.b, r.pi);
            r.converged = r.residual < 1e-6;
        } else {
            r.pi.assign(sys.n_worlds, 0.0);
            r.residual = lp.value;
        }
        return r;
    }
    throw Error("unknown bench backend \"" + backend + "\"");
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
    std::vector<std::string> backends = spec.backends;
    if (backends.empty()) backends = {"sgd", "direct-entropy"};
    std::vector<BenchRow> rows;
    for (int rep = 0; rep < spec.repetitions; ++rep) {
        std::uint64_t rep_seed = spec.seed + static_cast<std::uint64_t>(rep);
        Framework fw = generate_satisfiable(spec.n_literals, spec.n_rules,
                                            spec.max_body, rep_seed);
        LinearSystem prebuilt;
        if (!spec.include_build) prebuilt = build_owa(fw);
        for (const std::string& backend : backends) {
            auto t0 = std::chrono::steady_clock::now();
            const LinearSystem& sys =
                spec.include_build ? (prebuilt = build_owa(fw)) : prebuilt;
            SolveResult res = run_backend(backend, sys, rep_seed);
            auto t1 = std::chrono::steady_clock::now();
            BenchRow row;
            row.backend = backend;
            row.n_literals = spec.n_literals;
            row.n_rules = spec.n_rules;
            row.seed = rep_seed;
            row.rep = rep;
            row.wall_ms =
                std::chrono::duration<double, std::milli>(t1 - t0).count();
            row.converged = res.converged;
            row.residual = res.residual;
            row.entropy_bits = vn_entropy_bits(res.pi);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out =
        "backend,n_literals,n_rules,seed,rep,wall_ms,converged,residual,"
        "entropy_bits\n";
    char buf[256];
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%llu,%d,%.3f,%d,%.3e,%.6f\n",
                      r.backend.c_str(), r.n_literals, r.n_rules,
                      static_cast<unsigned long long>(r.seed), r.rep,
                      r.wall_ms, r.converged ? 1 : 0, r.residual,
                      r.entropy_bits);
        out += buf;
    }
    return out;
}

}  // namespace pd

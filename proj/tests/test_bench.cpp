#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "pd/bench.hpp"
#include "pd/builder.hpp"
#include "pd/parser.hpp"
#include "pd/reasoner.hpp"
#include "pd/solver.hpp"

using namespace pd;

TEST_CASE("instance generation is deterministic per seed") {
    Framework a = generate_satisfiable(5, 12, 3, 42);
    Framework b = generate_satisfiable(5, 12, 3, 42);
    CHECK(serialize_pd(a) == serialize_pd(b));

    Framework c = generate_satisfiable(5, 12, 3, 43);
    CHECK(serialize_pd(a) != serialize_pd(c));
}

TEST_CASE("the generating distribution satisfies every generated rule") {
    for (std::uint64_t seed : {1ULL, 7ULL, 99ULL}) {
        std::vector<double> gen;
        Framework fw = generate_satisfiable(4, 10, 0, seed, &gen);
        REQUIRE(static_cast<int>(gen.size()) == 16);
        double sum = std::accumulate(gen.begin(), gen.end(), 0.0);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

        ConsistencyReport rep = check_consistency_by_substitution(fw, gen, 1e-9);
        CHECK(rep.verdict);
        for (const RuleCheck& rc : rep.rules) CHECK(rc.status != "fail");
    }
}

TEST_CASE("generated instances admit a distribution under the plain rows") {
    for (std::uint64_t seed : {3ULL, 11ULL}) {
        Framework fw = generate_satisfiable(6, 16, 0, seed);
        LpResult lp = feasible_vertex(build_owa(fw));
        CHECK(lp.status == LpStatus::Optimal);
    }
}

TEST_CASE("generated rules respect the body cap, exclude the head atom, and "
          "carry usable thetas") {
    Framework fw = generate_satisfiable(6, 20, 2, 5);
    REQUIRE(fw.rules().size() == 20);
    CHECK(fw.atom_count() == 6);
    for (const Rule& r : fw.rules()) {
        CHECK(r.body.size() >= 1);
        CHECK(r.body.size() <= 2);
        for (const Literal& bl : r.body) CHECK(bl.atom != r.head.atom);
        CHECK(r.theta > 0.0);
        CHECK(r.theta <= 1.0);
    }

    Framework solo = generate_satisfiable(1, 2, 0, 5);
    for (const Rule& r : solo.rules()) CHECK(r.body.empty());
}

TEST_CASE("generation validates its spec") {
    CHECK_THROWS_AS(generate_satisfiable(0, 4, 0, 1), Error);
    CHECK_THROWS_AS(generate_satisfiable(4, 0, 0, 1), Error);
    CHECK_THROWS_AS(generate_satisfiable(25, 4, 0, 1), LimitError);
}

TEST_CASE("bench rows echo the spec, one row per backend per repetition") {
    BenchSpec spec;
    spec.n_literals = 4;
    spec.n_rules = 8;
    spec.seed = 10;
    spec.repetitions = 3;
    spec.backends = {"sgd", "max-entropy"};
    std::vector<BenchRow> rows = run_bench(spec);
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const BenchRow& r = rows[i];
        CHECK(r.backend == spec.backends[i % 2]);
        CHECK(r.n_literals == 4);
        CHECK(r.n_rules == 8);
        CHECK(r.rep == static_cast<int>(i / 2));
        CHECK(r.seed == spec.seed + static_cast<std::uint64_t>(r.rep));
        CHECK(r.wall_ms >= 0.0);
    }
}

TEST_CASE("bench results are deterministic apart from wall time") {
    BenchSpec spec;
    spec.n_literals = 5;
    spec.n_rules = 10;
    spec.seed = 77;
    spec.repetitions = 2;
    spec.backends = {"sgd", "direct-entropy", "max-entropy", "lp"};
    std::vector<BenchRow> a = run_bench(spec);
    std::vector<BenchRow> b = run_bench(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].backend == b[i].backend);
        CHECK(a[i].converged == b[i].converged);
        CHECK(a[i].residual == b[i].residual);
        CHECK(a[i].entropy_bits == b[i].entropy_bits);
    }
}

TEST_CASE("all stock backends converge on satisfiable instances") {
    BenchSpec spec;
    spec.n_literals = 6;
    spec.n_rules = 16;
    spec.seed = 2;
    spec.repetitions = 2;
    spec.backends = {"sgd", "direct-entropy", "max-entropy", "lp"};
    for (const BenchRow& r : run_bench(spec)) {
        CHECK(r.converged);
        CHECK(r.residual <= 1e-2);
        CHECK(r.entropy_bits >= 0.0);
        CHECK(r.entropy_bits <= 6.0 + 1e-9);
    }
}

TEST_CASE("sgd keeps up when the rule count outgrows the world count") {
    BenchSpec spec;
    spec.n_literals = 6;
    spec.n_rules = 64;
    spec.seed = 4;
    spec.repetitions = 1;
    spec.backends = {"sgd"};
    std::vector<BenchRow> rows = run_bench(spec);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].converged);
}

TEST_CASE("empty backend list falls back to the stock pair") {
    BenchSpec spec;
    spec.n_literals = 3;
    spec.n_rules = 4;
    spec.repetitions = 1;
    std::vector<BenchRow> rows = run_bench(spec);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].backend == "sgd");
    CHECK(rows[1].backend == "direct-entropy");
}

TEST_CASE("unknown backend names are rejected") {
    BenchSpec spec;
    spec.n_literals = 3;
    spec.n_rules = 4;
    spec.repetitions = 1;
    spec.backends = {"simplex-tableau"};
    CHECK_THROWS_WITH_AS(run_bench(spec),
                         doctest::Contains("unknown bench backend"), Error);
}

TEST_CASE("timing the matrix build leaves the numbers intact") {
    BenchSpec spec;
    spec.n_literals = 4;
    spec.n_rules = 8;
    spec.seed = 6;
    spec.repetitions = 1;
    spec.backends = {"max-entropy"};
    std::vector<BenchRow> fast = run_bench(spec);
    spec.include_build = true;
    std::vector<BenchRow> timed = run_bench(spec);
    REQUIRE(fast.size() == 1);
    REQUIRE(timed.size() == 1);
    CHECK(fast[0].converged == timed[0].converged);
    CHECK(fast[0].residual == timed[0].residual);
    CHECK(fast[0].entropy_bits == timed[0].entropy_bits);
}

TEST_CASE("csv rendering pins the header and one line per row") {
    BenchSpec spec;
    spec.n_literals = 3;
    spec.n_rules = 4;
    spec.seed = 9;
    spec.repetitions = 2;
    spec.backends = {"lp"};
    std::vector<BenchRow> rows = run_bench(spec);
    std::string csv = bench_csv(rows);

    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line ==
          "backend,n_literals,n_rules,seed,rep,wall_ms,converged,residual,"
          "entropy_bits");
    int n_lines = 0;
    while (std::getline(in, line)) {
        ++n_lines;
        std::istringstream fields(line);
        std::string f;
        std::vector<std::string> parts;
        while (std::getline(fields, f, ',')) parts.push_back(f);
        REQUIRE(parts.size() == 9);
        CHECK(parts[0] == "lp");
        CHECK(parts[1] == "3");
        CHECK(parts[2] == "4");
        CHECK((parts[6] == "0" || parts[6] == "1"));
        CHECK(std::stod(parts[7]) >= 0.0);
    }
    CHECK(n_lines == 2);
}

#pragma once
// Random satisfiable instance generation and solver racing.

#include <cstdint>
#include <string>
#include <vector>

#include "pd/model.hpp"

namespace pd {

struct BenchSpec {
    int n_literals = 6;
    int n_rules = 16;
    int max_body = 0;  // 0 means up to the language size
    std::uint64_t seed = 1;
    std::vector<std::string> backends;  // sgd | direct-entropy | max-entropy | lp
    int repetitions = 10;
    bool include_build = false;  // fold matrix build into the timed region
};

struct BenchRow {
    std::string backend;
    int n_literals = 0;
    int n_rules = 0;
    std::uint64_t seed = 0;
    int rep = 0;
    double wall_ms = 0.0;
    bool converged = false;
    double residual = 0.0;
    double entropy_bits = 0.0;
};

// Draws a generating distribution (normalized uniform variates), then rules
// whose theta is the generating conditional probability, so the result is
// satisfiable by construction. Bodies exclude the head atom; zero-probability
// bodies and zero thetas are resampled. Deterministic per seed. When
// generating_pi is non-null it receives the generating distribution.
Framework generate_satisfiable(int n_literals, int n_rules, int max_body,
                               std::uint64_t seed,
                               std::vector<double>* generating_pi = nullptr);

std::vector<BenchRow> run_bench(const BenchSpec& spec);
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace pd

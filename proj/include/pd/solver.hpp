#pragma once
// Joint-distribution solvers over the world polytope {A pi = B, pi >= 0}.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pd/builder.hpp"
#include "pd/simplex.hpp"

namespace pd {

enum class Backend { Sgd, Direct, Lp };

Backend backend_from_string(const std::string& s);
const char* backend_name(Backend b);

struct SolverConfig {
    double learning_rate = 0.0;  // 0 picks 1/columns
    double momentum = 0.99;
    double tol = 1e-3;
    int max_epochs = 200000;
    std::uint64_t seed = 1;
    bool clip = true;
};

struct SolveResult {
    std::vector<double> pi;      // normalized, box-respecting
    std::vector<double> lambda;  // multipliers from the augmented direct path
    bool converged = false;
    int epochs_used = 0;
    double residual = 0.0;               // max |A pi - B| of the returned pi
    std::optional<double> objective;     // entropy bits, or the L1 value
    std::string method;
};

// Gauss-Jordan with partial pivoting; free columns pinned to zero. Empty
// optional when the system is inconsistent.
std::optional<Vector> gauss_solve_free_zero(Matrix a, Vector b,
                                            double eps = 1e-9);

double max_abs_residual(const Matrix& a, const Vector& b, const Vector& x);
double vn_entropy_bits(const Vector& pi);

// Row-stochastic descent with annealed momentum; coordinates of one row are
// swept sequentially with an incrementally updated row error. Coordinates
// past clip_first (the multipliers of an augmented system) stay unclipped.
SolveResult solve_sgd_raw(const Matrix& a, const Vector& b,
                          const SolverConfig& cfg, std::size_t clip_first);
SolveResult solve_sgd(const LinearSystem& sys, const SolverConfig& cfg);

// Plain dense solve: square systems directly, others through the normal
// equations. Box violations flip converged off but still return the
// clipped, renormalized distribution.
SolveResult solve_direct(const LinearSystem& sys);

// Phase-one feasibility plus a vertex of the polytope.
LpResult feasible_vertex(const LinearSystem& sys);

// min or max of Pr(target) over the polytope via simplex.
std::optional<double> optimize_bound(const LinearSystem& sys,
                                     const std::vector<Literal>& target,
                                     bool maximize);

// Canonical entropy-free solution: maximize pi(0), pin it, maximize pi(1),
// and so on. One LP per world, intended for small systems.
SolveResult solve_lexmax(const LinearSystem& sys);

// Quadratic entropy surrogate: solve the augmented stationarity system, and
// when its solution leaves the box fall back to the exact minimum-norm point
// of the polytope (primal-dual active set).
SolveResult solve_max_linear_entropy(const LinearSystem& sys,
                                     const SolverConfig& cfg, Backend backend);

// True maximum von Neumann entropy: zero-support reduction, then damped
// Newton on the dual with pi_w = exp((A^T lam)_w - 1).
SolveResult solve_max_entropy(const LinearSystem& sys);

// min sum_i |a_i.pi - b_i| over soft rows with the normalization row kept
// hard; always returns a distribution. objective carries the L1 value.
SolveResult solve_l1_relaxed(const LinearSystem& sys);

}  // namespace pd

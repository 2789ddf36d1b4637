#include "pd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace pd {

namespace {

double dot(const Vector& x, const Vector& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(const Vector& x) { return std::sqrt(dot(x, x)); }

// Clip into [0,1] and renormalize so every solver hands back an actual
// distribution, converged or not.
void box_normalize(Vector& pi) {
    double sum = 0.0;
    for (double& p : pi) {
        p = std::clamp(p, 0.0, 1.0);
        if (p == 0.0) p = 0.0;  // drop negative zero
        sum += p;
    }
    if (sum > 0.0)
        for (double& p : pi) p /= sum;
}

struct IndepRows {
    Matrix a;
    Vector b;
    std::vector<int> keep;
};

// Maximal linearly independent row subset, in order (Gram-Schmidt test).
IndepRows independent_rows(const Matrix& a, const Vector& b,
                           double eps = 1e-9) {
    IndepRows out;
    Matrix basis;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Vector v = a[i];
        for (const Vector& u : basis) {
            double d = dot(v, u);
            for (std::size_t j = 0; j < v.size(); ++j) v[j] -= d * u[j];
        }
        double nrm = norm2(v);
        if (nrm > eps * std::max(1.0, norm2(a[i]))) {
            for (double& x : v) x /= nrm;
            basis.push_back(std::move(v));
            out.a.push_back(a[i]);
            out.b.push_back(b[i]);
            out.keep.push_back(static_cast<int>(i));
        }
    }
    return out;
}

Matrix select_columns(const Matrix& a, const std::vector<bool>& mask) {
    Matrix out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i].reserve(a[i].size());
        for (std::size_t j = 0; j < a[i].size(); ++j)
            if (mask[j]) out[i].push_back(a[i][j]);
    }
    return out;
}

// Exact minimizer of ||pi||^2 over {A pi = B, pi >= 0} by a primal-dual
// active set: min-norm solve on the free coordinates, zero the most negative
// one, re-free zeroed coordinates whose multiplier has the wrong sign.
std::pair<Vector, bool> min_norm_polytope(const Matrix& a, const Vector& b) {
    std::size_t nw = a.empty() ? 0 : a[0].size();
    std::vector<bool> free_mask(nw, true);
    Vector pi(nw, 0.0);
    for (std::size_t round = 0; round < 3 * nw + 10; ++round) {
        IndepRows ind = independent_rows(select_columns(a, free_mask), b);
        std::size_t k = ind.a.size();
        Matrix gram(k, Vector(k, 0.0));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                gram[i][j] = dot(ind.a[i], ind.a[j]);
        auto lam = gauss_solve_free_zero(gram, ind.b);
        if (!lam) return {Vector(nw, 0.0), false};
        std::size_t nf = ind.a.empty() ? 0 : ind.a[0].size();
        Vector pif(nf, 0.0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < nf; ++j)
                pif[j] += ind.a[i][j] * (*lam)[i];
        std::fill(pi.begin(), pi.end(), 0.0);
        {
            std::size_t fj = 0;
            for (std::size_t w = 0; w < nw; ++w)
                if (free_mask[w]) pi[w] = pif[fj++];
        }
        double mn = 0.0;
        for (double v : pif) mn = std::min(mn, v);
        if (pif.empty() || mn >= -1e-10) {
            // dual check on zeroed coordinates: -(A^T lam)_w must stay >= 0
            int worst = -1;
            double worst_val = 1e-10;
            for (std::size_t w = 0; w < nw; ++w) {
                if (free_mask[w]) continue;
                double g = 0.0;
                for (std::size_t i = 0; i < k; ++i)
                    g += a[ind.keep[i]][w] * (*lam)[i];
                if (g > worst_val) {
                    worst_val = g;
                    worst = static_cast<int>(w);
                }
            }
            if (worst < 0) {
                for (double& v : pi) v = std::max(v, 0.0);
                double resid = b.empty() ? 0.0 : max_abs_residual(a, b, pi);
                return {pi, resid < 1e-6};
            }
            free_mask[worst] = true;
            continue;
        }
        int drop = -1;
        double val = 0.0;
        {
            std::size_t fj = 0;
            for (std::size_t w = 0; w < nw; ++w) {
                if (!free_mask[w]) continue;
                if (pif[fj] < val) {
                    val = pif[fj];
                    drop = static_cast<int>(w);
                }
                ++fj;
            }
        }
        free_mask[drop] = false;
    }
    for (double& v : pi) v = std::max(v, 0.0);
    return {pi, false};
}

// Worlds forced to zero by rows with zero rhs whose surviving coefficients
// all share one sign. Repeats until stable, since zeroing a world can turn
// another row same-signed.
std::vector<bool> reduce_zero_support(const Matrix& a, const Vector& b,
                                      double eps = 1e-12) {
    std::size_t m = a.size();
    std::size_t nw = m ? a[0].size() : 0;
    std::vector<bool> alive(nw, true);
    std::vector<bool> active(m, true);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < m; ++i) {
            if (!active[i] || std::abs(b[i]) > eps) continue;
            bool any = false, pos = false, neg = false;
            for (std::size_t w = 0; w < nw; ++w) {
                if (!alive[w] || std::abs(a[i][w]) <= eps) continue;
                any = true;
                (a[i][w] > 0 ? pos : neg) = true;
            }
            if (!any) {
                active[i] = false;
                continue;
            }
            if (pos && neg) continue;
            for (std::size_t w = 0; w < nw; ++w)
                if (alive[w] && std::abs(a[i][w]) > eps) alive[w] = false;
            active[i] = false;
            changed = true;
        }
    }
    return alive;
}

void finish(SolveResult& r, const LinearSystem& sys) {
    box_normalize(r.pi);
    r.residual = max_abs_residual(sys.a, sys.b, r.pi);
    r.objective = vn_entropy_bits(r.pi);
}

}  // namespace

Backend backend_from_string(const std::string& s) {
    if (s == "sgd") return Backend::Sgd;
    if (s == "direct") return Backend::Direct;
    if (s == "lp") return Backend::Lp;
    throw Error("unknown solver \"" + s + "\" (expected sgd, direct, or lp)");
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::Sgd: return "sgd";
        case Backend::Direct: return "direct";
        default: return "lp";
    }
}

std::optional<Vector> gauss_solve_free_zero(Matrix a, Vector b, double eps) {
    std::size_t rows = a.size();
    std::size_t cols = rows ? a[0].size() : 0;
    std::vector<int> pivot_of_col(cols, -1);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        for (std::size_t i = r + 1; i < rows; ++i)
            if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
        if (std::abs(a[p][c]) <= eps) continue;
        if (p != r) {
            std::swap(a[p], a[r]);
            std::swap(b[p], b[r]);
        }
        double inv = 1.0 / a[r][c];
        for (double& v : a[r]) v *= inv;
        b[r] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            double f = a[i][c];
            if (std::abs(f) <= eps) continue;
            for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivot_of_col[c] = static_cast<int>(r);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (std::abs(b[i]) > 1e-7) return std::nullopt;
    Vector x(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c)
        if (pivot_of_col[c] >= 0) x[c] = b[pivot_of_col[c]];
    return x;
}

double max_abs_residual(const Matrix& a, const Vector& b, const Vector& x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(dot(a[i], x) - b[i]));
    return worst;
}

double vn_entropy_bits(const Vector& pi) {
    double h = 0.0;
    for (double p : pi)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

SolveResult solve_sgd_raw(const Matrix& a, const Vector& b,
                          const SolverConfig& cfg, std::size_t clip_first) {
    std::size_t m = a.size();
    std::size_t cols = m ? a[0].size() : 0;
    double lr = cfg.learning_rate > 0 ? cfg.learning_rate : 1.0 / cols;
    SolveResult r;
    r.method = "sgd";
    Vector pi(cols, 1.0 / cols);
    Vector vel(cols, 0.0);
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed);
    double mult = 1.0;
    double prev = max_abs_residual(a, b, pi);
    double resid = prev;
    int epoch = 0;
    for (; epoch < cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double alpha = cfg.momentum * mult;
        for (int i : order) {
            const Vector& ai = a[i];
            double err = dot(ai, pi) - b[i];
            for (std::size_t j = 0; j < cols; ++j) {
                double aij = ai[j];
                if (aij == 0.0 && alpha == 0.0) continue;
                vel[j] = alpha * vel[j] - lr * 2.0 * err * aij;
                double old = pi[j];
                double next = old + vel[j];
                if (cfg.clip && j < clip_first)
                    next = std::clamp(next, 0.0, 1.0);
                pi[j] = next;
                err += aij * (next - old);
            }
        }
        resid = max_abs_residual(a, b, pi);
        if (resid < cfg.tol) {
            ++epoch;
            r.converged = true;
            break;
        }
        if (resid > prev) {
            std::fill(vel.begin(), vel.end(), 0.0);
            mult = mult < 1e-6 ? 0.0 : mult * 0.5;
        }
        prev = resid;
    }
    r.pi = std::move(pi);
    r.epochs_used = epoch;
    r.residual = resid;
    return r;
}

SolveResult solve_sgd(const LinearSystem& sys, const SolverConfig& cfg) {
    SolveResult r = solve_sgd_raw(sys.a, sys.b, cfg, sys.n_worlds);
    finish(r, sys);
    r.converged = r.converged && r.residual <= cfg.tol;
    return r;
}

SolveResult solve_direct(const LinearSystem& sys) {
    std::size_t m = sys.a.size();
    std::size_t nw = sys.n_worlds;
    SolveResult r;
    r.method = "direct";
    std::optional<Vector> x;
    if (m == nw) {
        x = gauss_solve_free_zero(sys.a, sys.b);
    } else {
        // normal equations for the non-square case
        Matrix ata(nw, Vector(nw, 0.0));
        Vector atb(nw, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < nw; ++j) {
                double aij = sys.a[i][j];
                if (aij == 0.0) continue;
                atb[j] += aij * sys.b[i];
                for (std::size_t k = 0; k < nw; ++k)
                    ata[j][k] += aij * sys.a[i][k];
            }
        }
        x = gauss_solve_free_zero(ata, atb);
    }
    if (!x) {
        r.pi.assign(nw, 0.0);
        r.method = "direct:singular";
        finish(r, sys);
        r.converged = false;
        return r;
    }
    double raw_resid = max_abs_residual(sys.a, sys.b, *x);
    double lo = 0.0, hi = 0.0;
    for (double v : *x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool in_box = lo > -1e-9 && hi < 1.0 + 1e-9;
    if (!in_box) r.method = "direct:box-violation";
    r.pi = std::move(*x);
    finish(r, sys);
    r.converged = in_box && raw_resid < 1e-6 && r.residual < 1e-6;
    return r;
}

LpResult feasible_vertex(const LinearSystem& sys) {
    Vector c(sys.n_worlds, 0.0);
    return simplex_solve(sys.a, sys.b, c);
}

std::optional<double> optimize_bound(const LinearSystem& sys,
                                     const std::vector<Literal>& target,
                                     bool maximize) {
    Vector c(sys.n_worlds, 0.0);
    for (std::uint64_t w = 0; w < sys.n_worlds; ++w)
        if (satisfies_all(w, sys.n_atoms, target))
            c[w] = maximize ? -1.0 : 1.0;
    LpResult lp = simplex_solve(sys.a, sys.b, c);
    if (lp.status != LpStatus::Optimal) return std::nullopt;
    double got = 0.0;
    for (std::size_t w = 0; w < c.size(); ++w) got += c[w] * lp.x[w];
    return maximize ? -got : got;
}

SolveResult solve_lexmax(const LinearSystem& sys) {
    Matrix a = sys.a;
    Vector b = sys.b;
    std::size_t nw = sys.n_worlds;
    SolveResult r;
    r.method = "lexmax";
    Vector x;
    for (std::size_t w = 0; w < nw; ++w) {
        Vector c(nw, 0.0);
        c[w] = -1.0;
        LpResult lp = simplex_solve(a, b, c);
        if (lp.status != LpStatus::Optimal) {
            r.pi.assign(nw, 0.0);
            finish(r, sys);
            r.converged = false;
            return r;
        }
        x = std::move(lp.x);
        Vector pin(nw, 0.0);
        pin[w] = 1.0;
        a.push_back(std::move(pin));
        b.push_back(x[w]);
    }
    r.pi = std::move(x);
    finish(r, sys);
    r.converged = r.residual < 1e-6;
    return r;
}

SolveResult solve_max_linear_entropy(const LinearSystem& sys,
                                     const SolverConfig& cfg,
                                     Backend backend) {
    AugmentedSystem aug = build_lagrange_augmented(sys);
    std::size_t nw = aug.n_worlds;
    if (backend == Backend::Sgd) {
        SolveResult r = solve_sgd_raw(aug.a, aug.b, cfg, nw);
        r.lambda.assign(r.pi.begin() + nw, r.pi.end());
        r.pi.resize(nw);
        r.method = "linear-entropy:sgd";
        bool hit_tol = r.converged;
        finish(r, sys);
        r.converged = hit_tol && r.residual <= cfg.tol;
        return r;
    }
    SolveResult r;
    auto x = gauss_solve_free_zero(aug.a, aug.b);
    if (x) {
        Vector pi(x->begin(), x->begin() + nw);
        double resid = max_abs_residual(sys.a, sys.b, pi);
        double lo = 0.0, hi = 0.0;
        for (double v : pi) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (resid < 1e-6 && lo > -1e-9 && hi < 1.0 + 1e-9) {
            r.pi = std::move(pi);
            r.lambda.assign(x->begin() + nw, x->end());
            r.method = "linear-entropy:direct";
            finish(r, sys);
            r.converged = r.residual < 1e-6;
            return r;
        }
    }
    // stationary point unusable: exact min-norm point of the polytope, which
    // is the true maximizer of the quadratic surrogate under the constraints
    auto [pi, ok] = min_norm_polytope(sys.a, sys.b);
    r.pi = std::move(pi);
    r.method = "linear-entropy:active-set";
    finish(r, sys);
    r.converged = ok && r.residual < 1e-6;
    return r;
}

SolveResult solve_max_entropy(const LinearSystem& sys) {
    SolveResult r;
    r.method = "max-entropy:newton";
    std::size_t nw = sys.n_worlds;
    std::vector<bool> alive = reduce_zero_support(sys.a, sys.b);
    std::size_t n_alive = 0;
    for (bool v : alive) n_alive += v;
    if (n_alive == 0) {
        r.pi.assign(nw, 0.0);
        finish(r, sys);
        r.converged = false;
        return r;
    }
    IndepRows ind = independent_rows(select_columns(sys.a, alive), sys.b);
    std::size_t k = ind.a.size();
    Vector lam(k, 0.0);
    Vector pi_r(n_alive, 0.0);
    auto refresh = [&](const Vector& l, Vector& out) {
        for (std::size_t w = 0; w < n_alive; ++w) {
            double e = -1.0;
            for (std::size_t i = 0; i < k; ++i) e += ind.a[i][w] * l[i];
            out[w] = std::exp(std::clamp(e, -700.0, 700.0));
        }
    };
    refresh(lam, pi_r);
    for (int iter = 0; iter < 500; ++iter) {
        Vector grad(k, 0.0);
        double gmax = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            grad[i] = dot(ind.a[i], pi_r) - ind.b[i];
            gmax = std::max(gmax, std::abs(grad[i]));
        }
        if (gmax < 1e-12) break;
        Matrix h(k, Vector(k, 0.0));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j) {
                double s = 0.0;
                for (std::size_t w = 0; w < n_alive; ++w)
                    s += ind.a[i][w] * pi_r[w] * ind.a[j][w];
                h[i][j] = h[j][i] = s;
            }
        for (std::size_t i = 0; i < k; ++i) h[i][i] += 1e-14;
        auto step = gauss_solve_free_zero(h, grad);
        if (!step) break;
        double g0 = std::accumulate(pi_r.begin(), pi_r.end(), 0.0) -
                    dot(ind.b, lam);
        double t = 1.0;
        bool accepted = false;
        Vector lam_try(k), pi_try(n_alive);
        while (t > 1e-14) {
            for (std::size_t i = 0; i < k; ++i)
                lam_try[i] = lam[i] - t * (*step)[i];
            refresh(lam_try, pi_try);
            double g1 = std::accumulate(pi_try.begin(), pi_try.end(), 0.0) -
                        dot(ind.b, lam_try);
            if (g1 <= g0 - 1e-12 * t * std::abs(g0)) {
                lam = lam_try;
                pi_r = pi_try;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    r.pi.assign(nw, 0.0);
    {
        std::size_t j = 0;
        for (std::size_t w = 0; w < nw; ++w)
            if (alive[w]) r.pi[w] = pi_r[j++];
    }
    finish(r, sys);
    r.converged = r.residual < 1e-6;
    return r;
}

SolveResult solve_l1_relaxed(const LinearSystem& sys) {
    std::size_t m = sys.a.size();
    std::size_t nw = sys.n_worlds;
    std::vector<std::size_t> soft, hard;
    for (std::size_t i = 0; i < m; ++i) {
        if (sys.row_tags[i] == "normalization")
            hard.push_back(i);
        else
            soft.push_back(i);
    }
    std::size_t ns = soft.size();
    std::size_t cols = nw + 2 * ns;
    Matrix rows;
    Vector rhs;
    for (std::size_t kidx = 0; kidx < ns; ++kidx) {
        Vector row(cols, 0.0);
        std::copy(sys.a[soft[kidx]].begin(), sys.a[soft[kidx]].end(),
                  row.begin());
        row[nw + 2 * kidx] = -1.0;      // positive residual slack
        row[nw + 2 * kidx + 1] = 1.0;   // negative residual slack
        rows.push_back(std::move(row));
        rhs.push_back(sys.b[soft[kidx]]);
    }
    for (std::size_t i : hard) {
        Vector row(cols, 0.0);
        std::copy(sys.a[i].begin(), sys.a[i].end(), row.begin());
        rows.push_back(std::move(row));
        rhs.push_back(sys.b[i]);
    }
    Vector c(cols, 0.0);
    for (std::size_t j = nw; j < cols; ++j) c[j] = 1.0;
    LpResult lp = simplex_solve(rows, rhs, c);
    SolveResult r;
    r.method = "l1-relaxed";
    if (lp.status != LpStatus::Optimal) {
        r.pi.assign(nw, 0.0);
        finish(r, sys);
        r.objective = std::nullopt;
        r.converged = false;
        return r;
    }
    r.pi.assign(lp.x.begin(), lp.x.begin() + nw);
    box_normalize(r.pi);
    r.residual = max_abs_residual(sys.a, sys.b, r.pi);
    r.objective = lp.value;
    r.converged = true;
    return r;
}

}  // namespace pd

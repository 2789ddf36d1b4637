#include "pd/simplex.hpp"

#include <cmath>
#include <cstddef>

namespace pd {

namespace {

constexpr double kEps = 1e-9;
constexpr int kDegenLimit = 200;

// tab rows are [coefficients..., rhs]; the last row is the objective row
// holding reduced costs and minus the objective value. Pivots until optimal
// under the Dantzig rule, switching to Bland's rule after a long degenerate
// streak so cycling cannot persist. Returns false when unbounded.
bool pivot_to_optimal(std::vector<std::vector<double>>& tab,
                      std::vector<int>& basis, int ncols) {
    int rows = static_cast<int>(tab.size()) - 1;
    int degen = 0;
    for (;;) {
        const std::vector<double>& obj = tab.back();
        int enter = -1;
        if (degen > kDegenLimit) {
            for (int j = 0; j < ncols; ++j)
                if (obj[j] < -kEps) {
                    enter = j;
                    break;
                }
        } else {
            double best = -kEps;
            for (int j = 0; j < ncols; ++j)
                if (obj[j] < best) {
                    best = obj[j];
                    enter = j;
                }
        }
        if (enter < 0) return true;
        int leave = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < rows; ++i) {
            if (tab[i][enter] <= kEps) continue;
            double ratio = tab[i].back() / tab[i][enter];
            if (leave < 0 || ratio < best_ratio - kEps ||
                (std::abs(ratio - best_ratio) <= kEps &&
                 basis[i] < basis[leave])) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave < 0) return false;
        if (best_ratio <= kEps)
            ++degen;
        else
            degen = 0;
        double piv = tab[leave][enter];
        for (double& v : tab[leave]) v /= piv;
        for (std::size_t i = 0; i < tab.size(); ++i) {
            if (static_cast<int>(i) == leave) continue;
            double f = tab[i][enter];
            if (std::abs(f) <= kEps) continue;
            const std::vector<double>& prow = tab[leave];
            std::vector<double>& row = tab[i];
            for (std::size_t j = 0; j < row.size(); ++j)
                row[j] -= f * prow[j];
        }
        basis[leave] = enter;
    }
}

}  // namespace

LpResult simplex_solve(std::vector<std::vector<double>> a,
                       std::vector<double> b, const std::vector<double>& c) {
    int m = static_cast<int>(a.size());
    int n = static_cast<int>(c.size());
    if (m == 0) {
        LpResult r;
        r.x.assign(n, 0.0);
        r.status = LpStatus::Optimal;
        for (double ci : c)
            if (ci < -kEps) r.status = LpStatus::Unbounded;
        return r;
    }
    for (int i = 0; i < m; ++i) {
        if (b[i] < 0) {
            for (double& v : a[i]) v = -v;
            b[i] = -b[i];
        }
    }
    int total = n + m;  // artificials at columns n..n+m-1
    std::vector<std::vector<double>> tab;
    tab.reserve(m + 1);
    for (int i = 0; i < m; ++i) {
        std::vector<double> row(total + 1, 0.0);
        for (int j = 0; j < n; ++j) row[j] = a[i][j];
        row[n + i] = 1.0;
        row[total] = b[i];
        tab.push_back(std::move(row));
    }
    // phase one: minimize the artificial mass
    std::vector<double> obj(total + 1, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= total; ++j) obj[j] -= tab[i][j];
        obj[n + i] = 0.0;
    }
    tab.push_back(std::move(obj));
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;
    if (!pivot_to_optimal(tab, basis, total)) return LpResult{};
    if (tab.back()[total] < -1e-7) {
        LpResult r;
        r.status = LpStatus::Infeasible;
        r.value = -tab.back()[total];
        return r;
    }
    // drive leftover artificials out of the basis where a real column allows
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        for (int j = 0; j < n; ++j) {
            if (std::abs(tab[i][j]) <= kEps) continue;
            double piv = tab[i][j];
            for (double& v : tab[i]) v /= piv;
            for (std::size_t k = 0; k < tab.size(); ++k) {
                if (static_cast<int>(k) == i) continue;
                double f = tab[k][j];
                if (std::abs(f) <= kEps) continue;
                for (std::size_t col = 0; col < tab[k].size(); ++col)
                    tab[k][col] -= f * tab[i][col];
            }
            basis[i] = j;
            break;
        }
    }
    // phase two
    std::vector<double> obj2(total + 1, 0.0);
    for (int j = 0; j < n; ++j) obj2[j] = c[j];
    for (int i = 0; i < m; ++i) {
        if (basis[i] >= n) continue;
        double f = obj2[basis[i]];
        if (f == 0.0) continue;
        for (int j = 0; j <= total; ++j) obj2[j] -= f * tab[i][j];
    }
    for (int j = n; j < total; ++j) obj2[j] = 1e30;  // no artificial re-entry
    tab.back() = std::move(obj2);
    if (!pivot_to_optimal(tab, basis, n)) {
        LpResult r;
        r.status = LpStatus::Unbounded;
        return r;
    }
    LpResult r;
    r.status = LpStatus::Optimal;
    r.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) r.x[basis[i]] = tab[i][total];
    r.value = 0.0;
    for (int j = 0; j < n; ++j) r.value += c[j] * r.x[j];
    return r;
}

}  // namespace pd

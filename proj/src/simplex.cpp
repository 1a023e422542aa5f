#include "riscbf/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace riscbf {

namespace {
constexpr double kEps = 1e-9;

// Tableau simplex on equality-standard form min c'x, Ax = b, x >= 0 with a
// starting basis of artificial/slack columns. Bland's rule throughout.
struct Tableau {
    RMat t;                 // m x (n + 1), last column is rhs
    RVec cost;              // n
    std::vector<int> basis; // m basic column indices
    int m, n;

    void price_out(RVec& z, double& z0) const {
        // reduced costs z_j = c_j - c_B^T B^{-1} A_j over the tableau rows
        z = cost;
        z0 = 0;
        for (int i = 0; i < m; ++i) {
            double cb = cost(basis[i]);
            if (cb == 0.0) continue;
            z -= cb * t.row(i).head(n).transpose();
            z0 -= cb * t(i, n);
        }
    }

    // returns false when unbounded
    bool iterate() {
        for (;;) {
            RVec z;
            double z0;
            price_out(z, z0);
            int enter = -1;
            for (int j = 0; j < n; ++j)
                if (z(j) < -kEps) { enter = j; break; } // Bland: lowest index
            if (enter < 0) return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                double aij = t(i, enter);
                if (aij > kEps) {
                    double ratio = t(i, n) / aij;
                    if (ratio < best - kEps || (ratio < best + kEps && (leave < 0 || basis[i] < basis[leave]))) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }

    void pivot(int row, int col) {
        t.row(row) /= t(row, col);
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            double f = t(i, col);
            if (f != 0.0) t.row(i) -= f * t.row(row);
        }
        basis[row] = col;
    }
};

} // namespace

LpResult solve_lp(const LpProblem& lp) {
    const int n0 = static_cast<int>(lp.c.size());
    int m0 = static_cast<int>(lp.rhs.size());
    if (lp.a.rows() != m0 || lp.a.cols() != n0 || static_cast<int>(lp.rel.size()) != m0)
        throw std::invalid_argument("solve_lp: inconsistent dimensions");

    // append upper-bound rows x_j <= ub_j
    int n_ub = 0;
    for (int j = 0; j < n0; ++j)
        if (std::isfinite(lp.ub(j))) ++n_ub;
    const int m = m0 + n_ub;

    RMat a(m, n0);
    RVec b(m);
    std::vector<int> rel(m);
    a.topRows(m0) = lp.a;
    b.head(m0) = lp.rhs;
    for (int i = 0; i < m0; ++i) rel[i] = lp.rel[i];
    {
        int r = m0;
        for (int j = 0; j < n0; ++j) {
            if (!std::isfinite(lp.ub(j))) continue;
            a.row(r).setZero();
            a(r, j) = 1.0;
            b(r) = lp.ub(j);
            rel[r] = -1;
            ++r;
        }
    }

    // normalize to b >= 0
    for (int i = 0; i < m; ++i) {
        if (b(i) < 0) {
            a.row(i) = -a.row(i);
            b(i) = -b(i);
            rel[i] = -rel[i];
        }
    }

    // columns: x (n0) | slack/surplus | artificials
    int n_slack = 0;
    for (int i = 0; i < m; ++i)
        if (rel[i] != 0) ++n_slack;
    int n_art = 0;
    for (int i = 0; i < m; ++i)
        if (rel[i] != -1) ++n_art; // >= and == rows need an artificial

    const int n = n0 + n_slack + n_art;
    Tableau tab;
    tab.m = m;
    tab.n = n;
    tab.t = RMat::Zero(m, n + 1);
    tab.t.block(0, 0, m, n0) = a;
    tab.t.col(n) = b;
    tab.basis.assign(m, -1);

    int scol = n0, acol = n0 + n_slack;
    for (int i = 0; i < m; ++i) {
        if (rel[i] == -1) {
            tab.t(i, scol) = 1.0;
            tab.basis[i] = scol++;
        } else if (rel[i] == 1) {
            tab.t(i, scol) = -1.0;
            ++scol;
            tab.t(i, acol) = 1.0;
            tab.basis[i] = acol++;
        } else {
            tab.t(i, acol) = 1.0;
            tab.basis[i] = acol++;
        }
    }

    // phase 1
    if (n_art > 0) {
        tab.cost = RVec::Zero(n);
        tab.cost.tail(n_art).setOnes();
        if (!tab.iterate()) return {LpStatus::unbounded, RVec(), 0}; // cannot happen for phase 1
        double art_sum = 0;
        for (int i = 0; i < tab.m; ++i)
            if (tab.basis[i] >= n0 + n_slack) art_sum += tab.t(i, tab.n);
        if (art_sum > 1e-7) return {LpStatus::infeasible, RVec(), 0};
        // drive remaining artificials out of the basis where possible
        for (int i = 0; i < tab.m; ++i) {
            if (tab.basis[i] < n0 + n_slack) continue;
            int enter = -1;
            for (int j = 0; j < n0 + n_slack; ++j)
                if (std::abs(tab.t(i, j)) > kEps) { enter = j; break; }
            if (enter >= 0) tab.pivot(i, enter);
        }
    }

    // phase 2 (artificial columns pinned at zero cost but forbidden: zero
    // them so they can never re-enter)
    if (n_art > 0) tab.t.block(0, n0 + n_slack, m, n_art).setZero();
    tab.cost = RVec::Zero(n);
    tab.cost.head(n0) = lp.c;
    if (!tab.iterate()) return {LpStatus::unbounded, RVec(), 0};

    LpResult res;
    res.status = LpStatus::optimal;
    res.x = RVec::Zero(n0);
    for (int i = 0; i < m; ++i)
        if (tab.basis[i] < n0) res.x(tab.basis[i]) = tab.t(i, tab.n);
    res.objective = lp.c.dot(res.x);
    return res;
}

} // namespace riscbf

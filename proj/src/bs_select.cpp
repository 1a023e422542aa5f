#include "riscbf/bs_select.hpp"

#include "riscbf/simplex.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace riscbf {

int BilpInstance::zeta_index(int i, int j, int K) {
    if (i > j) std::swap(i, j);
    return i * K - i * (i + 1) / 2 + (j - i - 1);
}

double BilpInstance::objective(const IVec& tau, const IVec& zeta) const {
    double obj = 0;
    for (int i = 0; i < K; ++i) obj += c_tau(i) * tau(i);
    for (int e = 0; e < zeta.size(); ++e) obj += c_zeta(e) * zeta(e);
    return obj;
}

IVec BilpInstance::forced_zeta(const IVec& tau) const {
    IVec zeta(K * (K - 1) / 2);
    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j) zeta(zeta_index(i, j, K)) = tau(i) * tau(j);
    return zeta;
}

bool BilpInstance::satisfies(const IVec& tau, const IVec& zeta) const {
    RVec x(num_vars());
    for (int i = 0; i < K; ++i) x(i) = tau(i);
    for (int e = 0; e < zeta.size(); ++e) x(K + e) = zeta(e);
    for (const BilpRow& row : rows) {
        double lhs = row.coeff.dot(x);
        if (row.rel == -1 && lhs > row.rhs + 1e-9) return false;
        if (row.rel == 0 && std::abs(lhs - row.rhs) > 1e-9) return false;
        if (row.rel == 1 && lhs < row.rhs - 1e-9) return false;
    }
    return true;
}

SelectionBiqp assemble_selection_biqp(const BsContext& ctx, const AdmmState& state, int quota,
                                      const RVec& z) {
    const int K = static_cast<int>(ctx.xi.size());
    const Eigen::Index n_t = state.f_rf.rows();
    RVec xi2 = ctx.xi.cwiseAbs2();

    CMat x = state.f_rf * state.f_bb; // n_t x K
    CMat upsilon = ctx.eff_rows * x;  // K x K
    CMat m_mat = state.f_b + state.dual / state.rho;
    CVec m = Eigen::Map<const CVec>(m_mat.data(), static_cast<Eigen::Index>(n_t) * K);

    // column-sampled M_tilde(:,k) = e_k (x) x_k
    CMat m_tilde = CMat::Zero(static_cast<Eigen::Index>(n_t) * K, K);
    for (int k = 0; k < K; ++k) m_tilde.block(static_cast<Eigen::Index>(k) * n_t, k, n_t, 1) = x.col(k);

    SelectionBiqp biqp;
    biqp.quota = quota;
    biqp.z = z;
    biqp.u = RMat::Zero(K, K);
    biqp.r = RVec::Zero(K);

    RMat mtm = (m_tilde.adjoint() * m_tilde).real();
    RVec m_proj = (m.adjoint() * m_tilde).real().transpose(); // Re(m^H M_tilde)

    double cross_const = 0;
    for (int j = 0; j < K; ++j) {
        double l_hat_diag = 0;
        cxd l_hat = 0;
        for (int k = 0; k < K; ++k) {
            l_hat_diag += xi2(k) * std::norm(upsilon(k, j));
            l_hat += xi2(k) * std::conj(upsilon(k, j)) * ctx.cross(k, j);
            cross_const += xi2(k) * std::norm(ctx.cross(k, j));
        }
        cxd g = std::sqrt(ctx.mu(j)) * std::conj(ctx.xi(j)) * upsilon(j, j);
        biqp.u(j, j) = l_hat_diag;
        biqp.r(j) = 2.0 * std::real(l_hat) - 2.0 * std::real(g) - state.rho * m_proj(j);
    }
    biqp.u += 0.5 * state.rho * mtm;
    biqp.constant = 0.5 * state.rho * m.squaredNorm() + cross_const;
    return biqp;
}

BilpInstance rla_linearize(const SelectionBiqp& biqp, bool strengthen) {
    const int K = static_cast<int>(biqp.r.size());
    BilpInstance inst;
    inst.K = K;
    inst.quota = biqp.quota;
    inst.z = biqp.z;
    inst.strengthened = strengthen;
    inst.c_tau = RVec(K);
    inst.c_zeta = RVec(K * (K - 1) / 2);
    for (int i = 0; i < K; ++i) inst.c_tau(i) = biqp.u(i, i) + biqp.r(i);
    for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j) inst.c_zeta(BilpInstance::zeta_index(i, j, K)) = 2.0 * biqp.u(i, j);

    int forced = 0;
    std::vector<int> forced_users;
    for (int i = 0; i < K; ++i) {
        if (biqp.z(i) > 1.0 + 1e-9)
            throw SelectionInfeasible("selection: coverage row demands tau > 1 for user " + std::to_string(i),
                                      {i});
        if (biqp.z(i) > 1e-9) {
            ++forced;
            forced_users.push_back(i);
        }
    }
    if (biqp.quota < 1 || biqp.quota > K)
        throw SelectionInfeasible("selection: quota " + std::to_string(biqp.quota) + " outside [1, K]");
    if (forced > biqp.quota)
        throw SelectionInfeasible("selection: quota " + std::to_string(biqp.quota) + " below the " +
                                      std::to_string(forced) + " coverage-forced users",
                                  forced_users);

    const int nv = inst.num_vars();
    auto row = [&](int rel, double rhs) {
        BilpRow r;
        r.coeff = RVec::Zero(nv);
        r.rel = rel;
        r.rhs = rhs;
        return r;
    };

    { // cardinality: sum tau = quota
        BilpRow r = row(0, biqp.quota);
        r.coeff.head(K).setOnes();
        inst.rows.push_back(std::move(r));
    }
    for (int i = 0; i < K; ++i) { // coverage: tau_i >= z_i
        BilpRow r = row(1, biqp.z(i));
        r.coeff(i) = 1.0;
        inst.rows.push_back(std::move(r));
    }
    for (int i = 0; i < K; ++i) // standard linearization triplets
        for (int j = i + 1; j < K; ++j) {
            int e = K + BilpInstance::zeta_index(i, j, K);
            BilpRow r1 = row(-1, 0.0); // zeta <= tau_i
            r1.coeff(e) = 1.0;
            r1.coeff(i) = -1.0;
            inst.rows.push_back(std::move(r1));
            BilpRow r2 = row(-1, 0.0); // zeta <= tau_j
            r2.coeff(e) = 1.0;
            r2.coeff(j) = -1.0;
            inst.rows.push_back(std::move(r2));
            BilpRow r3 = row(1, -1.0); // zeta >= tau_i + tau_j - 1
            r3.coeff(e) = 1.0;
            r3.coeff(i) = -1.0;
            r3.coeff(j) = -1.0;
            inst.rows.push_back(std::move(r3));
        }
    if (strengthen) {
        // per-i row sum: sum_j zeta_{i,j} = quota tau_i with zeta_{i,i} = tau_i
        for (int i = 0; i < K; ++i) {
            BilpRow r = row(0, 0.0);
            for (int j = 0; j < K; ++j) {
                if (j == i) continue;
                r.coeff(K + BilpInstance::zeta_index(i, j, K)) += 1.0;
            }
            r.coeff(i) -= static_cast<double>(biqp.quota - 1);
            inst.rows.push_back(std::move(r));
            // coverage products: zeta_{i,j} >= z_j tau_i (j = i is vacuous)
            for (int j = 0; j < K; ++j) {
                if (j == i) continue;
                BilpRow rc = row(1, 0.0);
                rc.coeff(K + BilpInstance::zeta_index(i, j, K)) = 1.0;
                rc.coeff(i) = -biqp.z(j);
                inst.rows.push_back(std::move(rc));
            }
        }
    }
    return inst;
}

namespace {

struct BnbSearch {
    const BilpInstance& inst;
    std::vector<int> assign; // -1 undecided
    int count1 = 0;
    double best = std::numeric_limits<double>::infinity();
    IVec best_tau;
    long nodes = 0;

    explicit BnbSearch(const BilpInstance& i) : inst(i), assign(i.K, -1) {}

    double pair_cost(int i, int j) const { return inst.c_zeta(BilpInstance::zeta_index(i, j, inst.K)); }

    // valid lower bound for completing the current partial assignment
    double bound() const {
        const int K = inst.K;
        double fixed = 0;
        for (int i = 0; i < K; ++i) {
            if (assign[i] != 1) continue;
            fixed += inst.c_tau(i);
            for (int j = i + 1; j < K; ++j)
                if (assign[j] == 1) fixed += pair_cost(i, j);
        }
        int need = inst.quota - count1;
        std::vector<double> eff;
        for (int j = 0; j < K; ++j) {
            if (assign[j] != -1) continue;
            double c = inst.c_tau(j);
            for (int i = 0; i < K; ++i) {
                if (i == j) continue;
                if (assign[i] == 1) c += pair_cost(i, j);
                else if (assign[i] == -1) c += 0.5 * std::min(0.0, pair_cost(i, j));
            }
            eff.push_back(c);
        }
        if (need < 0 || need > static_cast<int>(eff.size()))
            return std::numeric_limits<double>::infinity();
        std::partial_sort(eff.begin(), eff.begin() + need, eff.end());
        double acc = fixed;
        for (int t = 0; t < need; ++t) acc += eff[t];
        return acc;
    }

    void dfs() {
        ++nodes;
        int need = inst.quota - count1;
        int free_cnt = 0, pick = -1;
        double pick_score = std::numeric_limits<double>::infinity();
        for (int j = 0; j < inst.K; ++j) {
            if (assign[j] != -1) continue;
            ++free_cnt;
            double c = inst.c_tau(j);
            if (c < pick_score) {
                pick_score = c;
                pick = j;
            }
        }
        if (need < 0 || need > free_cnt) return;
        if (free_cnt == 0) {
            IVec tau(inst.K);
            for (int i = 0; i < inst.K; ++i) tau(i) = assign[i];
            for (int i = 0; i < inst.K; ++i)
                if (inst.z(i) > 1e-9 && tau(i) == 0) return;
            IVec zeta = inst.forced_zeta(tau);
            if (!inst.satisfies(tau, zeta)) return; // honors any extra rows
            double obj = inst.objective(tau, zeta);
            if (obj < best) {
                best = obj;
                best_tau = tau;
            }
            return;
        }
        if (bound() >= best - 1e-12) return;

        // coverage-forced variables take priority
        for (int j = 0; j < inst.K; ++j)
            if (assign[j] == -1 && inst.z(j) > 1e-9) {
                pick = j;
                break;
            }
        for (int v : {1, 0}) {
            if (v == 0 && inst.z(pick) > 1e-9) continue;
            assign[pick] = v;
            count1 += v;
            dfs();
            count1 -= v;
            assign[pick] = -1;
        }
    }
};

BilpResult solve_exhaustive(const BilpInstance& inst) {
    BilpResult res;
    const int K = inst.K;
    if (K > 25) throw std::invalid_argument("solve_bilp: exhaustive method capped at K = 25");
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << K); ++mask) {
        if (static_cast<int>(std::popcount(mask)) != inst.quota) continue;
        IVec tau(K);
        for (int i = 0; i < K; ++i) tau(i) = (mask >> i) & 1u;
        IVec zeta = inst.forced_zeta(tau);
        ++res.nodes;
        if (!inst.satisfies(tau, zeta)) continue;
        double obj = inst.objective(tau, zeta);
        if (obj < best) {
            best = obj;
            res.tau = tau;
            res.zeta = zeta;
            res.feasible = true;
            res.objective = obj;
        }
    }
    return res;
}

} // namespace

BilpResult solve_bilp(const BilpInstance& instance, const BilpOptions& opts) {
    using Method = BilpOptions::Method;
    Method m = opts.method;
    if (m == Method::automatic) m = instance.K <= 12 ? Method::exhaustive : Method::branch_and_bound;
    if (m == Method::exhaustive) return solve_exhaustive(instance);

    BnbSearch search(instance);
    // greedy incumbent: coverage-forced users plus the cheapest linear fills
    {
        std::vector<std::pair<double, int>> order;
        IVec tau = IVec::Zero(instance.K);
        int taken = 0;
        for (int i = 0; i < instance.K; ++i)
            if (instance.z(i) > 1e-9) {
                tau(i) = 1;
                ++taken;
            } else {
                order.emplace_back(instance.c_tau(i), i);
            }
        std::sort(order.begin(), order.end());
        for (auto& [c, i] : order) {
            if (taken >= instance.quota) break;
            tau(i) = 1;
            ++taken;
        }
        if (taken == instance.quota) {
            IVec zeta = instance.forced_zeta(tau);
            if (instance.satisfies(tau, zeta)) {
                search.best = instance.objective(tau, zeta);
                search.best_tau = tau;
            }
        }
    }
    search.dfs();

    BilpResult res;
    res.nodes = search.nodes;
    if (!std::isfinite(search.best)) return res;
    res.feasible = true;
    res.tau = search.best_tau;
    res.zeta = instance.forced_zeta(search.best_tau);
    res.objective = search.best;
    return res;
}

double lp_relaxation_bound(const BilpInstance& instance) {
    LpProblem lp;
    const int nv = instance.num_vars();
    lp.c = RVec(nv);
    lp.c.head(instance.K) = instance.c_tau;
    lp.c.tail(nv - instance.K) = instance.c_zeta;
    lp.ub = RVec::Ones(nv);
    lp.a = RMat(static_cast<Eigen::Index>(instance.rows.size()), nv);
    lp.rhs = RVec(static_cast<Eigen::Index>(instance.rows.size()));
    lp.rel.resize(instance.rows.size());
    for (size_t i = 0; i < instance.rows.size(); ++i) {
        lp.a.row(static_cast<Eigen::Index>(i)) = instance.rows[i].coeff;
        lp.rhs(static_cast<Eigen::Index>(i)) = instance.rows[i].rhs;
        lp.rel[i] = instance.rows[i].rel;
    }
    LpResult res = solve_lp(lp);
    if (res.status == LpStatus::infeasible) return std::numeric_limits<double>::infinity();
    if (res.status == LpStatus::unbounded) return -std::numeric_limits<double>::infinity();
    return res.objective;
}

void write_lp_format(const BilpInstance& instance, std::ostream& os) {
    const int K = instance.K;
    auto var_name = [&](int idx) {
        if (idx < K) return "t" + std::to_string(idx + 1);
        for (int i = 0; i < K; ++i)
            for (int j = i + 1; j < K; ++j)
                if (K + BilpInstance::zeta_index(i, j, K) == idx)
                    return "z" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
        return std::string("x") + std::to_string(idx);
    };
    os << "Minimize\n obj:";
    for (int v = 0; v < instance.num_vars(); ++v) {
        double c = v < K ? instance.c_tau(v) : instance.c_zeta(v - K);
        os << (c >= 0 ? " + " : " - ") << std::abs(c) << " " << var_name(v);
    }
    os << "\nSubject To\n";
    for (size_t r = 0; r < instance.rows.size(); ++r) {
        const BilpRow& row = instance.rows[r];
        os << " c" << (r + 1) << ":";
        bool any = false;
        for (int v = 0; v < instance.num_vars(); ++v) {
            double c = row.coeff(v);
            if (c == 0.0) continue;
            os << (c >= 0 ? " + " : " - ") << std::abs(c) << " " << var_name(v);
            any = true;
        }
        if (!any) os << " 0 " << var_name(0);
        os << (row.rel == -1 ? " <= " : row.rel == 0 ? " = " : " >= ") << row.rhs << "\n";
    }
    os << "Binary\n";
    for (int v = 0; v < instance.num_vars(); ++v) os << " " << var_name(v);
    os << "\nEnd\n";
}

void select_all_bs(const std::vector<std::vector<CMat>>& h_eq, const BeamState& beams, const AuxState& aux,
                   const RVec& omega, int n_r, const std::vector<int>& quotas,
                   const std::vector<int>& order, SelectionState& selection, const SelectOptions& opts) {
    const int B = static_cast<int>(h_eq.size());
    const int K = static_cast<int>(aux.xi.size());

    for (int b : order) {
        BsContext ctx = build_bs_context(b, h_eq, beams, aux, omega, /*p_b=*/1.0, n_r, &selection);
        AdmmState st;
        st.f_b = beams.proxy[b];
        st.f_rf = beams.f_rf[b];
        st.f_bb = beams.f_bb[b];
        st.dual = beams.dual[b];
        st.tau = selection.tau_row(b);
        st.rho = opts.rho.size() == 1 ? opts.rho[0] : opts.rho.at(b);

        RVec z(K);
        for (int k = 0; k < K; ++k) {
            int others = 0;
            for (int p = 0; p < B; ++p)
                if (p != b) others += selection.tau(p, k);
            z(k) = 1.0 - others;
        }
        SelectionBiqp biqp = assemble_selection_biqp(ctx, st, quotas[b], z);
        BilpInstance inst = rla_linearize(biqp, opts.strengthen);
        BilpResult res = solve_bilp(inst, opts.bilp);
        if (!res.feasible)
            throw SelectionInfeasible("selection: BS " + std::to_string(b) + " has no feasible subset");
        for (int k = 0; k < K; ++k) selection.tau(b, k) = res.tau(k);
    }

    std::vector<int> uncovered;
    for (int k = 0; k < K; ++k) {
        int cover = 0;
        for (int b = 0; b < B; ++b) cover += selection.tau(b, k);
        if (cover < 1) uncovered.push_back(k);
    }
    if (!uncovered.empty())
        throw SelectionInfeasible("selection: " + std::to_string(uncovered.size()) + " users left uncovered",
                                  uncovered);
}

std::vector<int> quotas_from_alpha(double alpha, int B, int K) {
    if (!(alpha > 0.0) || alpha > 1.0) throw std::invalid_argument("alpha must be in (0, 1]");
    long total = std::lround(alpha * B * K);
    total = std::clamp(total, static_cast<long>(B), static_cast<long>(B) * K);
    long base = std::lround(alpha * K);
    base = std::clamp(base, 1l, static_cast<long>(K));
    std::vector<int> quotas(B, static_cast<int>(base));
    long diff = total - base * B;
    int step = diff > 0 ? 1 : -1;
    for (int b = 0; diff != 0; b = (b + 1) % B) {
        int next = quotas[b] + step;
        if (next >= 1 && next <= K) {
            quotas[b] = next;
            diff -= step;
        }
    }
    return quotas;
}

} // namespace riscbf

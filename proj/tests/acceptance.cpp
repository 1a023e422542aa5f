// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code 0 only when all
// criteria hold.

#include "riscbf/ao.hpp"
#include "riscbf/assembly.hpp"
#include "riscbf/bs_select.hpp"
#include "riscbf/ccm.hpp"
#include "riscbf/fp_objective.hpp"
#include "riscbf/hbf_admm.hpp"
#include "riscbf/modulus_qp.hpp"
#include "riscbf/rng.hpp"
#include "riscbf/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace riscbf;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("%s criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScenarioConfig desk_ris_config(int K = 2, int m = 16) {
    ScenarioConfig cfg;
    cfg.set("b", "2");
    cfg.set("k", std::to_string(K));
    cfg.set("r", "1");
    cfg.set("n_t", "8");
    cfg.set("n_rf", "2");
    cfg.set("n_r", "2");
    cfg.set("m", std::to_string(m));
    cfg.set("unit_path_gains", "true");
    cfg.set("direct_extra_loss_db", "30");
    cfg.set("p_b", "1.0");
    cfg.set("sigma2", "0.5");
    return cfg;
}

ScenarioConfig desk_pcf_config() {
    // separated BSs over distance-based gains: selection affinity is real
    ScenarioConfig cfg;
    cfg.set("b", "2");
    cfg.set("k", "4");
    cfg.set("r", "1");
    cfg.set("n_t", "8");
    cfg.set("n_rf", "4");
    cfg.set("n_r", "2");
    cfg.set("m", "16");
    cfg.set("p_b_dbm", "10");
    cfg.set("bs_positions", "0 80 6; 240 80 6");
    cfg.set("ris_positions", "120 160 4");
    return cfg;
}

ScenarioConfig desk_convergence_config() {
    // paper-style link budget (direct-dominant, RIS secondary): the
    // phi-beam coupling is weak and the AO settles quickly, echoing the
    // reported ~30-iteration convergence
    ScenarioConfig cfg;
    cfg.set("b", "2");
    cfg.set("k", "2");
    cfg.set("r", "1");
    cfg.set("n_t", "8");
    cfg.set("n_rf", "2");
    cfg.set("n_r", "2");
    cfg.set("m", "16");
    cfg.set("p_b_dbm", "10");
    return cfg;
}

struct Instance {
    Scenario sc;
    ChannelSet ch;
    BeamState beams;
    AuxState aux;
    std::vector<std::vector<CMat>> h_eq;
};

Instance random_instance(std::uint64_t seed, int B = 2, int K = 2, int n_rf = 2) {
    ScenarioConfig cfg = desk_ris_config(K);
    cfg.set("b", std::to_string(B));
    cfg.set("n_rf", std::to_string(n_rf));
    Instance in;
    std::tie(in.sc, in.ch) = build_scenario(cfg, seed);
    Rng rng(seed ^ 0xacce97);
    BeamState& b = in.beams;
    b.w = CVec(K * in.sc.n_r);
    for (int i = 0; i < b.w.size(); ++i) {
        double th = rng.uniform(0, 2 * M_PI);
        b.w(i) = cxd(std::cos(th), std::sin(th));
    }
    b.phi = CVec(in.sc.R * in.sc.m);
    for (int i = 0; i < b.phi.size(); ++i) {
        b.phi(i) = 0.8 * rng.cnormal();
        if (std::abs(b.phi(i)) > 1) b.phi(i) /= std::abs(b.phi(i));
    }
    for (int bs = 0; bs < B; ++bs) {
        CMat rf(in.sc.n_t, n_rf), bb(n_rf, K);
        for (int i = 0; i < rf.size(); ++i) {
            double th = rng.uniform(0, 2 * M_PI);
            rf.data()[i] = cxd(std::cos(th), std::sin(th));
        }
        for (int i = 0; i < bb.size(); ++i) bb.data()[i] = rng.cnormal();
        bb *= std::sqrt(in.sc.p_b) / (rf * bb).norm();
        b.f_rf.push_back(rf);
        b.f_bb.push_back(bb);
        b.proxy.push_back(rf * bb);
        CMat d(in.sc.n_t, K);
        for (int i = 0; i < d.size(); ++i) d.data()[i] = 0.05 * rng.cnormal();
        b.dual.push_back(d);
    }
    in.aux = update_aux(in.ch, in.beams, in.sc.sigma2, in.sc.omega);
    in.h_eq = equivalent_channels(in.ch, in.beams.phi);
    return in;
}

AdmmState state_of(const Instance& in, int b, double rho = 1.0) {
    AdmmState st;
    st.f_b = in.beams.proxy[b];
    st.f_rf = in.beams.f_rf[b];
    st.f_bb = in.beams.f_bb[b];
    st.dual = in.beams.dual[b];
    st.tau = RVec::Ones(in.sc.K);
    st.rho = rho;
    return st;
}

CMat random_unit_matrix(int rows, int cols, Rng& rng) {
    CMat m(rows, cols);
    for (int i = 0; i < m.size(); ++i) {
        double th = rng.uniform(0, 2 * M_PI);
        m.data()[i] = cxd(std::cos(th), std::sin(th));
    }
    return m;
}

// literal matrix-form objective f2 (penalty + signal + interference)
double f2_literal(const BsContext& ctx, const AdmmState& st, const CMat& f_rf) {
    const int K = static_cast<int>(ctx.xi.size());
    double val = 0.5 * st.rho * (st.f_b - f_rf * st.f_bb + st.dual / st.rho).squaredNorm();
    CMat upsilon = ctx.eff_rows * f_rf * st.f_bb;
    for (int k = 0; k < K; ++k) {
        val -= 2.0 * std::sqrt(ctx.mu(k)) * std::real(std::conj(ctx.xi(k)) * upsilon(k, k));
        for (int j = 0; j < K; ++j) val += std::norm(ctx.xi(k)) * std::norm(upsilon(k, j) + ctx.cross(k, j));
    }
    return val;
}

// literal selection objective fhat2 at a binary tau
double fhat2_literal(const BsContext& ctx, const AdmmState& st, const IVec& tau) {
    const int K = static_cast<int>(ctx.xi.size());
    CMat gated = st.f_bb;
    for (int j = 0; j < K; ++j) gated.col(j) *= static_cast<double>(tau(j));
    double val = 0.5 * st.rho * (st.f_b - st.f_rf * gated + st.dual / st.rho).squaredNorm();
    CMat upsilon = ctx.eff_rows * st.f_rf * st.f_bb;
    for (int k = 0; k < K; ++k) {
        val -= 2.0 * std::sqrt(ctx.mu(k)) *
               std::real(std::conj(ctx.xi(k)) * upsilon(k, k) * static_cast<double>(tau(k)));
        for (int j = 0; j < K; ++j)
            val += std::norm(ctx.xi(k)) *
                   std::norm(upsilon(k, j) * static_cast<double>(tau(j)) + ctx.cross(k, j));
    }
    return val;
}

SelectionBiqp random_dense_biqp(int K, int quota, Rng& rng) {
    RMat g(K, K);
    for (int i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
    SelectionBiqp biqp;
    biqp.u = g.transpose() * g / K;
    biqp.r = RVec(K);
    for (int i = 0; i < K; ++i) biqp.r(i) = 2.0 * rng.normal();
    biqp.quota = quota;
    biqp.z = RVec::Constant(K, -1.0);
    if (rng.uniform() < 0.4) biqp.z(static_cast<int>(rng.integer(K))) = 1.0;
    biqp.constant = rng.normal();
    return biqp;
}

// ---------------------------------------------------------------------------

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 50 && pass; ++seed) {
        Instance in = random_instance(seed);
        AuxState aux = update_aux(in.ch, in.beams, in.sc.sigma2, in.sc.omega);
        double fq = eval_fq(in.ch, in.beams, aux, in.sc.sigma2, in.sc.omega);
        double wsr = compute_wsr_nats(in.sc.omega, aux.lambda);
        if (std::abs(fq - wsr) > 1e-9 * std::max(1.0, std::abs(wsr))) {
            pass = false;
            detail = "seed " + std::to_string(seed) + ": |fq - wsr| = " + std::to_string(std::abs(fq - wsr));
        }
    }
    double dt = seconds_since(t0);
    if (dt >= 10.0) {
        pass = false;
        detail += " runtime " + std::to_string(dt) + " s over the 10 s budget";
    }
    report(1, "FP tightness on 50 desk-scale instances (1e-9 rel, < 10 s)", pass, detail);
}

void criterion_2() {
    Rng rng(2024);
    bool pass = true;
    std::string detail;
    int pairs = 0;
    for (std::uint64_t seed = 1; seed <= 20 && pass; ++seed) {
        Instance in = random_instance(seed + 100);
        BsContext ctx = build_bs_context(0, in.h_eq, in.beams, in.aux, in.sc.omega, in.sc.p_b, in.sc.n_r);
        AdmmState st = state_of(in, 0, 0.7 + 0.1 * static_cast<double>(seed % 5));
        UnitModulusQP qp = assemble_analog_qp(ctx, st);
        for (int p = 0; p < 5 && pass; ++p) {
            CMat f1 = random_unit_matrix(in.sc.n_t, in.sc.n_rf, rng);
            CMat f2 = random_unit_matrix(in.sc.n_t, in.sc.n_rf, rng);
            double d3 = qp.objective(Eigen::Map<const CVec>(f1.data(), f1.size())) -
                        qp.objective(Eigen::Map<const CVec>(f2.data(), f2.size()));
            double d2 = f2_literal(ctx, st, f1) - f2_literal(ctx, st, f2);
            ++pairs;
            if (std::abs(d3 - d2) > 1e-9 * std::max(1.0, std::abs(d2))) {
                pass = false;
                detail = "pair " + std::to_string(pairs) + ": |d3 - d2| = " + std::to_string(std::abs(d3 - d2));
            }
        }
    }
    if (pass && pairs != 100) {
        pass = false;
        detail = "only " + std::to_string(pairs) + " pairs exercised";
    }
    report(2, "vectorized f3 differences equal matrix-form f2 differences (100 pairs, 1e-9 rel)", pass,
           detail);
}

void criterion_3() {
    bool pass = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 50 && pass; ++seed) {
        Instance in = random_instance(seed + 300, 2, 4, 4);
        SelectionState sel = SelectionState::all_ones(2, 4);
        BsContext ctx = build_bs_context(0, in.h_eq, in.beams, in.aux, in.sc.omega, 1.0, in.sc.n_r, &sel);
        AdmmState st = state_of(in, 0, 0.5 + 0.25 * static_cast<double>(seed % 4));
        SelectionBiqp biqp = assemble_selection_biqp(ctx, st, 2, RVec::Constant(4, -1.0));
        for (int mask = 0; mask < 16 && pass; ++mask) {
            IVec tau(4);
            for (int k = 0; k < 4; ++k) tau(k) = (mask >> k) & 1;
            RVec td = tau.cast<double>();
            double quad = td.dot(biqp.u * td) + biqp.r.dot(td) + biqp.constant;
            double lit = fhat2_literal(ctx, st, tau);
            if (std::abs(quad - lit) > 1e-9 * std::max(1.0, std::abs(lit))) {
                pass = false;
                detail = "seed " + std::to_string(seed) + " mask " + std::to_string(mask) + ": |diff| = " +
                         std::to_string(std::abs(quad - lit));
            }
        }
    }
    report(3, "selection quadratic form equals fhat2 at all binary tau (50 assemblies, K=4, 1e-9 rel)",
           pass, detail);
}

void criterion_4() {
    Rng rng(4004);
    bool pass = true;
    std::string detail;
    // part 1: identical binary feasible sets and objectives, K <= 5
    for (int trial = 0; trial < 30 && pass; ++trial) {
        int K = 3 + static_cast<int>(rng.integer(3));
        int quota = 1 + static_cast<int>(rng.integer(K));
        SelectionBiqp biqp = random_dense_biqp(K, quota, rng);
        int forced = 0;
        for (int i = 0; i < K; ++i) forced += biqp.z(i) > 0 ? 1 : 0;
        if (forced > quota) continue;
        BilpInstance std_i = rla_linearize(biqp, false);
        BilpInstance str_i = rla_linearize(biqp, true);
        const int nz = K * (K - 1) / 2;
        for (int tmask = 0; tmask < (1 << K) && pass; ++tmask) {
            IVec tau(K);
            for (int i = 0; i < K; ++i) tau(i) = (tmask >> i) & 1;
            for (int zmask = 0; zmask < (1 << nz) && pass; ++zmask) {
                IVec zeta(nz);
                for (int e = 0; e < nz; ++e) zeta(e) = (zmask >> e) & 1;
                bool s1 = std_i.satisfies(tau, zeta);
                bool s2 = str_i.satisfies(tau, zeta);
                if (s1 != s2) {
                    pass = false;
                    detail = "feasible sets differ at trial " + std::to_string(trial);
                } else if (s1 && std::abs(std_i.objective(tau, zeta) - str_i.objective(tau, zeta)) > 1e-12) {
                    pass = false;
                    detail = "objectives differ at trial " + std::to_string(trial);
                }
            }
        }
    }
    // part 2: strengthened LP bound never weaker, 200 instances
    int stronger = 0, total = 0;
    while (total < 200 && pass) {
        int K = 3 + static_cast<int>(rng.integer(3));
        int quota = 1 + static_cast<int>(rng.integer(K));
        SelectionBiqp biqp = random_dense_biqp(K, quota, rng);
        int forced = 0;
        for (int i = 0; i < K; ++i) forced += biqp.z(i) > 0 ? 1 : 0;
        if (forced > quota) continue;
        double lb_std = lp_relaxation_bound(rla_linearize(biqp, false));
        double lb_str = lp_relaxation_bound(rla_linearize(biqp, true));
        ++total;
        if (lb_str >= lb_std - 1e-9) ++stronger;
        else if (lb_str < lb_std - 1e-9) {
            pass = false;
            detail = "strengthened bound smaller by " + std::to_string(lb_std - lb_str);
        }
    }
    if (pass && stronger < 190) {
        pass = false;
        detail = "strengthened bound held on only " + std::to_string(stronger) + "/200";
    }
    report(4, "linearization exactness (K<=5) and LP-relaxation strengthening (200 instances)", pass,
           detail);
}

void criterion_5() {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(5005);
    bool pass = true;
    std::string detail;
    int done = 0;
    while (done < 200 && pass) {
        int K = 3 + static_cast<int>(rng.integer(6)); // 3..8
        int quota = 1 + static_cast<int>(rng.integer(K));
        SelectionBiqp biqp = random_dense_biqp(K, quota, rng);
        int forced = 0;
        for (int i = 0; i < K; ++i) forced += biqp.z(i) > 0 ? 1 : 0;
        if (forced > quota) continue;
        BilpInstance inst = rla_linearize(biqp, true);
        BilpOptions ex, bb;
        ex.method = BilpOptions::Method::exhaustive;
        bb.method = BilpOptions::Method::branch_and_bound;
        BilpResult r1 = solve_bilp(inst, ex);
        BilpResult r2 = solve_bilp(inst, bb);
        ++done;
        if (r1.feasible != r2.feasible ||
            (r1.feasible && std::abs(r1.objective - r2.objective) > 1e-9 * std::max(1.0, std::abs(r1.objective)))) {
            pass = false;
            detail = "mismatch at instance " + std::to_string(done);
        }
    }
    double dt = seconds_since(t0);
    if (dt >= 60.0) {
        pass = false;
        detail += " runtime " + std::to_string(dt) + " s over the 60 s budget";
    }
    report(5, "branch-and-bound equals exhaustive enumeration (200 instances, K<=8, < 60 s)", pass, detail);
}

void criterion_6() {
    Rng rng(6006);
    bool pass = true;
    std::string detail;
    // gradient vs projected finite differences
    for (int t = 0; t < 50 && pass; ++t) {
        int n = 2 + static_cast<int>(rng.integer(6));
        CMat g(n, n);
        for (int i = 0; i < g.size(); ++i) g.data()[i] = rng.cnormal();
        UnitModulusQP qp{CMat(g.adjoint() * g / n), CVec(n)};
        for (int i = 0; i < n; ++i) qp.b(i) = rng.cnormal();
        CVec x(n);
        for (int i = 0; i < n; ++i) {
            double th = rng.uniform(0, 2 * M_PI);
            x(i) = cxd(std::cos(th), std::sin(th));
        }
        CVec fd(n);
        const double h = 1e-6;
        for (int i = 0; i < n; ++i) {
            CVec xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            double dre = (qp.objective(xp) - qp.objective(xm)) / (2 * h);
            xp = x;
            xm = x;
            xp(i) += cxd(0, h);
            xm(i) -= cxd(0, h);
            double dim = (qp.objective(xp) - qp.objective(xm)) / (2 * h);
            fd(i) = cxd(dre, dim);
        }
        CVec want = tangent_project(fd, x);
        CVec got = 2.0 * riemannian_grad(qp, x);
        double rel = (got - want).norm() / std::max(want.norm(), 1e-12);
        if (rel > 1e-5) {
            pass = false;
            detail = "gradient rel err " + std::to_string(rel);
        }
    }
    // n=2 grid-search optimality (deterministic multistart: the descent is
    // local, several phase starts cover the basins)
    for (int t = 0; t < 4 && pass; ++t) {
        CMat g(2, 2);
        for (int i = 0; i < 4; ++i) g.data()[i] = rng.cnormal();
        UnitModulusQP qp{CMat(g.adjoint() * g / 2), CVec(2)};
        qp.b(0) = rng.cnormal();
        qp.b(1) = rng.cnormal();
        CcmOptions opts;
        opts.grad_tol = 1e-10;
        opts.max_iters = 5000;
        double solver_best = 1e300;
        for (int s = 0; s < 8; ++s) {
            double a = 2 * M_PI * s / 8.0, b = 2 * M_PI * ((s * 3) % 8) / 8.0 + 0.37;
            CVec x0(2);
            x0 << cxd(std::cos(a), std::sin(a)), cxd(std::cos(b), std::sin(b));
            CcmResult res = solve_unit_modulus_qp(qp, x0, opts);
            solver_best = std::min(solver_best, qp.objective(res.x));
        }
        double best = 1e300;
        const int grid = 720;
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j) {
                double a = 2 * M_PI * i / grid, b = 2 * M_PI * j / grid;
                CVec x(2);
                x << cxd(std::cos(a), std::sin(a)), cxd(std::cos(b), std::sin(b));
                best = std::min(best, qp.objective(x));
            }
        if (solver_best > best + 1e-4) {
            pass = false;
            detail = "solver " + std::to_string(solver_best) + " vs grid " + std::to_string(best);
        }
    }
    report(6, "manifold gradients match projected finite differences; n=2 matches the 720^2 grid", pass,
           detail);
}

void criterion_7() {
    Rng rng(7007);
    bool pass = true;
    std::string detail;
    auto coordinate_descent = [](const ModulusCappedQP& qp, int sweeps) {
        const int n = static_cast<int>(qp.dim());
        CVec phi = CVec::Zero(n);
        for (int s = 0; s < sweeps; ++s)
            for (int i = 0; i < n; ++i) {
                cxd g = qp.kappa(i);
                for (int j = 0; j < n; ++j)
                    if (j != i) g += qp.z(i, j) * phi(j);
                double zii = std::real(qp.z(i, i));
                if (std::abs(g) == 0.0) phi(i) = 0;
                else if (zii <= 0) phi(i) = -g / std::abs(g);
                else {
                    cxd un = -g / zii;
                    phi(i) = std::abs(un) <= 1.0 ? un : -g / std::abs(g);
                }
            }
        return qp.objective(phi);
    };
    for (int n : {2, 3}) {
        for (int t = 0; t < 8 && pass; ++t) {
            CMat g(n, n);
            for (int i = 0; i < g.size(); ++i) g.data()[i] = rng.cnormal();
            ModulusCappedQP qp{CMat(g.adjoint() * g / n), CVec(n)};
            for (int i = 0; i < n; ++i) qp.kappa(i) = 0.7 * rng.cnormal();
            ModulusQpOptions opts;
            opts.tol = 1e-10;
            opts.max_iters = 50000;
            ModulusQpResult res = solve_modulus_capped_qp(qp, CVec::Zero(n), opts);
            if (kkt_residual(qp, res.phi) > 1e-7) {
                pass = false;
                detail = "kkt residual " + std::to_string(kkt_residual(qp, res.phi));
                break;
            }
            double oracle = coordinate_descent(qp, 6000);
            if (n == 2) {
                // fine polar grid per entry
                double best = 1e300;
                const int nr = 20, nth = 40;
                for (int r1 = 0; r1 <= nr; ++r1)
                    for (int t1 = 0; t1 < nth; ++t1)
                        for (int r2 = 0; r2 <= nr; ++r2)
                            for (int t2 = 0; t2 < nth; ++t2) {
                                CVec p(2);
                                p(0) = (double(r1) / nr) * std::exp(cxd(0, 2 * M_PI * t1 / nth));
                                p(1) = (double(r2) / nr) * std::exp(cxd(0, 2 * M_PI * t2 / nth));
                                best = std::min(best, qp.objective(p));
                            }
                if (res.objective > best + 1e-6) {
                    pass = false;
                    detail = "solver above the polar grid by " + std::to_string(res.objective - best);
                }
            }
            if (pass && std::abs(res.objective - oracle) > 1e-6) {
                pass = false;
                detail = "solver vs coordinate-descent oracle gap " +
                         std::to_string(std::abs(res.objective - oracle));
            }
        }
    }
    report(7, "modulus-capped QP matches the polar/coordinate oracles (1e-6); KKT residual <= 1e-7", pass,
           detail);
}

void criterion_8() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 10 && pass; ++seed) {
        auto [sc, ch] = build_scenario(desk_convergence_config(), seed);
        AoOptions opts; // defaults: wsr_tol 1e-4, plateau 3, i_max 50
        RunResult cf = run_cbf(ch, sc, opts, seed);
        for (size_t i = 1; i < cf.metrics.fq_trace.size(); ++i)
            if (cf.metrics.fq_trace[i] < cf.metrics.fq_trace[i - 1] - 1e-6) {
                pass = false;
                detail = "CF fq decreased at seed " + std::to_string(seed);
            }
        bool plateaued = cf.metrics.iterations < opts.i_max;
        if (!plateaued) {
            const auto& w = cf.metrics.wsr_trace;
            int stable = 0;
            for (size_t i = w.size() - 3; i < w.size(); ++i)
                if (std::abs(w[i] - w[i - 1]) < opts.wsr_tol) ++stable;
            plateaued = stable >= 3;
        }
        if (!plateaued) {
            pass = false;
            detail = "CF did not plateau by iteration 50 at seed " + std::to_string(seed);
        }
        RunResult pcf = run_pcf(ch, sc, 0.75, opts, seed);
        for (size_t i = 1; i < pcf.metrics.fq_trace.size(); ++i)
            if (pcf.metrics.fq_trace[i] < pcf.metrics.fq_trace[i - 1] - 1e-6) {
                pass = false;
                detail = "P-CF fq decreased at seed " + std::to_string(seed);
            }
    }
    double dt = seconds_since(t0);
    if (dt >= 300.0) {
        pass = false;
        detail += " runtime " + std::to_string(dt) + " s over the 5 min budget";
    }
    report(8, "AO surrogate monotone (1e-6) and WSR plateau by iteration 50 on 10 seeds (< 5 min)", pass,
           detail);
}

void criterion_9() {
    bool pass = true;
    std::string detail;
    auto [sc, ch] = build_scenario(desk_ris_config(), 42);
    AoOptions opts;
    opts.i_max = 6;

    RunResult cf = run_cbf(ch, sc, opts, 42);
    RunResult pcf = run_pcf(ch, sc, 1.0, opts, 42);
    if (!(pcf.metrics.wsr_trace == cf.metrics.wsr_trace && pcf.beams.w == cf.beams.w &&
          pcf.beams.phi == cf.beams.phi)) {
        pass = false;
        detail = "alpha=1 P-CF differs from CF";
    }

    // tau = 1 gated assemblies equal ungated, exactly
    Instance in = random_instance(4242, 2, 2);
    SelectionState ones = SelectionState::all_ones(2, 2);
    CombinerQP c1 = assemble_combiner_qp(in.ch, in.beams, in.aux, in.sc.omega, &ones);
    CombinerQP c2 = assemble_combiner_qp(in.ch, in.beams, in.aux, in.sc.omega);
    for (int k = 0; k < 2; ++k)
        if (!(c1.p_blocks[k] == c2.p_blocks[k] && c1.q_blocks[k] == c2.q_blocks[k])) {
            pass = false;
            detail = "gated combiner assembly differs";
        }
    RisQP r1 = assemble_ris_qp(in.ch, in.beams, in.aux, in.sc.omega, &ones);
    RisQP r2 = assemble_ris_qp(in.ch, in.beams, in.aux, in.sc.omega);
    if (!(r1.z == r2.z && r1.kappa == r2.kappa)) {
        pass = false;
        detail = "gated RIS assembly differs";
    }

    // zeroed RIS links == no-RIS baseline
    RunResult zeroed = run_cbf(ch.without_ris(), sc, opts, 42);
    RunResult no_ris = run_baseline(ch, sc, BaselineKind::no_ris, opts, 42);
    if (!(zeroed.metrics.wsr_trace == no_ris.metrics.wsr_trace)) {
        pass = false;
        detail = "no-RIS baseline differs from zeroed links";
    }

    // Lambda = I ADMM path == CF ADMM path
    BsContext ctx = build_bs_context(0, in.h_eq, in.beams, in.aux, in.sc.omega, in.sc.p_b, in.sc.n_r);
    AdmmOptions plain;
    plain.t_max = 6;
    AdmmState cf_state = run_admm(ctx, state_of(in, 0), plain);
    AdmmOptions gated = plain;
    gated.selector = [&](const AdmmState&) { return RVec::Ones(in.sc.K); };
    AdmmState gated_state = run_admm(ctx, state_of(in, 0), gated);
    if (!(cf_state.f_rf == gated_state.f_rf && cf_state.f_bb == gated_state.f_bb &&
          cf_state.f_b == gated_state.f_b && cf_state.dual == gated_state.dual)) {
        pass = false;
        detail = "Lambda=I ADMM path differs from the CF path";
    }
    report(9, "reduction identities hold exactly (alpha=1, tau=1, zeroed RIS, Lambda=I)", pass, detail);
}

void criterion_10() {
    bool pass = true;
    std::string detail;
    const int seeds = 10;
    AoOptions o;
    o.i_max = 25;
    o.wsr_tol = 0.0; // fixed budget for fair scheme comparisons

    auto mean_of = [&](const std::function<double(const ChannelSet&, const Scenario&, std::uint64_t)>& run,
                       const ScenarioConfig& cfg) {
        double acc = 0;
        for (std::uint64_t s = 1; s <= seeds; ++s) {
            auto [sc, ch] = build_scenario(cfg, s);
            acc += run(ch, sc, s) / seeds;
        }
        return acc;
    };

    ScenarioConfig ris_cfg = desk_ris_config();
    double m_cbf = mean_of(
        [&](const ChannelSet& ch, const Scenario& sc, std::uint64_t s) {
            return run_cbf(ch, sc, o, s).metrics.final_wsr();
        },
        ris_cfg);
    auto baseline_mean = [&](BaselineKind kind, int bits = 0) {
        AoOptions ob = o;
        ob.quant_bits = bits;
        return mean_of(
            [&, kind](const ChannelSet& ch, const Scenario& sc, std::uint64_t s) {
                return run_baseline(ch, sc, kind, ob, s).metrics.final_wsr();
            },
            ris_cfg);
    };
    double m_fd = baseline_mean(BaselineKind::fd_bf);
    double m_q2 = baseline_mean(BaselineKind::quantized_ris, 2);
    double m_q1 = baseline_mean(BaselineKind::quantized_ris, 1);
    double m_rris = baseline_mean(BaselineKind::random_ris);
    double m_nris = baseline_mean(BaselineKind::no_ris);

    auto expect = [&](bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    };
    expect(m_fd >= m_cbf, "FD-BF >= CBF failed");
    expect(m_cbf >= m_q2, "CBF >= 2-bit failed");
    expect(m_q2 >= m_q1, "2-bit >= 1-bit failed");
    expect(m_cbf >= m_rris, "CBF >= random-RIS failed");
    expect(m_cbf >= m_nris, "CBF >= no-RIS failed");

    // WSR non-decreasing in the RIS element count
    double prev = -1;
    for (int m : {8, 16, 32}) {
        double mean_m = mean_of(
            [&](const ChannelSet& ch, const Scenario& sc, std::uint64_t s) {
                return run_cbf(ch, sc, o, s).metrics.final_wsr();
            },
            desk_ris_config(2, m));
        expect(mean_m >= prev, "WSR not non-decreasing in M at M=" + std::to_string(m));
        prev = mean_m;
    }

    // P-CF orderings on the heterogeneous-geometry scenario
    ScenarioConfig pcf_cfg = desk_pcf_config();
    auto pcf_mean = [&](double alpha, bool rla) {
        AoOptions op = o;
        op.alpha = alpha;
        return mean_of(
            [&, alpha, rla](const ChannelSet& ch, const Scenario& sc, std::uint64_t s) {
                return rla ? run_pcf(ch, sc, alpha, op, s).metrics.final_wsr()
                           : run_baseline(ch, sc, BaselineKind::random_selection, op, s).metrics.final_wsr();
            },
            pcf_cfg);
    };
    double rla5 = pcf_mean(0.5, true), rnd5 = pcf_mean(0.5, false);
    double rla75 = pcf_mean(0.75, true), rnd75 = pcf_mean(0.75, false);
    double full = pcf_mean(1.0, true);
    expect(rla5 >= rnd5, "PCF-RLA(0.5) >= PCF-random(0.5) failed");
    expect(rla75 >= rnd75, "PCF-RLA(0.75) >= PCF-random(0.75) failed");
    expect(rla5 <= rla75 && rla75 <= full, "WSR not non-decreasing in alpha");

    report(10, "qualitative orderings on 10-seed means (RIS family, quantization, M, alpha, RLA)", pass,
           detail);
}

void criterion_11() {
    Rng rng(1111);
    bool pass = true;
    std::string detail;
    for (int trial = 0; trial < 20 && pass; ++trial) {
        Instance in = random_instance(500 + trial);
        BsContext ctx = build_bs_context(0, in.h_eq, in.beams, in.aux, in.sc.omega, in.sc.p_b, in.sc.n_r);
        AdmmState st = state_of(in, 0);
        st.f_bb *= 1.0 + rng.uniform(0.5, 3.0); // force the active branch
        CMat out = update_proxy_precoder(ctx, st);
        if (std::abs(out.squaredNorm() - in.sc.p_b) > 1e-12 * in.sc.p_b) {
            pass = false;
            detail = "active-branch norm^2 differs from P_b by " +
                     std::to_string(std::abs(out.squaredNorm() - in.sc.p_b));
            break;
        }
        auto prox_obj = [&](const CMat& f) {
            return 0.5 * st.rho * (f - st.f_rf * st.f_bb + st.dual / st.rho).squaredNorm();
        };
        double at_opt = prox_obj(out);
        for (int t = 0; t < 1000; ++t) {
            CMat pert = CMat::Zero(out.rows(), out.cols());
            for (int i = 0; i < pert.size(); ++i) pert.data()[i] = 0.05 * rng.cnormal();
            CMat cand = out + pert;
            double nrm = cand.norm();
            if (nrm > std::sqrt(in.sc.p_b)) cand *= std::sqrt(in.sc.p_b) / nrm;
            if (prox_obj(cand) < at_opt - 1e-12) {
                pass = false;
                detail = "random feasible perturbation beat the KKT point";
                break;
            }
        }
    }
    report(11, "proxy precoder: exact power on the active branch; beats 1000 random perturbations", pass,
           detail);
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (g_failures == 0) {
        std::printf("acceptance: all 11 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return 1;
}

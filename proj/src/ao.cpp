#include "riscbf/ao.hpp"

#include "riscbf/assembly.hpp"
#include "riscbf/fp_objective.hpp"
#include "riscbf/hbf_admm.hpp"
#include "riscbf/scenario.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

namespace riscbf {

double ncr(const SelectionState& selection, int B, int K) {
    return static_cast<double>(selection.tau.sum()) / (static_cast<double>(B) * K);
}

CVec quantize_ris(const CVec& phi, int bits) {
    if (bits < 1) throw std::invalid_argument("quantize_ris: bits must be >= 1");
    const double step = 2.0 * M_PI / std::pow(2.0, bits);
    CVec out(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        double ang = std::arg(phi(i));
        double snapped = step * std::round(ang / step);
        out(i) = cxd(std::cos(snapped), std::sin(snapped));
    }
    return out;
}

BeamState init_beam_state(const Scenario& sc, const ChannelSet& ch, Rng& rng) {
    BeamState beams;
    beams.w = CVec(static_cast<Eigen::Index>(sc.K) * sc.n_r);
    for (Eigen::Index i = 0; i < beams.w.size(); ++i) {
        double th = rng.uniform(0.0, 2.0 * M_PI);
        beams.w(i) = cxd(std::cos(th), std::sin(th));
    }
    beams.phi = CVec::Ones(static_cast<Eigen::Index>(sc.R) * sc.m);

    auto h_eq = equivalent_channels(ch, beams.phi);
    beams.f_rf.resize(sc.B);
    beams.f_bb.resize(sc.B);
    beams.proxy.resize(sc.B);
    beams.dual.resize(sc.B);
    for (int b = 0; b < sc.B; ++b) {
        CMat rf(sc.n_t, sc.n_rf);
        for (Eigen::Index c = 0; c < rf.cols(); ++c)
            for (Eigen::Index i = 0; i < rf.rows(); ++i) {
                double th = rng.uniform(0.0, 2.0 * M_PI);
                rf(i, c) = cxd(std::cos(th), std::sin(th));
            }
        beams.f_rf[b] = rf;

        CMat mf(sc.n_t, sc.K); // matched filter to the combined effective rows
        for (int k = 0; k < sc.K; ++k) mf.col(k) = (beams.w_k(k, sc.n_r).adjoint() * h_eq[b][k]).adjoint();
        CMat bb = rf.completeOrthogonalDecomposition().solve(mf);
        double nrm = (rf * bb).norm();
        if (nrm < 1e-30) {
            bb = CMat::Constant(sc.n_rf, sc.K, cxd(1.0 / std::sqrt(static_cast<double>(sc.n_rf) * sc.K), 0));
            nrm = (rf * bb).norm();
        }
        beams.f_bb[b] = bb * (std::sqrt(sc.p_b) / nrm);
        beams.proxy[b] = rf * beams.f_bb[b];
        beams.dual[b] = CMat::Zero(sc.n_t, sc.K);
    }
    return beams;
}

namespace {

void run_for_each_bs(int B, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || B <= 1) {
        for (int b = 0; b < B; ++b) fn(b);
        return;
    }
    std::vector<std::future<void>> tasks;
    tasks.reserve(B);
    for (int b = 0; b < B; ++b) tasks.push_back(std::async(std::launch::async, fn, b));
    for (auto& t : tasks) t.get();
}

// deterministic start: per BS, the quota-many users with the strongest
// equivalent channels, then swaps until every user is covered
SelectionState initial_selection(const std::vector<std::vector<CMat>>& h_eq, const std::vector<int>& quotas) {
    const int B = static_cast<int>(h_eq.size());
    const int K = static_cast<int>(h_eq[0].size());
    RMat score(B, K);
    for (int b = 0; b < B; ++b)
        for (int k = 0; k < K; ++k) score(b, k) = h_eq[b][k].norm();

    SelectionState sel;
    sel.tau = Eigen::MatrixXi::Zero(B, K);
    sel.quotas = quotas;
    for (int b = 0; b < B; ++b) {
        std::vector<int> idx(K);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return score(b, i) > score(b, j); });
        for (int t = 0; t < quotas[b]; ++t) sel.tau(b, idx[t]) = 1;
    }
    auto coverage = [&](int k) {
        int c = 0;
        for (int b = 0; b < B; ++b) c += sel.tau(b, k);
        return c;
    };
    for (int k = 0; k < K; ++k) {
        if (coverage(k) >= 1) continue;
        // strongest BS that holds a multiply-covered user; evict its weakest
        int best_b = -1, evict = -1;
        double best_score = -1;
        for (int b = 0; b < B; ++b) {
            int weakest = -1;
            for (int j = 0; j < K; ++j) {
                if (sel.tau(b, j) != 1 || coverage(j) < 2) continue;
                if (weakest < 0 || score(b, j) < score(b, weakest)) weakest = j;
            }
            if (weakest >= 0 && score(b, k) > best_score) {
                best_score = score(b, k);
                best_b = b;
                evict = weakest;
            }
        }
        if (best_b < 0)
            throw SelectionInfeasible("initial selection cannot cover user " + std::to_string(k), {k});
        sel.tau(best_b, evict) = 0;
        sel.tau(best_b, k) = 1;
    }
    return sel;
}

// uniformly random quota subsets that still cover every user
SelectionState random_selection(int B, int K, const std::vector<int>& quotas, Rng& rng) {
    long total = std::accumulate(quotas.begin(), quotas.end(), 0l);
    if (total < K)
        throw SelectionInfeasible("random selection: quotas sum below the user count, coverage impossible");
    SelectionState sel;
    sel.tau = Eigen::MatrixXi::Zero(B, K);
    sel.quotas = quotas;
    // cover users first, in shuffled order, through BSs with spare quota
    std::vector<int> users(K);
    std::iota(users.begin(), users.end(), 0);
    for (int i = K - 1; i > 0; --i) std::swap(users[i], users[rng.integer(i + 1)]);
    std::vector<int> load(B, 0);
    for (int k : users) {
        std::vector<int> open;
        for (int b = 0; b < B; ++b)
            if (load[b] < quotas[b]) open.push_back(b);
        int b = open[rng.integer(open.size())];
        sel.tau(b, k) = 1;
        ++load[b];
    }
    // fill the remaining slots uniformly among unused (b, k) pairs
    for (int b = 0; b < B; ++b) {
        while (load[b] < quotas[b]) {
            std::vector<int> free_users;
            for (int k = 0; k < K; ++k)
                if (sel.tau(b, k) == 0) free_users.push_back(k);
            sel.tau(b, free_users[rng.integer(free_users.size())]) = 1;
            ++load[b];
        }
    }
    return sel;
}

// fully-digital precoder: per-column ridge system (Q + mu I) f = s under the
// Frobenius power cap, multiplier found by bisection on the eigenbasis
CMat fd_bf_precoder(const BsContext& ctx, double p_b) {
    RVec xi2 = ctx.xi.cwiseAbs2();
    CMat q = ctx.eff_rows.adjoint() * xi2.asDiagonal() * ctx.eff_rows;
    CVec sig = (ctx.mu.cwiseSqrt().cast<cxd>().array() * ctx.xi.array()).matrix();
    CMat s = ctx.eff_rows.adjoint() * sig.asDiagonal() - ctx.eff_rows.adjoint() * (xi2.asDiagonal() * ctx.cross);

    const Eigen::Index n = q.rows();
    if (s.norm() == 0.0) return CMat::Zero(n, s.cols());

    Eigen::SelfAdjointEigenSolver<CMat> es(q);
    RVec lam = es.eigenvalues().cwiseMax(0.0);
    CMat shat = es.eigenvectors().adjoint() * s;

    auto power_at = [&](double mu) {
        double acc = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < shat.cols(); ++j) acc += std::norm(shat(i, j)) / ((lam(i) + mu) * (lam(i) + mu));
        return acc;
    };
    auto solution_at = [&](double mu) {
        CMat y = shat;
        for (Eigen::Index i = 0; i < n; ++i) y.row(i) /= (lam(i) + mu);
        return CMat(es.eigenvectors() * y);
    };

    // interior candidate: pseudo-inverse on the positive eigenspace, valid
    // only when s has no null-space component
    double cut = std::max(lam.maxCoeff(), 1.0) * 1e-12;
    double null_mass = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (lam(i) <= cut) null_mass += shat.row(i).squaredNorm();
    if (null_mass <= 1e-20 * s.squaredNorm()) {
        CMat y = shat;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (lam(i) <= cut) y.row(i).setZero();
            else y.row(i) /= lam(i);
        }
        CMat interior = es.eigenvectors() * y;
        if (interior.squaredNorm() <= p_b) return interior;
    }

    double lo = 0.0, hi = std::max(1.0, lam.maxCoeff());
    while (power_at(hi) > p_b) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (power_at(mid) > p_b ? lo : hi) = mid;
    }
    return solution_at(hi);
}

struct CoreSetup {
    AoMode mode = AoMode::cf;
    BaselineKind baseline = BaselineKind::none;
    bool update_ris = true;
    bool quantize = false;
    bool selection_inside_admm = false; // RLA sweep at each ADMM step
};

RunResult run_core(const ChannelSet& ch, const Scenario& sc, const AoOptions& opts, std::uint64_t seed,
                   const CoreSetup& setup) {
    auto t_start = std::chrono::steady_clock::now();
    sc.validate();
    Rng init_rng = Rng(seed).fork(0x62656566);

    RunResult out;
    out.beams = init_beam_state(sc, ch, init_rng);
    const bool pcf = setup.mode == AoMode::pcf;
    const double rho = pcf ? opts.rho2 : opts.rho1;

    if (setup.baseline == BaselineKind::fd_bf) out.beams.fully_digital = true;
    if (setup.baseline == BaselineKind::random_ris) {
        for (Eigen::Index i = 0; i < out.beams.phi.size(); ++i) {
            double th = init_rng.uniform(0.0, 2.0 * M_PI);
            out.beams.phi(i) = cxd(std::cos(th), std::sin(th));
        }
    }

    auto h_eq = equivalent_channels(ch, out.beams.phi);

    SelectionState* sel = nullptr;
    if (pcf) {
        std::vector<int> quotas = quotas_from_alpha(opts.alpha, sc.B, sc.K);
        if (setup.baseline == BaselineKind::random_selection) {
            out.selection = random_selection(sc.B, sc.K, quotas, init_rng);
        } else {
            out.selection = initial_selection(h_eq, quotas);
        }
        sel = &out.selection;
    } else {
        out.selection = SelectionState::all_ones(sc.B, sc.K);
    }

    double prev_wsr = 0;
    int plateau = 0;

    for (int it = 0; it < opts.i_max; ++it) {
        GainTable gains = effective_gains(h_eq, out.beams, sc.n_r);
        out.aux = update_aux_from_gains(gains, sc.sigma2, sc.omega, sel);
        double fq_before = eval_fq_from_gains(gains, out.aux, sc.sigma2, sc.omega, sel);

        // ---- hybrid (or fully-digital) beamforming at the BSs ----
        BeamState cand = out.beams;
        SelectionState cand_sel = out.selection;
        std::vector<double> residuals(sc.B, 0.0);

        if (setup.baseline == BaselineKind::fd_bf) {
            run_for_each_bs(sc.B, opts.threads, [&](int b) {
                BsContext ctx = build_bs_context(b, h_eq, out.beams, out.aux, sc.omega, sc.p_b, sc.n_r, sel);
                cand.proxy[b] = fd_bf_precoder(ctx, sc.p_b);
            });
        } else {
            std::vector<BsContext> ctxs(sc.B);
            std::vector<AdmmState> states(sc.B);
            run_for_each_bs(sc.B, opts.threads, [&](int b) {
                ctxs[b] = build_bs_context(b, h_eq, out.beams, out.aux, sc.omega, sc.p_b, sc.n_r, sel);
                AdmmState st;
                st.f_b = out.beams.proxy[b];
                st.f_rf = out.beams.f_rf[b];
                st.f_bb = out.beams.f_bb[b];
                st.dual = out.beams.dual[b];
                st.tau = pcf ? out.selection.tau_row(b) : RVec::Ones(sc.K);
                st.rho = rho;
                if (opts.scale_aware_rho) {
                    // trace of W_b = sum_k |xi_k|^2 ||w_k^H H_{b,k}||^2
                    double trace_w = (ctxs[b].eff_rows.cwiseAbs2().rowwise().sum().array() *
                                      ctxs[b].xi.cwiseAbs2().array())
                                         .sum();
                    st.rho = rho * std::max(1.0, 2.0 * trace_w / sc.n_t);
                }
                states[b] = std::move(st);
            });

            CcmOptions analog_opts = opts.ccm;
            analog_opts.validate_input = false; // assembled QPs are PSD by construction
            std::vector<CMat> product_prev(sc.B);
            for (int t = 0; t < opts.t_max; ++t) {
                run_for_each_bs(sc.B, opts.threads, [&](int b) {
                    product_prev[b] = states[b].f_rf * states[b].f_bb * states[b].tau.asDiagonal();
                    states[b].f_b = update_proxy_precoder(ctxs[b], states[b], opts.paper_literal_proxy);
                    states[b].f_rf = update_analog(ctxs[b], states[b], analog_opts);
                    states[b].f_bb = update_digital(ctxs[b], states[b]);
                });
                if (setup.selection_inside_admm && t % opts.select_period == 0) {
                    for (int b = 0; b < sc.B; ++b) {
                        cand.proxy[b] = states[b].f_b;
                        cand.f_rf[b] = states[b].f_rf;
                        cand.f_bb[b] = states[b].f_bb;
                        cand.dual[b] = states[b].dual;
                    }
                    // The selection BIQP runs at the literal rho2 with a
                    // clean dual so the surrogate data terms decide tau; the
                    // scale-aware beam penalty would pin tau to whatever it
                    // started as (flipping any user costs (rho/2)||col||^2).
                    BeamState sel_view = cand;
                    for (int b = 0; b < sc.B; ++b) sel_view.dual[b].setZero();
                    SelectOptions sopt = opts.select;
                    sopt.rho.assign(static_cast<size_t>(sc.B), opts.rho2);
                    select_all_bs(h_eq, sel_view, out.aux, sc.omega, sc.n_r, cand_sel.quotas,
                                  [&] {
                                      std::vector<int> order(sc.B);
                                      std::iota(order.begin(), order.end(), 0);
                                      return order;
                                  }(),
                                  cand_sel, sopt);
                    for (int b = 0; b < sc.B; ++b) states[b].tau = cand_sel.tau_row(b);
                }
                run_for_each_bs(sc.B, opts.threads, [&](int b) {
                    states[b].dual = dual_update(states[b]);
                    if (opts.adapt_rho) balance_rho(states[b], product_prev[b]);
                    ++states[b].t;
                });
            }
            for (int b = 0; b < sc.B; ++b) {
                cand.proxy[b] = states[b].f_b;
                cand.f_rf[b] = states[b].f_rf;
                cand.f_bb[b] = states[b].f_bb;
                cand.dual[b] = states[b].dual;
                residuals[b] =
                    (states[b].f_b - states[b].f_rf * states[b].f_bb * states[b].tau.asDiagonal()).norm();
            }
        }

        // enforce the per-BS power constraint on the applied precoder
        // (fd_bf satisfies it exactly by construction)
        if (setup.baseline != BaselineKind::fd_bf) {
            for (int b = 0; b < sc.B; ++b) {
                CMat applied = cand.f_rf[b] * cand.f_bb[b] * cand_sel.tau_row(b).asDiagonal();
                double nsq = applied.squaredNorm();
                if (nsq > sc.p_b * (1.0 + 1e-12)) cand.f_bb[b] *= std::sqrt(sc.p_b / nsq);
            }
        }

        // monotone safeguard: greedy per-BS acceptance against the global
        // surrogate; the Jacobi constants make the joint candidate
        // occasionally worse even when single-BS updates help
        int taken = sc.B;
        if (opts.monotone_safeguard) {
            taken = 0;
            BeamState acc = out.beams;
            SelectionState acc_sel = out.selection;
            double fq_cur = fq_before;
            for (int b = 0; b < sc.B; ++b) {
                BeamState trial = acc;
                trial.proxy[b] = cand.proxy[b];
                trial.f_rf[b] = cand.f_rf[b];
                trial.f_bb[b] = cand.f_bb[b];
                trial.dual[b] = cand.dual[b];
                SelectionState trial_sel = acc_sel;
                trial_sel.tau.row(b) = cand_sel.tau.row(b);
                double fq_trial = eval_fq_from_gains(effective_gains(h_eq, trial, sc.n_r), out.aux,
                                                     sc.sigma2, sc.omega, pcf ? &trial_sel : nullptr);
                if (fq_trial >= fq_cur) {
                    acc = std::move(trial);
                    acc_sel = std::move(trial_sel);
                    fq_cur = fq_trial;
                    ++taken;
                }
            }
            if (pcf && taken > 0 && taken < sc.B) {
                // mixing old and new selection rows can uncover a user; the
                // joint states are both coverage-feasible, so fall back
                for (int k = 0; k < sc.K; ++k) {
                    if (acc_sel.tau.col(k).sum() < 1) {
                        taken = 0;
                        break;
                    }
                }
            }
            if (taken > 0) {
                out.beams = std::move(acc);
                out.selection = std::move(acc_sel);
            }
        } else {
            out.beams = std::move(cand);
            out.selection = std::move(cand_sel);
        }
        if (taken == 0) {
            ++out.metrics.hbf_rejections;
            // restart the consensus bookkeeping so the next attempt is not a
            // replay of the rejected trajectory
            for (int b = 0; b < sc.B; ++b) {
                CMat applied =
                    out.beams.f_rf[b] * out.beams.f_bb[b] * out.selection.tau_row(b).asDiagonal();
                double nsq = applied.squaredNorm();
                out.beams.proxy[b] = nsq > sc.p_b ? CMat(applied * std::sqrt(sc.p_b / nsq)) : applied;
                out.beams.dual[b].setZero();
            }
        }
        for (double r : residuals) out.metrics.admm_residuals.push_back(r);

        // ---- combiner update (per-user manifold solve) ----
        {
            CombinerQP cq = assemble_combiner_qp(ch, out.beams, out.aux, sc.omega, sel);
            for (int k = 0; k < sc.K; ++k) {
                UnitModulusQP qp{cq.p_blocks[k], -cq.q_blocks[k]};
                CcmOptions copts = opts.ccm;
                copts.validate_input = false; // Gram-sum PSD by construction
                CcmResult r = solve_unit_modulus_qp(qp, out.beams.w_k(k, sc.n_r), copts);
                out.beams.w.segment(static_cast<Eigen::Index>(k) * sc.n_r, sc.n_r) = r.x;
            }
        }

        // ---- RIS update (modulus-capped convex solve) ----
        if (setup.update_ris) {
            RisQP rq = assemble_ris_qp(ch, out.beams, out.aux, sc.omega, sel);
            ModulusCappedQP qp{rq.z, rq.kappa};
            ModulusQpOptions ropts = opts.ris;
            ropts.validate_input = false;
            // the quantized grid lives on the unit circle, so the continuous
            // solve must too, or snapping the amplitude wrecks the iterate
            ropts.phase_only = setup.quantize;
            // two starts: the warm start keeps the update monotone, the
            // full-reflection start escapes the amplitude-collapse trap
            // where a shrunken phi and the beams lock each other in
            ModulusQpResult r_warm = solve_modulus_capped_qp(qp, out.beams.phi, ropts);
            ModulusQpResult r_ones = solve_modulus_capped_qp(qp, CVec::Ones(out.beams.phi.size()), ropts);
            CVec phi_new = r_warm.objective <= r_ones.objective ? r_warm.phi : r_ones.phi;
            if (setup.quantize) {
                CVec qa = quantize_ris(r_warm.phi, opts.quant_bits);
                CVec qb = quantize_ris(r_ones.phi, opts.quant_bits);
                phi_new = qp.objective(qa) <= qp.objective(qb) ? qa : qb;
            }
            out.beams.phi = phi_new;
        }

        h_eq = equivalent_channels(ch, out.beams.phi);

        // ---- metrics + convergence ----
        GainTable end_gains = effective_gains(h_eq, out.beams, sc.n_r);
        CMat s = combined_gains(end_gains, sel);
        RVec sinrs = all_sinrs(s, sc.sigma2);
        double wsr = compute_wsr(sc.omega, sinrs);
        out.metrics.wsr_trace.push_back(wsr);
        out.metrics.fq_trace.push_back(eval_fq_from_gains(end_gains, out.aux, sc.sigma2, sc.omega, sel));
        out.metrics.per_user_rates = (1.0 + sinrs.array()).log().matrix() / M_LN2;

        if (it > 0 && std::abs(wsr - prev_wsr) < opts.wsr_tol) ++plateau;
        else plateau = 0;
        prev_wsr = wsr;
        if (plateau >= opts.plateau_iters) break;
    }

    out.metrics.iterations = static_cast<int>(out.metrics.wsr_trace.size());
    out.metrics.ncr = pcf ? ncr(out.selection, sc.B, sc.K) : 1.0;
    out.metrics.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

} // namespace

RunResult run_cbf(const ChannelSet& ch, const Scenario& sc, const AoOptions& opts, std::uint64_t seed) {
    CoreSetup setup;
    setup.mode = AoMode::cf;
    return run_core(ch, sc, opts, seed, setup);
}

RunResult run_pcf(const ChannelSet& ch, const Scenario& sc, double alpha, const AoOptions& opts,
                  std::uint64_t seed) {
    AoOptions o = opts;
    o.mode = AoMode::pcf;
    o.alpha = alpha;
    CoreSetup setup;
    setup.mode = AoMode::pcf;
    setup.selection_inside_admm = true;
    return run_core(ch, sc, o, seed, setup);
}

RunResult run_baseline(const ChannelSet& ch, const Scenario& sc, BaselineKind kind, const AoOptions& opts,
                       std::uint64_t seed) {
    AoOptions o = opts;
    o.baseline = kind;
    CoreSetup setup;
    setup.baseline = kind;
    switch (kind) {
        case BaselineKind::none:
            return run_cbf(ch, sc, o, seed);
        case BaselineKind::fd_bf:
            return run_core(ch, sc, o, seed, setup);
        case BaselineKind::random_ris:
            setup.update_ris = false;
            return run_core(ch, sc, o, seed, setup);
        case BaselineKind::quantized_ris:
            setup.quantize = true;
            return run_core(ch, sc, o, seed, setup);
        case BaselineKind::no_ris: {
            ChannelSet zeroed = ch.without_ris();
            setup.baseline = BaselineKind::none;
            return run_core(zeroed, sc, o, seed, setup);
        }
        case BaselineKind::random_selection: {
            setup.mode = AoMode::pcf;
            o.mode = AoMode::pcf;
            setup.selection_inside_admm = false; // selection stays fixed
            return run_core(ch, sc, o, seed, setup);
        }
    }
    throw std::invalid_argument("run_baseline: unknown baseline kind");
}

} // namespace riscbf

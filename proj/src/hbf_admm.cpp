#include "riscbf/hbf_admm.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace riscbf {

namespace {

CMat kron(const CMat& x, const CMat& y) {
    CMat out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

CMat gated(const CMat& f_bb, const RVec& tau) { return f_bb * tau.asDiagonal(); }

} // namespace

BsContext build_bs_context(int b, const std::vector<std::vector<CMat>>& h_eq, const BeamState& beams,
                           const AuxState& aux, const RVec& omega, double p_b, int n_r,
                           const SelectionState* selection) {
    const int B = static_cast<int>(h_eq.size());
    const int K = static_cast<int>(aux.xi.size());
    BsContext ctx;
    ctx.b = b;
    ctx.p_b = p_b;
    ctx.xi = aux.xi;
    ctx.mu = aux.mu(omega);
    ctx.eff_rows = CMat(K, h_eq[b][0].cols());
    for (int k = 0; k < K; ++k) ctx.eff_rows.row(k) = beams.w_k(k, n_r).adjoint() * h_eq[b][k];
    ctx.cross = CMat::Zero(K, K);
    for (int p = 0; p < B; ++p) {
        if (p == b) continue;
        CMat fe = beams.effective_precoder(p);
        for (int k = 0; k < K; ++k) {
            Eigen::RowVectorXcd row = beams.w_k(k, n_r).adjoint() * h_eq[p][k] * fe;
            for (int j = 0; j < K; ++j) {
                double tau = selection ? static_cast<double>(selection->tau(p, j)) : 1.0;
                ctx.cross(k, j) += tau * row(j);
            }
        }
    }
    return ctx;
}

double admm_augmented_objective(const BsContext& ctx, const AdmmState& state, const RVec& tau) {
    const int K = static_cast<int>(ctx.xi.size());
    CMat upsilon = ctx.eff_rows * state.f_rf * state.f_bb; // K x K
    double obj = 0;
    for (int k = 0; k < K; ++k) {
        obj -= 2.0 * std::sqrt(ctx.mu(k)) * std::real(std::conj(ctx.xi(k)) * upsilon(k, k) * tau(k));
        for (int j = 0; j < K; ++j)
            obj += std::norm(ctx.xi(k)) * std::norm(upsilon(k, j) * tau(j) + ctx.cross(k, j));
    }
    CMat consensus = state.f_b - state.f_rf * gated(state.f_bb, tau) + state.dual / state.rho;
    obj += 0.5 * state.rho * consensus.squaredNorm();
    return obj;
}

double admm_augmented_objective(const BsContext& ctx, const AdmmState& state) {
    return admm_augmented_objective(ctx, state, state.tau);
}

CMat update_proxy_precoder(const BsContext& ctx, const AdmmState& state, bool paper_literal) {
    CMat m = state.rho * state.f_rf * gated(state.f_bb, state.tau) - state.dual;
    double mnorm = m.norm();
    if (mnorm == 0.0) {
        std::cerr << "riscbf: proxy update hit M = 0, returning zero precoder\n";
        return CMat::Zero(m.rows(), m.cols());
    }
    if (!paper_literal) {
        CMat unconstrained = m / state.rho;
        if (unconstrained.squaredNorm() <= ctx.p_b) return unconstrained;
    }
    return (std::sqrt(ctx.p_b) / mnorm) * m;
}

UnitModulusQP assemble_analog_qp(const BsContext& ctx, const AdmmState& state) {
    const Eigen::Index n_t = ctx.eff_rows.cols();
    CMat fg = gated(state.f_bb, state.tau); // n_rf x K
    RVec xi2 = ctx.xi.cwiseAbs2();

    CMat w_mat = ctx.eff_rows.adjoint() * xi2.asDiagonal() * ctx.eff_rows; // n_t x n_t
    CMat inner = 0.5 * state.rho * CMat::Identity(n_t, n_t) + w_mat;

    UnitModulusQP qp;
    qp.a = kron(fg.conjugate() * fg.transpose(), inner);

    CMat m_m = state.f_b + state.dual / state.rho; // n_t x K
    CVec sig = (ctx.mu.cwiseSqrt().cast<cxd>().array() * ctx.xi.array()).matrix();
    CMat g = ctx.eff_rows.adjoint() * (xi2.asDiagonal() * ctx.cross) -
             ctx.eff_rows.adjoint() * sig.asDiagonal() - 0.5 * state.rho * m_m;
    CMat lin = g * fg.adjoint(); // n_t x n_rf
    qp.b = Eigen::Map<const CVec>(lin.data(), lin.size());
    return qp;
}

CMat update_analog(const BsContext& ctx, const AdmmState& state, const CcmOptions& opts) {
    UnitModulusQP qp = assemble_analog_qp(ctx, state);
    CVec x0 = Eigen::Map<const CVec>(state.f_rf.data(), state.f_rf.size());
    CcmResult res = solve_unit_modulus_qp(qp, x0, opts);
    return Eigen::Map<const CMat>(res.x.data(), state.f_rf.rows(), state.f_rf.cols());
}

CMat update_digital(const BsContext& ctx, const AdmmState& state) {
    const int K = static_cast<int>(ctx.xi.size());
    const Eigen::Index n_rf = state.f_rf.cols();
    RVec xi2 = ctx.xi.cwiseAbs2();

    CMat cf = ctx.eff_rows * state.f_rf; // K x n_rf, row k = c_{b,k}^T
    CMat block = cf.adjoint() * xi2.asDiagonal() * cf + 0.5 * state.rho * (state.f_rf.adjoint() * state.f_rf);

    Eigen::SelfAdjointEigenSolver<CMat> es(block, Eigen::EigenvaluesOnly);
    double lmax = es.eigenvalues().maxCoeff();
    double lmin = es.eigenvalues().minCoeff();
    if (!(lmin > 0) || lmax / lmin > 1e12) {
        double ridge = 1e-10 * std::max(block.real().trace() / static_cast<double>(n_rf), 1e-300);
        block += ridge * CMat::Identity(n_rf, n_rf);
    }

    CMat m_m = state.f_b + state.dual / state.rho;
    CVec sig = (ctx.mu.cwiseSqrt().cast<cxd>().array() * ctx.xi.array()).matrix();
    // rhs column j: (rho/2) F_RF^H m_j + sqrt(mu_j) xi_j conj(c_j) - sum_k |xi_k|^2 conj(c_k) C_{k,j}
    CMat rhs = 0.5 * state.rho * (state.f_rf.adjoint() * m_m) + cf.adjoint() * sig.asDiagonal() -
               cf.adjoint() * (xi2.asDiagonal() * ctx.cross);

    Eigen::LDLT<CMat> ldlt(block);
    CMat f_bb = ldlt.solve(rhs);
    if (!f_bb.allFinite())
        throw std::runtime_error("update_digital: singular system beyond regularization (K=" +
                                 std::to_string(K) + ", n_rf=" + std::to_string(n_rf) + ")");
    return f_bb;
}

CMat dual_update(const AdmmState& state) {
    return state.dual + state.rho * (state.f_b - state.f_rf * gated(state.f_bb, state.tau));
}

void balance_rho(AdmmState& state, const CMat& product_prev) {
    CMat product = state.f_rf * gated(state.f_bb, state.tau);
    double primal = (state.f_b - product).norm();
    double dual_res = state.rho * (product - product_prev).norm();
    if (primal > 10.0 * dual_res) state.rho *= 2.0;
    else if (dual_res > 10.0 * primal) state.rho *= 0.5;
}

void admm_sweep(const BsContext& ctx, AdmmState& state, const AdmmOptions& opts) {
    CMat product_prev = state.f_rf * gated(state.f_bb, state.tau);
    state.f_b = update_proxy_precoder(ctx, state, opts.paper_literal_proxy);
    state.f_rf = update_analog(ctx, state, opts.ccm);
    state.f_bb = update_digital(ctx, state);
    if (opts.selector) state.tau = opts.selector(state);
    state.dual = dual_update(state);
    if (opts.adapt_rho) balance_rho(state, product_prev);
    ++state.t;
}

AdmmState run_admm(const BsContext& ctx, const AdmmState& init, const AdmmOptions& opts, AdmmTrace* trace) {
    if (!(init.rho > 0)) throw std::invalid_argument("run_admm: rho must be positive");
    AdmmState state = init;
    for (int t = 0; t < opts.t_max; ++t) {
        admm_sweep(ctx, state, opts);
        if (trace) {
            trace->residual.push_back((state.f_b - state.f_rf * gated(state.f_bb, state.tau)).norm());
            trace->objective.push_back(admm_augmented_objective(ctx, state));
        }
    }
    return state;
}

} // namespace riscbf

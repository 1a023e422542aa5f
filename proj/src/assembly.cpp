#include "riscbf/assembly.hpp"

#include "riscbf/scenario.hpp"

#include <cmath>

namespace riscbf {

CMat CombinerQP::p_stacked() const {
    const int K = static_cast<int>(p_blocks.size());
    const Eigen::Index n_r = K ? p_blocks[0].rows() : 0;
    CMat p = CMat::Zero(K * n_r, K * n_r);
    for (int k = 0; k < K; ++k) p.block(k * n_r, k * n_r, n_r, n_r) = p_blocks[k];
    return p;
}

CVec CombinerQP::q_stacked() const {
    const int K = static_cast<int>(q_blocks.size());
    const Eigen::Index n_r = K ? q_blocks[0].size() : 0;
    CVec q(K * n_r);
    for (int k = 0; k < K; ++k) q.segment(k * n_r, n_r) = q_blocks[k];
    return q;
}

double CombinerQP::objective(const CVec& w) const {
    const int K = static_cast<int>(p_blocks.size());
    const Eigen::Index n_r = K ? p_blocks[0].rows() : 0;
    double acc = 0;
    for (int k = 0; k < K; ++k) {
        CVec wk = w.segment(k * n_r, n_r);
        acc += std::real(wk.dot(p_blocks[k] * wk)) - 2.0 * std::real(wk.dot(q_blocks[k]));
    }
    return acc;
}

CombinerQP assemble_combiner_qp(const ChannelSet& ch, const BeamState& beams, const AuxState& aux,
                                const RVec& omega, const SelectionState* selection) {
    const int B = ch.B, K = ch.K;
    auto h_eq = equivalent_channels(ch, beams.phi);
    RVec mu = aux.mu(omega);

    CombinerQP qp;
    qp.p_blocks.assign(K, CMat::Zero(ch.n_r, ch.n_r));
    qp.q_blocks.assign(K, CVec::Zero(ch.n_r));

    std::vector<CMat> fe(B);
    for (int b = 0; b < B; ++b) fe[b] = beams.effective_precoder(b);

    for (int k = 0; k < K; ++k) {
        for (int j = 0; j < K; ++j) {
            CVec p_kj = CVec::Zero(ch.n_r);
            for (int b = 0; b < B; ++b) {
                double tau = selection ? static_cast<double>(selection->tau(b, j)) : 1.0;
                p_kj += tau * (h_eq[b][k] * fe[b].col(j));
            }
            qp.p_blocks[k].noalias() += std::norm(aux.xi(k)) * (p_kj * p_kj.adjoint());
            if (j == k) qp.q_blocks[k] = std::sqrt(mu(k)) * std::conj(aux.xi(k)) * p_kj;
        }
    }
    return qp;
}

RisQP assemble_ris_qp(const ChannelSet& ch, const BeamState& beams, const AuxState& aux, const RVec& omega,
                      const SelectionState* selection) {
    const int B = ch.B, K = ch.K;
    const Eigen::Index rm = static_cast<Eigen::Index>(ch.R) * ch.m;
    RVec mu = aux.mu(omega);

    RisQP qp;
    qp.z = CMat::Zero(rm, rm);
    qp.kappa = CVec::Zero(rm);

    // per-BS pieces independent of (k, j): Fe_b and G_b Fe_b
    std::vector<CMat> fe(B), gfe(B);
    for (int b = 0; b < B; ++b) {
        fe[b] = beams.effective_precoder(b);
        gfe[b] = ch.g_stacked(b) * fe[b];
    }

    for (int k = 0; k < K; ++k) {
        // row w_k^H V_k, used entrywise: diag(w^H V) x == (w^H V)^T o x
        CVec wv = (beams.w_k(k, ch.n_r).adjoint() * ch.v_stacked(k)).transpose();
        // direct-link gains w_k^H Hbar_{b,k} Fe_b, one K-row per BS
        CMat direct(B, K);
        for (int b = 0; b < B; ++b) direct.row(b) = beams.w_k(k, ch.n_r).adjoint() * ch.hbar[b][k] * fe[b];
        for (int j = 0; j < K; ++j) {
            CVec v_sum = CVec::Zero(rm); // sum_b v_{b,k,j}
            cxd e_kj = 0;                // sum_b w^H Hbar Fe e_j tau
            for (int b = 0; b < B; ++b) {
                double tau = selection ? static_cast<double>(selection->tau(b, j)) : 1.0;
                v_sum += tau * wv.cwiseProduct(gfe[b].col(j));
                e_kj += tau * direct(b, j);
            }
            qp.z.noalias() += std::norm(aux.xi(k)) * (v_sum.conjugate() * v_sum.transpose());
            qp.kappa += std::norm(aux.xi(k)) * e_kj * v_sum.conjugate();
            if (j == k) qp.kappa -= std::sqrt(mu(k)) * (std::conj(aux.xi(k)) * v_sum).conjugate();
        }
    }
    return qp;
}

} // namespace riscbf

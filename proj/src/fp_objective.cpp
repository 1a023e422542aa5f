#include "riscbf/fp_objective.hpp"

#include "riscbf/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace riscbf {

GainTable effective_gains(const std::vector<std::vector<CMat>>& h_eq, const BeamState& beams, int n_r) {
    const int B = static_cast<int>(h_eq.size());
    const int K = B > 0 ? static_cast<int>(h_eq[0].size()) : 0;
    GainTable gains(B);
    for (int b = 0; b < B; ++b) {
        CMat fe = beams.effective_precoder(b);
        gains[b] = CMat(K, fe.cols());
        for (int k = 0; k < K; ++k)
            gains[b].row(k) = beams.w_k(k, n_r).adjoint() * h_eq[b][k] * fe;
    }
    return gains;
}

GainTable effective_gains(const ChannelSet& ch, const BeamState& beams) {
    return effective_gains(equivalent_channels(ch, beams.phi), beams, ch.n_r);
}

CMat combined_gains(const GainTable& gains, const SelectionState* selection) {
    const int K = static_cast<int>(gains.empty() ? 0 : gains[0].rows());
    CMat s = CMat::Zero(K, K);
    for (int b = 0; b < static_cast<int>(gains.size()); ++b) {
        if (selection) {
            for (int j = 0; j < K; ++j)
                s.col(j) += static_cast<double>(selection->tau(b, j)) * gains[b].col(j);
        } else {
            s += gains[b];
        }
    }
    return s;
}

double compute_sinr(int k, const CMat& s, double sigma2) {
    if (!(sigma2 > 0)) throw std::invalid_argument("compute_sinr: sigma2 must be positive");
    double interference = 0;
    for (int j = 0; j < s.cols(); ++j)
        if (j != k) interference += std::norm(s(k, j));
    return std::norm(s(k, k)) / (interference + sigma2);
}

double compute_sinr(int k, const ChannelSet& ch, const BeamState& beams, double sigma2,
                    const SelectionState* selection) {
    return compute_sinr(k, combined_gains(effective_gains(ch, beams), selection), sigma2);
}

RVec all_sinrs(const CMat& s, double sigma2) {
    RVec out(s.rows());
    for (int k = 0; k < s.rows(); ++k) out(k) = compute_sinr(k, s, sigma2);
    return out;
}

double compute_wsr_nats(const RVec& omega, const RVec& sinrs) {
    if (omega.size() != sinrs.size()) throw std::invalid_argument("compute_wsr: size mismatch");
    double acc = 0;
    for (int k = 0; k < sinrs.size(); ++k) {
        if (sinrs(k) < 0) throw std::invalid_argument("compute_wsr: negative SINR");
        acc += omega(k) * std::log1p(sinrs(k));
    }
    return acc;
}

double compute_wsr(const RVec& omega, const RVec& sinrs) { return compute_wsr_nats(omega, sinrs) / M_LN2; }

AuxState update_aux_from_gains(const GainTable& gains, double sigma2, const RVec& omega,
                               const SelectionState* selection) {
    CMat s = combined_gains(gains, selection);
    const int K = static_cast<int>(s.rows());
    AuxState aux;
    aux.lambda = all_sinrs(s, sigma2);
    aux.xi = CVec(K);
    for (int k = 0; k < K; ++k) {
        double denom = sigma2;
        for (int j = 0; j < K; ++j) denom += std::norm(s(k, j));
        double mu = omega(k) * (1.0 + aux.lambda(k));
        aux.xi(k) = std::sqrt(mu) * s(k, k) / denom;
    }
    return aux;
}

AuxState update_aux(const ChannelSet& ch, const BeamState& beams, double sigma2, const RVec& omega,
                    const SelectionState* selection) {
    return update_aux_from_gains(effective_gains(ch, beams), sigma2, omega, selection);
}

double eval_fq_from_gains(const GainTable& gains, const AuxState& aux, double sigma2, const RVec& omega,
                          const SelectionState* selection) {
    CMat s = combined_gains(gains, selection);
    const int K = static_cast<int>(s.rows());
    double fq = 0;
    for (int k = 0; k < K; ++k) {
        double mu = omega(k) * (1.0 + aux.lambda(k));
        fq += omega(k) * std::log1p(aux.lambda(k));
        fq += 2.0 * std::sqrt(mu) * std::real(std::conj(aux.xi(k)) * s(k, k));
        fq -= omega(k) * aux.lambda(k);
        fq -= std::norm(aux.xi(k)) * sigma2;
        for (int j = 0; j < K; ++j) fq -= std::norm(aux.xi(k)) * std::norm(s(k, j));
    }
    return fq;
}

double eval_fq(const ChannelSet& ch, const BeamState& beams, const AuxState& aux, double sigma2,
               const RVec& omega, const SelectionState* selection) {
    return eval_fq_from_gains(effective_gains(ch, beams), aux, sigma2, omega, selection);
}

double eval_fq_bits(const ChannelSet& ch, const BeamState& beams, const AuxState& aux, double sigma2,
                    const RVec& omega, const SelectionState* selection) {
    return eval_fq(ch, beams, aux, sigma2, omega, selection) / M_LN2;
}

double eval_f_min(const ChannelSet& ch, const BeamState& beams, const AuxState& aux, double sigma2,
                  const RVec& omega, const SelectionState* selection) {
    return -eval_fq(ch, beams, aux, sigma2, omega, selection);
}

} // namespace riscbf

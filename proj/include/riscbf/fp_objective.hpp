#pragma once

#include "riscbf/types.hpp"

#include <optional>

namespace riscbf {

// Per-BS effective gain table: gains[b](k, j) = w_k^H H_{b,k} Fe_b e_j with
// Fe_b the (ungated) effective precoder of BS b and H the phi-dependent
// equivalent channel. Every objective below is a cheap reduction of this.
using GainTable = std::vector<CMat>;

GainTable effective_gains(const std::vector<std::vector<CMat>>& h_eq, const BeamState& beams, int n_r);
GainTable effective_gains(const ChannelSet& ch, const BeamState& beams);

// s_{k,j} = sum_b gains[b](k,j) * tau_{b,j}; tau == 1 when selection absent.
CMat combined_gains(const GainTable& gains, const SelectionState* selection);

double compute_sinr(int k, const CMat& s, double sigma2);
double compute_sinr(int k, const ChannelSet& ch, const BeamState& beams, double sigma2,
                    const SelectionState* selection = nullptr);
RVec all_sinrs(const CMat& s, double sigma2);

// weighted sum rate in bits/s/Hz (log2)
double compute_wsr(const RVec& omega, const RVec& sinrs);
// natural-log variant used by the FP surrogate internals
double compute_wsr_nats(const RVec& omega, const RVec& sinrs);

// closed-form surrogate-optimal auxiliaries: lambda* = sinr,
// xi* = sqrt(mu) s_kk / (sum_j |s_kj|^2 + sigma2) with mu = omega (1+lambda*)
AuxState update_aux(const ChannelSet& ch, const BeamState& beams, double sigma2, const RVec& omega,
                    const SelectionState* selection = nullptr);
AuxState update_aux_from_gains(const GainTable& gains, double sigma2, const RVec& omega,
                               const SelectionState* selection);

// quadratic-transform surrogate f_Q (natural log). eval_fq_bits scales by
// 1/ln 2; eval_f_min is the minimization-sense value -f_Q.
double eval_fq(const ChannelSet& ch, const BeamState& beams, const AuxState& aux, double sigma2,
               const RVec& omega, const SelectionState* selection = nullptr);
double eval_fq_from_gains(const GainTable& gains, const AuxState& aux, double sigma2, const RVec& omega,
                          const SelectionState* selection);
double eval_fq_bits(const ChannelSet& ch, const BeamState& beams, const AuxState& aux, double sigma2,
                    const RVec& omega, const SelectionState* selection = nullptr);
double eval_f_min(const ChannelSet& ch, const BeamState& beams, const AuxState& aux, double sigma2,
                  const RVec& omega, const SelectionState* selection = nullptr);

} // namespace riscbf

#pragma once

#include "riscbf/types.hpp"

namespace riscbf {

// Combiner subproblem min w^H P w - 2 Re(w^H q) over unit-modulus w.
// P is block-diagonal with one n_r x n_r PSD block per user, so the solve
// decouples per user; the stacked form is kept for tests.
struct CombinerQP {
    std::vector<CMat> p_blocks; // K blocks, n_r x n_r
    std::vector<CVec> q_blocks; // K blocks, n_r

    CMat p_stacked() const;
    CVec q_stacked() const;
    double objective(const CVec& w) const; // w stacked K*n_r
};

// RIS subproblem min phi^H Z phi + 2 Re(kappa^H phi), |phi_i| <= 1.
struct RisQP {
    CMat z;     // RM x RM Hermitian PSD
    CVec kappa; // RM
};

// p_{k,j} = sum_b H_{b,k} Fe_b e_j tau_{b,j};  Ptilde_k = sum_j |xi_k|^2 p p^H;
// qtilde_k = sum_b sqrt(mu_k) conj(xi_k) H_{b,k} Fe_b e_k tau_{b,k}
CombinerQP assemble_combiner_qp(const ChannelSet& ch, const BeamState& beams, const AuxState& aux,
                                const RVec& omega, const SelectionState* selection = nullptr);

// v_{b,k,j} = diag(w_k^H V_k) G_b Fe_b e_j tau_{b,j};
// E_{k,j} = sum_b w_k^H Hbar_{b,k} Fe_b e_j tau_{b,j};
// Z = sum_{k,j} |xi_k|^2 (sum_b v*)(sum_b v^T);
// kappa = sum_{k,j} |xi_k|^2 E_{k,j} (sum_b v*) - sum_k sqrt(mu_k) xi_k^H* ...
// exactly the displayed sums of the RIS quadratic form.
RisQP assemble_ris_qp(const ChannelSet& ch, const BeamState& beams, const AuxState& aux,
                      const RVec& omega, const SelectionState* selection = nullptr);

} // namespace riscbf

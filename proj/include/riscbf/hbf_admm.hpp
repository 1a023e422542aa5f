#pragma once

#include "riscbf/ccm.hpp"
#include "riscbf/types.hpp"

#include <functional>
#include <optional>

namespace riscbf {

// Everything BS b needs that is held fixed during its ADMM run: effective
// channel rows for the current (w, phi) and the other-BS interference
// constants. cross(k, j) = sum_{p != b} w_k^H H_{p,k} Fe_p e_j [tau_{p,j}];
// it must be rebuilt whenever any other BS's beamformers change.
struct BsContext {
    int b = 0;
    CMat eff_rows; // K x n_t, row k = w_k^H H_{b,k}
    CMat cross;    // K x K
    CVec xi;       // K
    RVec mu;       // K, omega_k (1 + lambda_k)
    double p_b = 1.0;
};

struct AdmmState {
    CMat f_b;  // n_t x K proxy precoder
    CMat f_rf; // n_t x n_rf, unit modulus
    CMat f_bb; // n_rf x K
    CMat dual; // n_t x K
    RVec tau;  // K selection gates (all ones in the fully-connected system)
    double rho = 1.0;
    int t = 0; // sweep counter
};

struct AdmmOptions {
    int t_max = 20;
    bool paper_literal_proxy = false; // always project onto the power sphere
    // residual balancing: double (halve) rho when the primal residual
    // exceeds 10x the dual residual (or vice versa); the unscaled dual
    // needs no rescaling when rho moves
    bool adapt_rho = false;
    CcmOptions ccm;
    // invoked between the digital and dual steps when set; returns the new
    // tau for this BS
    std::function<RVec(const AdmmState&)> selector;
};

struct AdmmTrace {
    std::vector<double> residual;  // ||F_b - F_RF F_BB diag(tau)||_F per sweep
    std::vector<double> objective; // augmented objective per sweep
};

// Builds the context for BS b from the equivalent channels of the current
// phi. `selection` gates the other BSs' columns.
BsContext build_bs_context(int b, const std::vector<std::vector<CMat>>& h_eq, const BeamState& beams,
                           const AuxState& aux, const RVec& omega, double p_b, int n_r,
                           const SelectionState* selection = nullptr);

// Augmented objective (the Lagrangian without its Delta-only constant):
// local surrogate terms of this BS plus (rho/2)||F_b - F_RF F_BB L + D/rho||^2,
// evaluated at `tau`. Also serves as the fhat_2 oracle for selection tests.
double admm_augmented_objective(const BsContext& ctx, const AdmmState& state, const RVec& tau);
// same at state.tau
double admm_augmented_objective(const BsContext& ctx, const AdmmState& state);

// Proxy precoder via the KKT conditions of the power-constrained proximal
// problem: M = rho F_RF F_BB diag(tau) - Delta; returns M/rho when feasible,
// else sqrt(P_b) M / ||M||_F. paper_literal always takes the second branch.
CMat update_proxy_precoder(const BsContext& ctx, const AdmmState& state, bool paper_literal = false);

// Analog-beamformer QP over vec(F_RF): A = kron(conj(Fg) Fg^T, (rho/2) I + W)
// with Fg = F_BB diag(tau) and W = eff_rows^H diag(|xi|^2) eff_rows; the
// linear term collects the cross-interference, signal, and penalty parts.
UnitModulusQP assemble_analog_qp(const BsContext& ctx, const AdmmState& state);

// Manifold descent on the assembled QP, warm-started at vec(F_RF).
CMat update_analog(const BsContext& ctx, const AdmmState& state, const CcmOptions& opts);

// Closed-form digital beamformer. The normal matrix is block-diagonal with
// the identical block X + (rho/2) F_RF^H F_RF per user column, so the solve
// is done per column; a trace-scaled ridge is added when the block is
// ill-conditioned beyond 1e12.
CMat update_digital(const BsContext& ctx, const AdmmState& state);

// Delta <- Delta + rho (F_b - F_RF F_BB diag(tau))
CMat dual_update(const AdmmState& state);

// Residual-balancing step for rho (no-op unless opts.adapt_rho);
// `product_prev` is F_RF F_BB diag(tau) from the previous sweep.
void balance_rho(AdmmState& state, const CMat& product_prev);

// One sweep: proxy, analog, digital, [selector], dual.
void admm_sweep(const BsContext& ctx, AdmmState& state, const AdmmOptions& opts);

// t_max sweeps with residual/objective traces.
AdmmState run_admm(const BsContext& ctx, const AdmmState& init, const AdmmOptions& opts,
                   AdmmTrace* trace = nullptr);

} // namespace riscbf

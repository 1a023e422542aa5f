#pragma once

#include "riscbf/ccm.hpp"
#include "riscbf/bs_select.hpp"
#include "riscbf/modulus_qp.hpp"
#include "riscbf/rng.hpp"
#include "riscbf/types.hpp"

namespace riscbf {

enum class AoMode { cf, pcf };

enum class BaselineKind { none, fd_bf, random_ris, quantized_ris, no_ris, random_selection };

struct AoOptions {
    int i_max = 50;  // outer iterations
    int t_max = 20;  // inner ADMM sweeps per outer iteration
    double wsr_tol = 1e-4; // plateau threshold [bits/s/Hz]
    int plateau_iters = 3;
    double rho1 = 1.0;
    double rho2 = 1.0;
    AoMode mode = AoMode::cf;
    double alpha = 1.0;                       // P-CF network connection ratio target
    BaselineKind baseline = BaselineKind::none;
    int quant_bits = 2;                       // for quantized_ris
    CcmOptions ccm;                           // analog beamformer + combiner solver
    ModulusQpOptions ris;
    SelectOptions select;
    // run the BS-selection step on every n-th inner sweep; re-selecting
    // every sweep churns the beams faster than they can re-adapt
    int select_period = 20;
    bool paper_literal_proxy = false;
    // residual-balancing rho adaptation inside the inner ADMM; rho = 1 with
    // a fixed sweep budget converges too slowly against the |xi|^2-weighted
    // data terms, so the driver turns balancing on
    bool adapt_rho = true;
    // start each BS at rho1 * max(1, 2 tr(W_b)/N_t), matching the penalty to
    // the data curvature; without this the consensus residual is still large
    // after t_max sweeps and the power projection wrecks the candidate
    bool scale_aware_rho = true;
    // accept the per-iteration HBF block only when the surrogate does not
    // decrease; keeps the f_Q trace monotone under the Jacobi constant
    // refresh
    bool monotone_safeguard = true;
    int threads = 1;
};

struct RunMetrics {
    std::vector<double> wsr_trace; // bits/s/Hz, one entry per outer iteration
    std::vector<double> fq_trace;  // natural-log surrogate, same indexing
    std::vector<double> admm_residuals; // final consensus residual, B entries per iteration
    RVec per_user_rates;                // bits/s/Hz at the final iterate
    double ncr = 1.0;
    int iterations = 0;
    int hbf_rejections = 0; // iterations whose HBF block the safeguard rolled back
    double wall_time_s = 0;

    double final_wsr() const { return wsr_trace.empty() ? 0.0 : wsr_trace.back(); }
};

struct RunResult {
    BeamState beams;
    AuxState aux;
    SelectionState selection;
    RunMetrics metrics;
};

// Feasible deterministic start: unit-modulus F_RF and w with uniform random
// phases, phi = 1, F_BB a pseudo-inverse fit of the matched-filter precoder
// rescaled to the power budget, proxy = F_RF F_BB, dual = 0.
BeamState init_beam_state(const Scenario& sc, const ChannelSet& ch, Rng& rng);

// Full alternating optimization (fully-connected system).
RunResult run_cbf(const ChannelSet& ch, const Scenario& sc, const AoOptions& opts, std::uint64_t seed);

// Partially-connected variant: selection-gated objectives and the per-sweep
// BS-selection step inside ADMM. alpha = 1 reproduces run_cbf bit for bit.
RunResult run_pcf(const ChannelSet& ch, const Scenario& sc, double alpha, const AoOptions& opts,
                  std::uint64_t seed);

// Baseline schemes (see BaselineKind). quantized_ris reads opts.quant_bits,
// random_selection reads opts.alpha.
RunResult run_baseline(const ChannelSet& ch, const Scenario& sc, BaselineKind kind, const AoOptions& opts,
                       std::uint64_t seed);

// network connection ratio sum_b K_b / (B K)
double ncr(const SelectionState& selection, int B, int K);

// unit-amplitude phases snapped to the nearest of {2 pi m / 2^bits}
CVec quantize_ris(const CVec& phi, int bits);

} // namespace riscbf

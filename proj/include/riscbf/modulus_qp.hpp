#pragma once

#include "riscbf/types.hpp"

#include <vector>

namespace riscbf {

// Convex program min phi^H Z phi + 2 Re(kappa^H phi) subject to per-entry
// caps |phi_i| <= 1, with Z Hermitian PSD.
struct ModulusCappedQP {
    CMat z;
    CVec kappa;

    Eigen::Index dim() const { return kappa.size(); }
    double objective(const CVec& phi) const {
        return std::real(phi.dot(z * phi)) + 2.0 * std::real(kappa.dot(phi));
    }
    void validate() const;
};

struct ModulusQpOptions {
    double tol = 1e-7; // on the projected-gradient fixed-point residual
    int max_iters = 2000;
    bool nesterov = false; // accelerated variant with monotone restart
    bool validate_input = true;
    // project onto the unit circles instead of the discs (|phi_i| = 1);
    // used by the quantized-RIS baselines, where the snapped amplitude is 1
    bool phase_only = false;
};

struct ModulusQpResult {
    CVec phi;
    double kkt_residual = 0;
    double objective = 0;
    int iterations = 0;
    bool converged = false; // false = iteration cap hit, best iterate returned
    std::vector<double> objective_trace;
};

// entrywise projection onto the unit disc, phi_i / max(1, |phi_i|)
CVec project_discs(const CVec& phi);
// entrywise projection onto the unit circle (phase kept, amplitude forced
// to 1); used by quantized/phase-only modes
CVec project_phases(const CVec& phi);

// power-iteration estimate of the largest eigenvalue (20 iterations,
// deterministic start)
double spectral_radius_estimate(const CMat& z);

// fixed-point residual || phi - Proj(phi - s (Z phi + kappa)) ||_inf with
// the documented step s = 1 / max(lambda_max(Z), eps); zero exactly at KKT
// points of the convex program
double kkt_residual(const ModulusCappedQP& qp, const CVec& phi);

// projected gradient descent (step 1/lambda_max with Armijo fallback);
// every iterate feasible, objective non-increasing
ModulusQpResult solve_modulus_capped_qp(const ModulusCappedQP& qp, const CVec& phi0,
                                        const ModulusQpOptions& opts = {});

} // namespace riscbf

#pragma once

#include "riscbf/types.hpp"

#include <vector>

namespace riscbf {

// Quadratic form g(x) = x^H A x + 2 Re(b^H x) with A Hermitian PSD,
// minimized over the product of unit circles |x_i| = 1.
struct UnitModulusQP {
    CMat a;
    CVec b;

    Eigen::Index dim() const { return b.size(); }
    double objective(const CVec& x) const {
        return std::real(x.dot(a * x)) + 2.0 * std::real(b.dot(x));
    }
    // throws std::invalid_argument when A is non-Hermitian or indefinite
    // beyond tolerance
    void validate() const;
};

struct CcmOptions {
    int max_iters = 200;
    double grad_tol = 1e-6;
    double armijo_step0 = 1.0;
    double armijo_shrink = 0.5;
    double armijo_c = 1e-4;
    int armijo_max_backtracks = 30;
    bool conjugate_gradient = false; // Polak-Ribiere direction instead of steepest descent
    bool validate_input = true;
};

struct CcmResult {
    CVec x;
    std::vector<double> objective_trace; // value after each accepted step
    double grad_norm = 0;
    int iterations = 0;
    bool converged = false; // gradient tolerance reached before the cap
};

// Euclidean gradient of g in the convention grad = A x + b. The
// real-coordinate gradient of g is exactly twice this; the factor is fixed
// here and pinned by the finite-difference tests.
CVec euclidean_grad(const UnitModulusQP& qp, const CVec& x);

// Projection of the Euclidean gradient onto the tangent space at x:
// g - Re(g o conj(x)) o x. Entrywise Re(out_i conj(x_i)) = 0.
CVec riemannian_grad(const UnitModulusQP& qp, const CVec& x);
CVec tangent_project(const CVec& g, const CVec& x);

// Entrywise (x_i - step v_i)/|x_i - step v_i|. Throws std::runtime_error
// when some entry lands exactly on zero (caller halves the step).
CVec retract(const CVec& x, const CVec& v, double step);

// Riemannian gradient descent with Armijo backtracking. The objective
// trace is non-increasing; terminates at grad_tol or max_iters.
CcmResult solve_unit_modulus_qp(const UnitModulusQP& qp, const CVec& x0, const CcmOptions& opts = {});

} // namespace riscbf

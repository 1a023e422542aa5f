#include "riscbf/ccm.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace riscbf {

void UnitModulusQP::validate() const {
    if (a.rows() != a.cols() || a.rows() != b.size())
        throw std::invalid_argument("UnitModulusQP: inconsistent dimensions");
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("UnitModulusQP: A is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
    double lmax = std::max(1.0, es.eigenvalues().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-8 * lmax)
        throw std::invalid_argument("UnitModulusQP: A is indefinite beyond tolerance");
}

CVec euclidean_grad(const UnitModulusQP& qp, const CVec& x) { return qp.a * x + qp.b; }

CVec tangent_project(const CVec& g, const CVec& x) {
    CVec out(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) out(i) = g(i) - std::real(g(i) * std::conj(x(i))) * x(i);
    return out;
}

CVec riemannian_grad(const UnitModulusQP& qp, const CVec& x) {
    return tangent_project(euclidean_grad(qp, x), x);
}

CVec retract(const CVec& x, const CVec& v, double step) {
    if (step < 0) throw std::invalid_argument("retract: step must be >= 0");
    CVec moved = x - step * v;
    CVec out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double mag = std::abs(moved(i));
        if (mag == 0.0) throw std::runtime_error("retract: degenerate step, entry hit zero");
        out(i) = moved(i) / mag;
    }
    return out;
}

CcmResult solve_unit_modulus_qp(const UnitModulusQP& qp, const CVec& x0, const CcmOptions& opts) {
    if (opts.validate_input) qp.validate();
    if (x0.size() != qp.dim()) throw std::invalid_argument("solve_unit_modulus_qp: x0 dimension mismatch");

    CcmResult res;
    res.x = x0;
    double f = qp.objective(res.x);
    res.objective_trace.push_back(f);

    CVec grad = riemannian_grad(qp, res.x);
    CVec dir = -grad;
    double gnorm2 = grad.squaredNorm();
    CVec grad_prev = grad;

    for (int it = 0; it < opts.max_iters; ++it) {
        res.grad_norm = std::sqrt(gnorm2);
        if (res.grad_norm <= opts.grad_tol) {
            res.converged = true;
            break;
        }
        res.iterations = it + 1;

        // Armijo backtracking along dir (dir = -grad unless CG is enabled)
        double dir_dot_grad = std::real(dir.dot(grad)); // < 0 for a descent direction
        if (opts.conjugate_gradient && dir_dot_grad > -1e-14 * gnorm2) {
            dir = -grad; // restart on a non-descent CG direction
            dir_dot_grad = -gnorm2;
        }
        double step = opts.armijo_step0;
        bool accepted = false;
        CVec x_new;
        double f_new = f;
        for (int bt = 0; bt < opts.armijo_max_backtracks; ++bt) {
            try {
                x_new = retract(res.x, -dir, step); // moves along +dir
            } catch (const std::runtime_error&) {
                step *= opts.armijo_shrink;
                continue;
            }
            f_new = qp.objective(x_new);
            if (f_new <= f + opts.armijo_c * step * dir_dot_grad) {
                accepted = true;
                break;
            }
            step *= opts.armijo_shrink;
        }
        if (!accepted) break; // no further progress at machine scale

        res.x = x_new;
        f = f_new;
        res.objective_trace.push_back(f);

        grad_prev = grad;
        grad = riemannian_grad(qp, res.x);
        double gnorm2_new = grad.squaredNorm();
        if (opts.conjugate_gradient) {
            // Polak-Ribiere with projection transport of the previous direction
            CVec gp = tangent_project(grad_prev, res.x);
            double beta = std::max(0.0, std::real(grad.dot(grad - gp)) / std::max(gnorm2, 1e-300));
            dir = -grad + beta * tangent_project(dir, res.x);
        } else {
            dir = -grad;
        }
        gnorm2 = gnorm2_new;
    }
    res.grad_norm = std::sqrt(gnorm2);
    if (res.grad_norm <= opts.grad_tol) res.converged = true;
    return res;
}

} // namespace riscbf

#include "riscbf/modulus_qp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace riscbf {

void ModulusCappedQP::validate() const {
    if (z.rows() != z.cols() || z.rows() != kappa.size())
        throw std::invalid_argument("ModulusCappedQP: inconsistent dimensions");
    double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
    if ((z - z.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("ModulusCappedQP: Z is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(z, Eigen::EigenvaluesOnly);
    double lmax = std::max(1.0, es.eigenvalues().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-8 * lmax)
        throw std::invalid_argument("ModulusCappedQP: Z is indefinite beyond tolerance");
}

CVec project_discs(const CVec& phi) {
    CVec out(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) out(i) = phi(i) / std::max(1.0, std::abs(phi(i)));
    return out;
}

CVec project_phases(const CVec& phi) {
    CVec out(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        double mag = std::abs(phi(i));
        out(i) = mag == 0.0 ? cxd(1.0, 0.0) : phi(i) / mag;
    }
    return out;
}

double spectral_radius_estimate(const CMat& z) {
    const Eigen::Index n = z.rows();
    if (n == 0) return 0.0;
    CVec v = CVec::Ones(n);
    // deterministic non-uniform start so eigenvectors orthogonal to 1 are reachable
    for (Eigen::Index i = 0; i < n; ++i) v(i) += cxd(0.01 * static_cast<double>(i % 7), 0.013 * static_cast<double>(i % 5));
    v.normalize();
    double lambda = 0;
    for (int it = 0; it < 20; ++it) {
        CVec zv = z * v;
        double nrm = zv.norm();
        if (nrm == 0.0) return 0.0;
        lambda = std::real(v.dot(zv));
        v = zv / nrm;
    }
    return std::abs(lambda);
}

namespace {
double fixed_point_step(const CMat& z) { return 1.0 / std::max(spectral_radius_estimate(z), 1e-12); }
} // namespace

double kkt_residual(const ModulusCappedQP& qp, const CVec& phi) {
    double s = fixed_point_step(qp.z);
    CVec moved = phi - s * (qp.z * phi + qp.kappa);
    return (phi - project_discs(moved)).cwiseAbs().maxCoeff();
}

ModulusQpResult solve_modulus_capped_qp(const ModulusCappedQP& qp, const CVec& phi0,
                                        const ModulusQpOptions& opts) {
    if (opts.validate_input) qp.validate();
    if (phi0.size() != qp.dim())
        throw std::invalid_argument("solve_modulus_capped_qp: phi0 dimension mismatch");

    auto project = [&](const CVec& v) { return opts.phase_only ? project_phases(v) : project_discs(v); };
    // fixed-point residual under the active projection
    auto fp_residual = [&](const CVec& phi) {
        double s = 1.0 / std::max(spectral_radius_estimate(qp.z), 1e-12);
        return (phi - project(phi - s * (qp.z * phi + qp.kappa))).cwiseAbs().maxCoeff();
    };

    ModulusQpResult res;
    res.phi = project(phi0);
    double f = qp.objective(res.phi);
    res.objective_trace.push_back(f);

    const double step0 = fixed_point_step(qp.z);
    CVec y = res.phi; // momentum point (== phi when nesterov off)
    double t_mom = 1.0;

    for (int it = 0; it < opts.max_iters; ++it) {
        res.iterations = it + 1;
        CVec grad = qp.z * y + qp.kappa;
        double step = step0;
        CVec cand = project(y - step * grad);
        double f_cand = qp.objective(cand);
        // Armijo fallback: the power-iteration step can overshoot slightly
        int guard = 0;
        while (f_cand > f + 1e-14 * std::max(1.0, std::abs(f)) && guard++ < 60) {
            step *= 0.5;
            cand = project(res.phi - step * (qp.z * res.phi + qp.kappa));
            f_cand = qp.objective(cand);
            t_mom = 1.0; // monotone restart of the momentum sequence
        }
        if (f_cand > f) { // no descent possible at machine scale
            res.kkt_residual = fp_residual(res.phi);
            res.converged = res.kkt_residual <= opts.tol;
            res.objective = f;
            return res;
        }

        double move = (cand - res.phi).cwiseAbs().maxCoeff();
        if (opts.nesterov) {
            double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
            y = cand + ((t_mom - 1.0) / t_next) * (cand - res.phi);
            t_mom = t_next;
        } else {
            y = cand;
        }
        res.phi = cand;
        f = f_cand;
        res.objective_trace.push_back(f);

        if (move <= opts.tol * 0.1 || it % 10 == 9) {
            res.kkt_residual = fp_residual(res.phi);
            if (res.kkt_residual <= opts.tol) {
                res.converged = true;
                res.objective = f;
                return res;
            }
        }
    }
    res.kkt_residual = fp_residual(res.phi);
    res.converged = res.kkt_residual <= opts.tol;
    res.objective = f;
    return res;
}

} // namespace riscbf

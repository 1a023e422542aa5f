#pragma once

#include "riscbf/hbf_admm.hpp"
#include "riscbf/types.hpp"

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace riscbf {

// tau^T U tau + r^T tau + constant == local augmented objective at
// diag(tau); U real symmetric PSD.
struct SelectionBiqp {
    RMat u;
    RVec r;
    RVec z;    // coverage data z_k = 1 - sum_{p != b} tau_{p,k}
    int quota = 1;
    double constant = 0; // dropped additive part, kept for reporting/tests
};

struct SelectionInfeasible : std::runtime_error {
    explicit SelectionInfeasible(const std::string& what, std::vector<int> users = {})
        : std::runtime_error(what), uncovered(std::move(users)) {}
    std::vector<int> uncovered;
};

// 0/1 linear program over variables [tau_1..tau_K, zeta_(i,j) for i<j].
struct BilpRow {
    RVec coeff; // length K + K(K-1)/2
    int rel;    // -1: <=, 0: ==, +1: >=
    double rhs;
};

struct BilpInstance {
    int K = 0;
    int quota = 0;
    RVec z;
    bool strengthened = false;
    RVec c_tau;  // u_ii + r_i
    RVec c_zeta; // 2 u_ij, lexicographic i<j
    std::vector<BilpRow> rows;

    static int zeta_index(int i, int j, int K);
    int num_vars() const { return K + K * (K - 1) / 2; }
    double objective(const IVec& tau, const IVec& zeta) const;
    bool satisfies(const IVec& tau, const IVec& zeta) const;
    // the zeta forced at a binary tau by the standard rows
    IVec forced_zeta(const IVec& tau) const;
};

struct BilpOptions {
    enum class Method { automatic, exhaustive, branch_and_bound };
    Method method = Method::automatic;
};

struct BilpResult {
    bool feasible = false;
    IVec tau;
    IVec zeta;
    double objective = 0;
    long nodes = 0;
};

// Appendix-style real-valued assembly of the per-BS selection problem from
// the ADMM state. tau of the other BSs enters through ctx.cross and z.
SelectionBiqp assemble_selection_biqp(const BsContext& ctx, const AdmmState& state, int quota,
                                      const RVec& z);

// Standard product linearization rows plus, when `strengthen` is set, the
// per-row sum and coverage-product rows (with zeta_{i,i} := tau_i and zeta
// symmetric). Throws SelectionInfeasible when the coverage rows already
// contradict the quota.
BilpInstance rla_linearize(const SelectionBiqp& biqp, bool strengthen);

// Exact global solve: exhaustive for small K (the default below 13
// variables), depth-first branch-and-bound with a combinatorial lower bound
// otherwise. Returns an explicit infeasible status when no binary point
// satisfies the rows.
BilpResult solve_bilp(const BilpInstance& instance, const BilpOptions& opts = {});

// Optimal value of the [0,1] relaxation of all rows (simplex), used to
// compare standard and strengthened formulations.
double lp_relaxation_bound(const BilpInstance& instance);

// CPLEX-style LP text export for cross-checking with external solvers.
void write_lp_format(const BilpInstance& instance, std::ostream& os);

struct SelectOptions {
    bool strengthen = true;
    BilpOptions bilp;
    // per-BS ADMM penalty entering the BIQP; one entry per BS, or a single
    // entry shared by all
    std::vector<double> rho = {1.0};
};

// Sequential sweep over BSs in `order`, each solving its BIQP with z
// recomputed from the other BSs' current rows. Guarantees full coverage on
// success; throws SelectionInfeasible (with the uncovered users) otherwise.
void select_all_bs(const std::vector<std::vector<CMat>>& h_eq, const BeamState& beams, const AuxState& aux,
                   const RVec& omega, int n_r, const std::vector<int>& quotas,
                   const std::vector<int>& order, SelectionState& selection, const SelectOptions& opts = {});

// K_b = round(alpha K) per BS, adjusted round-robin by +-1 so the total is
// round(alpha B K); every quota clamped to [1, K].
std::vector<int> quotas_from_alpha(double alpha, int B, int K);

} // namespace riscbf

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace riscbf {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using IVec = Eigen::VectorXi;

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

inline double dist3(const Vec3& a, const Vec3& b) {
    double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Rectangular array factorization (Nx columns along x, Ny along y).
struct UpaShape {
    int nx = 1;
    int ny = 1;
    int count() const { return nx * ny; }
};

// Network geometry plus array/system parameters. Immutable after
// construction; validated by Scenario::validate().
struct Scenario {
    int B = 1;  // base stations
    int K = 1;  // users
    int R = 1;  // RISs
    int L = 4;  // propagation paths per link (incl. the LoS path when enabled)

    int n_t = 32;   // BS antennas
    int n_r = 8;    // user antennas
    int m = 64;     // RIS elements
    int n_rf = 4;   // BS RF chains

    UpaShape bs_array, user_array, ris_array;

    double f_c = 28e9;          // carrier frequency [Hz]
    double p_b = 1e-3;          // per-BS power budget [W]
    double sigma2 = 10e-12;     // effective noise power [W]
    double spacing_ratio = 0.5; // antenna spacing / wavelength

    std::vector<Vec3> bs_positions, ris_positions, user_positions;
    RVec omega; // per-user rate weights, sum to 1

    // channel-model knobs
    bool los_enabled = true;
    double nlos_extra_loss_db = 10.0;
    double direct_extra_loss_db = 0.0; // extra attenuation on the BS-user links (blocked direct paths)
    bool unit_path_gains = false;   // skip the distance-dependent loss (tests)
    bool strict_paper_angles = false; // sample elevations from (0,2pi) too

    void validate() const; // throws std::invalid_argument with a description
};

// Per-path description of one Saleh-Valenzuela link.
struct PathSpec {
    cxd gain;
    double aod_azimuth = 0, aod_elevation = 0; // departure angles [rad]
    double aoa_azimuth = 0, aoa_elevation = 0; // arrival angles [rad]
    bool is_los = false;
};

// All channel matrices for one realization. Stacked forms are exact block
// concatenations of the per-RIS matrices.
struct ChannelSet {
    // hbar[b][k]: n_r x n_t direct link
    std::vector<std::vector<CMat>> hbar;
    // g[b][r]: m x n_t BS-to-RIS link
    std::vector<std::vector<CMat>> g;
    // v[r][k]: n_r x m RIS-to-user link
    std::vector<std::vector<CMat>> v;

    int B = 0, K = 0, R = 0, n_t = 0, n_r = 0, m = 0;

    // v_stacked[k]: n_r x (R*m), g_stacked[b]: (R*m) x n_t
    CMat v_stacked(int k) const;
    CMat g_stacked(int b) const;

    // copy with all RIS links zeroed (direct links kept)
    ChannelSet without_ris() const;
};

// FP auxiliary variables (lambda_k >= 0, xi_k complex).
struct AuxState {
    RVec lambda;
    CVec xi;

    static AuxState zeros(int K) {
        AuxState a;
        a.lambda = RVec::Zero(K);
        a.xi = CVec::Zero(K);
        return a;
    }
    // mu_k = omega_k (1 + lambda_k), derived on demand
    RVec mu(const RVec& omega) const {
        return (omega.array() * (1.0 + lambda.array())).matrix();
    }
};

// Per-BS binary selection (tau(b,k) in {0,1}) plus the cardinality quotas.
struct SelectionState {
    Eigen::MatrixXi tau;     // B x K
    std::vector<int> quotas; // K_b per BS

    static SelectionState all_ones(int B, int K) {
        SelectionState s;
        s.tau = Eigen::MatrixXi::Ones(B, K);
        s.quotas.assign(B, K);
        return s;
    }
    bool is_all_ones() const { return tau.minCoeff() == 1; }
    RVec tau_row(int b) const { return tau.row(b).cast<double>(); }
};

// All beamforming variables: per-BS analog/digital beamformers, the ADMM
// proxy precoder and dual, stacked combiners and the RIS vector.
struct BeamState {
    std::vector<CMat> f_rf;   // n_t x n_rf, unit-modulus entries
    std::vector<CMat> f_bb;   // n_rf x K
    std::vector<CMat> proxy;  // n_t x K   (F_b)
    std::vector<CMat> dual;   // n_t x K   (Delta_b)
    CVec w;                   // stacked K*n_r combiner, unit-modulus entries
    CVec phi;                 // R*m RIS vector, |phi_i| <= 1
    bool fully_digital = false; // proxy is used directly as the precoder

    int num_bs() const { return static_cast<int>(f_rf.size()); }

    // n_t x K precoder actually applied at BS b (selection gating excluded)
    CMat effective_precoder(int b) const {
        return fully_digital ? proxy[b] : CMat(f_rf[b] * f_bb[b]);
    }
    Eigen::VectorBlock<const CVec> w_k(int k, int n_r) const {
        return w.segment(static_cast<Eigen::Index>(k) * n_r, n_r);
    }
};

} // namespace riscbf

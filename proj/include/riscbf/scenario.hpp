#pragma once

#include "riscbf/rng.hpp"
#include "riscbf/types.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace riscbf {

// UPA array response. Entry for element (nx, ny) is
//   (1/sqrt(Nx*Ny)) * exp(j*2*pi*spacing_ratio*(nx*sin(omega)*sin(varsigma)
//                                               + ny*cos(varsigma)))
// stored at index ny*Nx + nx (ny-major, fixed convention). Unit Euclidean
// norm for all angles.
CVec upa_steering(double omega, double varsigma, int nx, int ny, double spacing_ratio);

// Complex gain of one path at the given 3-D distance. The LoS magnitude is
// free-space loss, PL = 32.4 + 20*log10(d_m) + 20*log10(f_GHz) dB, with a
// uniformly random phase; NLoS applies an extra `nlos_extra_loss_db`
// penalty and a CN(0,1) small-scale factor.
cxd path_gain(double distance_m, bool is_los, double f_c_hz, double nlos_extra_loss_db, Rng& rng);

// Saleh-Venzuela mmWave link: sqrt(N1*N2/L) * sum_l beta_l a2 a1^H, where
// a1 is the departure (tx) response and a2 the arrival (rx) response.
// Returns an (N2 rx) x (N1 tx) matrix.
CMat gen_sv_channel(const UpaShape& tx, const UpaShape& rx, const std::vector<PathSpec>& paths,
                    double spacing_ratio);

// Equivalent BS->user channel Hbar + V_k diag(phi) G_b for stacked inputs.
CMat assemble_equivalent_channel(const CMat& hbar, const CMat& v_k, const CMat& g_b, const CVec& phi);

// equivalent_channels()[b][k] for a fixed phi
std::vector<std::vector<CMat>> equivalent_channels(const ChannelSet& ch, const CVec& phi);

// Key-value scenario configuration (see docs/ and scenario.cpp for the key
// list). Unknown keys are rejected.
struct ScenarioConfig {
    std::map<std::string, std::string> kv;

    static ScenarioConfig from_file(const std::string& path);
    static ScenarioConfig from_string(const std::string& text);

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv[key] = value; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_num(const std::string& key, double fallback) const;
    bool get_flag(const std::string& key, bool fallback) const;
};

// Resolve a config into a validated Scenario (geometry defaults are filled
// in; user positions are drawn from the geometry stream of `seed` unless
// given explicitly) and generate every channel matrix. Deterministic in
// (config, seed). `captured_paths`, when non-null, receives the PathSpec
// list of every link keyed as "hbar:b:k", "g:b:r", "v:r:k".
std::pair<Scenario, ChannelSet> build_scenario(
    const ScenarioConfig& config, std::uint64_t seed,
    std::map<std::string, std::vector<PathSpec>>* captured_paths = nullptr);

// Lossless round-trip of a resolved Scenario through the config format.
ScenarioConfig scenario_to_config(const Scenario& sc);
Scenario scenario_from_config(const ScenarioConfig& config);

// CSV dump of every channel matrix: columns link,b_or_r,k_or_r,row,col,re,im.
void dump_channels_csv(const ChannelSet& ch, std::ostream& os);

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

} // namespace riscbf

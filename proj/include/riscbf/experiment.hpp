#pragma once

#include "riscbf/ao.hpp"
#include "riscbf/scenario.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace riscbf {

// scheme identifiers: cbf, cbf_q<bits>, random_ris, no_ris, fd_bf,
// pcf_rla:<alpha>, pcf_random:<alpha>
struct Scheme {
    std::string name;
    AoMode mode = AoMode::cf;
    BaselineKind baseline = BaselineKind::none;
    int quant_bits = 0;
    double alpha = 1.0;

    static Scheme parse(const std::string& name);
};

enum class SweepAxis { p_max_dbm, n_ris, iterations, cdf };

struct ExperimentConfig {
    std::string scenario_path; // resolved relative to the experiment file
    ScenarioConfig scenario;
    SweepAxis axis = SweepAxis::p_max_dbm;
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
    std::vector<Scheme> schemes;
    std::string out_path;
    AoOptions ao;
    bool emit_wall_time = false; // keeps reruns byte-identical when off

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_string(const std::string& text, const std::string& base_dir);
};

struct ResultRow {
    std::string scheme;
    double axis_value = 0;
    std::uint64_t seed = 0;
    double wsr = 0;               // bits/s/Hz
    std::vector<double> per_user; // bits/s/Hz
    double ncr = 1.0;
    int iterations = 0;
    double wall_time_s = 0;
    std::string status = "ok"; // "ok" or an error description
};

struct CdfPoint {
    double value;
    double probability;
};

struct CdfTable {
    std::vector<CdfPoint> points; // sorted, probability = rank/n
    double percentile(double p) const; // nearest-rank, p in (0, 100]
    double p5() const { return percentile(5.0); }
    double median() const { return percentile(50.0); }
};

// empirical CDF with the nearest-rank percentile convention
CdfTable compute_cdf(const std::vector<double>& per_user_rates);

// RFC-4180-style CSV with a fixed header; rates carry 6 significant digits
void write_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void write_csv_file(const std::vector<ResultRow>& rows, const std::string& path);

// Cartesian product of scheme x axis value x seed, executed deterministically
// (grid order is preserved in the output regardless of thread count). A
// failing run becomes a row with its error in the status column.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, int threads = 1);

} // namespace riscbf

#include "riscbf/experiment.hpp"
#include "riscbf/fp_objective.hpp"
#include "riscbf/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int cmd_run(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
            const std::string& out_override, int threads, bool timing) {
    riscbf::ExperimentConfig cfg = riscbf::ExperimentConfig::from_file(config_path);
    if (has_seed) cfg.seeds = {seed_override};
    if (!out_override.empty()) cfg.out_path = out_override;
    cfg.emit_wall_time = cfg.emit_wall_time || timing;

    std::vector<riscbf::ResultRow> rows = riscbf::run_experiment(cfg, threads);
    riscbf::write_csv_file(rows, cfg.out_path);

    int failures = 0;
    for (const auto& r : rows)
        if (r.status != "ok") {
            ++failures;
            std::cerr << "row failed: scheme=" << r.scheme << " axis=" << r.axis_value << " seed=" << r.seed
                      << " -> " << r.status << "\n";
        }
    std::cout << "wrote " << rows.size() << " rows to " << cfg.out_path << " (" << failures << " failed)\n";

    if (cfg.axis == riscbf::SweepAxis::cdf) {
        // per-scheme 95%-likely and median per-user rate, as in the CDF plots
        for (const auto& scheme : cfg.schemes) {
            std::vector<double> rates;
            for (const auto& r : rows)
                if (r.scheme == scheme.name && r.status == "ok")
                    rates.insert(rates.end(), r.per_user.begin(), r.per_user.end());
            if (rates.empty()) continue;
            riscbf::CdfTable cdf = riscbf::compute_cdf(rates);
            std::cout << scheme.name << ": 95%-likely " << cdf.p5() << " bits/s/Hz, median " << cdf.median()
                      << " bits/s/Hz (" << rates.size() << " samples)\n";
        }
    }
    return failures == 0 ? 0 : 1;
}

int cmd_channels(const std::string& scenario_path, std::uint64_t seed, const std::string& out) {
    riscbf::ScenarioConfig cfg = riscbf::ScenarioConfig::from_file(scenario_path);
    auto [sc, ch] = riscbf::build_scenario(cfg, seed);
    if (out.empty() || out == "-") {
        riscbf::dump_channels_csv(ch, std::cout);
    } else {
        std::ofstream f(out);
        if (!f) {
            std::cerr << "cannot write " << out << "\n";
            return 1;
        }
        riscbf::dump_channels_csv(ch, f);
        std::cout << "wrote channel dump to " << out << "\n";
    }
    return 0;
}

int cmd_selftest(std::uint64_t seed) {
    using namespace riscbf;
    int failed = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "  ok: " : "FAIL: ") << what << "\n";
        if (!ok) ++failed;
    };

    ScenarioConfig cfg;
    cfg.set("b", "2");
    cfg.set("k", "2");
    cfg.set("r", "1");
    cfg.set("n_t", "8");
    cfg.set("n_rf", "2");
    cfg.set("n_r", "2");
    cfg.set("m", "16");
    auto [sc, ch] = build_scenario(cfg, seed);

    Rng rng(seed);
    for (int t = 0; t < 100; ++t) {
        CVec a = upa_steering(rng.uniform(0, 2 * M_PI), rng.uniform(0, M_PI), 4, 2, 0.5);
        if (std::abs(a.norm() - 1.0) > 1e-12) {
            check(false, "steering vectors unit norm");
            break;
        }
        if (t == 99) check(true, "steering vectors unit norm (100 random angles)");
    }

    auto [sc2, ch2] = build_scenario(cfg, seed);
    bool identical = true;
    for (int b = 0; b < ch.B && identical; ++b)
        for (int k = 0; k < ch.K && identical; ++k) identical = ch.hbar[b][k] == ch2.hbar[b][k];
    check(identical, "channel generation deterministic in (config, seed)");

    AoOptions opts;
    opts.i_max = 5;
    RunResult res = run_cbf(ch, sc, opts, seed);
    bool monotone = true;
    for (size_t i = 1; i < res.metrics.fq_trace.size(); ++i)
        if (res.metrics.fq_trace[i] < res.metrics.fq_trace[i - 1] - 1e-6) monotone = false;
    check(monotone, "surrogate trace non-decreasing over 5 iterations");
    check(res.metrics.final_wsr() > 0, "positive weighted sum rate");

    RunResult pcf = run_pcf(ch, sc, 1.0, opts, seed);
    check(pcf.metrics.wsr_trace == res.metrics.wsr_trace, "alpha = 1 matches the fully-connected run");

    std::cout << (failed == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-aided cell-free massive MIMO cooperative beamforming simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, scenario_path;
    std::uint64_t seed = 1;
    bool seed_given = false;
    int threads = 1;
    bool timing = false;

    CLI::App* run = app.add_subcommand("run", "execute an experiment sweep and write a CSV");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--seed", seed, "replace the config's seed list with a single seed")
        ->each([&](const std::string&) { seed_given = true; });
    run->add_option("--out", out_path, "output CSV path override");
    run->add_option("--threads", threads, "number of concurrent sweep workers");
    run->add_flag("--timing", timing, "fill the wall_time_s column (reruns stop being byte-identical)");

    CLI::App* channels = app.add_subcommand("channels", "dump a generated ChannelSet as CSV");
    channels->add_option("scenario", scenario_path, "scenario config file")->required();
    channels->add_option("--seed", seed, "channel realization seed");
    channels->add_option("--out", out_path, "output path (default stdout)");

    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in invariant checks");
    selftest->add_option("--seed", seed, "seed for the checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, seed, seed_given, out_path, threads, timing);
        if (channels->parsed()) return cmd_channels(scenario_path, seed, out_path);
        if (selftest->parsed()) return cmd_selftest(seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

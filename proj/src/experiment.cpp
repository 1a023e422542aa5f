#include "riscbf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

namespace riscbf {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string dirname_of(const std::string& path) {
    size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

} // namespace

Scheme Scheme::parse(const std::string& name) {
    Scheme s;
    s.name = name;
    auto alpha_of = [&](const std::string& prefix) {
        std::string v = name.substr(prefix.size());
        double a = std::stod(v);
        if (!(a > 0.0) || a > 1.0) throw std::invalid_argument("scheme " + name + ": alpha outside (0,1]");
        return a;
    };
    if (name == "cbf") return s;
    if (name == "fd_bf") {
        s.baseline = BaselineKind::fd_bf;
        return s;
    }
    if (name == "random_ris") {
        s.baseline = BaselineKind::random_ris;
        return s;
    }
    if (name == "no_ris") {
        s.baseline = BaselineKind::no_ris;
        return s;
    }
    if (name.rfind("cbf_q", 0) == 0) {
        s.baseline = BaselineKind::quantized_ris;
        s.quant_bits = std::stoi(name.substr(5));
        if (s.quant_bits < 1) throw std::invalid_argument("scheme " + name + ": bits must be >= 1");
        return s;
    }
    if (name.rfind("pcf_rla:", 0) == 0) {
        s.mode = AoMode::pcf;
        s.alpha = alpha_of("pcf_rla:");
        return s;
    }
    if (name.rfind("pcf_random:", 0) == 0) {
        s.mode = AoMode::pcf;
        s.baseline = BaselineKind::random_selection;
        s.alpha = alpha_of("pcf_random:");
        return s;
    }
    throw std::invalid_argument("unknown scheme: " + name);
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text, const std::string& base_dir) {
    ExperimentConfig cfg;
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("experiment config line " + std::to_string(lineno) +
                                        ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto need = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument("experiment config: missing key '" + key + "'");
        return it->second;
    };

    cfg.scenario_path = need("scenario");
    if (!cfg.scenario_path.empty() && cfg.scenario_path[0] != '/')
        cfg.scenario_path = base_dir + "/" + cfg.scenario_path;
    cfg.scenario = ScenarioConfig::from_file(cfg.scenario_path);

    std::string axis = need("axis");
    if (axis == "p_max_dbm") cfg.axis = SweepAxis::p_max_dbm;
    else if (axis == "n_ris") cfg.axis = SweepAxis::n_ris;
    else if (axis == "iterations") cfg.axis = SweepAxis::iterations;
    else if (axis == "cdf") cfg.axis = SweepAxis::cdf;
    else throw std::invalid_argument("experiment config: unknown axis '" + axis + "'");

    for (const std::string& v : split(kv.count("values") ? kv["values"] : "0", ','))
        cfg.values.push_back(std::stod(v));
    for (const std::string& v : split(need("seeds"), ','))
        cfg.seeds.push_back(static_cast<std::uint64_t>(std::stoull(v)));
    for (const std::string& v : split(need("schemes"), ','))
        cfg.schemes.push_back(Scheme::parse(v));
    cfg.out_path = kv.count("out") ? kv["out"] : "results.csv";
    if (!cfg.out_path.empty() && cfg.out_path[0] != '/') cfg.out_path = base_dir + "/" + cfg.out_path;

    if (kv.count("i_max")) cfg.ao.i_max = std::stoi(kv["i_max"]);
    if (kv.count("t_max")) cfg.ao.t_max = std::stoi(kv["t_max"]);
    if (kv.count("wsr_tol")) cfg.ao.wsr_tol = std::stod(kv["wsr_tol"]);
    if (kv.count("emit_wall_time")) cfg.emit_wall_time = kv["emit_wall_time"] == "true";

    if (cfg.values.empty() || cfg.seeds.empty() || cfg.schemes.empty())
        throw std::invalid_argument("experiment config: values, seeds and schemes must be nonempty");
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open experiment config: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_string(ss.str(), dirname_of(path));
}

double CdfTable::percentile(double p) const {
    if (points.empty()) throw std::invalid_argument("percentile of empty CDF");
    if (!(p > 0.0) || p > 100.0) throw std::invalid_argument("percentile must be in (0, 100]");
    size_t rank = static_cast<size_t>(std::ceil(p / 100.0 * static_cast<double>(points.size())));
    rank = std::max<size_t>(rank, 1);
    return points[rank - 1].value;
}

CdfTable compute_cdf(const std::vector<double>& per_user_rates) {
    if (per_user_rates.empty()) throw std::invalid_argument("compute_cdf: empty input");
    std::vector<double> sorted = per_user_rates;
    std::sort(sorted.begin(), sorted.end());
    CdfTable table;
    table.points.reserve(sorted.size());
    for (size_t i = 0; i < sorted.size(); ++i)
        table.points.push_back({sorted[i], static_cast<double>(i + 1) / static_cast<double>(sorted.size())});
    return table;
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string fmt6(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << "scheme,axis_value,seed,wsr_bps_hz,per_user_rates,ncr,iterations,wall_time_s,status\n";
    for (const ResultRow& r : rows) {
        std::string rates;
        for (size_t i = 0; i < r.per_user.size(); ++i) {
            if (i) rates += ";";
            rates += fmt6(r.per_user[i]);
        }
        os << csv_quote(r.scheme) << "," << fmt6(r.axis_value) << "," << r.seed << "," << fmt6(r.wsr) << ","
           << csv_quote(rates) << "," << fmt6(r.ncr) << "," << r.iterations << "," << fmt6(r.wall_time_s)
           << "," << csv_quote(r.status) << "\n";
    }
}

void write_csv_file(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write CSV: " + path);
    write_csv(rows, f);
    if (!f) throw std::runtime_error("I/O failure while writing CSV: " + path);
}

namespace {

ResultRow run_one(const ExperimentConfig& config, const Scheme& scheme, double value, std::uint64_t seed) {
    ResultRow row;
    row.scheme = scheme.name;
    row.axis_value = value;
    row.seed = seed;
    try {
        ScenarioConfig sc_cfg = config.scenario;
        if (config.axis == SweepAxis::p_max_dbm) {
            sc_cfg.kv.erase("p_b");
            sc_cfg.set("p_b_dbm", std::to_string(value));
        } else if (config.axis == SweepAxis::n_ris) {
            sc_cfg.set("m", std::to_string(static_cast<int>(value)));
            sc_cfg.kv.erase("m_x");
            sc_cfg.kv.erase("m_y");
        }
        auto [sc, ch] = build_scenario(sc_cfg, seed);

        AoOptions ao = config.ao;
        ao.quant_bits = scheme.quant_bits;
        ao.alpha = scheme.alpha;
        ao.mode = scheme.mode;
        if (config.axis == SweepAxis::iterations) {
            ao.i_max = static_cast<int>(value);
            ao.wsr_tol = 0.0; // run the full trace for convergence plots
        }

        RunResult res;
        if (scheme.mode == AoMode::pcf && scheme.baseline == BaselineKind::none)
            res = run_pcf(ch, sc, scheme.alpha, ao, seed);
        else if (scheme.baseline == BaselineKind::none)
            res = run_cbf(ch, sc, ao, seed);
        else
            res = run_baseline(ch, sc, scheme.baseline, ao, seed);

        row.wsr = res.metrics.final_wsr();
        row.per_user.assign(res.metrics.per_user_rates.data(),
                            res.metrics.per_user_rates.data() + res.metrics.per_user_rates.size());
        row.ncr = res.metrics.ncr;
        row.iterations = res.metrics.iterations;
        row.wall_time_s = config.emit_wall_time ? res.metrics.wall_time_s : 0.0;
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

} // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, int threads) {
    struct Cell {
        const Scheme* scheme;
        double value;
        std::uint64_t seed;
    };
    std::vector<Cell> grid;
    for (const Scheme& s : config.schemes)
        for (double v : config.values)
            for (std::uint64_t seed : config.seeds) grid.push_back({&s, v, seed});

    std::vector<ResultRow> rows(grid.size());
    if (threads <= 1) {
        for (size_t i = 0; i < grid.size(); ++i)
            rows[i] = run_one(config, *grid[i].scheme, grid[i].value, grid[i].seed);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= grid.size()) return;
                rows[i] = run_one(config, *grid[i].scheme, grid[i].value, grid[i].seed);
            }
        };
        std::vector<std::future<void>> pool;
        for (int t = 0; t < threads; ++t) pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    }
    return rows;
}

} // namespace riscbf

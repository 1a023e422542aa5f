#include "riscbf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace riscbf {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

void Scenario::validate() const {
    auto req = [](bool ok, const std::string& msg) {
        if (!ok) throw std::invalid_argument("scenario: " + msg);
    };
    req(B >= 1 && K >= 1 && R >= 1, "B, K, R must all be >= 1");
    req(n_t >= 1 && n_r >= 1 && m >= 1 && n_rf >= 1, "array sizes must be >= 1");
    req(L >= 1, "L must be >= 1");
    req(!los_enabled || L >= 1, "L must be >= 1");
    req(los_enabled || L >= 2, "los_enabled=false requires L >= 2 (L-1 NLoS paths remain)");
    req(n_rf <= n_t, "N_RF must not exceed N_t");
    req(bs_array.count() == n_t, "BS array factorization must multiply to N_t");
    req(user_array.count() == n_r, "user array factorization must multiply to N_r");
    req(ris_array.count() == m, "RIS array factorization must multiply to M");
    req(p_b > 0, "P_b must be positive");
    req(sigma2 > 0, "sigma2 must be positive");
    req(f_c > 0, "f_c must be positive");
    req(spacing_ratio > 0, "spacing_ratio must be positive");
    req(static_cast<int>(bs_positions.size()) == B, "need one BS position per BS");
    req(static_cast<int>(ris_positions.size()) == R, "need one RIS position per RIS");
    req(static_cast<int>(user_positions.size()) == K, "need one user position per user");
    req(omega.size() == K, "omega must have K entries");
    for (int k = 0; k < K; ++k) req(omega(k) > 0, "all omega_k must be positive");
    req(std::abs(omega.sum() - 1.0) < 1e-9, "omega must sum to 1");
}

CVec upa_steering(double omega, double varsigma, int nx, int ny, double spacing_ratio) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("upa_steering: Nx, Ny must be >= 1");
    const int n = nx * ny;
    CVec a(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double c = 2.0 * M_PI * spacing_ratio;
    const double sx = std::sin(omega) * std::sin(varsigma);
    const double cy = std::cos(varsigma);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            double phase = c * (ix * sx + iy * cy);
            a(static_cast<Eigen::Index>(iy) * nx + ix) = scale * cxd(std::cos(phase), std::sin(phase));
        }
    }
    return a;
}

cxd path_gain(double distance_m, bool is_los, double f_c_hz, double nlos_extra_loss_db, Rng& rng) {
    if (!(distance_m > 0)) throw std::invalid_argument("path_gain: distance must be positive");
    double pl_db = 32.4 + 20.0 * std::log10(distance_m) + 20.0 * std::log10(f_c_hz / 1e9);
    double mag = std::pow(10.0, -pl_db / 20.0);
    if (is_los) {
        double th = 2.0 * M_PI * rng.uniform();
        return mag * cxd(std::cos(th), std::sin(th));
    }
    double extra = std::pow(10.0, -nlos_extra_loss_db / 20.0);
    return mag * extra * rng.cnormal();
}

CMat gen_sv_channel(const UpaShape& tx, const UpaShape& rx, const std::vector<PathSpec>& paths,
                    double spacing_ratio) {
    if (paths.empty()) throw std::invalid_argument("gen_sv_channel: paths must be nonempty");
    const int n1 = tx.count(), n2 = rx.count();
    const double scale = std::sqrt(static_cast<double>(n1) * n2 / paths.size());
    CMat h = CMat::Zero(n2, n1);
    for (const PathSpec& p : paths) {
        CVec a_tx = upa_steering(p.aod_azimuth, p.aod_elevation, tx.nx, tx.ny, spacing_ratio);
        CVec a_rx = upa_steering(p.aoa_azimuth, p.aoa_elevation, rx.nx, rx.ny, spacing_ratio);
        h.noalias() += p.gain * (a_rx * a_tx.adjoint());
    }
    return scale * h;
}

CMat assemble_equivalent_channel(const CMat& hbar, const CMat& v_k, const CMat& g_b, const CVec& phi) {
    if (v_k.cols() != g_b.rows() || v_k.cols() != phi.size() || hbar.rows() != v_k.rows() ||
        hbar.cols() != g_b.cols())
        throw std::invalid_argument("assemble_equivalent_channel: dimension mismatch");
    return hbar + v_k * phi.asDiagonal() * g_b;
}

std::vector<std::vector<CMat>> equivalent_channels(const ChannelSet& ch, const CVec& phi) {
    std::vector<std::vector<CMat>> h(ch.B, std::vector<CMat>(ch.K));
    for (int b = 0; b < ch.B; ++b) {
        CMat gb = ch.g_stacked(b);
        for (int k = 0; k < ch.K; ++k)
            h[b][k] = assemble_equivalent_channel(ch.hbar[b][k], ch.v_stacked(k), gb, phi);
    }
    return h;
}

CMat ChannelSet::v_stacked(int k) const {
    CMat vk(n_r, static_cast<Eigen::Index>(R) * m);
    for (int r = 0; r < R; ++r) vk.middleCols(static_cast<Eigen::Index>(r) * m, m) = v[r][k];
    return vk;
}

CMat ChannelSet::g_stacked(int b) const {
    CMat gb(static_cast<Eigen::Index>(R) * m, n_t);
    for (int r = 0; r < R; ++r) gb.middleRows(static_cast<Eigen::Index>(r) * m, m) = g[b][r];
    return gb;
}

ChannelSet ChannelSet::without_ris() const {
    ChannelSet out = *this;
    for (auto& row : out.g)
        for (auto& mat : row) mat.setZero();
    for (auto& row : out.v)
        for (auto& mat : row) mat.setZero();
    return out;
}

// ---------------------------------------------------------------------------
// configuration parsing

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

// "x y z; x y z; ..."
std::vector<Vec3> parse_positions(const std::string& s) {
    std::vector<Vec3> out;
    std::string group;
    std::stringstream ss(s);
    while (std::getline(ss, group, ';')) {
        group = trim(group);
        if (group.empty()) continue;
        std::stringstream gs(group);
        Vec3 p;
        if (!(gs >> p.x >> p.y >> p.z))
            throw std::invalid_argument("config: bad position triple '" + group + "'");
        out.push_back(p);
    }
    return out;
}

std::string format_positions(const std::vector<Vec3>& ps) {
    std::ostringstream os;
    os.precision(17);
    for (size_t i = 0; i < ps.size(); ++i) {
        if (i) os << "; ";
        os << ps[i].x << " " << ps[i].y << " " << ps[i].z;
    }
    return os.str();
}

const char* kKnownKeys[] = {
    "b", "k", "r", "l", "n_t", "n_r", "m", "n_rf",
    "nt_x", "nt_y", "nr_x", "nr_y", "m_x", "m_y",
    "f_c", "p_b", "p_b_dbm", "sigma2", "sigma2_dbm", "spacing_ratio",
    "omega", "bs_positions", "ris_positions", "user_positions",
    "los_enabled", "nlos_extra_loss_db", "direct_extra_loss_db", "unit_path_gains", "strict_paper_angles",
    "seed",
};

// near-square factorization: ny = largest divisor of n with ny <= sqrt(n)
UpaShape near_square(int n) {
    int ny = 1;
    for (int d = 1; d * d <= n; ++d)
        if (n % d == 0) ny = d;
    return {n / ny, ny};
}

} // namespace

ScenarioConfig ScenarioConfig::from_string(const std::string& text) {
    ScenarioConfig cfg;
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
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = lower(trim(line.substr(0, eq)));
        std::string value = trim(line.substr(eq + 1));
        bool known = std::any_of(std::begin(kKnownKeys), std::end(kKnownKeys),
                                 [&](const char* k) { return key == k; });
        if (!known)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        cfg.kv[key] = value;
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_string(ss.str());
}

std::string ScenarioConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

double ScenarioConfig::get_num(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' is not numeric: " + it->second);
    }
}

bool ScenarioConfig::get_flag(const std::string& key, bool fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::string v = lower(trim(it->second));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: key '" + key + "' is not a boolean: " + it->second);
}

Scenario scenario_from_config(const ScenarioConfig& cfg) {
    Scenario sc;
    sc.B = static_cast<int>(cfg.get_num("b", 6));
    sc.K = static_cast<int>(cfg.get_num("k", 4));
    sc.R = static_cast<int>(cfg.get_num("r", 3));
    sc.L = static_cast<int>(cfg.get_num("l", 4));
    sc.n_t = static_cast<int>(cfg.get_num("n_t", 32));
    sc.n_r = static_cast<int>(cfg.get_num("n_r", 8));
    sc.m = static_cast<int>(cfg.get_num("m", 64));
    sc.n_rf = static_cast<int>(cfg.get_num("n_rf", 4));

    sc.bs_array = near_square(sc.n_t);
    sc.user_array = near_square(sc.n_r);
    sc.ris_array = near_square(sc.m);
    if (cfg.has("nt_x")) sc.bs_array.nx = static_cast<int>(cfg.get_num("nt_x", 0));
    if (cfg.has("nt_y")) sc.bs_array.ny = static_cast<int>(cfg.get_num("nt_y", 0));
    if (cfg.has("nr_x")) sc.user_array.nx = static_cast<int>(cfg.get_num("nr_x", 0));
    if (cfg.has("nr_y")) sc.user_array.ny = static_cast<int>(cfg.get_num("nr_y", 0));
    if (cfg.has("m_x")) sc.ris_array.nx = static_cast<int>(cfg.get_num("m_x", 0));
    if (cfg.has("m_y")) sc.ris_array.ny = static_cast<int>(cfg.get_num("m_y", 0));

    sc.f_c = cfg.get_num("f_c", 28e9);
    if (cfg.has("p_b_dbm") && cfg.has("p_b"))
        throw std::invalid_argument("config: give p_b or p_b_dbm, not both");
    if (cfg.has("sigma2_dbm") && cfg.has("sigma2"))
        throw std::invalid_argument("config: give sigma2 or sigma2_dbm, not both");
    sc.p_b = cfg.has("p_b_dbm") ? dbm_to_watt(cfg.get_num("p_b_dbm", 0)) : cfg.get_num("p_b", dbm_to_watt(0.0));
    sc.sigma2 =
        cfg.has("sigma2_dbm") ? dbm_to_watt(cfg.get_num("sigma2_dbm", 0)) : cfg.get_num("sigma2", dbm_to_watt(-85.0));
    sc.spacing_ratio = cfg.get_num("spacing_ratio", 0.5);

    sc.los_enabled = cfg.get_flag("los_enabled", true);
    sc.nlos_extra_loss_db = cfg.get_num("nlos_extra_loss_db", 10.0);
    sc.direct_extra_loss_db = cfg.get_num("direct_extra_loss_db", 0.0);
    sc.unit_path_gains = cfg.get_flag("unit_path_gains", false);
    sc.strict_paper_angles = cfg.get_flag("strict_paper_angles", false);

    if (cfg.has("omega")) {
        std::vector<double> w = parse_list(cfg.get("omega", ""));
        sc.omega = Eigen::Map<RVec>(w.data(), static_cast<Eigen::Index>(w.size()));
    } else {
        sc.omega = RVec::Constant(sc.K, 1.0 / sc.K);
    }

    // default deployment: BS b at (0, 40(b-1), 6), RIS r at (100r, 220, 4);
    // users are filled in by build_scenario when not given explicitly
    if (cfg.has("bs_positions")) {
        sc.bs_positions = parse_positions(cfg.get("bs_positions", ""));
    } else {
        for (int b = 0; b < sc.B; ++b) sc.bs_positions.push_back({0.0, 40.0 * b, 6.0});
    }
    if (cfg.has("ris_positions")) {
        sc.ris_positions = parse_positions(cfg.get("ris_positions", ""));
    } else {
        for (int r = 1; r <= sc.R; ++r) sc.ris_positions.push_back({100.0 * r, 220.0, 4.0});
    }
    if (cfg.has("user_positions")) sc.user_positions = parse_positions(cfg.get("user_positions", ""));
    return sc;
}

ScenarioConfig scenario_to_config(const Scenario& sc) {
    ScenarioConfig cfg;
    auto put_num = [&](const std::string& key, double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        cfg.kv[key] = os.str();
    };
    put_num("b", sc.B);
    put_num("k", sc.K);
    put_num("r", sc.R);
    put_num("l", sc.L);
    put_num("n_t", sc.n_t);
    put_num("n_r", sc.n_r);
    put_num("m", sc.m);
    put_num("n_rf", sc.n_rf);
    put_num("nt_x", sc.bs_array.nx);
    put_num("nt_y", sc.bs_array.ny);
    put_num("nr_x", sc.user_array.nx);
    put_num("nr_y", sc.user_array.ny);
    put_num("m_x", sc.ris_array.nx);
    put_num("m_y", sc.ris_array.ny);
    put_num("f_c", sc.f_c);
    put_num("p_b", sc.p_b);
    put_num("sigma2", sc.sigma2);
    put_num("spacing_ratio", sc.spacing_ratio);
    put_num("nlos_extra_loss_db", sc.nlos_extra_loss_db);
    put_num("direct_extra_loss_db", sc.direct_extra_loss_db);
    cfg.kv["los_enabled"] = sc.los_enabled ? "true" : "false";
    cfg.kv["unit_path_gains"] = sc.unit_path_gains ? "true" : "false";
    cfg.kv["strict_paper_angles"] = sc.strict_paper_angles ? "true" : "false";
    {
        std::ostringstream os;
        os.precision(17);
        for (int k = 0; k < sc.K; ++k) {
            if (k) os << ",";
            os << sc.omega(k);
        }
        cfg.kv["omega"] = os.str();
    }
    cfg.kv["bs_positions"] = format_positions(sc.bs_positions);
    cfg.kv["ris_positions"] = format_positions(sc.ris_positions);
    cfg.kv["user_positions"] = format_positions(sc.user_positions);
    return cfg;
}

namespace {

std::vector<PathSpec> draw_paths(const Scenario& sc, double distance, double extra_loss_db, Rng& rng) {
    int n_paths = sc.los_enabled ? sc.L : sc.L - 1;
    double extra = std::pow(10.0, -extra_loss_db / 20.0);
    std::vector<PathSpec> paths(n_paths);
    double elev_hi = sc.strict_paper_angles ? 2.0 * M_PI : M_PI;
    for (int l = 0; l < n_paths; ++l) {
        PathSpec& p = paths[l];
        p.is_los = sc.los_enabled && l == 0;
        p.aod_azimuth = rng.uniform(0, 2.0 * M_PI);
        p.aod_elevation = rng.uniform(0, elev_hi);
        p.aoa_azimuth = rng.uniform(0, 2.0 * M_PI);
        p.aoa_elevation = rng.uniform(0, elev_hi);
        if (sc.unit_path_gains) {
            p.gain = p.is_los ? cxd(1.0, 0.0) : rng.cnormal();
        } else {
            p.gain = path_gain(distance, p.is_los, sc.f_c, sc.nlos_extra_loss_db, rng);
        }
        p.gain *= extra;
    }
    return paths;
}

} // namespace

std::pair<Scenario, ChannelSet> build_scenario(const ScenarioConfig& config, std::uint64_t seed,
                                               std::map<std::string, std::vector<PathSpec>>* captured_paths) {
    Scenario sc = scenario_from_config(config);

    Rng geom = Rng(seed).fork(0x67656f6d); // geometry stream
    if (sc.user_positions.empty()) {
        for (int k = 0; k < sc.K; ++k) {
            Vec3 p;
            p.x = geom.uniform(0.0, 240.0);
            p.y = geom.uniform(0.0, 160.0);
            p.z = 1.8;
            sc.user_positions.push_back(p);
        }
    }
    sc.validate();

    Rng chan = Rng(seed).fork(0x6368616e); // channel stream
    ChannelSet ch;
    ch.B = sc.B;
    ch.K = sc.K;
    ch.R = sc.R;
    ch.n_t = sc.n_t;
    ch.n_r = sc.n_r;
    ch.m = sc.m;
    ch.hbar.assign(sc.B, std::vector<CMat>(sc.K));
    ch.g.assign(sc.B, std::vector<CMat>(sc.R));
    ch.v.assign(sc.R, std::vector<CMat>(sc.K));

    auto record = [&](const std::string& key, const std::vector<PathSpec>& paths) {
        if (captured_paths) (*captured_paths)[key] = paths;
    };

    for (int b = 0; b < sc.B; ++b)
        for (int k = 0; k < sc.K; ++k) {
            auto paths = draw_paths(sc, dist3(sc.bs_positions[b], sc.user_positions[k]), sc.direct_extra_loss_db, chan);
            record("hbar:" + std::to_string(b) + ":" + std::to_string(k), paths);
            ch.hbar[b][k] = gen_sv_channel(sc.bs_array, sc.user_array, paths, sc.spacing_ratio);
        }
    for (int b = 0; b < sc.B; ++b)
        for (int r = 0; r < sc.R; ++r) {
            auto paths = draw_paths(sc, dist3(sc.bs_positions[b], sc.ris_positions[r]), 0.0, chan);
            record("g:" + std::to_string(b) + ":" + std::to_string(r), paths);
            ch.g[b][r] = gen_sv_channel(sc.bs_array, sc.ris_array, paths, sc.spacing_ratio);
        }
    for (int r = 0; r < sc.R; ++r)
        for (int k = 0; k < sc.K; ++k) {
            auto paths = draw_paths(sc, dist3(sc.ris_positions[r], sc.user_positions[k]), 0.0, chan);
            record("v:" + std::to_string(r) + ":" + std::to_string(k), paths);
            ch.v[r][k] = gen_sv_channel(sc.ris_array, sc.user_array, paths, sc.spacing_ratio);
        }

    return {std::move(sc), std::move(ch)};
}

void dump_channels_csv(const ChannelSet& ch, std::ostream& os) {
    os << "link,i,j,row,col,re,im\n";
    os.precision(17);
    auto emit = [&](const char* name, int i, int j, const CMat& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                os << name << "," << i << "," << j << "," << r << "," << c << "," << m(r, c).real() << ","
                   << m(r, c).imag() << "\n";
    };
    for (int b = 0; b < ch.B; ++b)
        for (int k = 0; k < ch.K; ++k) emit("hbar", b, k, ch.hbar[b][k]);
    for (int b = 0; b < ch.B; ++b)
        for (int r = 0; r < ch.R; ++r) emit("g", b, r, ch.g[b][r]);
    for (int r = 0; r < ch.R; ++r)
        for (int k = 0; k < ch.K; ++k) emit("v", r, k, ch.v[r][k]);
}

} // namespace riscbf

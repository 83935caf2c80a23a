#pragma once

// Seeded Monte Carlo sweeps over SNR, pilot length, snapshot count and
// mixture order, with CSV persistence of the averaged metrics.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "otfs_sbl/bounds.hpp"
#include "otfs_sbl/channel.hpp"
#include "otfs_sbl/detection.hpp"
#include "otfs_sbl/estimators.hpp"
#include "otfs_sbl/pilot.hpp"

namespace otfs {

enum class ChannelMode { Gmm, Case, Profile };

struct RunConfig {
    FrameConfig frame;
    int M_tau = 16;
    int N_nu = 10;
    int G_nu = 20;
    std::vector<int> N_p{80};
    std::vector<int> L{10};
    int L_p = 5;
    std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};
    std::vector<std::string> estimators{"gmm_sbl", "sbl", "omp", "focuss", "lasso", "oracle_mmse"};
    ChannelMode channel = ChannelMode::Gmm;
    char gmm_case = 'A';
    std::string profile_path;  // empty: built-in profile
    int K_true = 1;
    std::vector<int> K_model{2};
    int trials = 500;
    std::uint64_t seed = 1;
    bool frac_doppler = false;
    bool compute_ser = true;
    GmmInit gmm_init = GmmInit::Spread;
    int max_iters = 100;
    int workers = 1;
    bool timing = false;
    std::string out;

    DdGrid grid() const { return DdGrid{M_tau, N_nu, G_nu, frame.M, frame.N}; }
    DelayDopplerSpread spread() const { return {M_tau, N_nu}; }

    GmmSpec channel_gmm() const {
        if (channel == ChannelMode::Case) return otfs::gmm_case(gmm_case);
        return gmm_preset(K_true);
    }

    void validate() const {
        frame.validate();
        require(M_tau >= 1 && N_nu >= 1 && G_nu >= 1, ErrorKind::InvalidConfig, "grid sizes must be positive");
        require(M_tau <= frame.M * frame.N, ErrorKind::InvalidConfig, "M_tau exceeds the frame");
        require(!N_p.empty() && !L.empty() && !snr_db.empty() && !estimators.empty() && !K_model.empty(),
                ErrorKind::InvalidConfig, "sweep axes must be non-empty");
        for (int n : N_p) require(n >= M_tau, ErrorKind::InvalidConfig, "N_p must be at least M_tau");
        for (int l : L) require(l >= 1, ErrorKind::InvalidConfig, "L must be positive");
        for (int k : K_model) require(k >= 1, ErrorKind::InvalidConfig, "K_model entries must be positive");
        require(L_p >= 1, ErrorKind::InvalidConfig, "L_p must be positive");
        require(L_p <= M_tau, ErrorKind::TooManyPaths, "L_p exceeds M_tau");
        require(trials >= 1, ErrorKind::InvalidConfig, "trials must be positive");
        require(workers >= 1, ErrorKind::InvalidConfig, "workers must be positive");
        require(max_iters >= 1, ErrorKind::InvalidConfig, "max_iters must be positive");
        for (const auto& e : estimators) parse_estimator(e);
        channel_gmm().validate();
    }
};

// ---------------------------------------------------------------------------
// Config parsing: "key = value" lines, '#' comments, comma-separated lists.

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    require(pos == v.size() && pos > 0, ErrorKind::ParseError, "key '" + key + "': not a number: '" + v + "'");
    return x;
}

inline long long to_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    require(pos == v.size() && pos > 0, ErrorKind::ParseError, "key '" + key + "': not an integer: '" + v + "'");
    return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw Error(ErrorKind::ParseError, "key '" + key + "': not a boolean: '" + v + "'");
}

template <class T, class F>
std::vector<T> to_list(const std::string& key, const std::string& v, F conv) {
    std::vector<T> out;
    for (const auto& item : split_list(v)) out.push_back(static_cast<T>(conv(key, item)));
    require(!out.empty(), ErrorKind::ParseError, "key '" + key + "': empty list");
    return out;
}

}  // namespace detail

/// Applies one setting. Keys match the config-file grammar documented in the README.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    using namespace detail;
    const std::string v = trim(value);
    if (key == "M") {
        cfg.frame.M = to_int(key, v);
    } else if (key == "N") {
        cfg.frame.N = to_int(key, v);
    } else if (key == "delta_f") {
        cfg.frame.delta_f = to_double(key, v);
        cfg.frame.T = 1.0 / cfg.frame.delta_f;
    } else if (key == "cp_len") {
        cfg.frame.cp_len = to_int(key, v);
    } else if (key == "f_c") {
        cfg.frame.f_c = to_double(key, v);
    } else if (key == "M_tau") {
        cfg.M_tau = static_cast<int>(to_int(key, v));
    } else if (key == "N_nu") {
        cfg.N_nu = static_cast<int>(to_int(key, v));
    } else if (key == "G_nu") {
        cfg.G_nu = static_cast<int>(to_int(key, v));
    } else if (key == "N_p") {
        cfg.N_p = to_list<int>(key, v, to_int);
    } else if (key == "L" || key == "snapshots") {
        cfg.L = to_list<int>(key, v, to_int);
    } else if (key == "L_p") {
        cfg.L_p = static_cast<int>(to_int(key, v));
    } else if (key == "snr_db") {
        cfg.snr_db = to_list<double>(key, v, to_double);
    } else if (key == "estimators") {
        cfg.estimators = split_list(v);
        require(!cfg.estimators.empty(), ErrorKind::ParseError, "key 'estimators': empty list");
        for (const auto& e : cfg.estimators) parse_estimator(e);
    } else if (key == "channel") {
        if (v == "gmm") {
            cfg.channel = ChannelMode::Gmm;
        } else if (v == "profile") {
            cfg.channel = ChannelMode::Profile;
        } else if (v.size() == 5 && v.rfind("case", 0) == 0 && v[4] >= 'A' && v[4] <= 'D') {
            cfg.channel = ChannelMode::Case;
            cfg.gmm_case = v[4];
        } else {
            throw Error(ErrorKind::ParseError, "key 'channel': expected gmm, profile or caseA..caseD, got '" + v + "'");
        }
    } else if (key == "profile_path") {
        cfg.profile_path = v;
    } else if (key == "K_true") {
        cfg.K_true = static_cast<int>(to_int(key, v));
    } else if (key == "K_model") {
        cfg.K_model = to_list<int>(key, v, to_int);
    } else if (key == "trials") {
        cfg.trials = static_cast<int>(to_int(key, v));
    } else if (key == "seed") {
        const long long s = to_int(key, v);
        require(s >= 0, ErrorKind::ParseError, "key 'seed': must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "frac_doppler") {
        cfg.frac_doppler = to_bool(key, v);
    } else if (key == "ser") {
        cfg.compute_ser = to_bool(key, v);
    } else if (key == "gmm_init") {
        if (v == "identity") {
            cfg.gmm_init = GmmInit::Identity;
        } else if (v == "spread") {
            cfg.gmm_init = GmmInit::Spread;
        } else {
            throw Error(ErrorKind::ParseError, "key 'gmm_init': expected identity or spread, got '" + v + "'");
        }
    } else if (key == "max_iters") {
        cfg.max_iters = static_cast<int>(to_int(key, v));
    } else if (key == "workers") {
        cfg.workers = static_cast<int>(to_int(key, v));
    } else if (key == "timing") {
        cfg.timing = to_bool(key, v);
    } else if (key == "out") {
        cfg.out = v;
    } else {
        throw Error(ErrorKind::ParseError, "unknown config key '" + key + "'");
    }
}

inline void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin = "<config>") {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, ErrorKind::ParseError,
                origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        try {
            apply_setting(cfg, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(e.kind(), origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::IoError, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_text(base, ss.str(), path);
    return base;
}

// ---------------------------------------------------------------------------
// Trials

struct SweepPoint {
    int N_p = 80;
    int L = 10;
    double snr_db = 0.0;

    double sigma2() const { return std::pow(10.0, -snr_db / 10.0); }
};

/// One estimator column of the output: estimator kind plus, for GMM-SBL, the model order.
struct Variant {
    EstimatorKind kind = EstimatorKind::GmmSbl;
    int K = 1;

    std::string name() const { return std::string(estimator_name(kind)); }
};

inline std::vector<Variant> variants_of(const RunConfig& cfg) {
    std::vector<Variant> out;
    for (const auto& e : cfg.estimators) {
        const EstimatorKind k = parse_estimator(e);
        if (k == EstimatorKind::GmmSbl) {
            for (int km : cfg.K_model) out.push_back({k, km});
        } else {
            out.push_back({k, 1});
        }
    }
    return out;
}

inline ChannelRealization draw_trial_channel(const RunConfig& cfg, Rng& rng) {
    const GmmSpec gmm = cfg.channel_gmm();
    ChannelRealization ch;
    if (cfg.channel == ChannelMode::Profile) {
        const auto profile = cfg.profile_path.empty() ? reference_profile() : load_profile(cfg.profile_path);
        ch.origin = "profile";
        for (const auto& [l, c] : profile_to_taps(profile, cfg.frame, cfg.spread())) {
            PathSpec p;
            p.l = l;
            p.c = c;
            p.h = draw_gain(gmm, rng, &p.component);
            ch.paths.push_back(p);
        }
    } else {
        ch = sample_channel(gmm, cfg.L_p, cfg.spread(), cfg.frac_doppler, rng);
    }
    return ch;
}

/// Fixed per-point inputs shared by every trial.
struct PointContext {
    SweepPoint point;
    PilotSpec pilot;
    Dictionary dict;
};

inline PointContext make_context(const RunConfig& cfg, const SweepPoint& pt) {
    const DdGrid grid = cfg.grid();
    PilotSpec pilot = generate_pilot(pt.N_p, cfg.seed);
    Dictionary dict = build_dictionary(pilot, grid);
    return {pt, std::move(pilot), std::move(dict)};
}

struct TrialResult {
    std::vector<double> nmse;  // per variant
    std::vector<double> ser;   // per variant, NaN when SER is disabled
    std::vector<double> elapsed_ms;
};

// Random-stream lanes. Streams depend on (seed, trial) only, so every sweep
// point of a trial sees the same channel and the same unit-variance noise.
inline constexpr std::uint64_t kLaneChannel = 1;
inline constexpr std::uint64_t kLanePilotNoise = 2;
inline constexpr std::uint64_t kLaneData = 3;
inline constexpr std::uint64_t kLaneDataNoise = 4;

inline TrialResult run_trial(const RunConfig& cfg, const PointContext& ctx, const std::vector<Variant>& variants,
                             int trial_index) {
    const auto t = static_cast<std::uint64_t>(trial_index);
    Rng ch_rng = substream(cfg.seed, t, kLaneChannel);
    const ChannelRealization ch = draw_trial_channel(cfg, ch_rng);
    const double sigma2 = ctx.point.sigma2();
    const double sigma = std::sqrt(sigma2);

    const ComplexVector clean = pilot_response(ch, ctx.pilot, ctx.dict.grid);
    Rng pn_rng = substream(cfg.seed, t, kLanePilotNoise);
    std::vector<ComplexVector> snapshots;
    snapshots.reserve(static_cast<std::size_t>(ctx.point.L));
    for (int i = 0; i < ctx.point.L; ++i) snapshots.push_back(clean + sigma * complex_normal_vector(pn_rng, clean.size()));

    const Eigen::Index mn = cfg.frame.size();
    const TdChannel truth = td_channel(ch, mn, 2.0 * kPi / static_cast<double>(mn));
    const std::vector<Eigen::Index> support = true_support(ch, ctx.dict);
    const EstimationProblem prob{snapshots, ctx.dict, sigma2, support};

    SymbolFrame frame;
    ComplexVector received;
    if (cfg.compute_ser) {
        Rng data_rng = substream(cfg.seed, t, kLaneData);
        frame = random_qpsk_frame(mn, data_rng);
        Rng dn_rng = substream(cfg.seed, t, kLaneDataNoise);
        received = truth.apply(dd_symbols_to_td(frame.symbols, cfg.frame)) + sigma * complex_normal_vector(dn_rng, mn);
    }

    TrialResult res;
    for (const auto& v : variants) {
        const auto start = std::chrono::steady_clock::now();
        GmmSblConfig gcfg;
        gcfg.K = v.K;
        gcfg.sigma2 = sigma2;
        gcfg.max_iters = cfg.max_iters;
        gcfg.init = cfg.gmm_init;
        const EstimateResult est = run_estimator(v.kind, prob, gcfg);
        const TdChannel h_hat = reconstruct_td(est.h_hat, ctx.dict.grid, cfg.frame);
        res.nmse.push_back(nmse(h_hat, truth));
        if (cfg.compute_ser) {
            const TdLmmseDetector det(h_hat, cfg.frame, sigma2);
            res.ser.push_back(ser(det.detect(received), frame.symbols));
        } else {
            res.ser.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        res.elapsed_ms.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    }
    return res;
}

/// All trials of one sweep point; trial i lands in slot i whatever the worker count.
struct PointResult {
    SweepPoint point;
    std::vector<Variant> variants;
    Eigen::MatrixXd nmse;  // trials x variants
    Eigen::MatrixXd ser;
    Eigen::MatrixXd elapsed_ms;
};

inline PointResult run_point(const RunConfig& cfg, const SweepPoint& pt, int workers) {
    const PointContext ctx = make_context(cfg, pt);
    PointResult out;
    out.point = pt;
    out.variants = variants_of(cfg);
    const auto nv = static_cast<Eigen::Index>(out.variants.size());
    out.nmse.resize(cfg.trials, nv);
    out.ser.resize(cfg.trials, nv);
    out.elapsed_ms.resize(cfg.trials, nv);

    std::atomic<int> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    auto work = [&] {
        for (int t = next++; t < cfg.trials; t = next++) {
            try {
                const TrialResult r = run_trial(cfg, ctx, out.variants, t);
                for (Eigen::Index v = 0; v < nv; ++v) {
                    out.nmse(t, v) = r.nmse[static_cast<std::size_t>(v)];
                    out.ser(t, v) = r.ser[static_cast<std::size_t>(v)];
                    out.elapsed_ms(t, v) = r.elapsed_ms[static_cast<std::size_t>(v)];
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                next = cfg.trials;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (err) std::rethrow_exception(err);
    return out;
}

// ---------------------------------------------------------------------------
// Rows and CSV

struct ResultRow {
    std::string scenario;
    std::string estimator;
    double snr_db = 0.0;
    double nmse = 0.0;
    double nmse_db = 0.0;
    double ser = 0.0;  // NaN when not measured
    int trials = 0;
    double elapsed_ms = 0.0;
    std::uint64_t seed = 0;
    double nmse_se = 0.0;  // standard error of the mean; reported on the console, not in the CSV
};

inline std::string scenario_id(const RunConfig& cfg, const SweepPoint& pt, const Variant& v) {
    std::ostringstream s;
    s << "np" << pt.N_p << "_L" << pt.L << "_lp" << cfg.L_p << '_';
    switch (cfg.channel) {
        case ChannelMode::Gmm: s << "gmm_kt" << cfg.K_true; break;
        case ChannelMode::Case: s << "case" << cfg.gmm_case; break;
        case ChannelMode::Profile: s << "profile_kt" << cfg.K_true; break;
    }
    if (cfg.frac_doppler) s << "_frac";
    if (v.kind == EstimatorKind::GmmSbl) s << "_km" << v.K;
    return s.str();
}

/// Mean over trials in index order, so the sum is schedule-independent.
inline double ordered_mean(const Eigen::VectorXd& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += x(i);
    return s / static_cast<double>(x.size());
}

inline double standard_error(const Eigen::VectorXd& x) {
    if (x.size() < 2) return 0.0;
    const double m = ordered_mean(x);
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += (x(i) - m) * (x(i) - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

inline std::vector<ResultRow> rows_of(const RunConfig& cfg, const PointResult& pr) {
    std::vector<ResultRow> rows;
    for (std::size_t v = 0; v < pr.variants.size(); ++v) {
        const auto col = static_cast<Eigen::Index>(v);
        ResultRow r;
        r.scenario = scenario_id(cfg, pr.point, pr.variants[v]);
        r.estimator = pr.variants[v].name();
        r.snr_db = pr.point.snr_db;
        r.nmse = ordered_mean(pr.nmse.col(col));
        r.nmse_db = 10.0 * std::log10(r.nmse);
        r.ser = cfg.compute_ser ? ordered_mean(pr.ser.col(col)) : std::numeric_limits<double>::quiet_NaN();
        r.trials = cfg.trials;
        r.elapsed_ms = cfg.timing ? ordered_mean(pr.elapsed_ms.col(col)) * cfg.trials : 0.0;
        r.seed = cfg.seed;
        r.nmse_se = standard_error(pr.nmse.col(col));
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<SweepPoint> sweep_points(const RunConfig& cfg) {
    std::vector<SweepPoint> pts;
    for (int np : cfg.N_p) {
        for (int l : cfg.L) {
            for (double snr : cfg.snr_db) pts.push_back({np, l, snr});
        }
    }
    return pts;
}

/// Cartesian sweep N_p x L x SNR (x K_model for GMM-SBL), rows in that order.
inline std::vector<ResultRow> sweep(const RunConfig& cfg,
                                    const std::function<void(const std::vector<ResultRow>&)>& on_point = {}) {
    cfg.validate();
    std::vector<ResultRow> rows;
    for (const auto& pt : sweep_points(cfg)) {
        auto point_rows = rows_of(cfg, run_point(cfg, pt, cfg.workers));
        if (on_point) on_point(point_rows);
        rows.insert(rows.end(), point_rows.begin(), point_rows.end());
    }
    return rows;
}

inline constexpr const char* kCsvHeader = "scenario,estimator,snr_db,nmse,nmse_db,ser,trials,elapsed_ms,seed";

namespace detail {

inline std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_double_field(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return to_double("csv", s);
}

}  // namespace detail

inline std::string format_csv(const std::vector<ResultRow>& rows) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : rows) {
        require(r.scenario.find_first_of(",\n\"") == std::string::npos &&
                    r.estimator.find_first_of(",\n\"") == std::string::npos,
                ErrorKind::InvalidConfig, "CSV text fields must not contain commas, quotes or newlines");
        out += r.scenario + ',' + r.estimator + ',' + detail::fmt_double(r.snr_db) + ',' + detail::fmt_double(r.nmse) +
               ',' + detail::fmt_double(r.nmse_db) + ',' + detail::fmt_double(r.ser) + ',' + std::to_string(r.trials) +
               ',' + detail::fmt_double(r.elapsed_ms) + ',' + std::to_string(r.seed) + '\n';
    }
    return out;
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::IoError, "cannot open '" + path + "' for writing");
    out << format_csv(rows);
    out.flush();
    require(static_cast<bool>(out), ErrorKind::IoError, "write to '" + path + "' failed");
}

inline std::vector<ResultRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)) && line == kCsvHeader, ErrorKind::ParseError,
            "CSV header mismatch");
    std::vector<ResultRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) f.push_back(item);
        require(f.size() == 9, ErrorKind::ParseError, "CSV line " + std::to_string(lineno) + ": expected 9 fields");
        ResultRow r;
        r.scenario = f[0];
        r.estimator = f[1];
        r.snr_db = detail::parse_double_field(f[2]);
        r.nmse = detail::parse_double_field(f[3]);
        r.nmse_db = detail::parse_double_field(f[4]);
        r.ser = detail::parse_double_field(f[5]);
        r.trials = static_cast<int>(detail::to_int("trials", f[6]));
        r.elapsed_ms = detail::parse_double_field(f[7]);
        r.seed = std::stoull(f[8]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<ResultRow> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::IoError, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

}  // namespace otfs

#pragma once

// Clustered delay-Doppler channels: Gaussian-mixture path gains, integer
// delay taps, (optionally fractional) Doppler indices, and the time-domain
// channel matrix built from shifted diagonals.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "otfs_sbl/frame.hpp"
#include "otfs_sbl/rng.hpp"

namespace otfs {

/// Per-path complex Gaussian mixture: sum_k rho_k CN(mu_k, var_k).
struct GmmSpec {
    std::vector<double> weights;
    std::vector<cplx> means;
    std::vector<double> variances;

    std::size_t order() const { return weights.size(); }

    void validate() const {
        require(!weights.empty(), ErrorKind::InvalidConfig, "mixture needs at least one component");
        require(means.size() == weights.size() && variances.size() == weights.size(),
                ErrorKind::InvalidConfig, "mixture parameter lengths differ");
        double total = 0.0;
        for (double w : weights) {
            require(w >= 0.0, ErrorKind::InvalidConfig, "mixture weights must be non-negative");
            total += w;
        }
        require(std::abs(total - 1.0) <= 1e-12, ErrorKind::InvalidConfig, "mixture weights must sum to 1");
        for (double v : variances) require(v > 0.0, ErrorKind::InvalidConfig, "component variances must be positive");
    }

    cplx mean() const {
        cplx m{0.0, 0.0};
        for (std::size_t k = 0; k < order(); ++k) m += weights[k] * means[k];
        return m;
    }

    /// E|h|^2.
    double second_moment() const {
        double s = 0.0;
        for (std::size_t k = 0; k < order(); ++k) s += weights[k] * (std::norm(means[k]) + variances[k]);
        return s;
    }

    double variance() const { return second_moment() - std::norm(mean()); }
};

/// Built-in mixtures. Each has E|h|^2 = 1.
///   K_true = 1: CN(0, 1)
///   K_true = 2: two balanced, well-separated clusters
///   K_true = 4: same as case A
inline GmmSpec gmm_preset(int k_true);

/// Mixture cases A-D (K = 4). The weights are the fixed part of each case;
/// means and variances encode the case descriptions and give E|h|^2 = 1.
inline GmmSpec gmm_case(char label) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (label) {
        case 'A':  // well separated: four QPSK-like centres, small spread
            return {{0.25, 0.25, 0.25, 0.25},
                    {cplx(0.9 * r, 0.9 * r), cplx(-0.9 * r, 0.9 * r), cplx(-0.9 * r, -0.9 * r), cplx(0.9 * r, -0.9 * r)},
                    {0.19, 0.19, 0.19, 0.19}};
        case 'B':  // clustered: two pairs of closely spaced centres
            return {{0.25, 0.25, 0.25, 0.25},
                    {cplx(0.75, 0.15), cplx(0.75, -0.15), cplx(-0.75, 0.15), cplx(-0.75, -0.15)},
                    {0.415, 0.415, 0.415, 0.415}};
        case 'C':  // identical centres, uneven weights and differing variances
            return {{0.4, 0.1, 0.4, 0.1},
                    {cplx(0.5, 0.0), cplx(0.5, 0.0), cplx(0.5, 0.0), cplx(0.5, 0.0)},
                    {0.25, 2.75, 0.25, 2.75}};
        case 'D':  // dominant cluster plus a rare high-amplitude outlier
            return {{0.7, 0.15, 0.1, 0.05},
                    {cplx(0.5, 0.5), cplx(-0.5, 0.5), cplx(0.0, -0.5), cplx(3.0 * r, -3.0 * r)},
                    {0.1, 0.1, 0.1, 0.1}};
        default:
            throw Error(ErrorKind::InvalidConfig, std::string("unknown mixture case '") + label + "'");
    }
}

inline GmmSpec gmm_preset(int k_true) {
    switch (k_true) {
        case 1:
            return {{1.0}, {cplx(0.0, 0.0)}, {1.0}};
        case 2: {
            const double r = 1.0 / std::sqrt(2.0);
            return {{0.5, 0.5}, {cplx(0.8 * r, 0.8 * r), cplx(-0.8 * r, -0.8 * r)}, {0.36, 0.36}};
        }
        case 4:
            return gmm_case('A');
        default:
            throw Error(ErrorKind::InvalidConfig, "no built-in mixture for K_true=" + std::to_string(k_true));
    }
}

/// One DD path: integer delay tap l, Doppler index c = k + kappa, gain h.
struct PathSpec {
    int l = 0;
    double c = 0.0;
    cplx h{0.0, 0.0};
    int component = -1;  // generating mixture component, -1 when not drawn from a mixture

    int doppler_tap() const { return static_cast<int>(std::lround(c)); }
    double fractional_doppler() const { return c - std::round(c); }
};

struct ChannelRealization {
    std::vector<PathSpec> paths;
    std::string origin;  // "gmm" or "profile"

    std::size_t num_paths() const { return paths.size(); }
};

/// Delay / Doppler spreads: delay taps in [0, M_tau), integer Doppler taps in [0, N_nu).
struct DelayDopplerSpread {
    int M_tau = 16;
    int N_nu = 10;
};

inline void validate_path(const PathSpec& p, const DelayDopplerSpread& spread) {
    require(p.l >= 0 && p.l < spread.M_tau, ErrorKind::OutOfGrid, "delay tap outside [0, M_tau)");
    require(std::abs(p.fractional_doppler()) < 0.5 + 1e-12, ErrorKind::OutOfGrid, "fractional Doppler must satisfy |kappa| < 1/2");
}

inline std::size_t draw_component(const GmmSpec& gmm, Rng& rng) {
    const double u = uniform(rng, 0.0, 1.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < gmm.order(); ++k) {
        acc += gmm.weights[k];
        if (u < acc) return k;
    }
    return gmm.order() - 1;
}

inline cplx draw_gain(const GmmSpec& gmm, Rng& rng, int* component = nullptr) {
    const std::size_t k = draw_component(gmm, rng);
    if (component) *component = static_cast<int>(k);
    return gmm.means[k] + complex_normal(rng, gmm.variances[k]);
}

/// Draws L_p paths on distinct delay taps with mixture gains.
inline ChannelRealization sample_channel(const GmmSpec& gmm, int num_paths, const DelayDopplerSpread& spread,
                                         bool frac_doppler, Rng& rng) {
    gmm.validate();
    require(num_paths >= 1, ErrorKind::InvalidConfig, "need at least one path");
    require(num_paths <= spread.M_tau, ErrorKind::TooManyPaths, "L_p exceeds the number of delay taps");
    require(spread.N_nu >= 1, ErrorKind::InvalidConfig, "N_nu must be positive");

    std::vector<int> taps(static_cast<std::size_t>(spread.M_tau));
    std::iota(taps.begin(), taps.end(), 0);
    // partial Fisher-Yates: first num_paths entries are the chosen delays
    for (int i = 0; i < num_paths; ++i) {
        std::uniform_int_distribution<int> pick(i, spread.M_tau - 1);
        std::swap(taps[static_cast<std::size_t>(i)], taps[static_cast<std::size_t>(pick(rng))]);
    }

    ChannelRealization ch;
    ch.origin = "gmm";
    std::uniform_int_distribution<int> doppler(0, spread.N_nu - 1);
    for (int i = 0; i < num_paths; ++i) {
        PathSpec p;
        p.l = taps[static_cast<std::size_t>(i)];
        p.c = doppler(rng);
        if (frac_doppler) {
            double kappa = uniform(rng, -0.5, 0.5);
            if (kappa == -0.5) kappa = 0.0;  // keep |kappa| < 1/2 strictly
            p.c += kappa;
        }
        p.h = draw_gain(gmm, rng, &p.component);
        ch.paths.push_back(p);
    }
    return ch;
}

/// Physical (delay s, Doppler Hz) pairs.
struct PhysicalPath {
    double delay_s = 0.0;
    double doppler_hz = 0.0;
};

/// l = round(tau M delta_f), c = nu N T (kept real).
inline std::vector<std::pair<int, double>> profile_to_taps(const std::vector<PhysicalPath>& profile,
                                                           const FrameConfig& cfg,
                                                           const DelayDopplerSpread& spread) {
    std::vector<std::pair<int, double>> out;
    out.reserve(profile.size());
    const double max_delay = spread.M_tau / cfg.bandwidth();
    const double max_doppler = spread.N_nu / cfg.frame_duration();
    for (const auto& p : profile) {
        require(p.delay_s >= 0.0 && p.delay_s <= max_delay, ErrorKind::OutOfGrid, "delay exceeds M_tau/(M delta_f)");
        require(std::abs(p.doppler_hz) <= max_doppler, ErrorKind::OutOfGrid, "Doppler exceeds N_nu/(N T)");
        const int l = static_cast<int>(std::lround(p.delay_s * cfg.bandwidth()));
        require(l < spread.M_tau, ErrorKind::OutOfGrid, "delay tap rounds outside [0, M_tau)");
        out.emplace_back(l, p.doppler_hz * cfg.frame_duration());
    }
    return out;
}

/// Five-path profile: delays in microseconds and Dopplers in Hz.
inline std::vector<PhysicalPath> reference_profile() {
    return {{2.08e-6, 0.0}, {4.164e-6, 470.0}, {6.246e-6, 940.0}, {8.328e-6, 1410.0}, {10.42e-6, 1880.0}};
}

/// Reads a whitespace-separated table "index delay_us doppler_hz"; '#' starts a comment.
inline std::vector<PhysicalPath> load_profile(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::IoError, "cannot open profile '" + path + "'");
    std::vector<PhysicalPath> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        int index = 0;
        double delay_us = 0.0, doppler = 0.0;
        if (!(ss >> index)) continue;  // blank line
        require(static_cast<bool>(ss >> delay_us >> doppler), ErrorKind::ParseError,
                path + ":" + std::to_string(lineno) + ": expected 'index delay_us doppler_hz'");
        out.push_back({delay_us * 1e-6, doppler});
    }
    require(!out.empty(), ErrorKind::ParseError, "profile '" + path + "' has no paths");
    return out;
}

/// Time-domain channel stored as one diagonal per delay tap:
///   H(p, (p - l) mod size) = d_l(p),  d_l(p) = sum_{paths at l} h exp(j phase_base c (p - l)).
/// The phase uses the unwrapped index p - l, i.e. the sample sent at time p - l
/// (inside the cyclic prefix when p < l). For c * size * phase_base / 2pi integral
/// this equals Pi^l Delta^c exactly.
struct TdChannel {
    Eigen::Index size = 0;
    std::vector<std::pair<int, ComplexVector>> taps;  // sorted by delay, distinct delays

    ComplexVector& diagonal(int l) {
        auto it = std::lower_bound(taps.begin(), taps.end(), l,
                                   [](const auto& t, int v) { return t.first < v; });
        if (it == taps.end() || it->first != l) it = taps.insert(it, {l, ComplexVector::Zero(size)});
        return it->second;
    }

    void add_path(int l, double c, cplx h, double phase_base) {
        require(l >= 0, ErrorKind::OutOfGrid, "negative delay");
        ComplexVector& d = diagonal(l % static_cast<int>(size));
        for (Eigen::Index p = 0; p < size; ++p) {
            d(p) += h * std::polar(1.0, phase_base * c * static_cast<double>(p - l));
        }
    }

    ComplexMatrix to_dense() const {
        ComplexMatrix m = ComplexMatrix::Zero(size, size);
        for (const auto& [l, d] : taps) {
            for (Eigen::Index p = 0; p < size; ++p) m(p, (p - l + size) % size) += d(p);
        }
        return m;
    }

    ComplexVector apply(const ComplexVector& s) const {
        require(s.size() == size, ErrorKind::DimensionMismatch, "input length must equal channel size");
        ComplexVector r = ComplexVector::Zero(size);
        for (const auto& [l, d] : taps) {
            for (Eigen::Index p = 0; p < size; ++p) r(p) += d(p) * s((p - l + size) % size);
        }
        return r;
    }

    double frobenius_sq() const {
        double s = 0.0;
        for (const auto& t : taps) s += t.second.squaredNorm();
        return s;
    }
};

inline TdChannel td_channel(const ChannelRealization& ch, Eigen::Index size, double phase_base) {
    require(size > 0, ErrorKind::DimensionMismatch, "channel size must be positive");
    TdChannel td{size, {}};
    for (const auto& p : ch.paths) td.add_path(p.l, p.c, p.h, phase_base);
    return td;
}

/// ||A - B||_F^2 for two structured channels of equal size.
inline double frobenius_distance_sq(const TdChannel& a, const TdChannel& b) {
    require(a.size == b.size, ErrorKind::DimensionMismatch, "channel sizes differ");
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.taps.size() || j < b.taps.size()) {
        if (j == b.taps.size() || (i < a.taps.size() && a.taps[i].first < b.taps[j].first)) {
            s += a.taps[i++].second.squaredNorm();
        } else if (i == a.taps.size() || b.taps[j].first < a.taps[i].first) {
            s += b.taps[j++].second.squaredNorm();
        } else {
            s += (a.taps[i++].second - b.taps[j++].second).squaredNorm();
        }
    }
    return s;
}

/// Dense sum_i h_i Pi^{l_i} Delta^{c_i} (see TdChannel for the phase convention).
inline ComplexMatrix td_channel_matrix(const ChannelRealization& ch, Eigen::Index size, double phase_base) {
    return td_channel(ch, size, phase_base).to_dense();
}

/// r = H s + eta, eta ~ CN(0, sigma2 I).
inline ComplexVector apply_channel(const ComplexMatrix& h, const ComplexVector& s, double sigma2, Rng& rng) {
    require(h.cols() == s.size(), ErrorKind::DimensionMismatch, "channel columns must match input length");
    require(sigma2 >= 0.0, ErrorKind::NonPositiveNoise, "noise variance must be non-negative");
    return h * s + complex_normal_vector(rng, h.rows(), sigma2);
}

inline ComplexVector apply_channel(const TdChannel& h, const ComplexVector& s, double sigma2, Rng& rng) {
    require(sigma2 >= 0.0, ErrorKind::NonPositiveNoise, "noise variance must be non-negative");
    return h.apply(s) + complex_normal_vector(rng, h.size, sigma2);
}

}  // namespace otfs

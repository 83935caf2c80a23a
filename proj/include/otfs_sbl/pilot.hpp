#pragma once

// Time-domain pilot and the sparse sensing model r_p = Omega h + eta_p over
// a fine delay-Doppler grid of M_tau delay bins by G_nu Doppler bins.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "otfs_sbl/channel.hpp"

namespace otfs {

struct PilotSpec {
    ComplexVector sequence;  // unit-modulus samples
    std::uint64_t seed = 0;

    Eigen::Index length() const { return sequence.size(); }
};

/// Seeded unit-modulus QPSK-alphabet sequence, exp(j(pi/4 + q pi/2)).
inline PilotSpec generate_pilot(Eigen::Index num_pilots, std::uint64_t seed) {
    require(num_pilots >= 1, ErrorKind::InvalidConfig, "pilot length must be positive");
    Rng rng = substream(seed, 0, 0x9170);
    std::uniform_int_distribution<int> quadrant(0, 3);
    PilotSpec p;
    p.seed = seed;
    p.sequence.resize(num_pilots);
    for (Eigen::Index g = 0; g < num_pilots; ++g) {
        p.sequence(g) = std::polar(1.0, kPi / 4.0 + kPi / 2.0 * quadrant(rng));
    }
    return p;
}

/// Fine DD grid geometry shared by the dictionary and reconstruction.
struct DdGrid {
    int M_tau = 16;
    int N_nu = 10;
    int G_nu = 20;
    Eigen::Index M = 32;
    Eigen::Index N = 32;

    Eigen::Index columns() const { return static_cast<Eigen::Index>(M_tau) * G_nu; }
    Eigen::Index col_of(int i, int j) const { return static_cast<Eigen::Index>(i) * G_nu + j; }
    std::pair<int, int> bin_of(Eigen::Index col) const {
        return {static_cast<int>(col / G_nu), static_cast<int>(col % G_nu)};
    }
    /// Doppler index represented by fine bin j: c = j N_nu / G_nu.
    double doppler_index(int j) const { return static_cast<double>(j) * N_nu / G_nu; }
    /// Phase increment per sample per fine Doppler bin, 2 pi N_nu / (G_nu M N).
    double base_phase() const {
        return 2.0 * kPi * N_nu / (static_cast<double>(G_nu) * static_cast<double>(M * N));
    }
    /// Nearest fine Doppler bin of a Doppler index, clamped to the grid.
    int nearest_bin(double c) const {
        const long j = std::lround(c * G_nu / N_nu);
        return static_cast<int>(std::clamp<long>(j, 0, G_nu - 1));
    }
};

struct Dictionary {
    ComplexMatrix omega;  // N_p x D
    DdGrid grid;

    Eigen::Index rows() const { return omega.rows(); }
    Eigen::Index columns() const { return omega.cols(); }
};

/// Column (i, j) = Pi^i Delta_i^j s_p with Pi the N_p-cyclic forward shift and
/// Delta_i = diag(w^0, ..., w^{N_p-i-1}, w^{-i}, ..., w^{-1}) (i != 0), w = exp(j base_phase).
inline Dictionary build_dictionary(const PilotSpec& pilot, const DdGrid& grid) {
    require(grid.M_tau >= 1 && grid.G_nu >= 1 && grid.N_nu >= 1 && pilot.length() >= 1, ErrorKind::EmptyGrid,
            "dictionary grid must be non-empty");
    require(grid.M_tau <= pilot.length(), ErrorKind::InvalidConfig, "M_tau must not exceed the pilot length");
    require(grid.M > 0 && grid.N > 0, ErrorKind::InvalidConfig, "frame dimensions must be positive");
    const Eigen::Index np = pilot.length();
    Dictionary dict{ComplexMatrix(np, grid.columns()), grid};
    const double w = grid.base_phase();
    for (int i = 0; i < grid.M_tau; ++i) {
        for (int j = 0; j < grid.G_nu; ++j) {
            auto col = dict.omega.col(grid.col_of(i, j));
            for (Eigen::Index g = 0; g < np; ++g) {
                // exponent of the Delta_i entry at source position g
                const Eigen::Index e = (i != 0 && g >= np - i) ? g - np : g;
                const cplx modulated = pilot.sequence(g) * std::polar(1.0, w * static_cast<double>(e) * j);
                col((g + i) % np) = modulated;  // forward cyclic shift by i
            }
        }
    }
    return dict;
}

/// L snapshots r_i = Omega h + eta_i, h fixed, fresh noise per snapshot.
inline std::vector<ComplexVector> forward_model(const Dictionary& dict, const ComplexVector& h, double sigma2,
                                                Rng& rng, int num_snapshots) {
    require(h.size() == dict.columns(), ErrorKind::DimensionMismatch, "h must have one entry per dictionary column");
    require(num_snapshots >= 1, ErrorKind::InvalidConfig, "need at least one snapshot");
    require(sigma2 >= 0.0, ErrorKind::NonPositiveNoise, "noise variance must be non-negative");
    const ComplexVector clean = dict.omega * h;
    std::vector<ComplexVector> out;
    out.reserve(static_cast<std::size_t>(num_snapshots));
    for (int i = 0; i < num_snapshots; ++i) out.push_back(clean + complex_normal_vector(rng, clean.size(), sigma2));
    return out;
}

/// Noiseless pilot response of the physical channel: the time-domain channel at
/// pilot size with the frame's per-sample Doppler phase 2 pi / (M N).
inline ComplexVector pilot_response(const ChannelRealization& ch, const PilotSpec& pilot, const DdGrid& grid) {
    const TdChannel td = td_channel(ch, pilot.length(), 2.0 * kPi / static_cast<double>(grid.M * grid.N));
    return td.apply(pilot.sequence);
}

/// Places each path gain on its (delay, nearest fine Doppler) column.
inline ComplexVector sparse_truth(const ChannelRealization& ch, const Dictionary& dict) {
    const DdGrid& g = dict.grid;
    ComplexVector h = ComplexVector::Zero(dict.columns());
    for (const auto& p : ch.paths) {
        require(p.l >= 0 && p.l < g.M_tau, ErrorKind::OutOfGrid, "path delay outside the dictionary grid");
        require(p.c > -0.5 * g.N_nu / g.G_nu - 0.5 && p.c < g.N_nu + 0.5, ErrorKind::OutOfGrid,
                "path Doppler outside the dictionary grid");
        h(g.col_of(p.l, g.nearest_bin(p.c))) += p.h;
    }
    return h;
}

/// Support (column indices) of the grid-mapped channel.
inline std::vector<Eigen::Index> true_support(const ChannelRealization& ch, const Dictionary& dict) {
    std::vector<Eigen::Index> cols;
    for (const auto& p : ch.paths) {
        const Eigen::Index c = dict.grid.col_of(p.l, dict.grid.nearest_bin(p.c));
        if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    }
    std::sort(cols.begin(), cols.end());
    return cols;
}

/// N_p / (M N + N_p).
inline double pilot_overhead(Eigen::Index num_pilots, Eigen::Index M, Eigen::Index N) {
    require(num_pilots >= 0 && M > 0 && N > 0, ErrorKind::InvalidConfig, "pilot overhead needs N_p >= 0 and M, N > 0");
    return static_cast<double>(num_pilots) / static_cast<double>(M * N + num_pilots);
}

}  // namespace otfs

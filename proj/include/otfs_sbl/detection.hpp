#pragma once

// QPSK mapping, LMMSE detection in the DD domain, reconstruction of the
// effective channel from an estimated sparse vector, and NMSE / SER.

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>
#include <cstdint>
#include <vector>

#include "otfs_sbl/channel.hpp"
#include "otfs_sbl/frame.hpp"
#include "otfs_sbl/pilot.hpp"

namespace otfs {

struct SymbolFrame {
    ComplexVector symbols;            // vec of the M x N grid (column stacking)
    std::vector<std::uint8_t> bits;  // 2 bits per symbol, first bit on the real axis
};

// Gray map: bit 0 -> +1, bit 1 -> -1 on each axis; 00 -> (1 + j)/sqrt(2).
inline SymbolFrame qpsk_mod(const std::vector<std::uint8_t>& bits) {
    require(bits.size() % 2 == 0, ErrorKind::OddBitCount, "QPSK needs an even number of bits");
    const double a = 1.0 / std::sqrt(2.0);
    SymbolFrame f;
    f.bits = bits;
    f.symbols.resize(static_cast<Eigen::Index>(bits.size() / 2));
    for (std::size_t i = 0; i < bits.size() / 2; ++i) {
        f.symbols(static_cast<Eigen::Index>(i)) = cplx(bits[2 * i] ? -a : a, bits[2 * i + 1] ? -a : a);
    }
    return f;
}

/// Minimum-distance decision; ties on an axis resolve to bit 0.
inline std::vector<std::uint8_t> qpsk_demod(const ComplexVector& symbols) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(symbols.size()) * 2);
    for (Eigen::Index i = 0; i < symbols.size(); ++i) {
        bits[2 * static_cast<std::size_t>(i)] = symbols(i).real() < 0.0 ? 1 : 0;
        bits[2 * static_cast<std::size_t>(i) + 1] = symbols(i).imag() < 0.0 ? 1 : 0;
    }
    return bits;
}

inline SymbolFrame random_qpsk_frame(Eigen::Index num_symbols, Rng& rng) {
    std::uniform_int_distribution<int> bit(0, 1);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(num_symbols) * 2);
    for (auto& b : bits) b = static_cast<std::uint8_t>(bit(rng));
    return qpsk_mod(bits);
}

/// x = (H^H R^{-1} H + I)^{-1} H^H R^{-1} y.
inline ComplexVector lmmse_detect(const ComplexVector& y, const ComplexMatrix& h, const ComplexMatrix& r_v) {
    require(h.rows() == y.size() && r_v.rows() == y.size() && r_v.cols() == y.size(), ErrorKind::DimensionMismatch,
            "detector dimensions must agree");
    std::optional<HpdFactor> rf;
    try {
        rf.emplace(r_v);
    } catch (const Error& e) {
        throw Error(ErrorKind::SingularCovariance, std::string("noise covariance: ") + e.what());
    }
    const ComplexMatrix w = rf->whiten(h);
    const ComplexVector z = rf->whiten(y);
    ComplexMatrix g = w.adjoint() * w;
    g.diagonal().array() += 1.0;
    g = 0.5 * (g + g.adjoint()).eval();
    return HpdFactor(g).solve(w.adjoint() * z);
}

/// TD channel (size M N) described by an estimated fine-grid vector: entry (i, j)
/// becomes a path at delay i with Doppler index j N_nu / G_nu.
inline TdChannel reconstruct_td(const ComplexVector& h_hat, const DdGrid& grid, const FrameConfig& cfg) {
    require(h_hat.size() == grid.columns(), ErrorKind::DimensionMismatch, "h_hat must have one entry per grid column");
    const Eigen::Index n = cfg.size();
    const double base = 2.0 * kPi / static_cast<double>(n);
    TdChannel td{n, {}};
    ComplexVector phase(n);
    for (int i = 0; i < grid.M_tau; ++i) {
        bool any = false;
        for (int j = 0; j < grid.G_nu; ++j) any = any || h_hat(grid.col_of(i, j)) != cplx(0.0, 0.0);
        if (!any) continue;
        ComplexVector& d = td.diagonal(i % static_cast<int>(n));
        for (int j = 0; j < grid.G_nu; ++j) {
            const cplx g = h_hat(grid.col_of(i, j));
            if (g == cplx(0.0, 0.0)) continue;
            const double w = base * grid.doppler_index(j);
            for (Eigen::Index p = 0; p < n; ++p) d(p) += g * std::polar(1.0, w * static_cast<double>(p - i));
        }
    }
    return td;
}

/// Dense estimated H_DD.
inline ComplexMatrix reconstruct_hdd(const ComplexVector& h_hat, const DdGrid& grid, const FrameConfig& cfg) {
    return dd_effective_channel(reconstruct_td(h_hat, grid, cfg).to_dense(), cfg);
}

/// True H_DD of a channel realization (exact, including fractional Doppler).
inline ComplexMatrix true_hdd(const ChannelRealization& ch, const FrameConfig& cfg) {
    return dd_effective_channel(td_channel_matrix(ch, cfg.size(), 2.0 * kPi / static_cast<double>(cfg.size())), cfg);
}

inline double nmse(const ComplexMatrix& h_hat, const ComplexMatrix& h_true) {
    require(h_hat.rows() == h_true.rows() && h_hat.cols() == h_true.cols(), ErrorKind::DimensionMismatch,
            "NMSE operands must have equal shapes");
    const double ref = h_true.squaredNorm();
    require(ref > 0.0, ErrorKind::ZeroReference, "reference channel has zero energy");
    return (h_hat - h_true).squaredNorm() / ref;
}

/// NMSE of effective DD channels computed on their TD forms. With a rectangular
/// pulse H_DD = U H U^H for a unitary U, so the Frobenius norms coincide.
inline double nmse(const TdChannel& h_hat, const TdChannel& h_true) {
    const double ref = h_true.frobenius_sq();
    require(ref > 0.0, ErrorKind::ZeroReference, "reference channel has zero energy");
    return frobenius_distance_sq(h_hat, h_true) / ref;
}

inline double ser(const ComplexVector& x_hat, const ComplexVector& x_true) {
    require(x_hat.size() == x_true.size(), ErrorKind::LengthMismatch, "symbol vectors differ in length");
    if (x_true.size() == 0) return 0.0;
    const auto a = qpsk_demod(x_hat);
    const auto b = qpsk_demod(x_true);
    Eigen::Index errors = 0;
    for (std::size_t i = 0; i < a.size(); i += 2) errors += (a[i] != b[i] || a[i + 1] != b[i + 1]) ? 1 : 0;
    return static_cast<double>(errors) / static_cast<double>(x_true.size());
}

/// LMMSE detection with R_v = sigma2 I and a rectangular pulse, using the TD
/// structure: x = U (H^H H / sigma2 + I)^{-1} H^H r / sigma2 with U = F_N ⊗ I_M.
/// Equal to lmmse_detect(U r, U H U^H, sigma2 I) up to round-off.
class TdLmmseDetector {
public:
    TdLmmseDetector(const TdChannel& h, const FrameConfig& cfg, double sigma2) : cfg_(cfg), sigma2_(sigma2) {
        require(sigma2 > 0.0, ErrorKind::SingularCovariance, "noise variance must be positive");
        require(h.size == cfg.size(), ErrorKind::DimensionMismatch, "channel size must equal M N");
        const Eigen::Index n = h.size;
        std::vector<Eigen::Triplet<cplx>> trip;
        for (const auto& [l, d] : h.taps) {
            for (Eigen::Index p = 0; p < n; ++p) trip.emplace_back(p, (p - l + n) % n, d(p));
        }
        h_.resize(n, n);
        h_.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseMatrix<cplx> g = (h_.adjoint() * h_) / sigma2;
        Eigen::SparseMatrix<cplx> eye(n, n);
        eye.setIdentity();
        g += eye;
        solver_.compute(g);
        require(solver_.info() == Eigen::Success, ErrorKind::SingularCovariance, "detector factorization failed");
    }

    /// Received TD block (CP removed) to DD symbol estimates, vec of the M x N grid.
    ComplexVector detect(const ComplexVector& r) const {
        require(r.size() == cfg_.size(), ErrorKind::DimensionMismatch, "received block must have M*N samples");
        const ComplexVector rhs = (h_.adjoint() * r) / sigma2_;
        const ComplexVector t = solver_.solve(rhs);
        const DdFrame x = demodulate(t, cfg_);
        return Eigen::Map<const ComplexVector>(x.grid.data(), x.grid.size());
    }

private:
    FrameConfig cfg_;
    double sigma2_;
    Eigen::SparseMatrix<cplx> h_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<cplx>> solver_;
};

/// vec(X_DD) -> TD samples (rectangular pulse).
inline ComplexVector dd_symbols_to_td(const ComplexVector& x, const FrameConfig& cfg) {
    require(x.size() == cfg.size(), ErrorKind::DimensionMismatch, "symbol vector must have M*N entries");
    return modulate(DdFrame{Eigen::Map<const ComplexMatrix>(x.data(), cfg.M, cfg.N)}, cfg);
}

/// TD samples -> vec(Y_DD) (rectangular pulse).
inline ComplexVector td_to_dd_vector(const ComplexVector& r, const FrameConfig& cfg) {
    const DdFrame y = demodulate(r, cfg);
    return Eigen::Map<const ComplexVector>(y.grid.data(), y.grid.size());
}

}  // namespace otfs

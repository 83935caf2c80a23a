#pragma once

// OTFS frame transforms: ISFFT/SFFT between the delay-Doppler (DD) and
// time-frequency (TF) grids, sampled Heisenberg/Wigner transforms with
// diagonal pulse matrices, cyclic prefix handling and the effective DD
// channel of a time-domain channel matrix.
//
// Grids are M x N: rows index delay (or subcarrier), columns index Doppler
// (or symbol time). vec() is column stacking, which matches Eigen's storage.

#include <cmath>
#include <optional>

#include "otfs_sbl/linalg.hpp"

namespace otfs {

struct FrameConfig {
    Eigen::Index M = 32;      // subcarriers / delay bins
    Eigen::Index N = 32;      // symbols / Doppler bins
    double delta_f = 15e3;    // Hz
    double T = 1.0 / 15e3;    // s
    Eigen::Index cp_len = 16; // samples
    double f_c = 4e9;         // Hz

    Eigen::Index size() const { return M * N; }
    double frame_duration() const { return static_cast<double>(N) * T; }
    double bandwidth() const { return static_cast<double>(M) * delta_f; }

    void validate() const {
        require(M > 0 && N > 0 && cp_len > 0, ErrorKind::InvalidConfig, "M, N, P must be positive");
        require(cp_len < M * N, ErrorKind::InvalidConfig, "CP must be shorter than the frame");
        require(delta_f > 0.0 && T > 0.0, ErrorKind::InvalidConfig, "delta_f and T must be positive");
        require(std::abs(T * delta_f - 1.0) <= 1e-12, ErrorKind::InvalidConfig, "T * delta_f must equal 1");
    }
};

/// DD-domain symbol grid X_DD(l, c).
struct DdFrame {
    ComplexMatrix grid;
};

/// TF-domain grid X_TF(m, n).
struct TfFrame {
    ComplexMatrix grid;
};

/// Diagonal pulse samples; nullopt means the rectangular pulse (identity).
using PulseDiag = std::optional<ComplexVector>;

namespace detail {

inline ComplexVector pulse_or_ones(const PulseDiag& g, Eigen::Index m) {
    if (!g) return ComplexVector::Ones(m);
    require(g->size() == m, ErrorKind::DimensionMismatch, "pulse length must equal M");
    return *g;
}

inline void check_grid(const ComplexMatrix& grid, const FrameConfig& cfg) {
    require(grid.rows() == cfg.M && grid.cols() == cfg.N, ErrorKind::DimensionMismatch,
            "grid must be M x N");
}

// (F ⊗ diag(g)) * X for X with M*N rows; each column is viewed as an M x N grid V
// and mapped to diag(g) * V * F^T.
inline ComplexMatrix kron_left(const ComplexMatrix& f, const ComplexVector& g, const ComplexMatrix& x) {
    const Eigen::Index m = g.size();
    const Eigen::Index n = f.rows();
    require(x.rows() == m * n, ErrorKind::DimensionMismatch, "operand must have M*N rows");
    ComplexMatrix out(x.rows(), x.cols());
    const ComplexMatrix ft = f.transpose();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        Eigen::Map<const ComplexMatrix> v(x.col(j).data(), m, n);
        Eigen::Map<ComplexMatrix> o(out.col(j).data(), m, n);
        o.noalias() = g.asDiagonal() * (v * ft);
    }
    return out;
}

}  // namespace detail

/// X_TF = F_M X_DD F_N^H.
inline TfFrame isfft(const DdFrame& x) {
    require(x.grid.size() > 0, ErrorKind::DimensionMismatch, "empty DD grid");
    const ComplexMatrix fm = dft_matrix(x.grid.rows());
    const ComplexMatrix fn = dft_matrix(x.grid.cols());
    return TfFrame{fm * x.grid * fn.adjoint()};
}

/// Y_DD = F_M^H Y_TF F_N.
inline DdFrame sfft(const TfFrame& y) {
    require(y.grid.size() > 0, ErrorKind::DimensionMismatch, "empty TF grid");
    const ComplexMatrix fm = dft_matrix(y.grid.rows());
    const ComplexMatrix fn = dft_matrix(y.grid.cols());
    return DdFrame{fm.adjoint() * y.grid * fn};
}

/// s = (F_N^H ⊗ G_tx) vec(X_DD) = vec(G_tx X_DD F_N^H).
inline ComplexVector modulate(const DdFrame& x, const FrameConfig& cfg, const PulseDiag& g_tx = std::nullopt) {
    detail::check_grid(x.grid, cfg);
    const ComplexVector g = detail::pulse_or_ones(g_tx, cfg.M);
    const ComplexMatrix s = g.asDiagonal() * (x.grid * dft_matrix(cfg.N).adjoint());
    return Eigen::Map<const ComplexVector>(s.data(), s.size());
}

/// Y_DD = G_rx R F_N with R = vec^{-1}(r).
inline DdFrame demodulate(const ComplexVector& r, const FrameConfig& cfg, const PulseDiag& g_rx = std::nullopt) {
    require(r.size() == cfg.size(), ErrorKind::DimensionMismatch, "received block must have M*N samples");
    const ComplexVector g = detail::pulse_or_ones(g_rx, cfg.M);
    Eigen::Map<const ComplexMatrix> rm(r.data(), cfg.M, cfg.N);
    return DdFrame{g.asDiagonal() * (rm * dft_matrix(cfg.N))};
}

inline ComplexVector add_cp(const ComplexVector& s, Eigen::Index cp_len) {
    require(cp_len >= 0 && cp_len < s.size(), ErrorKind::CpTooLong, "CP length must be below block length");
    ComplexVector out(s.size() + cp_len);
    out.head(cp_len) = s.tail(cp_len);
    out.tail(s.size()) = s;
    return out;
}

inline ComplexVector remove_cp(const ComplexVector& r, Eigen::Index cp_len) {
    require(cp_len >= 0 && cp_len < r.size(), ErrorKind::CpTooLong, "CP length must be below block length");
    return r.tail(r.size() - cp_len);
}

/// H_DD = (F_N ⊗ G_rx) H (F_N^H ⊗ G_tx).
inline ComplexMatrix dd_effective_channel(const ComplexMatrix& h, const FrameConfig& cfg,
                                          const PulseDiag& g_tx = std::nullopt,
                                          const PulseDiag& g_rx = std::nullopt) {
    require(h.rows() == cfg.size() && h.cols() == cfg.size(), ErrorKind::DimensionMismatch,
            "channel matrix must be MN x MN");
    const ComplexMatrix fn = dft_matrix(cfg.N);
    const ComplexVector grx = detail::pulse_or_ones(g_rx, cfg.M);
    const ComplexVector gtx = detail::pulse_or_ones(g_tx, cfg.M);
    const ComplexMatrix left = detail::kron_left(fn, grx, h);
    // X (F_N^H ⊗ G_tx) = ((F_N ⊗ G_tx^H) X^H)^H
    return detail::kron_left(fn, gtx.conjugate(), left.adjoint()).adjoint();
}

/// R_v,DD = sigma^2 [I_N ⊗ G_rx G_rx^H], returned dense.
inline ComplexMatrix noise_cov_dd(const FrameConfig& cfg, double sigma2, const PulseDiag& g_rx = std::nullopt) {
    require(sigma2 > 0.0, ErrorKind::NonPositiveNoise, "noise variance must be positive");
    const ComplexVector g = detail::pulse_or_ones(g_rx, cfg.M);
    ComplexVector d(cfg.size());
    for (Eigen::Index n = 0; n < cfg.N; ++n) d.segment(n * cfg.M, cfg.M) = sigma2 * g.cwiseAbs2().cast<cplx>();
    return d.asDiagonal();
}

}  // namespace otfs

#pragma once

// Bayesian Cramér-Rao bounds for the sparse channel vector and a numerical
// check of the heavy-tail envelope of the zero-mean GMM prior.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "otfs_sbl/channel.hpp"
#include "otfs_sbl/pilot.hpp"
#include "otfs_sbl/rng.hpp"

namespace otfs {

/// D-dimensional mixture with diagonal component covariances.
struct DiagGmm {
    RealVector rho;
    std::vector<ComplexVector> means;  // K x D
    std::vector<RealVector> vars;      // K x D

    int components() const { return static_cast<int>(rho.size()); }
    Eigen::Index dim() const { return vars.empty() ? 0 : vars.front().size(); }

    void validate() const {
        require(rho.size() >= 1 && means.size() == static_cast<std::size_t>(rho.size()) &&
                    vars.size() == means.size(),
                ErrorKind::InvalidConfig, "mixture needs matching weights, means and variances");
        require(std::abs(rho.sum() - 1.0) <= 1e-12 && rho.minCoeff() >= 0.0, ErrorKind::InvalidConfig,
                "mixture weights must lie on the simplex");
        for (std::size_t k = 0; k < vars.size(); ++k) {
            require(vars[k].size() == dim() && means[k].size() == dim(), ErrorKind::DimensionMismatch,
                    "all components must share the dimension");
            require(vars[k].minCoeff() > 0.0, ErrorKind::InvalidConfig, "component variances must be positive");
        }
    }
};

/// Every coordinate shares the scalar component: CN(mu_k 1, var_k I).
inline DiagGmm expand_gmm(const GmmSpec& g, Eigen::Index dim) {
    g.validate();
    DiagGmm out;
    const auto K = static_cast<Eigen::Index>(g.weights.size());
    out.rho = Eigen::Map<const RealVector>(g.weights.data(), K);
    for (Eigen::Index k = 0; k < K; ++k) {
        out.means.push_back(ComplexVector::Constant(dim, g.means[static_cast<std::size_t>(k)]));
        out.vars.push_back(RealVector::Constant(dim, g.variances[static_cast<std::size_t>(k)]));
    }
    return out;
}

/// Zero-mean single component CN(0, diag(gamma)).
inline DiagGmm single_gaussian(const RealVector& gamma) {
    DiagGmm out;
    out.rho = RealVector::Ones(1);
    out.means.push_back(ComplexVector::Zero(gamma.size()));
    out.vars.push_back(gamma);
    return out;
}

inline ComplexVector sample_gmm(const DiagGmm& g, Rng& rng) {
    std::discrete_distribution<int> pick(g.rho.data(), g.rho.data() + g.rho.size());
    const auto k = static_cast<std::size_t>(pick(rng));
    ComplexVector h(g.dim());
    for (Eigen::Index r = 0; r < g.dim(); ++r) h(r) = g.means[k](r) + complex_normal(rng, g.vars[k](r));
    return h;
}

/// ln CN(h; mu_k, diag(var_k)) for every k.
inline RealVector component_log_densities(const DiagGmm& g, const ComplexVector& h) {
    RealVector out(g.components());
    for (int k = 0; k < g.components(); ++k) {
        const auto& v = g.vars[static_cast<std::size_t>(k)];
        const auto d = (h - g.means[static_cast<std::size_t>(k)]).cwiseAbs2();
        out(k) = -(d.array() / v.array()).sum() - v.array().log().sum() -
                 static_cast<double>(h.size()) * std::log(kPi);
    }
    return out;
}

inline double gmm_log_density(const DiagGmm& g, const ComplexVector& h) {
    const RealVector lc = component_log_densities(g, h);
    RealVector lw(g.components());
    for (int k = 0; k < g.components(); ++k) lw(k) = std::log(g.rho(k)) + lc(k);
    const double m = lw.maxCoeff();
    return m + std::log((lw.array() - m).exp().sum());
}

/// Local weights w_k(h) = rho_k p_k(h) / p(h).
inline RealVector local_weights(const DiagGmm& g, const ComplexVector& h) {
    const RealVector lc = component_log_densities(g, h);
    RealVector lw(g.components());
    for (int k = 0; k < g.components(); ++k) lw(k) = std::log(g.rho(k)) + lc(k);
    const double m = lw.maxCoeff();
    RealVector w = (lw.array() - m).exp();
    return w / w.sum();
}

/// Per-sample prior information: sum_k w_k Gamma_k^{-1} - sum_k w_k s_k s_k^H + b b^H,
/// s_k = -Gamma_k^{-1}(h - mu_k), b = sum_k w_k s_k.
inline ComplexMatrix prior_information_sample(const DiagGmm& g, const ComplexVector& h) {
    const Eigen::Index d = g.dim();
    const RealVector w = local_weights(g, h);
    ComplexMatrix j = ComplexMatrix::Zero(d, d);
    ComplexVector b = ComplexVector::Zero(d);
    for (int k = 0; k < g.components(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const RealVector inv = g.vars[kk].cwiseInverse();
        const ComplexVector s = -(inv.cast<cplx>().asDiagonal() * (h - g.means[kk]));
        j.diagonal() += (w(k) * inv).cast<cplx>();
        j.noalias() -= w(k) * s * s.adjoint();
        b += w(k) * s;
    }
    j.noalias() += b * b.adjoint();
    return j;
}

struct PriorFim {
    ComplexMatrix J;
    double trace_se = 0.0;  // batch-means standard error of tr(J)
    long samples = 0;
};

inline PriorFim prior_fim_mc_detail(const DiagGmm& g, long samples, const std::vector<Rng*>& streams) {
    g.validate();
    require(samples >= 1, ErrorKind::InvalidConfig, "need at least one Monte Carlo sample");
    const auto shards = static_cast<long>(streams.size());
    const Eigen::Index d = g.dim();
    std::vector<ComplexMatrix> partial(static_cast<std::size_t>(shards), ComplexMatrix::Zero(d, d));
    std::vector<long> counts(static_cast<std::size_t>(shards), 0);
    auto work = [&](long s) {
        const long n = samples / shards + (s < samples % shards ? 1 : 0);
        auto& acc = partial[static_cast<std::size_t>(s)];
        Rng& rng = *streams[static_cast<std::size_t>(s)];
        for (long i = 0; i < n; ++i) acc += prior_information_sample(g, sample_gmm(g, rng));
        counts[static_cast<std::size_t>(s)] = n;
    };
    if (shards == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (long s = 0; s < shards; ++s) pool.emplace_back(work, s);
        for (auto& t : pool) t.join();
    }
    PriorFim out;
    out.J = ComplexMatrix::Zero(d, d);
    for (const auto& p : partial) out.J += p;  // fixed shard order
    out.J /= static_cast<double>(samples);
    out.J = 0.5 * (out.J + out.J.adjoint()).eval();
    out.samples = samples;
    if (shards > 1) {
        RealVector means(shards);
        for (long s = 0; s < shards; ++s) {
            const auto ss = static_cast<std::size_t>(s);
            means(s) = counts[ss] > 0 ? partial[ss].trace().real() / static_cast<double>(counts[ss]) : 0.0;
        }
        const double mu = means.mean();
        const double var = (means.array() - mu).square().sum() / static_cast<double>(shards - 1);
        out.trace_se = std::sqrt(var / static_cast<double>(shards));
    }
    return out;
}

/// Monte Carlo prior FIM from a single stream.
inline ComplexMatrix prior_fim_mc(const DiagGmm& g, long samples, Rng& rng) {
    return prior_fim_mc_detail(g, samples, {&rng}).J;
}

/// Sharded Monte Carlo prior FIM; shard s draws from substream(seed, s, lane).
/// Deterministic given (seed, shards) regardless of thread timing.
inline PriorFim prior_fim_mc_sharded(const DiagGmm& g, long samples, std::uint64_t seed, int shards) {
    require(shards >= 1, ErrorKind::InvalidConfig, "shard count must be positive");
    std::vector<Rng> rngs;
    for (int s = 0; s < shards; ++s) rngs.push_back(substream(seed, static_cast<std::uint64_t>(s), 0xB0C7));
    std::vector<Rng*> ptrs;
    for (auto& r : rngs) ptrs.push_back(&r);
    return prior_fim_mc_detail(g, samples, ptrs);
}

struct FimEstimate {
    ComplexMatrix J_data;
    ComplexMatrix J_prior;
    double bound = 0.0;
    long mc_samples = 0;
    double bound_se = 0.0;  // delta-method spread unavailable; batch estimate when sharded
};

/// J_data = (L / sigma2) Omega^H Omega.
inline ComplexMatrix data_information(const ComplexMatrix& omega, double sigma2, int L) {
    require(sigma2 > 0.0, ErrorKind::NonPositiveNoise, "noise variance must be positive");
    require(L >= 1, ErrorKind::InvalidConfig, "need at least one snapshot");
    ComplexMatrix j = (static_cast<double>(L) / sigma2) * (omega.adjoint() * omega);
    return 0.5 * (j + j.adjoint());
}

inline double trace_inverse_information(const ComplexMatrix& j) {
    try {
        return HpdFactor(j).trace_inverse();
    } catch (const Error& e) {
        throw Error(ErrorKind::SingularInformation, std::string("information matrix not invertible: ") + e.what());
    }
}

/// tr([(L/sigma2) Omega^H Omega + Gamma^{-1}]^{-1}).
inline FimEstimate bcrlb_closed_form(const ComplexMatrix& omega, double sigma2, int L, const RealVector& gamma) {
    require(gamma.size() == omega.cols(), ErrorKind::DimensionMismatch, "gamma length must equal D");
    require(gamma.minCoeff() > 0.0, ErrorKind::SingularInformation, "prior variances must be positive");
    FimEstimate f;
    f.J_data = data_information(omega, sigma2, L);
    f.J_prior = gamma.cwiseInverse().cast<cplx>().asDiagonal();
    f.bound = trace_inverse_information(f.J_data + f.J_prior);
    return f;
}

inline FimEstimate bcrlb_closed_form(const Dictionary& dict, double sigma2, int L, const RealVector& gamma) {
    return bcrlb_closed_form(dict.omega, sigma2, L, gamma);
}

/// Same bound with the prior information estimated by Monte Carlo.
inline FimEstimate bcrlb_gmm_mc(const ComplexMatrix& omega, double sigma2, int L, const DiagGmm& g, long samples,
                                Rng& rng) {
    require(g.dim() == omega.cols(), ErrorKind::DimensionMismatch, "prior dimension must equal D");
    FimEstimate f;
    f.J_data = data_information(omega, sigma2, L);
    f.J_prior = prior_fim_mc(g, samples, rng);
    f.mc_samples = samples;
    f.bound = trace_inverse_information(f.J_data + f.J_prior);
    return f;
}

/// Variant reusing a precomputed prior FIM (the prior term does not depend on L or sigma2).
inline FimEstimate bcrlb_with_prior(const ComplexMatrix& omega, double sigma2, int L, const PriorFim& prior) {
    require(prior.J.rows() == omega.cols(), ErrorKind::DimensionMismatch, "prior dimension must equal D");
    FimEstimate f;
    f.J_data = data_information(omega, sigma2, L);
    f.J_prior = prior.J;
    f.mc_samples = prior.samples;
    f.bound = trace_inverse_information(f.J_data + f.J_prior);
    return f;
}

struct SparsityCheckReport {
    long points = 0;
    long violations = 0;
    double log_C = 0.0;
    double max_log_ratio = -std::numeric_limits<double>::infinity();  // max of ln p(h) - ln(C prod |h_r|^-2)
};

/// ln C for the envelope p(h) <= C prod_r |h_r|^{-2}: each zero-mean component gives
/// C_k = (pi e)^{-D} via x e^{-x} <= e^{-1}, so C = sum_k rho_k C_k = (pi e)^{-D}.
inline double sparsity_log_constant(const DiagGmm& g) {
    return -static_cast<double>(g.dim()) * std::log(kPi * std::exp(1.0));
}

/// Evaluates the envelope at each point (log domain, relative slack `tol`).
inline SparsityCheckReport sparsity_bound_check(const DiagGmm& g, const std::vector<ComplexVector>& points,
                                                double tol = 1e-12) {
    g.validate();
    for (const auto& m : g.means) {
        require(m.cwiseAbs().maxCoeff() == 0.0, ErrorKind::InvalidConfig, "envelope requires zero-mean components");
    }
    SparsityCheckReport rep;
    rep.log_C = sparsity_log_constant(g);
    for (const auto& h : points) {
        require(h.size() == g.dim(), ErrorKind::DimensionMismatch, "point dimension must equal D");
        ++rep.points;
        if (h.cwiseAbs().minCoeff() == 0.0) continue;  // right side is infinite
        const double rhs = rep.log_C - h.cwiseAbs2().array().log().sum();
        const double diff = gmm_log_density(g, h) - rhs;
        rep.max_log_ratio = std::max(rep.max_log_ratio, diff);
        if (diff > tol * std::max(1.0, std::abs(rhs))) ++rep.violations;
    }
    return rep;
}

}  // namespace otfs

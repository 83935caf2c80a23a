#pragma once

// Sparse channel estimators over a dictionary r_p = Omega h + eta:
//   - GMM-SBL: EM over a K-component zero-mean Gaussian-mixture prior with
//     per-component diagonal variances and per-snapshot responsibilities
//   - SBL: the K = 1 special case
//   - OMP, FOCUSS, LASSO: single-snapshot baselines, averaged over snapshots
//   - Oracle MMSE: linear MMSE restricted to the true support

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "otfs_sbl/linalg.hpp"
#include "otfs_sbl/pilot.hpp"

namespace otfs {

/// How the K component variance vectors start.
enum class GmmInit {
    Identity,  // Gamma_k = I for every k (all components identical)
    Spread,    // Gamma_k = s_k I with s_k log-spaced around 1 (breaks the K-fold symmetry)
};

struct GmmSblConfig {
    int K = 2;
    int max_iters = 100;
    double gamma_floor = 1e-12;
    double conv_tol = 1e-6;  // relative change of the evidence
    double sigma2 = 1.0;
    GmmInit init = GmmInit::Spread;
    double spread_ratio = 10.0;  // s_max / s_min for GmmInit::Spread

    void validate() const {
        require(K >= 1, ErrorKind::InvalidConfig, "K must be >= 1");
        require(max_iters >= 1, ErrorKind::InvalidConfig, "max_iters must be >= 1");
        require(gamma_floor > 0.0, ErrorKind::InvalidConfig, "gamma_floor must be positive");
        require(sigma2 > 0.0, ErrorKind::NonPositiveNoise, "sigma2 must be positive");
        require(conv_tol >= 0.0, ErrorKind::InvalidConfig, "conv_tol must be non-negative");
        require(spread_ratio >= 1.0, ErrorKind::InvalidConfig, "spread_ratio must be >= 1");
    }
};

struct GmmSblState {
    std::vector<RealVector> gamma;       // K vectors of length D
    RealVector rho;                      // K
    std::vector<ComplexMatrix> mu;       // K matrices D x L (posterior means per snapshot)
    std::vector<RealVector> sigma_diag;  // K vectors of length D
    Eigen::MatrixXd log_density;         // L x K, ln CN(r_i; 0, A_k)
    Eigen::MatrixXd resp;                // L x K responsibilities
    std::vector<double> evidence;        // incomplete-data log-likelihood per E-step

    int components() const { return static_cast<int>(gamma.size()); }
};

struct EstimateResult {
    ComplexMatrix per_snapshot;  // D x L
    ComplexVector h_hat;         // snapshot average, length D
    int iterations = 0;
    bool converged = false;
    std::string method;
};

namespace detail {

inline ComplexMatrix stack_snapshots(const std::vector<ComplexVector>& snapshots, Eigen::Index rows) {
    require(!snapshots.empty(), ErrorKind::NoSnapshots, "at least one snapshot is required");
    ComplexMatrix r(rows, static_cast<Eigen::Index>(snapshots.size()));
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        require(snapshots[i].size() == rows, ErrorKind::DimensionMismatch, "snapshot length must equal N_p");
        r.col(static_cast<Eigen::Index>(i)) = snapshots[i];
    }
    require_finite(r, "snapshots");
    return r;
}

inline double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

inline EstimateResult finish(ComplexMatrix per_snapshot, int iterations, bool converged, std::string method) {
    EstimateResult res;
    res.h_hat = per_snapshot.rowwise().mean();
    res.per_snapshot = std::move(per_snapshot);
    res.iterations = iterations;
    res.converged = converged;
    res.method = std::move(method);
    return res;
}

}  // namespace detail

/// Marginal covariance A = sigma2 I + Omega diag(gamma) Omega^H.
inline ComplexMatrix marginal_covariance(const ComplexMatrix& omega, const RealVector& gamma, double sigma2) {
    require(gamma.size() == omega.cols(), ErrorKind::DimensionMismatch, "gamma length must equal D");
    const ComplexMatrix b = omega * gamma.cwiseSqrt().cast<cplx>().asDiagonal();
    ComplexMatrix a = ComplexMatrix::Identity(omega.rows(), omega.rows()) * sigma2;
    a.selfadjointView<Eigen::Lower>().rankUpdate(b);
    a.triangularView<Eigen::StrictlyUpper>() = a.adjoint();
    return a;
}

/// Full posterior covariance Gamma - Gamma Omega^H A^{-1} Omega Gamma (covariance form).
inline ComplexMatrix posterior_covariance(const ComplexMatrix& omega, const RealVector& gamma, double sigma2) {
    const HpdFactor a(marginal_covariance(omega, gamma, sigma2));
    const ComplexMatrix w = a.whiten(omega * gamma.cast<cplx>().asDiagonal());
    ComplexMatrix s = -(w.adjoint() * w);
    s.diagonal() += gamma.cast<cplx>();
    return s;
}

inline GmmSblState initial_state(const GmmSblConfig& cfg, Eigen::Index dim) {
    cfg.validate();
    GmmSblState st;
    st.rho = RealVector::Constant(cfg.K, 1.0 / cfg.K);
    for (int k = 0; k < cfg.K; ++k) {
        double scale = 1.0;
        if (cfg.init == GmmInit::Spread && cfg.K > 1) {
            // log-spaced in [ratio^{-1/2}, ratio^{1/2}]
            const double t = static_cast<double>(k) / (cfg.K - 1) - 0.5;
            scale = std::pow(cfg.spread_ratio, t);
        }
        st.gamma.push_back(RealVector::Constant(dim, scale));
    }
    return st;
}

/// E-step: posterior moments per component, log densities, responsibilities,
/// and the evidence for the current (rho, Gamma). Appends to state.evidence.
inline void e_step(GmmSblState& st, const ComplexMatrix& snapshots, const Dictionary& dict, const GmmSblConfig& cfg) {
    const ComplexMatrix& omega = dict.omega;
    const Eigen::Index np = omega.rows();
    const Eigen::Index len = snapshots.cols();
    require(snapshots.rows() == np, ErrorKind::DimensionMismatch, "snapshot length must equal N_p");
    require(len >= 1, ErrorKind::NoSnapshots, "at least one snapshot is required");
    const int K = st.components();
    st.mu.resize(static_cast<std::size_t>(K));
    st.sigma_diag.resize(static_cast<std::size_t>(K));
    st.log_density.resize(len, K);
    const double log_pi_np = static_cast<double>(np) * std::log(kPi);

    for (int k = 0; k < K; ++k) {
        const RealVector& gamma = st.gamma[static_cast<std::size_t>(k)];
        std::optional<HpdFactor> a;
        try {
            a.emplace(marginal_covariance(omega, gamma, cfg.sigma2));
        } catch (const Error& e) {
            throw Error(ErrorKind::NumericalBreakdown, std::string("A_k factorization failed: ") + e.what());
        }
        const ComplexMatrix li = a->inverse_factor();
        ComplexMatrix w, z;
        w.noalias() = li * omega;      // L^{-1} Omega
        z.noalias() = li * snapshots;  // L^{-1} r
        // mu = Gamma Omega^H A^{-1} r = Gamma W^H Z
        st.mu[static_cast<std::size_t>(k)] = gamma.cast<cplx>().asDiagonal() * (w.adjoint() * z);
        const RealVector wn = w.colwise().squaredNorm().transpose();
        st.sigma_diag[static_cast<std::size_t>(k)] =
            (gamma.array() - gamma.array().square() * wn.array()).max(0.0).matrix();
        const double logdet = a->log_det();
        for (Eigen::Index i = 0; i < len; ++i) {
            st.log_density(i, k) = -(z.col(i).squaredNorm() + logdet + log_pi_np);
        }
    }

    st.resp.resize(len, K);
    double evidence = 0.0;
    for (Eigen::Index i = 0; i < len; ++i) {
        Eigen::VectorXd lw(K);
        for (int k = 0; k < K; ++k) lw(k) = std::log(st.rho(k)) + st.log_density(i, k);
        const double lse = detail::log_sum_exp(lw);
        require(std::isfinite(lse), ErrorKind::NumericalBreakdown, "non-finite evidence");
        st.resp.row(i) = (lw.array() - lse).exp().transpose();
        st.resp.row(i) /= st.resp.row(i).sum();
        evidence += lse;
    }
    st.evidence.push_back(evidence);
}

/// M-step: responsibility-weighted second moments and mixture weights.
inline void m_step(GmmSblState& st, const GmmSblConfig& cfg) {
    const int K = st.components();
    const Eigen::Index len = st.resp.rows();
    require(len >= 1 && st.mu.size() == static_cast<std::size_t>(K), ErrorKind::InvalidConfig,
            "m_step requires a preceding e_step");
    constexpr double kNegligible = 1e-300;
    for (int k = 0; k < K; ++k) {
        const double nk = st.resp.col(k).sum();
        st.rho(k) = nk / static_cast<double>(len);
        if (nk <= kNegligible) continue;  // keep previous Gamma
        const ComplexMatrix& mu = st.mu[static_cast<std::size_t>(k)];
        RealVector second = RealVector::Zero(mu.rows());
        for (Eigen::Index i = 0; i < len; ++i) second += st.resp(i, k) * mu.col(i).cwiseAbs2();
        second /= nk;
        second += st.sigma_diag[static_cast<std::size_t>(k)];
        st.gamma[static_cast<std::size_t>(k)] = second.cwiseMax(cfg.gamma_floor);
    }
    st.rho /= st.rho.sum();
}

/// Conditional-mean estimate per snapshot, sum_k pi_{i,k} mu_{i,k}.
inline ComplexMatrix conditional_mean(const GmmSblState& st) {
    ComplexMatrix h = ComplexMatrix::Zero(st.mu.front().rows(), st.mu.front().cols());
    for (int k = 0; k < st.components(); ++k) {
        h += st.mu[static_cast<std::size_t>(k)] * st.resp.col(k).cast<cplx>().asDiagonal();
    }
    return h;
}

struct GmmSblFit {
    EstimateResult estimate;
    GmmSblState state;
};

inline GmmSblFit gmm_sbl_fit(const std::vector<ComplexVector>& snapshots, const Dictionary& dict,
                             const GmmSblConfig& cfg) {
    cfg.validate();
    const ComplexMatrix r = detail::stack_snapshots(snapshots, dict.rows());
    GmmSblState st = initial_state(cfg, dict.columns());
    bool converged = false;
    int iterations = 0;
    for (int t = 0; t < cfg.max_iters; ++t) {
        e_step(st, r, dict, cfg);
        if (t > 0) {
            const double prev = st.evidence[st.evidence.size() - 2];
            const double cur = st.evidence.back();
            if (std::abs(cur - prev) <= cfg.conv_tol * std::abs(prev)) {
                converged = true;
                break;
            }
        }
        m_step(st, cfg);
        ++iterations;
    }
    if (!converged) e_step(st, r, dict, cfg);
    ComplexMatrix h = conditional_mean(st);
    return {detail::finish(std::move(h), iterations, converged, cfg.K == 1 ? "sbl" : "gmm_sbl"), std::move(st)};
}

/// Single-Gaussian SBL: GMM-SBL with K = 1.
inline EstimateResult sbl_fit(const std::vector<ComplexVector>& snapshots, const Dictionary& dict,
                              GmmSblConfig cfg) {
    cfg.K = 1;
    return gmm_sbl_fit(snapshots, dict, cfg).estimate;
}

// ---------------------------------------------------------------------------
// Single-snapshot baselines

struct OmpOptions {
    double rel_change_tol = 1e-2;  // stop once the residual energy drops by less than this fraction
};

inline ComplexVector omp_single(const ComplexVector& r, const ComplexMatrix& omega, double sigma2,
                                const OmpOptions& opt = {}) {
    const Eigen::Index np = omega.rows();
    const Eigen::Index d = omega.cols();
    const RealVector col_norm = omega.colwise().norm().transpose();
    ComplexVector h = ComplexVector::Zero(d);
    std::vector<Eigen::Index> support;
    ComplexVector residual = r;
    double energy = residual.squaredNorm();
    const double noise_floor = static_cast<double>(np) * sigma2;
    ComplexVector coef;

    while (static_cast<Eigen::Index>(support.size()) < std::min(np, d)) {
        if (energy <= noise_floor) break;
        const RealVector corr = (omega.adjoint() * residual).cwiseAbs().cwiseQuotient(col_norm);
        Eigen::Index best = -1;
        double best_val = -1.0;
        for (Eigen::Index c = 0; c < d; ++c) {
            if (corr(c) > best_val && std::find(support.begin(), support.end(), c) == support.end()) {
                best_val = corr(c);
                best = c;
            }
        }
        if (best < 0) break;
        support.push_back(best);
        ComplexMatrix sub(np, static_cast<Eigen::Index>(support.size()));
        for (std::size_t s = 0; s < support.size(); ++s) sub.col(static_cast<Eigen::Index>(s)) = omega.col(support[s]);
        const ComplexVector trial = sub.colPivHouseholderQr().solve(r);
        const ComplexVector trial_res = r - sub * trial;
        const double new_energy = trial_res.squaredNorm();
        if (energy - new_energy < opt.rel_change_tol * energy) {
            support.pop_back();
            break;
        }
        coef = trial;
        residual = trial_res;
        energy = new_energy;
    }
    for (std::size_t s = 0; s < support.size(); ++s) h(support[s]) = coef(static_cast<Eigen::Index>(s));
    return h;
}

/// Orthogonal matching pursuit with a noise-floor / residual-change stopping rule.
inline EstimateResult omp(const std::vector<ComplexVector>& snapshots, const Dictionary& dict, double sigma2,
                          const OmpOptions& opt = {}) {
    const ComplexMatrix r = detail::stack_snapshots(snapshots, dict.rows());
    ComplexMatrix h(dict.columns(), r.cols());
    for (Eigen::Index i = 0; i < r.cols(); ++i) h.col(i) = omp_single(r.col(i), dict.omega, sigma2, opt);
    return detail::finish(std::move(h), 0, true, "omp");
}

struct FocussOptions {
    double p = 0.8;
    double tol = 1e-6;
    int max_iters = 500;
    double prune = 1e-10;  // columns with |h_r| below prune * max|h| leave the active set
};

inline ComplexVector focuss_single(const ComplexVector& r, const ComplexMatrix& omega, double sigma2,
                                   const FocussOptions& opt, int& iterations, bool& converged) {
    const Eigen::Index np = omega.rows();
    const Eigen::Index d = omega.cols();
    iterations = 0;
    converged = true;
    if (r.squaredNorm() == 0.0) return ComplexVector::Zero(d);

    auto regularizer = [&](const ComplexMatrix& gram) {
        // sigma2 I; a tiny trace-relative floor keeps the noiseless case solvable
        return std::max(sigma2, 1e-12 * gram.diagonal().real().sum() / static_cast<double>(np));
    };

    ComplexMatrix gram = omega * omega.adjoint();
    gram.diagonal().array() += regularizer(gram);
    ComplexVector h = omega.adjoint() * HpdFactor(gram).solve(r);

    std::vector<Eigen::Index> active(static_cast<std::size_t>(d));
    std::iota(active.begin(), active.end(), 0);
    converged = false;
    for (int it = 0; it < opt.max_iters; ++it) {
        const double hmax = h.cwiseAbs().maxCoeff();
        if (hmax == 0.0) {
            converged = true;
            break;
        }
        std::vector<Eigen::Index> next;
        for (Eigen::Index c : active) {
            if (std::abs(h(c)) > opt.prune * hmax) next.push_back(c);
        }
        active.swap(next);
        const auto na = static_cast<Eigen::Index>(active.size());
        ComplexMatrix aw(np, na);
        RealVector w(na);
        for (Eigen::Index s = 0; s < na; ++s) {
            const Eigen::Index c = active[static_cast<std::size_t>(s)];
            w(s) = std::pow(std::abs(h(c)), 1.0 - opt.p / 2.0);
            aw.col(s) = omega.col(c) * w(s);
        }
        ComplexMatrix g = aw * aw.adjoint();
        g.diagonal().array() += regularizer(g);
        ComplexVector q;
        try {
            q = aw.adjoint() * HpdFactor(g).solve(r);
        } catch (const Error&) {
            break;  // stagnation: keep the last iterate
        }
        ComplexVector next_h = ComplexVector::Zero(d);
        for (Eigen::Index s = 0; s < na; ++s) next_h(active[static_cast<std::size_t>(s)]) = w(s) * q(s);
        ++iterations;
        const double change = (next_h - h).norm() / std::max(h.norm(), std::numeric_limits<double>::min());
        h = std::move(next_h);
        if (!h.allFinite()) break;
        if (change < opt.tol) {
            converged = true;
            break;
        }
    }
    return h;
}

/// Regularized FOCUSS (l_p reweighted minimum norm), per snapshot.
inline EstimateResult focuss(const std::vector<ComplexVector>& snapshots, const Dictionary& dict, double sigma2,
                             const FocussOptions& opt = {}) {
    const ComplexMatrix r = detail::stack_snapshots(snapshots, dict.rows());
    ComplexMatrix h(dict.columns(), r.cols());
    int max_it = 0;
    bool all_conv = true;
    for (Eigen::Index i = 0; i < r.cols(); ++i) {
        int it = 0;
        bool conv = false;
        h.col(i) = focuss_single(r.col(i), dict.omega, sigma2, opt, it, conv);
        max_it = std::max(max_it, it);
        all_conv = all_conv && conv;
    }
    return detail::finish(std::move(h), max_it, all_conv, "focuss");
}

struct LassoOptions {
    double lambda = 1e-3;
    double tol = 1e-8;  // max coordinate change per sweep
    int max_sweeps = 5000;
};

/// 0.5-scaled objective ||r - Omega h||^2 + lambda ||h||_1.
inline double lasso_objective(const ComplexVector& r, const ComplexMatrix& omega, const ComplexVector& h,
                              double lambda) {
    return (r - omega * h).squaredNorm() + lambda * h.cwiseAbs().sum();
}

/// Complex soft threshold: shrinks |z| by t, keeps the phase.
inline cplx soft_threshold(cplx z, double t) {
    const double a = std::abs(z);
    return a <= t ? cplx(0.0, 0.0) : z * ((a - t) / a);
}

/// Cyclic coordinate descent with an active-set inner loop. `objective_trace`
/// (optional) receives the objective after each full sweep.
inline ComplexVector lasso_single(const ComplexVector& r, const ComplexMatrix& omega, const LassoOptions& opt,
                                  int& sweeps, bool& converged, std::vector<double>* objective_trace = nullptr) {
    const Eigen::Index d = omega.cols();
    const RealVector norm2 = omega.colwise().squaredNorm().transpose();
    ComplexVector h = ComplexVector::Zero(d);
    ComplexVector residual = r;
    sweeps = 0;
    converged = false;
    const double t = opt.lambda / 2.0;

    auto update = [&](Eigen::Index c) {
        if (norm2(c) == 0.0) return 0.0;
        const cplx old = h(c);
        const cplx z = omega.col(c).dot(residual) + norm2(c) * old;  // omega_c^H (res + omega_c h_c)
        const cplx nv = soft_threshold(z, t) / norm2(c);
        if (nv != old) {
            residual.noalias() -= omega.col(c) * (nv - old);
            h(c) = nv;
        }
        return std::abs(nv - old);
    };

    std::vector<Eigen::Index> active;
    while (sweeps < opt.max_sweeps) {
        double full_change = 0.0;
        for (Eigen::Index c = 0; c < d; ++c) full_change = std::max(full_change, update(c));
        ++sweeps;
        if (objective_trace) objective_trace->push_back(lasso_objective(r, omega, h, opt.lambda));
        if (full_change < opt.tol) {
            converged = true;
            break;
        }
        active.clear();
        for (Eigen::Index c = 0; c < d; ++c) {
            if (h(c) != cplx(0.0, 0.0)) active.push_back(c);
        }
        // Inner sweeps over the active set work on q = Omega_S^H residual with the
        // active Gram matrix, so each update costs |S| instead of 2 N_p.
        const auto na = static_cast<Eigen::Index>(active.size());
        ComplexMatrix sub(omega.rows(), na);
        for (Eigen::Index s = 0; s < na; ++s) sub.col(s) = omega.col(active[static_cast<std::size_t>(s)]);
        const ComplexMatrix gram = sub.adjoint() * sub;
        ComplexVector q = sub.adjoint() * residual;
        while (sweeps < opt.max_sweeps) {
            double change = 0.0;
            for (Eigen::Index s = 0; s < na; ++s) {
                const Eigen::Index c = active[static_cast<std::size_t>(s)];
                const cplx old = h(c);
                const cplx nv = soft_threshold(q(s) + norm2(c) * old, t) / norm2(c);
                if (nv != old) {
                    q.noalias() -= gram.col(s) * (nv - old);
                    h(c) = nv;
                    change = std::max(change, std::abs(nv - old));
                }
            }
            ++sweeps;
            if (objective_trace) objective_trace->push_back(lasso_objective(r, omega, h, opt.lambda));
            if (change < opt.tol) break;
        }
        residual = r - omega * h;
    }
    return h;
}

inline EstimateResult lasso(const std::vector<ComplexVector>& snapshots, const Dictionary& dict,
                            const LassoOptions& opt = {}) {
    const ComplexMatrix r = detail::stack_snapshots(snapshots, dict.rows());
    ComplexMatrix h(dict.columns(), r.cols());
    int max_sweeps = 0;
    bool all_conv = true;
    for (Eigen::Index i = 0; i < r.cols(); ++i) {
        int sw = 0;
        bool conv = false;
        h.col(i) = lasso_single(r.col(i), dict.omega, opt, sw, conv);
        max_sweeps = std::max(max_sweeps, sw);
        all_conv = all_conv && conv;
    }
    return detail::finish(std::move(h), max_sweeps, all_conv, "lasso");
}

/// Genie-aided MMSE on a known support with unit prior variance and R_v = sigma2 I.
inline EstimateResult oracle_mmse(const std::vector<ComplexVector>& snapshots, const Dictionary& dict,
                                  const std::vector<Eigen::Index>& support, double sigma2) {
    require(!support.empty(), ErrorKind::EmptySupport, "oracle support must be non-empty");
    require(sigma2 > 0.0, ErrorKind::NonPositiveNoise, "noise variance must be positive");
    const ComplexMatrix r = detail::stack_snapshots(snapshots, dict.rows());
    const auto ns = static_cast<Eigen::Index>(support.size());
    ComplexMatrix sub(dict.rows(), ns);
    for (Eigen::Index s = 0; s < ns; ++s) {
        const Eigen::Index c = support[static_cast<std::size_t>(s)];
        require(c >= 0 && c < dict.columns(), ErrorKind::OutOfGrid, "support index outside the dictionary");
        sub.col(s) = dict.omega.col(c);
    }
    ComplexMatrix info = sub.adjoint() * sub / sigma2;
    info.diagonal().array() += 1.0;
    info = 0.5 * (info + info.adjoint()).eval();
    const ComplexMatrix coef = HpdFactor(info).solve(sub.adjoint() * r / sigma2);
    ComplexMatrix h = ComplexMatrix::Zero(dict.columns(), r.cols());
    for (Eigen::Index s = 0; s < ns; ++s) h.row(support[static_cast<std::size_t>(s)]) = coef.row(s);
    return detail::finish(std::move(h), 0, true, "oracle_mmse");
}

// ---------------------------------------------------------------------------
// Selection by name

enum class EstimatorKind { GmmSbl, Sbl, Omp, Focuss, Lasso, OracleMmse };

inline EstimatorKind parse_estimator(std::string_view name) {
    if (name == "gmm_sbl") return EstimatorKind::GmmSbl;
    if (name == "sbl") return EstimatorKind::Sbl;
    if (name == "omp") return EstimatorKind::Omp;
    if (name == "focuss") return EstimatorKind::Focuss;
    if (name == "lasso") return EstimatorKind::Lasso;
    if (name == "oracle_mmse") return EstimatorKind::OracleMmse;
    throw Error(ErrorKind::UnknownEstimator, "unknown estimator '" + std::string(name) + "'");
}

inline std::string_view estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::GmmSbl: return "gmm_sbl";
        case EstimatorKind::Sbl: return "sbl";
        case EstimatorKind::Omp: return "omp";
        case EstimatorKind::Focuss: return "focuss";
        case EstimatorKind::Lasso: return "lasso";
        case EstimatorKind::OracleMmse: return "oracle_mmse";
    }
    return "unknown";
}

/// Inputs common to every estimator in one trial.
struct EstimationProblem {
    const std::vector<ComplexVector>& snapshots;
    const Dictionary& dict;
    double sigma2;
    const std::vector<Eigen::Index>& support;  // used by the oracle only
};

inline EstimateResult run_estimator(EstimatorKind kind, const EstimationProblem& prob, const GmmSblConfig& gmm_cfg) {
    switch (kind) {
        case EstimatorKind::GmmSbl: return gmm_sbl_fit(prob.snapshots, prob.dict, gmm_cfg).estimate;
        case EstimatorKind::Sbl: return sbl_fit(prob.snapshots, prob.dict, gmm_cfg);
        case EstimatorKind::Omp: return omp(prob.snapshots, prob.dict, prob.sigma2);
        case EstimatorKind::Focuss: return focuss(prob.snapshots, prob.dict, prob.sigma2);
        case EstimatorKind::Lasso: return lasso(prob.snapshots, prob.dict);
        case EstimatorKind::OracleMmse: return oracle_mmse(prob.snapshots, prob.dict, prob.support, prob.sigma2);
    }
    throw Error(ErrorKind::UnknownEstimator, "unhandled estimator kind");
}

}  // namespace otfs

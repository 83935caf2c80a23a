#include <Eigen/Eigenvalues>

#include "test_support.hpp"

using namespace otfs;
using otfs::test::random_matrix;

namespace {

// Gauss-Hermite rule for a standard normal (Golub-Welsch).
std::pair<RealVector, RealVector> gauss_hermite_normal(int n) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) t(k, k - 1) = t(k - 1, k) = std::sqrt(k / 2.0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const RealVector nodes = std::sqrt(2.0) * es.eigenvalues();
    const RealVector weights = es.eigenvectors().row(0).transpose().array().square();
    return {nodes, weights};
}

// -d^2 ln p / dh_a^* dh_b by central differences on the real coordinates.
ComplexMatrix fd_wirtinger_information(const DiagGmm& g, const ComplexVector& h, double step) {
    const Eigen::Index d = h.size();
    auto coord = [&](ComplexVector v, Eigen::Index idx, double delta) {
        if (idx < d) {
            v(idx) += delta;
        } else {
            v(idx - d) += cplx(0.0, delta);
        }
        return v;
    };
    Eigen::MatrixXd hess(2 * d, 2 * d);
    for (Eigen::Index u = 0; u < 2 * d; ++u) {
        for (Eigen::Index v = 0; v < 2 * d; ++v) {
            const double fpp = gmm_log_density(g, coord(coord(h, u, step), v, step));
            const double fpm = gmm_log_density(g, coord(coord(h, u, step), v, -step));
            const double fmp = gmm_log_density(g, coord(coord(h, u, -step), v, step));
            const double fmm = gmm_log_density(g, coord(coord(h, u, -step), v, -step));
            hess(u, v) = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
        }
    }
    ComplexMatrix j(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            const double re = hess(a, b) + hess(d + a, d + b);
            const double im = hess(d + a, b) - hess(a, d + b);
            j(a, b) = -0.25 * cplx(re, im);
        }
    }
    return j;
}

DiagGmm two_cluster_2d() {
    DiagGmm g;
    g.rho = RealVector(2);
    g.rho << 0.4, 0.6;
    ComplexVector m1(2), m2(2);
    m1 << cplx(0.9, 0.0), cplx(0.7, 0.0);
    m2 << cplx(-0.6, 0.0), cplx(-0.8, 0.0);
    g.means = {m1, m2};
    RealVector v1(2), v2(2);
    v1 << 0.4, 0.3;
    v2 << 0.35, 0.5;
    g.vars = {v1, v2};
    return g;
}

}  // namespace

TEST(DiagGmm, ExpandAndValidate) {
    const DiagGmm g = expand_gmm(gmm_case('B'), 3);
    EXPECT_EQ(g.components(), 4);
    EXPECT_EQ(g.dim(), 3);
    EXPECT_NO_THROW(g.validate());
    EXPECT_EQ(g.means[1](2), cplx(0.75, -0.15));
    DiagGmm bad = g;
    bad.vars[0](1) = 0.0;
    EXPECT_THROW(bad.validate(), Error);
    bad = g;
    bad.rho(0) = 0.5;
    EXPECT_THROW(bad.validate(), Error);
}

TEST(DiagGmm, LogDensityAndWeights) {
    const DiagGmm s = single_gaussian(RealVector::Constant(2, 2.0));
    ComplexVector h(2);
    h << cplx(1.0, 1.0), cplx(0.0, -1.0);
    // ln CN(h; 0, 2I) = -2 ln(2 pi) - |h|^2 / 2
    EXPECT_NEAR(gmm_log_density(s, h), -2.0 * std::log(2.0 * kPi) - 1.5, 1e-14);
    const DiagGmm g = two_cluster_2d();
    const RealVector w = local_weights(g, h);
    EXPECT_NEAR(w.sum(), 1.0, 1e-15);
    const RealVector lc = component_log_densities(g, h);
    const double direct = std::log(0.4 * std::exp(lc(0)) + 0.6 * std::exp(lc(1)));
    EXPECT_NEAR(gmm_log_density(g, h), direct, 1e-12);
    // far from both means the weights stay finite
    ComplexVector far = ComplexVector::Constant(2, cplx(80.0, 0.0));
    EXPECT_TRUE(local_weights(g, far).allFinite());
}

TEST(ClosedForm, IdentityGivesHalfD) {
    const Eigen::Index d = 7;
    const auto f = bcrlb_closed_form(ComplexMatrix::Identity(d, d), 1.0, 1, RealVector::Ones(d));
    EXPECT_NEAR(f.bound, d / 2.0, 1e-12);
    EXPECT_EQ(f.mc_samples, 0);
}

TEST(ClosedForm, EigenvalueOracle) {
    Rng rng = substream(60, 0);
    const ComplexMatrix omega = random_matrix(12, 20, rng);
    RealVector gamma(20);
    for (Eigen::Index i = 0; i < 20; ++i) gamma(i) = uniform(rng, 0.2, 2.0);
    const auto f = bcrlb_closed_form(omega, 0.3, 4, gamma);
    ComplexMatrix j = (4.0 / 0.3) * omega.adjoint() * omega;
    j.diagonal() += gamma.cwiseInverse().cast<cplx>();
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(j);
    EXPECT_NEAR(f.bound, es.eigenvalues().cwiseInverse().sum(), 1e-9);
    EXPECT_TRUE(is_hermitian(f.J_data, 1e-12));
}

TEST(ClosedForm, MonotoneInSnapshotsAndNoise) {
    const Dictionary dict = build_dictionary(generate_pilot(80, 1), DdGrid{});
    const RealVector gamma = RealVector::Ones(dict.columns());
    double prev = std::numeric_limits<double>::infinity();
    for (int L : {1, 10, 100, 1000}) {
        const double b = bcrlb_closed_form(dict, 1.0, L, gamma).bound;
        EXPECT_LT(b, prev);
        prev = b;
    }
    // rank(Omega) <= N_p, so D - N_p directions keep only the prior information
    const double floor = static_cast<double>(dict.columns() - dict.rows());
    EXPECT_GT(prev, floor);
    EXPECT_LT(prev - floor, 0.5 * (bcrlb_closed_form(dict, 1.0, 1, gamma).bound - floor));
    prev = std::numeric_limits<double>::infinity();
    for (double sigma2 : {10.0, 1.0, 0.1, 0.01}) {
        const double b = bcrlb_closed_form(dict, sigma2, 1, gamma).bound;
        EXPECT_LT(b, prev);
        prev = b;
    }
}

TEST(ClosedForm, Errors) {
    const ComplexMatrix omega = ComplexMatrix::Identity(3, 3);
    RealVector gamma = RealVector::Ones(3);
    gamma(1) = 0.0;
    try {
        bcrlb_closed_form(omega, 1.0, 1, gamma);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularInformation);
    }
    EXPECT_THROW(bcrlb_closed_form(omega, 1.0, 1, RealVector::Ones(2)), Error);
    EXPECT_THROW(trace_inverse_information(ComplexMatrix::Zero(3, 3)), Error);
    EXPECT_THROW(data_information(omega, 0.0, 1), Error);
}

TEST(PriorFimMc, SingleGaussianReducesToInverseVariance) {
    RealVector gamma(3);
    gamma << 0.5, 1.0, 2.0;
    const DiagGmm g = single_gaussian(gamma);
    Rng rng = substream(61, 0);
    const ComplexMatrix j = prior_fim_mc(g, 100000, rng);
    // every sample equals Gamma^{-1} exactly for K = 1
    const ComplexMatrix expected = gamma.cwiseInverse().cast<cplx>().asDiagonal();
    EXPECT_LT((j - expected).norm(), 1e-10);
}

TEST(PriorFimMc, IdenticalComponentsDegenerate) {
    RealVector gamma(2);
    gamma << 0.7, 1.3;
    DiagGmm g = single_gaussian(gamma);
    g.rho = RealVector::Constant(2, 0.5);
    g.means.push_back(g.means[0]);
    g.vars.push_back(gamma);
    Rng rng = substream(62, 0);
    const ComplexMatrix j = prior_fim_mc(g, 2000, rng);
    EXPECT_LT((j - ComplexMatrix(gamma.cwiseInverse().cast<cplx>().asDiagonal())).norm(), 1e-10);
}

TEST(PriorFimMc, HermitianAndShardDeterministic) {
    const DiagGmm g = expand_gmm(gmm_case('D'), 4);
    const PriorFim a = prior_fim_mc_sharded(g, 5000, 7, 4);
    const PriorFim b = prior_fim_mc_sharded(g, 5000, 7, 4);
    EXPECT_EQ(a.J, b.J);
    EXPECT_TRUE(is_hermitian(a.J, 1e-12));
    EXPECT_GT(a.trace_se, 0.0);
    EXPECT_EQ(a.samples, 5000);
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.J);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(PriorFimMc, TwoClustersMatchQuadratureOracle) {
    const DiagGmm g = two_cluster_2d();
    // E_p[-Hessian] = sum_k rho_k E_{CN(mu_k, Gamma_k)}[...], 4 real dims per component
    const auto [z, w] = gauss_hermite_normal(14);
    ComplexMatrix oracle = ComplexMatrix::Zero(2, 2);
    for (int k = 0; k < 2; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const RealVector sd = (g.vars[kk] / 2.0).cwiseSqrt();
        for (Eigen::Index a = 0; a < z.size(); ++a)
            for (Eigen::Index b = 0; b < z.size(); ++b)
                for (Eigen::Index c = 0; c < z.size(); ++c)
                    for (Eigen::Index e = 0; e < z.size(); ++e) {
                        ComplexVector h(2);
                        h(0) = g.means[kk](0) + cplx(sd(0) * z(a), sd(0) * z(b));
                        h(1) = g.means[kk](1) + cplx(sd(1) * z(c), sd(1) * z(e));
                        oracle += g.rho(k) * w(a) * w(b) * w(c) * w(e) * fd_wirtinger_information(g, h, 1e-4);
                    }
    }
    const PriorFim mc = prior_fim_mc_sharded(g, 100000, 11, 1);
    const double scale = oracle.cwiseAbs().maxCoeff();
    for (Eigen::Index a = 0; a < 2; ++a) {
        for (Eigen::Index b = 0; b < 2; ++b) {
            const double tol = 0.02 * std::max(std::abs(oracle(a, b)), 0.05 * scale);
            EXPECT_NEAR(std::abs(mc.J(a, b) - oracle(a, b)), 0.0, tol) << a << "," << b << " oracle " << oracle(a, b);
        }
    }
    // clusters sit along (1, 1), which couples the two coordinates
    EXPECT_LT(oracle(0, 1).real(), 0.0);
}

TEST(BcrlbMc, SingleGaussianAgreesWithClosedForm) {
    Rng rng = substream(63, 0);
    const ComplexMatrix omega = random_matrix(8, 12, rng);
    RealVector gamma(12);
    for (Eigen::Index i = 0; i < 12; ++i) gamma(i) = uniform(rng, 0.3, 1.5);
    const double closed = bcrlb_closed_form(omega, 0.5, 2, gamma).bound;
    const auto mc = bcrlb_gmm_mc(omega, 0.5, 2, single_gaussian(gamma), 100000, rng);
    EXPECT_NEAR(mc.bound, closed, 0.05 * closed);
    EXPECT_EQ(mc.mc_samples, 100000);
}

TEST(BcrlbMc, MonotoneInSnapshotsAndSnr) {
    const Dictionary dict = build_dictionary(generate_pilot(40, 1), DdGrid{8, 4, 4, 8, 8});
    const DiagGmm g = expand_gmm(gmm_case('A'), dict.columns());
    const PriorFim prior = prior_fim_mc_sharded(g, 4000, 3, 2);
    double prev = std::numeric_limits<double>::infinity();
    for (int L : {1, 2, 5, 10}) {
        const double b = bcrlb_with_prior(dict.omega, 1.0, L, prior).bound;
        EXPECT_LT(b, prev);
        prev = b;
    }
    prev = std::numeric_limits<double>::infinity();
    for (double snr_db : {0.0, 5.0, 10.0, 15.0, 20.0}) {
        const double b = bcrlb_with_prior(dict.omega, std::pow(10.0, -snr_db / 10.0), 1, prior).bound;
        EXPECT_LT(b, prev);
        prev = b;
    }
    EXPECT_THROW(bcrlb_with_prior(ComplexMatrix::Identity(3, 3), 1.0, 1, prior), Error);
}

TEST(SparsityBound, ScalarEqualityBoundary) {
    const DiagGmm g = single_gaussian(RealVector::Ones(1));
    EXPECT_NEAR(sparsity_log_constant(g), -std::log(kPi) - 1.0, 1e-15);
    const auto rep = sparsity_bound_check(g, {ComplexVector::Constant(1, cplx(1.0, 0.0))});
    EXPECT_EQ(rep.violations, 0);
    EXPECT_NEAR(rep.max_log_ratio, 0.0, 1e-12);
}

TEST(SparsityBound, ZeroCoordinateIsTriviallySatisfied) {
    const DiagGmm g = single_gaussian(RealVector::Ones(2));
    ComplexVector h(2);
    h << 0.0, cplx(1.0, 0.0);
    const auto rep = sparsity_bound_check(g, {h});
    EXPECT_EQ(rep.points, 1);
    EXPECT_EQ(rep.violations, 0);
}

TEST(SparsityBound, RandomPointsTwoComponents) {
    DiagGmm g;
    g.rho = RealVector(2);
    g.rho << 0.3, 0.7;
    g.means = {ComplexVector::Zero(4), ComplexVector::Zero(4)};
    RealVector v1(4), v2(4);
    v1 << 0.1, 0.5, 1.0, 2.0;
    v2 << 3.0, 0.2, 0.7, 0.05;
    g.vars = {v1, v2};
    Rng rng = substream(64, 0);
    std::vector<ComplexVector> pts;
    for (int i = 0; i < 10000; ++i) {
        // mixture draws plus wide-scale points to probe the tails
        pts.push_back(i % 2 == 0 ? sample_gmm(g, rng) : complex_normal_vector(rng, 4, std::pow(10.0, uniform(rng, -3, 2))));
    }
    const auto rep = sparsity_bound_check(g, pts);
    EXPECT_EQ(rep.points, 10000);
    EXPECT_EQ(rep.violations, 0);
    EXPECT_LE(rep.max_log_ratio, 0.0);
}

TEST(SparsityBound, RejectsNonZeroMeans) {
    EXPECT_THROW(sparsity_bound_check(expand_gmm(gmm_case('A'), 2), {}), Error);
}

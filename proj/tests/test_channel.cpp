#include <fstream>

#include "test_support.hpp"

using namespace otfs;

namespace {

ChannelRealization one_path(int l, double c, cplx h) {
    ChannelRealization ch;
    ch.paths.push_back({l, c, h, -1});
    return ch;
}

// Pi^l Delta^c built from its definition, cyclic index in the phase.
ComplexMatrix shift_doppler(int l, double c, Eigen::Index n, double base) {
    ComplexMatrix delta = ComplexMatrix::Zero(n, n);
    for (Eigen::Index g = 0; g < n; ++g) delta(g, g) = std::polar(1.0, base * c * static_cast<double>(g));
    ComplexMatrix pi = ComplexMatrix::Zero(n, n);
    for (Eigen::Index p = 0; p < n; ++p) pi((p + 1) % n, p) = 1.0;
    ComplexMatrix pl = ComplexMatrix::Identity(n, n);
    for (int k = 0; k < l; ++k) pl = pi * pl;
    return pl * delta;
}

}  // namespace

TEST(GmmSpec, ValidationRejectsBadMixtures) {
    EXPECT_NO_THROW(gmm_preset(1).validate());
    GmmSpec g{{0.5, 0.4}, {0.0, 0.0}, {1.0, 1.0}};
    EXPECT_THROW(g.validate(), Error);
    g = {{1.0}, {0.0}, {0.0}};
    EXPECT_THROW(g.validate(), Error);
    g = {{1.2, -0.2}, {0.0, 0.0}, {1.0, 1.0}};
    EXPECT_THROW(g.validate(), Error);
    EXPECT_THROW(gmm_case('E'), Error);
    EXPECT_THROW(gmm_preset(3), Error);
}

TEST(GmmSpec, BuiltInsHaveUnitPower) {
    for (char c : {'A', 'B', 'C', 'D'}) {
        const GmmSpec g = gmm_case(c);
        EXPECT_NO_THROW(g.validate());
        EXPECT_EQ(g.order(), 4u);
        EXPECT_NEAR(g.second_moment(), 1.0, 1e-12) << c;
    }
    for (int k : {1, 2, 4}) EXPECT_NEAR(gmm_preset(k).second_moment(), 1.0, 1e-12);
}

TEST(GmmSpec, CaseWeights) {
    const std::vector<double> a{0.25, 0.25, 0.25, 0.25};
    const std::vector<double> d{0.7, 0.15, 0.1, 0.05};
    EXPECT_EQ(gmm_case('A').weights, a);
    EXPECT_EQ(gmm_case('D').weights, d);
}

TEST(SampleChannel, UnitGainVariance) {
    Rng rng = substream(20, 0);
    const GmmSpec g = gmm_preset(1);
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto ch = sample_channel(g, 1, {}, false, rng);
        ASSERT_EQ(ch.num_paths(), 1u);
        s += std::norm(ch.paths[0].h);
    }
    EXPECT_GE(s / n, 0.99);
    EXPECT_LE(s / n, 1.01);
}

TEST(SampleChannel, ComponentFrequenciesCaseAAndD) {
    for (char label : {'A', 'D'}) {
        const GmmSpec g = gmm_case(label);
        Rng rng = substream(21, static_cast<std::uint64_t>(label));
        std::vector<int> counts(4, 0);
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            int k = -1;
            draw_gain(g, rng, &k);
            ++counts[static_cast<std::size_t>(k)];
        }
        for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(counts[k] / double(n), g.weights[k], 0.01) << label;
    }
}

TEST(SampleChannel, MixtureMomentsWithinThreeSigma) {
    for (char label : {'B', 'C', 'D'}) {
        const GmmSpec g = gmm_case(label);
        Rng rng = substream(22, static_cast<std::uint64_t>(label));
        const int n = 100000;
        cplx mean = 0.0;
        double m2 = 0.0, m4 = 0.0;
        for (int i = 0; i < n; ++i) {
            const cplx h = draw_gain(g, rng);
            mean += h;
            m2 += std::norm(h);
            m4 += std::norm(h) * std::norm(h);
        }
        mean /= n;
        m2 /= n;
        m4 /= n;
        const double se_mean = std::sqrt(g.variance() / n);
        const double se_m2 = std::sqrt((m4 - m2 * m2) / n);
        EXPECT_LT(std::abs(mean - g.mean()), 3.0 * se_mean * std::sqrt(2.0)) << label;
        EXPECT_LT(std::abs(m2 - g.second_moment()), 3.0 * se_m2) << label;
    }
}

TEST(SampleChannel, DistinctDelaysAndRanges) {
    Rng rng = substream(23, 0);
    const DelayDopplerSpread spread{16, 10};
    for (int t = 0; t < 200; ++t) {
        const bool frac = t % 2 == 1;
        const auto ch = sample_channel(gmm_case('B'), 10, spread, frac, rng);
        ASSERT_EQ(ch.num_paths(), 10u);
        std::vector<int> delays;
        for (const auto& p : ch.paths) {
            EXPECT_NO_THROW(validate_path(p, spread));
            EXPECT_GE(p.doppler_tap(), 0);
            EXPECT_LE(p.doppler_tap(), 9);
            if (!frac) {
                EXPECT_EQ(p.fractional_doppler(), 0.0);
            }
            EXPECT_GE(p.component, 0);
            delays.push_back(p.l);
        }
        std::sort(delays.begin(), delays.end());
        EXPECT_EQ(std::adjacent_find(delays.begin(), delays.end()), delays.end());
    }
}

TEST(SampleChannel, DeterministicAndErrors) {
    Rng a = substream(24, 3), b = substream(24, 3);
    const auto ca = sample_channel(gmm_preset(2), 5, {}, true, a);
    const auto cb = sample_channel(gmm_preset(2), 5, {}, true, b);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(ca.paths[i].l, cb.paths[i].l);
        EXPECT_EQ(ca.paths[i].c, cb.paths[i].c);
        EXPECT_EQ(ca.paths[i].h, cb.paths[i].h);
    }
    try {
        sample_channel(gmm_preset(1), 17, {16, 10}, false, a);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TooManyPaths);
    }
    EXPECT_NO_THROW(sample_channel(gmm_preset(1), 16, {16, 10}, false, a));
}

TEST(ProfileToTaps, Examples) {
    FrameConfig cfg;
    const auto taps = profile_to_taps({{2.08e-6, 0.0}, {0.0, 470.0}, {0.0, 0.0}}, cfg, {});
    ASSERT_EQ(taps.size(), 3u);
    EXPECT_EQ(taps[0].first, 1);
    EXPECT_EQ(taps[1].first, 0);
    EXPECT_NEAR(taps[1].second, 470.0 * 32.0 / 15000.0, 1e-12);
    EXPECT_EQ(std::lround(taps[1].second), 1);
    EXPECT_EQ(taps[2].second, 0.0);
}

TEST(ProfileToTaps, ReferenceProfileIsOnTheGrid) {
    const auto taps = profile_to_taps(reference_profile(), FrameConfig{}, {});
    ASSERT_EQ(taps.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(taps[i].first, static_cast<int>(i) + 1);
        EXPECT_NEAR(taps[i].second, static_cast<double>(i), 0.02);
    }
}

TEST(ProfileToTaps, OutOfGrid) {
    FrameConfig cfg;
    try {
        profile_to_taps({{40e-6, 0.0}}, cfg, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfGrid);
    }
    EXPECT_THROW(profile_to_taps({{0.0, 5000.0}}, cfg, {}), Error);
}

TEST(LoadProfile, ParsesTableAndRejectsGarbage) {
    const std::string path = ::testing::TempDir() + "profile.txt";
    {
        std::ofstream out(path);
        out << "# idx delay_us doppler_hz\n1 2.08 0\n\n2 4.164 470  # second\n";
    }
    const auto prof = load_profile(path);
    ASSERT_EQ(prof.size(), 2u);
    EXPECT_NEAR(prof[1].delay_s, 4.164e-6, 1e-18);
    EXPECT_EQ(prof[1].doppler_hz, 470.0);
    {
        std::ofstream out(path);
        out << "1 2.08\n";
    }
    EXPECT_THROW(load_profile(path), Error);
    EXPECT_THROW(load_profile(path + ".missing"), Error);
}

TEST(TdChannelMatrix, Examples) {
    const double base4 = 2.0 * kPi / 4.0;
    EXPECT_LT((td_channel_matrix(one_path(0, 0.0, 1.0), 4, base4) - ComplexMatrix::Identity(4, 4)).norm(), 1e-15);

    ComplexMatrix shift = ComplexMatrix::Zero(4, 4);
    shift(1, 0) = shift(2, 1) = shift(3, 2) = shift(0, 3) = 1.0;
    EXPECT_LT((td_channel_matrix(one_path(1, 0.0, 1.0), 4, base4) - shift).norm(), 1e-15);

    ComplexMatrix d = ComplexMatrix::Zero(4, 4);
    d(0, 0) = 1.0;
    d(1, 1) = cplx(0.0, 1.0);
    d(2, 2) = -1.0;
    d(3, 3) = cplx(0.0, -1.0);
    EXPECT_LT((td_channel_matrix(one_path(0, 2.0, 1.0), 4, base4 / 2.0) - d).norm(), 1e-14);
}

TEST(TdChannelMatrix, PermutationStructureAndPowers) {
    for (int l = 0; l < 7; ++l) {
        const ComplexMatrix p = td_channel_matrix(one_path(l, 0.0, 1.0), 7, 0.1);
        for (Eigen::Index r = 0; r < 7; ++r) {
            EXPECT_EQ(p.row(r).cwiseAbs().sum(), 1.0);
            EXPECT_EQ(p.col(r).cwiseAbs().sum(), 1.0);
        }
    }
    const ComplexMatrix full = td_channel_matrix(one_path(7, 0.0, 1.0), 7, 0.1);
    EXPECT_LT((full - ComplexMatrix::Identity(7, 7)).norm(), 1e-15);
}

TEST(TdChannelMatrix, IntegralDopplerEqualsShiftTimesDiagonal) {
    const Eigen::Index n = 12;
    const double base = 2.0 * kPi / static_cast<double>(n);
    for (int l : {0, 1, 5, 11}) {
        for (double c : {0.0, 1.0, 3.0, 7.0}) {
            const ComplexMatrix h = td_channel_matrix(one_path(l, c, cplx(0.5, -1.0)), n, base);
            EXPECT_LT((h - cplx(0.5, -1.0) * shift_doppler(l, c, n, base)).norm(), 1e-12) << l << " " << c;
        }
    }
}

TEST(TdChannelMatrix, FractionalDopplerUsesUnwrappedPhase) {
    const Eigen::Index n = 8;
    const double base = 2.0 * kPi / static_cast<double>(n);
    const ComplexMatrix h = td_channel_matrix(one_path(2, 0.3, 1.0), n, base);
    for (Eigen::Index p = 0; p < n; ++p) {
        const cplx expected = std::polar(1.0, base * 0.3 * static_cast<double>(p - 2));
        EXPECT_NEAR(std::abs(h(p, (p - 2 + n) % n) - expected), 0.0, 1e-14);
    }
}

TEST(TdChannelMatrix, LinearInGains) {
    Rng rng = substream(25, 0);
    auto ch = sample_channel(gmm_case('C'), 6, {}, true, rng);
    auto ch2 = ch;
    auto sum = ch;
    for (std::size_t i = 0; i < ch.paths.size(); ++i) {
        ch2.paths[i].h = complex_normal(rng);
        sum.paths[i].h = ch.paths[i].h + ch2.paths[i].h;
    }
    const double base = 2.0 * kPi / 64.0;
    const ComplexMatrix lhs = td_channel_matrix(ch, 64, base) + td_channel_matrix(ch2, 64, base);
    EXPECT_LT((lhs - td_channel_matrix(sum, 64, base)).norm(), 1e-12);
}

TEST(TdChannel, StructuredOpsMatchDense) {
    Rng rng = substream(26, 0);
    const auto a = sample_channel(gmm_case('D'), 8, {}, true, rng);
    const auto b = sample_channel(gmm_case('A'), 5, {}, true, rng);
    const double base = 2.0 * kPi / 96.0;
    const TdChannel ta = td_channel(a, 96, base), tb = td_channel(b, 96, base);
    const ComplexMatrix da = ta.to_dense(), db = tb.to_dense();
    const ComplexVector s = complex_normal_vector(rng, 96);
    EXPECT_LT((ta.apply(s) - da * s).norm(), 1e-12);
    EXPECT_NEAR(ta.frobenius_sq(), da.squaredNorm(), 1e-10);
    EXPECT_NEAR(frobenius_distance_sq(ta, tb), (da - db).squaredNorm(), 1e-10);
    EXPECT_THROW(ta.apply(ComplexVector::Zero(5)), Error);
}

TEST(ApplyChannel, NoiselessExamples) {
    Rng rng = substream(27, 0);
    const ComplexVector s = complex_normal_vector(rng, 4);
    EXPECT_EQ(apply_channel(ComplexMatrix::Identity(4, 4), s, 0.0, rng), s);
    const ComplexMatrix shift = td_channel_matrix(one_path(1, 0.0, 1.0), 4, 0.0);
    const ComplexVector r = apply_channel(shift, s, 0.0, rng);
    for (Eigen::Index p = 0; p < 4; ++p) EXPECT_EQ(r(p), s((p + 3) % 4));
    EXPECT_THROW(apply_channel(shift, ComplexVector::Zero(3), 0.0, rng), Error);
    EXPECT_THROW(apply_channel(shift, s, -1.0, rng), Error);
}

TEST(ApplyChannel, NoiseIsCircularWithRequestedVariance) {
    Rng rng = substream(28, 0);
    const Eigen::Index n = 100000;
    const double sigma2 = 0.3;
    const TdChannel zero{n, {}};
    const ComplexVector eta = apply_channel(zero, ComplexVector::Zero(n), sigma2, rng);
    const double var = eta.squaredNorm() / n;
    EXPECT_NEAR(var, sigma2, 0.02 * sigma2);
    const double re = eta.real().squaredNorm() / n, im = eta.imag().squaredNorm() / n;
    EXPECT_NEAR(re, sigma2 / 2.0, 0.02 * sigma2);
    EXPECT_NEAR(im, sigma2 / 2.0, 0.02 * sigma2);
    // pseudo-variance E[eta^2] vanishes for circular noise
    EXPECT_LT(std::abs(eta.array().square().sum()) / n, 0.02 * sigma2);
}

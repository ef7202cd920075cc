#include <gtest/gtest.h>

#include "fraccurve/cointegration.hpp"
#include "fraccurve/dgp.hpp"
#include "fraccurve/errors.hpp"
#include "fraccurve/fracdiff.hpp"
#include "fraccurve/limitsim.hpp"
#include "helpers.hpp"

using namespace fraccurve;
using fctest::max_abs;

namespace {

FunctionalSeries series(const Matrix& m) {
    return FunctionalSeries(m, Basis(BasisKind::Fourier, static_cast<std::size_t>(m.cols())));
}

EigenSystem spectrum(std::initializer_list<double> values) {
    EigenSystem e;
    e.values = Vector::Map(values.begin(), static_cast<Eigen::Index>(values.size()));
    e.vectors = Matrix::Identity(e.values.size(), e.values.size());
    return e;
}

/// q_d integrated directions of order d plus white noise on the rest.
FunctionalSeries integrated_plus_noise(std::size_t T, std::size_t p, std::size_t q_d, double d, std::uint64_t seed) {
    Matrix z = fctest::random_matrix(T, p, seed);
    z.leftCols(static_cast<Eigen::Index>(q_d)) = frac_filter(Matrix(z.leftCols(static_cast<Eigen::Index>(q_d))), -d);
    return series(Matrix(z * fctest::random_orthogonal(p, seed + 1)));
}

const CriticalValueTable& small_table() {
    static const CriticalValueTable table = [] {
        CvBuildConfig c;
        c.qs = {1, 2, 3, 4};
        c.d_grid = {0.6, 0.95, 1.3};
        c.etas = {0.05};
        c.n = 400;
        c.R = 1000;
        c.seed = 7;
        return build_cv_table(c);
    }();
    return table;
}

void expect_kind(ErrorKind kind, const auto& fn) {
    try {
        fn();
        FAIL() << "no error thrown";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), kind) << e.what();
    }
}

}  // namespace

TEST(RatioEstimate, HandExamples) {
    const RatioEstimate a = ratio_estimate_qd(spectrum({10, 5, 0.1, 0.05, 0.02}), 4);
    EXPECT_EQ(a.q, 2u);
    ASSERT_EQ(a.ratios.size(), 4);
    EXPECT_NEAR(a.ratios(0), 2.0, 1e-12);
    EXPECT_NEAR(a.ratios(1), 50.0, 1e-12);
    EXPECT_NEAR(a.ratios(2), 2.0, 1e-12);
    EXPECT_NEAR(a.ratios(3), 2.5, 1e-12);
    EXPECT_EQ(a.P.rank(), 2u);
    EXPECT_NEAR(a.P.matrix().trace(), 2.0, 1e-12);

    EXPECT_EQ(ratio_estimate_qd(spectrum({9, 3, 1, 1.0 / 3, 1.0 / 9}), 4).q, 1u);
}

TEST(RatioEstimate, Errors) {
    expect_kind(ErrorKind::DegenerateSpectrum, [] { (void)ratio_estimate_qd(spectrum({4, 2, 1, 0}), 3); });
    expect_kind(ErrorKind::InvalidArgument, [] { (void)ratio_estimate_qd(spectrum({4, 2, 1}), 3); });
}

TEST(RatioEstimate, FindsIntegratedDimension) {
    const FunctionalSeries s = integrated_plus_noise(1000, 10, 3, 1.0, 11);
    EXPECT_EQ(ratio_estimate_qd(eigen(sample_cov(s, true)), 5).q, 3u);
}

TEST(VrStatistics, OrderingAndSingleDimension) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const FunctionalSeries s = integrated_plus_noise(300, 8, 2, 0.9, 20 + seed);
        double prev_trace = 0.0;
        for (std::size_t q = 1; q <= 4; ++q) {
            const RankTestOutcome o = vr_statistics(s, q, 6, 0.5);
            EXPECT_LE(o.stat_max, o.stat_trace * (1 + 1e-12));
            EXPECT_LE(o.stat_trace, static_cast<double>(q) * o.stat_max * (1 + 1e-12));
            EXPECT_GE(o.stat_trace, prev_trace);
            prev_trace = o.stat_trace;
            EXPECT_GE(o.nu_scaled.minCoeff(), 0.0);
            for (Eigen::Index j = 1; j < o.nu_all_scaled.size(); ++j) EXPECT_LE(o.nu_all_scaled(j - 1), o.nu_all_scaled(j));
            if (q == 1) {
                EXPECT_DOUBLE_EQ(o.stat_max, o.stat_trace);
            }
            EXPECT_EQ(o.K_used, 6u);
        }
    }
}

TEST(VrStatistics, ScaleAndRotationInvariant) {
    const FunctionalSeries s = integrated_plus_noise(250, 7, 3, 1.0, 31);
    const RankTestOutcome base = vr_statistics(s, 3, 5, 0.5);
    const RankTestOutcome scaled = vr_statistics(series(Matrix(10.0 * s.coeffs())), 3, 5, 0.5);
    const RankTestOutcome flipped = vr_statistics(series(Matrix(-0.01 * s.coeffs())), 3, 5, 0.5);
    const RankTestOutcome rotated = vr_statistics(series(Matrix(s.coeffs() * fctest::random_orthogonal(7, 32))), 3, 5, 0.5);
    for (const RankTestOutcome* o : {&scaled, &flipped, &rotated}) {
        EXPECT_NEAR(o->stat_max, base.stat_max, 1e-9 * base.stat_max);
        EXPECT_NEAR(o->stat_trace, base.stat_trace, 1e-9 * base.stat_trace);
    }
}

TEST(VrStatistics, Preconditions) {
    const FunctionalSeries s = integrated_plus_noise(100, 5, 1, 1.0, 40);
    expect_kind(ErrorKind::InvalidArgument, [&] { (void)vr_statistics(s, 3, 2, 0.5); });
    expect_kind(ErrorKind::InvalidArgument, [&] { (void)vr_statistics(s, 1, 2, 0.0); });
    const FunctionalSeries short_series = series(fctest::random_matrix(9, 5, 41));
    expect_kind(ErrorKind::InsufficientData, [&] { (void)vr_statistics(short_series, 1, 2, 0.5); });
}

TEST(SequentialTest, WhiteNoiseRejectsEverything) {
    int zero = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const FunctionalSeries s = series(fctest::random_matrix(1000, 8, 50 + seed));
        SequentialConfig c;
        c.q_max = 3;
        const SequentialResult r = sequential_rank_test(s, c, 0.95, small_table());
        if (r.q_bar == 0) ++zero;
        EXPECT_EQ(r.P_tilde.rank(), r.q_bar);
    }
    EXPECT_EQ(zero, 10);
}

TEST(SequentialTest, StepsAndProjection) {
    const FunctionalSeries s = integrated_plus_noise(800, 10, 2, 1.0, 60);
    SequentialConfig c;
    c.q_max = 4;
    const SequentialResult r = sequential_rank_test(s, c, 1.0, small_table());
    EXPECT_EQ(r.q_bar, 2u);
    ASSERT_FALSE(r.steps.empty());
    EXPECT_EQ(r.steps.front().q_tested, 4u);
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const RankTestOutcome& o = r.steps[i];
        EXPECT_EQ(o.q_tested, 4u - i);
        EXPECT_EQ(o.K_used, o.q_tested + 2);
        EXPECT_EQ(o.reject_max, o.stat_max > o.crit_max);
        EXPECT_EQ(o.reject_trace, o.stat_trace > o.crit_trace);
        EXPECT_DOUBLE_EQ(o.d_used, 1.0);
    }
    const Matrix& P = r.P_tilde.matrix();
    EXPECT_EQ(r.P_tilde.rank(), 2u);
    EXPECT_LE(max_abs(P * P - P), 1e-10);
    EXPECT_NEAR(P.trace(), 2.0, 1e-8);
}

TEST(SequentialTest, PTildeCloseToTruthOnSeparatedDgp) {
    DGPParams params;
    int close = 0;
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        Rng rng = substream(900, {static_cast<std::uint64_t>(seed)});
        const DGPDraw draw = gen_dgp(params, 2000, rng);
        SequentialConfig c;
        c.q_max = 4;
        const SequentialResult r = sequential_rank_test(draw.series, c, params.d, small_table());
        const RatioEstimate ratio = ratio_estimate_qd(eigen(sample_cov(draw.series, true)), 4);
        EXPECT_LE(max_abs(ratio.P.matrix() * ratio.P.matrix() - ratio.P.matrix()), 1e-10);
        if (r.q_bar != 3 || ratio.q != 3) continue;
        const Matrix diff = r.P_tilde.matrix() - ratio.P.matrix();
        if (eigen(Matrix((diff + diff.transpose()) / 2)).values.cwiseAbs().maxCoeff() <= 0.2) ++close;
    }
    EXPECT_GE(close, seeds * 9 / 10);
}

TEST(SequentialTest, TableMissNamesCell) {
    CvBuildConfig c;
    c.qs = {1};
    c.d_grid = {0.95};
    c.etas = {0.05};
    c.n = 100;
    c.R = 1000;
    const CriticalValueTable t = build_cv_table(c);
    SequentialConfig sc;
    sc.q_max = 3;
    try {
        (void)sequential_rank_test(integrated_plus_noise(200, 6, 1, 1.0, 70), sc, 0.95, t);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TableMiss);
        EXPECT_NE(std::string(e.what()).find('3'), std::string::npos) << e.what();
    }
}

TEST(SequentialTest, DefaultQmax) {
    const FunctionalSeries s = integrated_plus_noise(1000, 12, 3, 1.0, 80);
    EXPECT_EQ(default_q_max(s), 5u);
}

TEST(LrdSrdSplit, PiecesAreOrthogonalAndComplete) {
    DGPParams params;
    Rng rng = substream(5, {1});
    const DGPDraw draw = gen_dgp(params, 1000, rng);
    const Projection P = Projection::onto(draw.P.frame(), params.p);
    const LrdSrdSplit split = lrd_srd_split(draw.series, P, lrcov_bandwidth(1000, 0.4), 4);
    EXPECT_LE(max_abs(P.matrix() * split.Q.matrix()), 1e-8);
    EXPECT_EQ(split.Q.rank(), split.q_db);
    EXPECT_LE(max_abs(P.matrix() + split.Q.matrix() + split.srd.matrix() - Matrix::Identity(25, 25)), 1e-8);
    EXPECT_LE(max_abs(split.srd.matrix() * split.srd.matrix() - split.srd.matrix()), 1e-10);
    EXPECT_EQ(split.ratios.size(), 4);
}

TEST(LrdSrdSplit, WhiteNoiseSpectrumMatchesInnovations) {
    const std::size_t T = 4000, p = 4;
    Matrix z = fctest::random_matrix(T, p, 90);
    const Vector sd = Eigen::Vector4d(3.0, 2.0, 1.0, 0.5);
    z = z * sd.asDiagonal();
    const LrdSrdSplit split = lrd_srd_split(series(z), Projection::zero(p), lrcov_bandwidth(T, 0.3), 2);
    const Vector scaled = split.spectrum.values / static_cast<double>(T);
    for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(scaled(j), sd(j) * sd(j), 0.15 * sd(j) * sd(j)) << j;
}

TEST(LrdSrdSplit, BandwidthPresets) {
    EXPECT_EQ(lrcov_bandwidth(1000, 0.3), 8u);
    EXPECT_EQ(lrcov_bandwidth(1000, 0.4), 16u);
    EXPECT_EQ(lrcov_bandwidth(200, 0.4), 9u);
}

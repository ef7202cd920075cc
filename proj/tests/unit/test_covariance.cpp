#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fraccurve/covariance.hpp"
#include "fraccurve/errors.hpp"
#include "helpers.hpp"

using namespace fraccurve;
using fctest::max_abs;

namespace {

FunctionalSeries series(const Matrix& m) { return FunctionalSeries(m, Basis(BasisKind::ShiftedLegendre, static_cast<std::size_t>(m.cols()))); }

Matrix naive_bartlett(const Matrix& z, std::size_t h) {
    const Eigen::Index T = z.rows(), H = static_cast<Eigen::Index>(h);
    Matrix out = Matrix::Zero(z.cols(), z.cols());
    for (Eigen::Index s = -(T - 1); s <= T - 1; ++s) {
        const double w = 1.0 - static_cast<double>(std::abs(s)) / static_cast<double>(H);
        if (w <= 0.0) continue;
        Matrix C = Matrix::Zero(z.cols(), z.cols());
        for (Eigen::Index t = std::max<Eigen::Index>(0, s); t < std::min(T, T + s); ++t)
            C += z.row(t - s).transpose() * z.row(t);
        out += w * C;
    }
    return out;
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

TEST(SampleCov, HandExamples) {
    Matrix alt(6, 1);
    alt << 1, -1, 1, -1, 1, -1;
    EXPECT_NEAR(sample_cov(series(alt), true).matrix(0, 0), 1.0, 1e-15);

    EXPECT_LE(max_abs(sample_cov(series(Matrix::Constant(5, 3, 2.0)), true).matrix), 1e-15);

    Matrix m(3, 2);
    m << 1, 0, 0, 1, -1, -1;
    Matrix expect(2, 2);
    expect << 2, 1, 1, 2;
    const CovarianceOperator c = sample_cov(series(m), false);
    EXPECT_LE(max_abs(c.matrix - expect / 3.0), 1e-15);
    EXPECT_EQ(c.kind, CovarianceKind::Contemporaneous);
    EXPECT_EQ(c.T, 3u);
}

TEST(SampleCov, PsdAndBasisChangeInvariance) {
    const Matrix z = fctest::random_matrix(60, 7, 1);
    const Matrix U = fctest::random_orthogonal(7, 2);
    const CovarianceOperator a = sample_cov(series(z), true), b = sample_cov(series(z * U), true);
    EXPECT_LE(asymmetry(a.matrix), 1e-12);
    const EigenSystem ea = eigen(a), eb = eigen(b);
    EXPECT_GE(ea.values.minCoeff(), -1e-10);
    EXPECT_LE((ea.values - eb.values).cwiseAbs().maxCoeff(), 1e-9 * ea.values(0));
}

TEST(Bartlett, BandwidthOneIsC0Exactly) {
    const Matrix z = fctest::random_matrix(40, 4, 3);
    const Matrix L = bartlett_lrcov(z, 1);
    const Matrix C0 = z.transpose() * z;
    EXPECT_EQ(max_abs(L - C0), 0.0);
    EXPECT_EQ(max_abs(bartlett_lrcov_serial(z, 1) - C0), 0.0);
    const CovarianceOperator op = bartlett_lrcov(center(series(z)), 1);
    EXPECT_EQ(op.kind, CovarianceKind::LongRun);
    EXPECT_TRUE(op.unnormalized_lags);
    EXPECT_EQ(op.bandwidth.value_or(0), 1u);
}

TEST(Bartlett, MatchesNaiveSumAndSerialKernel) {
    const Matrix z = fctest::random_matrix(75, 5, 4);
    for (std::size_t h : {2u, 5u, 30u, 200u}) {
        const Matrix ref = naive_bartlett(z, h);
        EXPECT_LE(max_abs(bartlett_lrcov(z, h) - ref), 1e-11 * max_abs(ref)) << "h = " << h;
        EXPECT_LE(max_abs(bartlett_lrcov_serial(z, h) - ref), 1e-11 * max_abs(ref)) << "h = " << h;
        EXPECT_LE(asymmetry(bartlett_lrcov(z, h)), 1e-12 * max_abs(ref));
    }
}

TEST(Bartlett, SignSymmetric) {
    const Matrix z = fctest::random_matrix(50, 3, 5);
    EXPECT_LE(max_abs(bartlett_lrcov(Matrix(-z), 6) - bartlett_lrcov(z, 6)), 1e-12);
}

TEST(Bartlett, LlnOracleWhiteNoise) {
    const std::size_t T = 5000;
    const auto h = static_cast<std::size_t>(std::floor(1.0 + std::pow(static_cast<double>(T), 0.3)));
    auto opnorm = [](const Matrix& m) { return eigen(m).values.cwiseAbs().maxCoeff(); };
    Matrix mean = Matrix::Zero(2, 2);
    std::vector<double> norms;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const FunctionalSeries c = center(series(fctest::random_matrix(T, 2, 100 + s)));
        const Matrix L = bartlett_lrcov(c, h).matrix / static_cast<double>(T);
        mean += L / 100.0;
        norms.push_back(opnorm(Matrix(L - Matrix::Identity(2, 2))));
    }
    EXPECT_LE(opnorm(Matrix(mean - Matrix::Identity(2, 2))), 0.1);
    std::nth_element(norms.begin(), norms.begin() + 50, norms.end());
    EXPECT_LE(norms[50], 0.1);
}

TEST(Bartlett, RejectsZeroBandwidth) {
    expect_kind(ErrorKind::InvalidArgument, [] { (void)bartlett_lrcov(fctest::random_matrix(10, 2, 1), 0); });
}

TEST(Eigen, HandExamples) {
    const EigenSystem id = eigen(Matrix(Matrix::Identity(3, 3)));
    EXPECT_LE((id.values - Vector::Ones(3)).cwiseAbs().maxCoeff(), 1e-15);

    const EigenSystem dg = eigen(Matrix(Eigen::Vector3d(1, 5, 2).asDiagonal()));
    EXPECT_NEAR(dg.values(0), 5, 1e-15);
    EXPECT_NEAR(dg.values(1), 2, 1e-15);
    EXPECT_NEAR(dg.values(2), 1, 1e-15);
    EXPECT_NEAR(dg.vectors(1, 0), 1.0, 1e-15);
    EXPECT_NEAR(dg.vectors(2, 1), 1.0, 1e-15);
    EXPECT_NEAR(dg.vectors(0, 2), 1.0, 1e-15);

    Matrix m(2, 2);
    m << 2, 1, 1, 2;
    const EigenSystem e = eigen(m);
    EXPECT_NEAR(e.values(0), 3, 1e-14);
    EXPECT_NEAR(e.values(1), 1, 1e-14);
    const double r = std::sqrt(0.5);
    EXPECT_NEAR(e.vectors(0, 0), r, 1e-14);
    EXPECT_NEAR(e.vectors(1, 0), r, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(0, 1)), r, 1e-14);
    EXPECT_NEAR(e.vectors(0, 1), -e.vectors(1, 1), 1e-14);
}

TEST(Eigen, RecoversKnownSpectrumWithSignConvention) {
    const std::size_t p = 12;
    const Matrix V = fctest::random_orthogonal(p, 6);
    Vector lam(static_cast<Eigen::Index>(p));
    for (Eigen::Index j = 0; j < lam.size(); ++j) lam(j) = std::pow(0.6, static_cast<double>(j)) * 10.0;
    const Matrix M = V * lam.asDiagonal() * V.transpose();
    const EigenSystem e = eigen(Matrix((M + M.transpose()) / 2.0));
    EXPECT_LE((e.values - lam).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(max_abs(e.vectors.transpose() * e.vectors - Matrix::Identity(12, 12)), 1e-12);
    EXPECT_LE(max_abs(M - e.vectors * e.values.asDiagonal() * e.vectors.transpose()), 1e-9 * max_abs(M));
    for (Eigen::Index j = 0; j < e.vectors.cols(); ++j) {
        Eigen::Index k = 0;
        e.vectors.col(j).cwiseAbs().maxCoeff(&k);
        EXPECT_GT(e.vectors(k, j), 0.0);
    }
    EXPECT_EQ(e.leading(3).cols(), 3);
}

TEST(Eigen, RejectsAsymmetric) {
    Matrix m(2, 2);
    m << 1, 0, 1e-3, 1;
    expect_kind(ErrorKind::InvalidArgument, [&] { (void)eigen(m); });
}

TEST(GenEigen, DiagonalPencil) {
    const Matrix A = Eigen::Vector2d(2, 8).asDiagonal();
    const Matrix B = Eigen::Vector2d(1, 2).asDiagonal();
    const GeneralizedEigen g = gen_eigen(A, B, Projection::identity(2));
    EXPECT_NEAR(g.values(0), 2, 1e-14);
    EXPECT_NEAR(g.values(1), 4, 1e-14);
    for (Eigen::Index j = 0; j < 2; ++j) {
        EXPECT_NEAR(g.vectors.col(j).norm(), 1.0, 1e-14);
        EXPECT_LE((A * g.vectors.col(j) - g.values(j) * B * g.vectors.col(j)).norm(), 1e-12);
    }
}

TEST(GenEigen, IdentityBGivesRestrictedSpectrum) {
    const Matrix X = fctest::random_matrix(30, 5, 7);
    const Matrix A = X.transpose() * X;
    const Projection P = Projection::onto(fctest::random_matrix(5, 3, 8), 5);
    const GeneralizedEigen g = gen_eigen(A, Matrix::Identity(5, 5), P);
    const Matrix F = P.frame();
    Eigen::SelfAdjointEigenSolver<Matrix> es(F.transpose() * A * F);
    EXPECT_LE((g.values - es.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10 * es.eigenvalues().maxCoeff());
    EXPECT_LE(max_abs(P.matrix() * g.vectors - g.vectors), 1e-12);
}

TEST(GenEigen, Homogeneity) {
    const Matrix X = fctest::random_matrix(40, 4, 9), Y = fctest::random_matrix(40, 4, 10);
    const Matrix A = X.transpose() * X, B = Y.transpose() * Y;
    const Projection P = Projection::identity(4);
    const Vector base = gen_eigen(A, B, P).values;
    EXPECT_LE((gen_eigen(Matrix(7.0 * A), B, P).values - 7.0 * base).cwiseAbs().maxCoeff(), 1e-10 * base.maxCoeff() * 7);
    EXPECT_LE((gen_eigen(A, Matrix(4.0 * B), P).values - base / 4.0).cwiseAbs().maxCoeff(), 1e-10 * base.maxCoeff());
    EXPECT_LE((gen_eigen(Matrix(9.0 * A), Matrix(9.0 * B), P).values - base).cwiseAbs().maxCoeff(), 1e-9 * base.maxCoeff());
    for (Eigen::Index j = 1; j < base.size(); ++j) EXPECT_LE(base(j - 1), base(j));
}

TEST(GenEigen, SingularPencil) {
    Matrix B = Matrix::Zero(3, 3);
    B(0, 0) = 1.0;
    expect_kind(ErrorKind::SingularPencil, [&] { (void)gen_eigen(Matrix::Identity(3, 3), B, Projection::identity(3)); });
}

TEST(Projection, IdempotentWithTraceEqualRank) {
    const Projection P = Projection::onto(fctest::random_matrix(8, 3, 11), 8);
    EXPECT_EQ(P.rank(), 3u);
    EXPECT_LE(max_abs(P.matrix() * P.matrix() - P.matrix()), 1e-10);
    EXPECT_LE(asymmetry(P.matrix()), 1e-12);
    EXPECT_NEAR(P.matrix().trace(), 3.0, 1e-8);
    const Matrix C = P.complement();
    EXPECT_LE(max_abs(C * C - C), 1e-10);
    EXPECT_LE(max_abs(P.matrix() * C), 1e-10);
    EXPECT_EQ(Projection::zero(4).rank(), 0u);
    EXPECT_LE(max_abs(Projection::zero(4).matrix()), 0.0);
    EXPECT_NEAR(Projection::identity(4).matrix().trace(), 4.0, 1e-15);
}

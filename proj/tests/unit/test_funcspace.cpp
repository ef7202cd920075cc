#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fraccurve/errors.hpp"
#include "fraccurve/funcspace.hpp"
#include "helpers.hpp"

using namespace fraccurve;
using fctest::max_abs;

namespace {

Matrix simpson_gram(const Basis& b, int intervals) {
    const auto p = static_cast<Eigen::Index>(b.size());
    Matrix G = Matrix::Zero(p, p);
    const double h = 1.0 / intervals;
    std::vector<double> v(b.size());
    for (int k = 0; k <= intervals; ++k) {
        const double x = k * h;
        const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        b.eval_all(x, v);
        const Eigen::Map<const Vector> vv(v.data(), p);
        G += (w * h / 3.0) * vv * vv.transpose();
    }
    return G;
}

double legendre_oracle(std::size_t j, double x) {
    return std::sqrt(2.0 * static_cast<double>(j) - 1.0) * std::legendre(static_cast<unsigned>(j - 1), 2.0 * x - 1.0);
}

FunctionalSeries series_from(std::initializer_list<std::initializer_list<double>> rows) {
    const auto T = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(rows.begin()->size());
    Matrix m(T, p);
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return FunctionalSeries(m, Basis(BasisKind::ShiftedLegendre, static_cast<std::size_t>(p)));
}

}  // namespace

TEST(Basis, LegendreLowOrderClosedForms) {
    const Basis b1(BasisKind::ShiftedLegendre, 1);
    for (double x : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(b1.eval(1, x), 1.0);
    const Basis b2(BasisKind::ShiftedLegendre, 2);
    EXPECT_NEAR(b2.eval(2, 1.0), 1.7320508075688772, 1e-15);
    EXPECT_NEAR(b2.eval(2, 0.25), std::sqrt(3.0) * -0.5, 1e-15);
}

TEST(Basis, LegendreMatchesStdLegendre) {
    const Basis b(BasisKind::ShiftedLegendre, 40);
    for (std::size_t j = 1; j <= 40; ++j)
        for (double x : {0.0, 0.013, 0.37, 0.5, 0.81, 1.0})
            EXPECT_NEAR(b.eval(j, x), legendre_oracle(j, x), 1e-9 * std::max(1.0, std::abs(legendre_oracle(j, x))));
}

TEST(Basis, FourierThreeFunctions) {
    const Basis b(BasisKind::Fourier, 3);
    const double x = 0.2;
    EXPECT_DOUBLE_EQ(b.eval(1, x), 1.0);
    EXPECT_NEAR(b.eval(2, x), std::sqrt(2.0) * std::cos(2 * std::numbers::pi * x), 1e-15);
    EXPECT_NEAR(b.eval(3, x), std::sqrt(2.0) * std::sin(2 * std::numbers::pi * x), 1e-15);
    EXPECT_LE(max_abs(simpson_gram(b, 2000) - Matrix::Identity(3, 3)), 1e-10);
}

TEST(Basis, FourierGramSimpson) {
    for (std::size_t p : {5u, 25u, 40u}) {
        const Basis b(BasisKind::Fourier, p);
        EXPECT_LE(max_abs(simpson_gram(b, 2000) - Matrix::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p))), 1e-8)
            << "p = " << p;
    }
}

TEST(Basis, LegendreGramIndependentGaussRule) {
    std::vector<double> x, w;
    fctest::golub_welsch01(64, x, w);
    for (std::size_t p : {1u, 5u, 10u, 25u, 40u}) {
        const auto pe = static_cast<Eigen::Index>(p);
        Matrix G = Matrix::Zero(pe, pe);
        for (std::size_t k = 0; k < x.size(); ++k) {
            Vector v(pe);
            for (std::size_t j = 1; j <= p; ++j) v(static_cast<Eigen::Index>(j - 1)) = legendre_oracle(j, x[k]);
            G += w[k] * v * v.transpose();
        }
        EXPECT_LE(max_abs(G - Matrix::Identity(pe, pe)), 1e-8) << "oracle rule, p = " << p;
        const Matrix Gb = cross_gram(Basis(BasisKind::ShiftedLegendre, p), Basis(BasisKind::ShiftedLegendre, p), p);
        EXPECT_LE(max_abs(Gb - Matrix::Identity(pe, pe)), 1e-8) << "library, p = " << p;
    }
}

TEST(Basis, LegendreGramSimpsonLowOrder) {
    const Basis b(BasisKind::ShiftedLegendre, 8);
    EXPECT_LE(max_abs(simpson_gram(b, 2000) - Matrix::Identity(8, 8)), 1e-8);
}

TEST(Basis, CrossGramLegendreFourier) {
    std::vector<double> x, w;
    fctest::golub_welsch01(200, x, w);
    const Basis a(BasisKind::Fourier, 9), b(BasisKind::ShiftedLegendre, 5);
    const Matrix G = cross_gram(a, b, 5);
    ASSERT_EQ(G.rows(), 9);
    ASSERT_EQ(G.cols(), 5);
    for (std::size_t i = 1; i <= 9; ++i)
        for (std::size_t j = 1; j <= 5; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * a.eval(i, x[k]) * legendre_oracle(j, x[k]);
            EXPECT_NEAR(G(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)), s, 1e-10);
        }
}

TEST(Basis, RejectsZeroSize) {
    try {
        (void)build_basis(BasisKind::Fourier, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
}

TEST(ProjectCurves, ConstantCurve) {
    const auto grid = uniform_grid(51);
    Matrix raw = Matrix::Constant(3, 51, 2.5);
    const FunctionalSeries s = project_curves(raw, grid, Basis(BasisKind::ShiftedLegendre, 6));
    for (Eigen::Index t = 0; t < 3; ++t) {
        EXPECT_NEAR(s.coeffs()(t, 0), 2.5, 1e-10);
        EXPECT_LE(s.coeffs().row(t).tail(5).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(ProjectCurves, SecondLegendreFunction) {
    const auto grid = uniform_grid(101);
    Matrix raw(1, 101);
    for (int k = 0; k < 101; ++k) raw(0, k) = std::sqrt(3.0) * (2.0 * grid[static_cast<std::size_t>(k)] - 1.0);
    const FunctionalSeries s = project_curves(raw, grid, Basis(BasisKind::ShiftedLegendre, 2));
    EXPECT_NEAR(s.coeffs()(0, 0), 0.0, 1e-8);
    EXPECT_NEAR(s.coeffs()(0, 1), 1.0, 1e-8);
}

TEST(ProjectCurves, RoundTrip) {
    for (BasisKind kind : {BasisKind::ShiftedLegendre, BasisKind::Fourier}) {
        const Basis b(kind, 5);
        const Matrix c = fctest::random_matrix(4, 5, 11);
        const auto grid = uniform_grid(201);
        const FunctionalSeries s(c, b);
        const FunctionalSeries back = project_curves(reconstruct(s, grid), grid, b);
        EXPECT_LE(max_abs(back.coeffs() - c), 1e-8);
    }
}

TEST(ProjectCurves, RankDeficientGrid) {
    const auto grid = uniform_grid(4);
    try {
        (void)project_curves(Matrix::Zero(2, 4), grid, Basis(BasisKind::ShiftedLegendre, 5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RankDeficient);
    }
}

TEST(ProjectCurves, NonFiniteInput) {
    const auto grid = uniform_grid(11);
    Matrix raw = Matrix::Zero(2, 11);
    raw(1, 3) = std::nan("");
    try {
        (void)project_curves(raw, grid, Basis(BasisKind::ShiftedLegendre, 3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidData);
    }
}

TEST(Transforms, HandExamples) {
    const FunctionalSeries s = series_from({{1}, {2}, {3}});
    const FunctionalSeries i = initialize(s);
    ASSERT_EQ(i.length(), 2u);
    EXPECT_DOUBLE_EQ(i.coeffs()(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(i.coeffs()(1, 0), 2.0);
    const FunctionalSeries d = first_difference(series_from({{1}, {4}, {9}}));
    ASSERT_EQ(d.length(), 2u);
    EXPECT_DOUBLE_EQ(d.coeffs()(0, 0), 3.0);
    EXPECT_DOUBLE_EQ(d.coeffs()(1, 0), 5.0);
    const FunctionalSeries c = center(series_from({{4, 1}, {4, 1}}));
    EXPECT_EQ(max_abs(c.coeffs()), 0.0);
}

TEST(Transforms, CenterProperties) {
    const FunctionalSeries s(fctest::random_matrix(50, 4, 3) + Matrix::Constant(50, 4, 7.0), Basis(BasisKind::Fourier, 4));
    const FunctionalSeries c = center(s);
    EXPECT_LE(c.coeffs().colwise().mean().cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(max_abs(center(c).coeffs() - c.coeffs()), 1e-12);
    EXPECT_LE(max_abs(first_difference(c).coeffs() - first_difference(s).coeffs()), 1e-12);
}

TEST(Transforms, ShortSeriesRejected) {
    const FunctionalSeries s = series_from({{1}});
    EXPECT_THROW((void)initialize(s), Error);
    EXPECT_THROW((void)first_difference(s), Error);
    EXPECT_THROW((void)center(s), Error);
}

TEST(FunctionalSeries, InnerProductIsDot) {
    const Basis b(BasisKind::ShiftedLegendre, 6);
    const FunctionalSeries s(fctest::random_matrix(3, 6, 5), b);
    std::vector<double> x, w;
    fctest::golub_welsch01(40, x, w);
    double q = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) q += w[k] * s.curve(0)(x[k]) * s.curve(2)(x[k]);
    EXPECT_NEAR(s.inner(0, 2), q, 1e-10);
    EXPECT_NEAR(s.curve(1).norm(), s.coeffs().row(1).norm(), 1e-14);
}

TEST(FunctionalSeries, RejectsNonFinite) {
    Matrix m = Matrix::Zero(3, 2);
    m(1, 1) = INFINITY;
    EXPECT_THROW(FunctionalSeries(m, Basis(BasisKind::Fourier, 2)), Error);
}

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "fraccurve/funcspace.hpp"
#include "fraccurve/rng.hpp"

namespace fctest {

using fraccurve::Matrix;
using fraccurve::Vector;

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = n(rng);
    return m;
}

inline Matrix random_orthogonal(std::size_t p, std::uint64_t seed) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(p, p, seed));
    return qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Gauss-Legendre rule on [0,1] from the Jacobi matrix eigenproblem (Golub-Welsch).
inline void golub_welsch01(int n, std::vector<double>& x, std::vector<double>& w) {
    Matrix J = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k - 1, k) = J(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(J);
    x.resize(static_cast<std::size_t>(n));
    w.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        x[static_cast<std::size_t>(k)] = 0.5 * (es.eigenvalues()(k) + 1.0);
        w[static_cast<std::size_t>(k)] = es.eigenvectors()(0, k) * es.eigenvectors()(0, k);  // 2 v0^2 on [-1,1], halved
    }
}

/// Naive O(T^2) truncated convolution: out_t = sum_{j<=t} c_j in_{t-j}.
inline Matrix naive_filter(const Matrix& in, const std::vector<double>& c) {
    Matrix out = Matrix::Zero(in.rows(), in.cols());
    for (Eigen::Index t = 0; t < in.rows(); ++t)
        for (Eigen::Index j = 0; j <= t; ++j) out.row(t) += c[static_cast<std::size_t>(j)] * in.row(t - j);
    return out;
}

/// Gamma-ratio oracle for the coefficients of (1 - L)^d in long double (j <= 40).
inline long double gamma_coeff(double d, int j) {
    if (j == 0) return 1.0L;
    const long double dl = d;
    if (std::abs(d - std::round(d)) < 1e-15 && d >= 0) {
        long double c = 1.0L;
        for (int i = 1; i <= j; ++i) c *= -(dl - (i - 1)) / i;
        return c;
    }
    return std::tgamma(static_cast<long double>(j) - dl) / (std::tgamma(-dl) * std::tgamma(j + 1.0L));
}

}  // namespace fctest

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fraccurve {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class BasisKind { ShiftedLegendre, Fourier };

const char* to_string(BasisKind kind) noexcept;
BasisKind basis_kind_from_string(const std::string& name);

/// Orthonormal basis of L2[0,1].
///
/// ShiftedLegendre: phi_j(x) = sqrt(2j-1) P_{j-1}(2x-1).
/// Fourier: phi_1 = 1, phi_{2k} = sqrt(2) cos(2 pi k x), phi_{2k+1} = sqrt(2) sin(2 pi k x).
/// Indices are 1-based throughout, matching the usual function-space notation.
class Basis {
public:
    Basis(BasisKind kind, std::size_t size);

    [[nodiscard]] BasisKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }

    [[nodiscard]] double eval(std::size_t j, double x) const;

    /// All p functions at x, written into out (size p).
    void eval_all(double x, std::span<double> out) const;

    /// G x p design matrix on a grid.
    [[nodiscard]] Matrix design(std::span<const double> grid) const;

    friend bool operator==(const Basis&, const Basis&) = default;

private:
    BasisKind kind_;
    std::size_t size_;
};

[[nodiscard]] Basis build_basis(BasisKind kind, std::size_t p);

/// Gauss-Legendre nodes and weights mapped to [0,1].
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
[[nodiscard]] Quadrature gauss_legendre01(std::size_t n);

/// Inner products <a_i, b_j> for i <= a.size(), j <= b_cols (p_a x b_cols).
/// Identity block when both bases share a kind.
[[nodiscard]] Matrix cross_gram(const Basis& a, const Basis& b, std::size_t b_cols);

/// Curve in basis coordinates.
struct Curve {
    Vector coeffs;
    Basis basis;

    Curve(Vector c, Basis b);
    [[nodiscard]] double norm() const { return coeffs.norm(); }
    [[nodiscard]] double operator()(double x) const;
};

/// T curves stored as a T x p coefficient matrix; row t holds the coordinates of Z_t.
class FunctionalSeries {
public:
    FunctionalSeries(Matrix coeffs, Basis basis, std::string label = {});

    [[nodiscard]] const Matrix& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] const Basis& basis() const noexcept { return basis_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] std::size_t length() const noexcept { return static_cast<std::size_t>(coeffs_.rows()); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(coeffs_.cols()); }

    [[nodiscard]] Curve curve(std::size_t t) const;
    [[nodiscard]] double inner(std::size_t s, std::size_t t) const { return coeffs_.row(s).dot(coeffs_.row(t)); }

    /// Scalar series <Z_t, v> for v given in basis coordinates.
    [[nodiscard]] Vector project(const Vector& v) const;

    [[nodiscard]] FunctionalSeries with_coeffs(Matrix coeffs, std::string label) const;

private:
    Matrix coeffs_;
    Basis basis_;
    std::string label_;
};

/// Weighted least-squares coefficients of curves sampled on a grid
/// (trapezoid weights). raw is T x G.
[[nodiscard]] FunctionalSeries project_curves(const Matrix& raw, std::span<const double> grid, const Basis& basis,
                                              std::string label = {});

/// Curve values on a grid (T x G); inverse of project_curves on the span of the basis.
[[nodiscard]] Matrix reconstruct(const FunctionalSeries& series, std::span<const double> grid);

/// Z_t minus the sample mean curve.
[[nodiscard]] FunctionalSeries center(const FunctionalSeries& series);

/// Z_t - Z_1 for t = 2..T; the first observation initializes the series and is dropped.
[[nodiscard]] FunctionalSeries initialize(const FunctionalSeries& series);

/// Z_t - Z_{t-1} for t = 2..T.
[[nodiscard]] FunctionalSeries first_difference(const FunctionalSeries& series);

[[nodiscard]] std::vector<double> uniform_grid(std::size_t g);

}  // namespace fraccurve

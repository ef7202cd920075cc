#include "fraccurve/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fraccurve/errors.hpp"

namespace fraccurve {

namespace {

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) fail(ErrorKind::InvalidData, std::string(what) + ": non-finite entries");
}

void require_rows(const FunctionalSeries& s, std::size_t n, const char* op) {
    if (s.length() < n)
        fail(ErrorKind::InvalidArgument,
             std::string(op) + ": need at least " + std::to_string(n) + " observations, got " +
                 std::to_string(s.length()));
}

}  // namespace

const char* to_string(BasisKind kind) noexcept {
    switch (kind) {
        case BasisKind::ShiftedLegendre: return "legendre";
        case BasisKind::Fourier: return "fourier";
    }
    return "unknown";
}

BasisKind basis_kind_from_string(const std::string& name) {
    if (name == "legendre" || name == "ShiftedLegendre") return BasisKind::ShiftedLegendre;
    if (name == "fourier" || name == "Fourier") return BasisKind::Fourier;
    fail(ErrorKind::InvalidArgument, "unknown basis kind '" + name + "'");
}

Basis::Basis(BasisKind kind, std::size_t size) : kind_(kind), size_(size) {
    require(size >= 1, "basis size must be at least 1");
}

double Basis::eval(std::size_t j, double x) const {
    require(j >= 1 && j <= size_, "basis index out of range");
    if (kind_ == BasisKind::Fourier) {
        if (j == 1) return 1.0;
        const double k = static_cast<double>(j / 2);
        const double arg = 2.0 * std::numbers::pi * k * x;
        return std::numbers::sqrt2 * ((j % 2 == 0) ? std::cos(arg) : std::sin(arg));
    }
    // three-term recurrence for P_{j-1}(y)
    const double y = 2.0 * x - 1.0;
    double p0 = 1.0, p1 = y;
    if (j == 1) return 1.0;
    for (std::size_t n = 1; n + 1 < j; ++n) {
        const double nn = static_cast<double>(n);
        const double p2 = ((2.0 * nn + 1.0) * y * p1 - nn * p0) / (nn + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return std::sqrt(2.0 * static_cast<double>(j) - 1.0) * p1;
}

void Basis::eval_all(double x, std::span<double> out) const {
    require(out.size() == size_, "eval_all: output size mismatch");
    if (kind_ == BasisKind::Fourier) {
        out[0] = 1.0;
        for (std::size_t j = 2; j <= size_; ++j) out[j - 1] = eval(j, x);
        return;
    }
    const double y = 2.0 * x - 1.0;
    double p0 = 1.0, p1 = y;
    out[0] = 1.0;
    if (size_ >= 2) out[1] = std::sqrt(3.0) * y;
    for (std::size_t n = 1; n + 1 < size_; ++n) {
        const double nn = static_cast<double>(n);
        const double p2 = ((2.0 * nn + 1.0) * y * p1 - nn * p0) / (nn + 1.0);
        p0 = p1;
        p1 = p2;
        out[n + 1] = std::sqrt(2.0 * static_cast<double>(n + 2) - 1.0) * p2;
    }
}

Matrix Basis::design(std::span<const double> grid) const {
    Matrix phi(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(size_));
    std::vector<double> row(size_);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        eval_all(grid[g], row);
        for (std::size_t j = 0; j < size_; ++j) phi(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(j)) = row[j];
    }
    return phi;
}

Basis build_basis(BasisKind kind, std::size_t p) { return Basis(kind, p); }

Quadrature gauss_legendre01(std::size_t n) {
    require(n >= 1, "gauss_legendre01: n must be positive");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = z;
            for (std::size_t k = 1; k < n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk + 1.0) * z * p1 - kk * p0) / (kk + 1.0);
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = z;
                p0 = 1.0;
            }
            dp = nd * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        // map [-1,1] -> [0,1]
        q.nodes[i] = 0.5 * (1.0 - z);
        q.nodes[n - 1 - i] = 0.5 * (1.0 + z);
        q.weights[i] = 0.5 * w;
        q.weights[n - 1 - i] = 0.5 * w;
    }
    return q;
}

Matrix cross_gram(const Basis& a, const Basis& b, std::size_t b_cols) {
    require(b_cols >= 1 && b_cols <= b.size(), "cross_gram: column count out of range");
    const auto pa = static_cast<Eigen::Index>(a.size());
    const auto nb = static_cast<Eigen::Index>(b_cols);
    if (a.kind() == b.kind()) {
        Matrix g = Matrix::Zero(pa, nb);
        for (Eigen::Index j = 0; j < std::min(pa, nb); ++j) g(j, j) = 1.0;
        return g;
    }
    const std::size_t n = std::max<std::size_t>(128, 2 * (a.size() + b_cols) + 64);
    const Quadrature q = gauss_legendre01(n);
    const Matrix fa = a.design(q.nodes);
    const Matrix fb = Basis(b.kind(), b_cols).design(q.nodes);
    const Eigen::Map<const Vector> w(q.weights.data(), static_cast<Eigen::Index>(n));
    return fa.transpose() * w.asDiagonal() * fb;
}

Curve::Curve(Vector c, Basis b) : coeffs(std::move(c)), basis(b) {
    require(static_cast<std::size_t>(coeffs.size()) == basis.size(), "curve: coefficient count must match basis size");
    if (!coeffs.allFinite()) fail(ErrorKind::InvalidData, "curve: non-finite coefficients");
}

double Curve::operator()(double x) const {
    std::vector<double> phi(basis.size());
    basis.eval_all(x, phi);
    return Eigen::Map<const Vector>(phi.data(), coeffs.size()).dot(coeffs);
}

FunctionalSeries::FunctionalSeries(Matrix coeffs, Basis basis, std::string label)
    : coeffs_(std::move(coeffs)), basis_(basis), label_(std::move(label)) {
    require(coeffs_.rows() >= 1, "functional series: no observations");
    require(static_cast<std::size_t>(coeffs_.cols()) == basis_.size(),
            "functional series: column count must match basis size");
    require_finite(coeffs_, "functional series");
}

Curve FunctionalSeries::curve(std::size_t t) const {
    require(t < length(), "curve index out of range");
    return Curve(coeffs_.row(static_cast<Eigen::Index>(t)).transpose(), basis_);
}

Vector FunctionalSeries::project(const Vector& v) const {
    require(static_cast<std::size_t>(v.size()) == dim(), "project: direction dimension mismatch");
    return coeffs_ * v;
}

FunctionalSeries FunctionalSeries::with_coeffs(Matrix coeffs, std::string label) const {
    return FunctionalSeries(std::move(coeffs), basis_, std::move(label));
}

std::vector<double> uniform_grid(std::size_t g) {
    require(g >= 2, "uniform_grid: need at least two points");
    std::vector<double> x(g);
    for (std::size_t i = 0; i < g; ++i) x[i] = static_cast<double>(i) / static_cast<double>(g - 1);
    return x;
}

FunctionalSeries project_curves(const Matrix& raw, std::span<const double> grid, const Basis& basis,
                                std::string label) {
    const std::size_t g = grid.size();
    require(static_cast<std::size_t>(raw.cols()) == g, "project_curves: raw columns must match grid size");
    if (g < basis.size())
        fail(ErrorKind::RankDeficient, "project_curves: grid has " + std::to_string(g) + " points but basis needs " +
                                           std::to_string(basis.size()));
    for (std::size_t i = 0; i < g; ++i) {
        require(grid[i] >= 0.0 && grid[i] <= 1.0, "project_curves: grid must lie in [0,1]");
        if (i > 0) require(grid[i] > grid[i - 1], "project_curves: grid must be strictly increasing");
    }
    require_finite(raw, "project_curves");

    Vector w = Vector::Zero(static_cast<Eigen::Index>(g));
    for (std::size_t i = 0; i + 1 < g; ++i) {
        const double h = 0.5 * (grid[i + 1] - grid[i]);
        w(static_cast<Eigen::Index>(i)) += h;
        w(static_cast<Eigen::Index>(i + 1)) += h;
    }
    const Matrix phi = basis.design(grid);
    const Matrix gram = phi.transpose() * w.asDiagonal() * phi;
    Eigen::LDLT<Matrix> ldlt(gram);
    const double scale = gram.diagonal().maxCoeff();
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-13 * scale)
        fail(ErrorKind::RankDeficient, "project_curves: weighted normal equations are rank deficient");
    Matrix rhs = phi.transpose() * w.asDiagonal() * raw.transpose();  // p x T
    Matrix coeffs = ldlt.solve(rhs).transpose();
    return FunctionalSeries(std::move(coeffs), basis, std::move(label));
}

Matrix reconstruct(const FunctionalSeries& series, std::span<const double> grid) {
    return series.coeffs() * series.basis().design(grid).transpose();
}

FunctionalSeries center(const FunctionalSeries& series) {
    require_rows(series, 2, "center");
    const Eigen::RowVectorXd mean = series.coeffs().colwise().mean();
    return series.with_coeffs(series.coeffs().rowwise() - mean, series.label());
}

FunctionalSeries initialize(const FunctionalSeries& series) {
    require_rows(series, 2, "initialize");
    const auto n = series.coeffs().rows() - 1;
    Matrix out = series.coeffs().bottomRows(n).rowwise() - series.coeffs().row(0);
    return series.with_coeffs(std::move(out), series.label());
}

FunctionalSeries first_difference(const FunctionalSeries& series) {
    require_rows(series, 2, "first_difference");
    const auto n = series.coeffs().rows() - 1;
    Matrix out = series.coeffs().bottomRows(n) - series.coeffs().topRows(n);
    return series.with_coeffs(std::move(out), series.label());
}

}  // namespace fraccurve

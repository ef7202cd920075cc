#include "fraccurve/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fraccurve/errors.hpp"

namespace fraccurve {

Matrix EigenSystem::leading(std::size_t k) const {
    require(k <= size(), "EigenSystem::leading: k exceeds dimension");
    return vectors.leftCols(static_cast<Eigen::Index>(k));
}

Projection::Projection(Matrix frame, std::size_t dim) : frame_(std::move(frame)) {
    matrix_ = frame_.cols() == 0 ? Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))
                                 : Matrix(frame_ * frame_.transpose());
}

Projection Projection::onto(const Matrix& frame, std::size_t dim) {
    require(static_cast<std::size_t>(frame.rows()) == dim, "Projection::onto: frame rows must equal dimension");
    if (frame.cols() == 0) return zero(dim);
    Eigen::HouseholderQR<Matrix> qr(frame);
    Matrix q = qr.householderQ() * Matrix::Identity(frame.rows(), frame.cols());
    return Projection(std::move(q), dim);
}

Projection Projection::zero(std::size_t dim) { return Projection(Matrix(static_cast<Eigen::Index>(dim), 0), dim); }

Projection Projection::identity(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return Projection(Matrix::Identity(n, n), dim);
}

Matrix Projection::complement() const {
    return Matrix::Identity(matrix_.rows(), matrix_.cols()) - matrix_;
}

CovarianceOperator sample_cov(const FunctionalSeries& series, bool centered) {
    const Matrix& z = series.coeffs();
    const auto T = static_cast<double>(z.rows());
    CovarianceOperator op;
    op.kind = CovarianceKind::Contemporaneous;
    op.T = series.length();
    if (centered) {
        const Matrix zc = z.rowwise() - z.colwise().mean();
        op.matrix = zc.transpose() * zc / T;
    } else {
        op.matrix = z.transpose() * z / T;
    }
    op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
    return op;
}

namespace {

// C_s + C_s' for lag s >= 1, where C_s = sum_{t=s+1}^{T} z_t z_{t-s}'
Matrix symmetric_lag(const Matrix& z, Eigen::Index s) {
    const Eigen::Index T = z.rows();
    const Matrix c = z.bottomRows(T - s).transpose() * z.topRows(T - s);
    return c + c.transpose();
}

void check_bandwidth(const Matrix& z, std::size_t h) {
    require(h >= 1, "bartlett_lrcov: bandwidth h must be at least 1");
    if (!z.allFinite()) fail(ErrorKind::InvalidData, "bartlett_lrcov: non-finite input");
}

}  // namespace

Matrix bartlett_lrcov_serial(const Matrix& z, std::size_t h) {
    check_bandwidth(z, h);
    Matrix out = z.transpose() * z;
    const auto lags = std::min<Eigen::Index>(static_cast<Eigen::Index>(h) - 1, z.rows() - 1);
    for (Eigen::Index s = 1; s <= lags; ++s)
        out += (1.0 - static_cast<double>(s) / static_cast<double>(h)) * symmetric_lag(z, s);
    return out;
}

Matrix bartlett_lrcov(const Matrix& z, std::size_t h) {
    check_bandwidth(z, h);
    const auto lags = std::min<Eigen::Index>(static_cast<Eigen::Index>(h) - 1, z.rows() - 1);
    // per-lag terms are computed in parallel and summed in lag order, so the
    // result does not depend on the thread count
    std::vector<Matrix> terms(static_cast<std::size_t>(lags));
#pragma omp parallel for schedule(dynamic) if (lags > 1)
    for (Eigen::Index s = 1; s <= lags; ++s)
        terms[static_cast<std::size_t>(s - 1)] =
            (1.0 - static_cast<double>(s) / static_cast<double>(h)) * symmetric_lag(z, s);
    Matrix out = z.transpose() * z;
    for (const auto& t : terms) out += t;
    return out;
}

CovarianceOperator bartlett_lrcov(const FunctionalSeries& series, std::size_t h) {
    CovarianceOperator op;
    op.kind = CovarianceKind::LongRun;
    op.T = series.length();
    op.bandwidth = h;
    op.unnormalized_lags = true;
    op.matrix = bartlett_lrcov(series.coeffs(), h);
    return op;
}

double asymmetry(const Matrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

EigenSystem eigen(const Matrix& symmetric) {
    require(symmetric.rows() == symmetric.cols() && symmetric.rows() >= 1, "eigen: matrix must be square");
    if (!symmetric.allFinite()) fail(ErrorKind::InvalidData, "eigen: non-finite matrix");
    const double scale = std::max(1.0, symmetric.cwiseAbs().maxCoeff());
    require(asymmetry(symmetric) <= 1e-8 * scale, "eigen: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (symmetric + symmetric.transpose()));
    if (solver.info() != Eigen::Success) fail(ErrorKind::InvalidData, "eigen: decomposition failed");
    const Eigen::Index p = symmetric.rows();
    EigenSystem out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    for (Eigen::Index j = 0; j < p; ++j) {
        Eigen::Index arg = 0;
        out.vectors.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.vectors(arg, j) < 0.0) out.vectors.col(j) *= -1.0;
    }
    return out;
}

EigenSystem eigen(const CovarianceOperator& op) { return eigen(op.matrix); }

GeneralizedEigen gen_eigen_compressed(const Matrix& A, const Matrix& B) {
    require(A.rows() == A.cols() && B.rows() == B.cols() && A.rows() == B.rows(), "gen_eigen: shape mismatch");
    const Matrix Bs = 0.5 * (B + B.transpose());
    const Matrix As = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> bspec(Bs, Eigen::EigenvaluesOnly);
    const double largest = bspec.eigenvalues().maxCoeff();
    const double smallest = bspec.eigenvalues().minCoeff();
    if (!(largest > 0.0) || !(smallest > 1e-12 * largest))
        fail(ErrorKind::SingularPencil,
             "gen_eigen: restricted B is numerically singular (check alpha and K against the data)");
    Eigen::LLT<Matrix> llt(Bs);
    if (llt.info() != Eigen::Success) fail(ErrorKind::SingularPencil, "gen_eigen: Cholesky of restricted B failed");
    const Matrix L = llt.matrixL();
    // C = L^{-1} A L^{-T}
    const Matrix tmp = L.triangularView<Eigen::Lower>().solve(As);
    Matrix C = L.triangularView<Eigen::Lower>().solve(tmp.transpose());
    C = 0.5 * (C + C.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> cs(C);
    if (cs.info() != Eigen::Success) fail(ErrorKind::SingularPencil, "gen_eigen: reduced problem failed");
    GeneralizedEigen out;
    out.values = cs.eigenvalues();  // ascending
    out.vectors = L.transpose().triangularView<Eigen::Upper>().solve(cs.eigenvectors());
    for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
        out.vectors.col(j).normalize();
        Eigen::Index arg = 0;
        out.vectors.col(j).cwiseAbs().maxCoeff(&arg);
        if (out.vectors(arg, j) < 0.0) out.vectors.col(j) *= -1.0;
    }
    return out;
}

GeneralizedEigen gen_eigen(const Matrix& A, const Matrix& B, const Projection& subspace) {
    require(A.rows() == A.cols() && B.rows() == B.cols() && A.rows() == B.rows(), "gen_eigen: shape mismatch");
    require(static_cast<std::size_t>(A.rows()) == subspace.dim(), "gen_eigen: subspace dimension mismatch");
    require(subspace.rank() >= 1, "gen_eigen: empty subspace");
    const Matrix& F = subspace.frame();
    GeneralizedEigen reduced = gen_eigen_compressed(F.transpose() * A * F, F.transpose() * B * F);
    reduced.vectors = F * reduced.vectors;
    for (Eigen::Index j = 0; j < reduced.vectors.cols(); ++j) {
        reduced.vectors.col(j).normalize();
        Eigen::Index arg = 0;
        reduced.vectors.col(j).cwiseAbs().maxCoeff(&arg);
        if (reduced.vectors(arg, j) < 0.0) reduced.vectors.col(j) *= -1.0;
    }
    return reduced;
}

}  // namespace fraccurve

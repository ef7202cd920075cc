#pragma once

#include <cstddef>
#include <optional>

#include "fraccurve/funcspace.hpp"

namespace fraccurve {

enum class CovarianceKind { Contemporaneous, LongRun };

/// Symmetric p x p operator in basis coordinates.
struct CovarianceOperator {
    Matrix matrix;
    CovarianceKind kind = CovarianceKind::Contemporaneous;
    std::size_t T = 0;
    std::optional<std::size_t> bandwidth;  ///< h, LongRun only
    /// LongRun only: lag operators are plain sums over t without a 1/T factor.
    bool unnormalized_lags = false;
};

/// Descending eigenvalues with orthonormal eigenvectors in the columns.
/// Each vector's largest-magnitude entry is positive.
struct EigenSystem {
    Vector values;
    Matrix vectors;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
    /// First k eigenvectors (p x k).
    [[nodiscard]] Matrix leading(std::size_t k) const;
};

/// Orthogonal projection stored with an orthonormal frame of its range.
class Projection {
public:
    Projection() = default;  ///< 0 x 0, rank 0
    /// Projection onto span of the columns of `frame` (orthonormalized internally).
    static Projection onto(const Matrix& frame, std::size_t dim);
    static Projection zero(std::size_t dim);
    static Projection identity(std::size_t dim);

    [[nodiscard]] const Matrix& matrix() const noexcept { return matrix_; }
    [[nodiscard]] const Matrix& frame() const noexcept { return frame_; }
    [[nodiscard]] std::size_t rank() const noexcept { return static_cast<std::size_t>(frame_.cols()); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    [[nodiscard]] Matrix complement() const;

private:
    Projection(Matrix frame, std::size_t dim);
    Matrix frame_;
    Matrix matrix_;
};

/// T^{-1} sum_t Z_t Z_t' of the series (optionally centered first).
[[nodiscard]] CovarianceOperator sample_cov(const FunctionalSeries& series, bool centered);

/// Bartlett long-run operator sum_{|s|<h} (1 - |s|/h) C_s with the unnormalized
/// lag sums C_s = sum_t Z_{t-s} (x) Z_t. Expects an already centered series.
/// Lags are accumulated in parallel.
[[nodiscard]] CovarianceOperator bartlett_lrcov(const FunctionalSeries& series, std::size_t h);
[[nodiscard]] Matrix bartlett_lrcov(const Matrix& z, std::size_t h);
/// Single-threaded reference kernel for the above.
[[nodiscard]] Matrix bartlett_lrcov_serial(const Matrix& z, std::size_t h);

[[nodiscard]] EigenSystem eigen(const Matrix& symmetric);
[[nodiscard]] EigenSystem eigen(const CovarianceOperator& op);

struct GeneralizedEigen {
    Vector values;   ///< ascending nu_1 <= ... <= nu_K
    Matrix vectors;  ///< p x K, unit-norm w_j in the original coordinates
};

/// Solves nu B w = A w for w restricted to the range of `subspace` by
/// compressing onto the subspace frame and factorizing the restricted B.
[[nodiscard]] GeneralizedEigen gen_eigen(const Matrix& A, const Matrix& B, const Projection& subspace);

/// Same problem already expressed in K x K frame coordinates (A, B symmetric,
/// B positive definite). Vectors are returned in frame coordinates.
[[nodiscard]] GeneralizedEigen gen_eigen_compressed(const Matrix& A, const Matrix& B);

/// Largest |M - M'| entry.
[[nodiscard]] double asymmetry(const Matrix& m);

}  // namespace fraccurve

#pragma once

#include <cstddef>
#include <vector>

#include "fraccurve/funcspace.hpp"

namespace fraccurve {

/// Coefficients c_j of the power series (1 - L)^d, j = 0..n-1:
/// c_j = Gamma(j - d) / (Gamma(-d) Gamma(j + 1)).
struct FracCoefficients {
    double d = 0.0;
    std::vector<double> coeffs;
};

/// Built with the recurrence c_j = c_{j-1} (j - 1 - d) / j (Gamma ratios overflow past j ~ 170).
[[nodiscard]] FracCoefficients frac_coeffs(double d, std::size_t n);

/// Truncated fractional difference applied to each column of a T x p matrix:
/// out(t) = sum_{j=0}^{t-1} c_j(d) in(t - j), i.e. the filter only sees in-sample
/// values. Pass -d for the truncated fractional integration operator.
///
/// Dispatches to the direct O(T^2) kernel for T <= kFftThreshold and to FFT
/// convolution above it. Columns run in parallel.
[[nodiscard]] Matrix frac_filter(const Matrix& in, double d);
[[nodiscard]] FunctionalSeries frac_filter(const FunctionalSeries& series, double d);

/// Single-threaded direct convolution; the reference the parallel kernels are tested against.
[[nodiscard]] Matrix frac_filter_serial(const Matrix& in, double d);

/// Direct convolution, columns in parallel.
[[nodiscard]] Matrix frac_filter_direct(const Matrix& in, double d);

/// FFT convolution, columns in parallel.
[[nodiscard]] Matrix frac_filter_fft(const Matrix& in, double d);

inline constexpr std::size_t kFftThreshold = 2048;

}  // namespace fraccurve

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fraccurve/funcspace.hpp"
#include "fraccurve/rng.hpp"
#include "fraccurve/spectra.hpp"

namespace fraccurve {

enum class MemoryTarget { D, DMinusB };
enum class MemoryMethod { Levels, Differenced };

const char* to_string(MemoryMethod method) noexcept;
MemoryMethod memory_method_from_string(const std::string& name);

struct ProjectionEstimate {
    Vector direction;  ///< v in the series' basis coordinates
    double d_hat = 0.0;  ///< includes the +1 of the differenced d estimator
};

struct MemoryEstimate {
    MemoryTarget target = MemoryTarget::D;
    MemoryMethod method = MemoryMethod::Differenced;
    double value = 0.0;
    std::size_t m = 0;
    std::vector<ProjectionEstimate> per_projection;
    std::size_t skipped = 0;  ///< degenerate projections left out of the max
    std::optional<Interval> ci;
    double ci_level = 0.0;
};

struct MemoryConfig {
    std::size_t L = 20;
    std::size_t J = 5;
    std::size_t m = 0;  ///< 0: floor(1 + T^0.65) of the series the estimator runs on
    double bandwidth_exponent = 0.65;
    MemoryMethod method = MemoryMethod::Differenced;
    /// Basis whose first J functions are mixed into the random directions; the
    /// directions are mapped into the series' basis by exact inner products.
    BasisKind direction_basis = BasisKind::ShiftedLegendre;
};

/// max over L random directions v = sum_{j<=J} a_j e_j, a_j ~ N(1,1), of the
/// local Whittle estimate of <Z, v>. Differenced: 1 + max over <Delta Z_t, v>
/// on the stationary range. Levels: max over <Z_t - Z_1, v> on the
/// nonstationary range (inconsistent for d >= 1).
/// Direction l draws from the substream (draw_seed(rng), l), so results do not
/// depend on how the directions are scheduled.
[[nodiscard]] MemoryEstimate estimate_d(const FunctionalSeries& series, const MemoryConfig& config, Rng& rng);

/// max over L directions v = v_{q+1} + sum_{2<=j<=J} a_j v_{q+j}, a_j ~ N(0,1),
/// of the local Whittle estimate of <Zbar_t, v> on the stationary range, with
/// v_k the eigenvectors of the sample covariance of the centered series.
[[nodiscard]] MemoryEstimate estimate_d_minus_b(const FunctionalSeries& series, std::size_t q_d,
                                                const MemoryConfig& config, Rng& rng);

/// Single-direction baseline for d: local Whittle of <Z_t - Z_1, v_1> on the
/// nonstationary range, v_1 the leading eigenvector of T^{-1} sum Z^0_t (x) Z^0_t.
[[nodiscard]] MemoryEstimate baseline_d(const FunctionalSeries& series, std::size_t m = 0);

/// Single-direction baseline for d - b: local Whittle of <Zbar_t, v_{q+1}>.
[[nodiscard]] MemoryEstimate baseline_d_minus_b(const FunctionalSeries& series, std::size_t q_d, std::size_t m = 0);

/// Normal-approximation interval value -/+ z / (2 sqrt(m)). For the max-of-L
/// estimators this is the single-projection law applied at the max, so it is
/// approximate.
[[nodiscard]] MemoryEstimate memory_ci(MemoryEstimate est, double level);

}  // namespace fraccurve

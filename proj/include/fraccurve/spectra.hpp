#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fraccurve {

/// I(lambda_j) = |sum_t x_t e^{i t lambda_j}|^2 / (2 pi T) at lambda_j = 2 pi j / T, j = 1..floor(T/2).
struct Periodogram {
    std::vector<double> ordinates;  ///< ordinates[j-1] = I(lambda_j)
    std::size_t T = 0;

    [[nodiscard]] double frequency(std::size_t j) const;
};

[[nodiscard]] Periodogram periodogram(std::span<const double> x);

/// Closed interval of admissible memory values for the Whittle search.
struct AdmissibleRange {
    double lo;
    double hi;

    AdmissibleRange(double lo, double hi);

    static AdmissibleRange stationary() { return {-0.49, 0.49}; }
    static AdmissibleRange nonstationary() { return {0.05, 1.45}; }
};

/// floor(1 + T^exponent); the usual choice is exponent 0.65.
[[nodiscard]] std::size_t default_bandwidth(std::size_t T, double exponent = 0.65);

/// Concentrated local Whittle objective over the first m ordinates.
class WhittleObjective {
public:
    WhittleObjective(const Periodogram& pg, std::size_t m);

    /// R(d) = log(m^{-1} sum_j lambda_j^{2d} I_j) - 2 d m^{-1} sum_j log lambda_j, up to an
    /// additive constant (ordinates are divided by their maximum).
    [[nodiscard]] double operator()(double d) const;
    [[nodiscard]] std::size_t bandwidth() const noexcept { return log_freq_.size(); }

private:
    std::vector<double> log_freq_;
    std::vector<double> ordinates_;
    double mean_log_freq_ = 0.0;
};

inline constexpr std::size_t kWhittleGridPoints = 512;
inline constexpr double kWhittleTolerance = 1e-7;

struct WhittleFit {
    double d_hat;
    double objective;
    std::size_t m;
};

/// Local Whittle estimate: argmin of R over [lo, hi] by a 512-point grid scan
/// refined with golden-section search to 1e-7. The returned point never has a
/// larger objective than the best grid point.
[[nodiscard]] WhittleFit local_whittle_fit(std::span<const double> x, std::size_t m, const AdmissibleRange& range);
[[nodiscard]] double local_whittle(std::span<const double> x, std::size_t m, const AdmissibleRange& range);

struct Interval {
    double lo;
    double hi;
    [[nodiscard]] bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    [[nodiscard]] double width() const noexcept { return hi - lo; }
};

/// d_hat -/+ z_{(1+level)/2} / (2 sqrt(m)), from the N(0, 1/4) limit of sqrt(m)(d_hat - d).
[[nodiscard]] Interval lw_confidence(double d_hat, std::size_t m, double level);

/// Standard normal quantile.
[[nodiscard]] double normal_quantile(double p);

}  // namespace fraccurve

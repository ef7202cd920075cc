#include "fraccurve/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "fraccurve/errors.hpp"
#include "fraccurve/fft.hpp"

namespace fraccurve {

double Periodogram::frequency(std::size_t j) const {
    return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(T);
}

Periodogram periodogram(std::span<const double> x) {
    const std::size_t T = x.size();
    require(T >= 4, "periodogram: need at least 4 observations");
    for (double v : x)
        if (!std::isfinite(v)) fail(ErrorKind::InvalidData, "periodogram: non-finite input");

    RealFft fft(T);
    std::vector<std::complex<double>> spec(fft.spectrum_size());
    fft.forward(x, spec);
    Periodogram pg;
    pg.T = T;
    pg.ordinates.resize(T / 2);
    const double norm = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(T));
    double sumsq = 0.0;
    for (double v : x) sumsq += v * v;
    // ordinates at rounding level relative to the series energy are exact zeros
    // (a constant series has no energy off frequency zero)
    const double floor = 1e-26 * sumsq / (2.0 * std::numbers::pi);
    for (std::size_t j = 1; j <= T / 2; ++j) {
        const double v = std::norm(spec[j]) * norm;
        pg.ordinates[j - 1] = v > floor ? v : 0.0;
    }
    return pg;
}

AdmissibleRange::AdmissibleRange(double lo_, double hi_) : lo(lo_), hi(hi_) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "admissible range must satisfy lo < hi");
}

std::size_t default_bandwidth(std::size_t T, double exponent) {
    return static_cast<std::size_t>(std::floor(1.0 + std::pow(static_cast<double>(T), exponent)));
}

WhittleObjective::WhittleObjective(const Periodogram& pg, std::size_t m) {
    require(m >= 2 && m <= pg.ordinates.size(), "local Whittle: bandwidth must satisfy 2 <= m <= T/2");
    log_freq_.resize(m);
    ordinates_.assign(pg.ordinates.begin(), pg.ordinates.begin() + static_cast<std::ptrdiff_t>(m));
    double sum = 0.0;
    double peak = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        log_freq_[j] = std::log(pg.frequency(j + 1));
        sum += log_freq_[j];
        peak = std::max(peak, ordinates_[j]);
    }
    mean_log_freq_ = sum / static_cast<double>(m);
    if (!(peak > 0.0)) fail(ErrorKind::DegenerateInput, "local Whittle: all periodogram ordinates are zero");
    // rescale so the objective does not underflow for tiny inputs; shifts R by a constant
    for (double& v : ordinates_) v /= peak;
}

double WhittleObjective::operator()(double d) const {
    double s = 0.0;
    const double two_d = 2.0 * d;
    for (std::size_t j = 0; j < log_freq_.size(); ++j) s += std::exp(two_d * log_freq_[j]) * ordinates_[j];
    return std::log(s / static_cast<double>(log_freq_.size())) - two_d * mean_log_freq_;
}

WhittleFit local_whittle_fit(std::span<const double> x, std::size_t m, const AdmissibleRange& range) {
    const Periodogram pg = periodogram(x);
    const WhittleObjective R(pg, m);

    const std::size_t n = kWhittleGridPoints;
    const double step = (range.hi - range.lo) / static_cast<double>(n - 1);
    std::size_t best = 0;
    double best_val = R(range.lo);
    for (std::size_t i = 1; i < n; ++i) {
        const double v = R(range.lo + step * static_cast<double>(i));
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double grid_best = range.lo + step * static_cast<double>(best);
    double a = best == 0 ? range.lo : grid_best - step;
    double b = best == n - 1 ? range.hi : grid_best + step;

    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double e = a + inv_phi * (b - a);
    double fc = R(c), fe = R(e);
    while (b - a > kWhittleTolerance) {
        if (fc < fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = R(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = R(e);
        }
    }
    const double refined = std::clamp(0.5 * (a + b), range.lo, range.hi);
    const double refined_val = R(refined);
    if (refined_val <= best_val) return {refined, refined_val, m};
    return {grid_best, best_val, m};
}

double local_whittle(std::span<const double> x, std::size_t m, const AdmissibleRange& range) {
    return local_whittle_fit(x, m, range).d_hat;
}

double normal_quantile(double p) {
    require(p > 0.0 && p < 1.0, "normal_quantile: p must lie in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

Interval lw_confidence(double d_hat, std::size_t m, double level) {
    require(level > 0.0 && level < 1.0, "lw_confidence: level must lie in (0,1)");
    require(m >= 1, "lw_confidence: bandwidth must be positive");
    const double half = normal_quantile(0.5 * (1.0 + level)) / (2.0 * std::sqrt(static_cast<double>(m)));
    return {d_hat - half, d_hat + half};
}

}  // namespace fraccurve

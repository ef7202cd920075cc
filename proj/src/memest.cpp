#include "fraccurve/memest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fraccurve/covariance.hpp"
#include "fraccurve/errors.hpp"

namespace fraccurve {

const char* to_string(MemoryMethod method) noexcept {
    return method == MemoryMethod::Levels ? "levels" : "differenced";
}

MemoryMethod memory_method_from_string(const std::string& name) {
    if (name == "levels") return MemoryMethod::Levels;
    if (name == "differenced") return MemoryMethod::Differenced;
    fail(ErrorKind::InvalidArgument, "unknown memory method '" + name + "' (expected levels or differenced)");
}

namespace {

std::size_t bandwidth_for(std::size_t T, const MemoryConfig& config) {
    const std::size_t m = config.m == 0 ? default_bandwidth(T, config.bandwidth_exponent) : config.m;
    require(m >= 2 && m <= T / 2, "memory estimation: bandwidth must satisfy 2 <= m <= T/2 (T = " +
                                      std::to_string(T) + ", m = " + std::to_string(m) + ")");
    return m;
}

// Runs the estimator on every direction (columns of dirs) and fills the max.
void fill_estimates(MemoryEstimate& est, const Matrix& z, const Matrix& dirs, const AdmissibleRange& range) {
    const auto L = dirs.cols();
    std::vector<double> values(static_cast<std::size_t>(L), 0.0);
    std::vector<char> ok(static_cast<std::size_t>(L), 0);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (L > 1)
    for (Eigen::Index l = 0; l < L; ++l) {
        try {
            const Vector x = z * dirs.col(l);
            values[static_cast<std::size_t>(l)] = local_whittle({x.data(), static_cast<std::size_t>(x.size())}, est.m, range);
            ok[static_cast<std::size_t>(l)] = 1;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateInput) {
#pragma omp critical(fraccurve_memest)
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    const double shift = est.target == MemoryTarget::D && est.method == MemoryMethod::Differenced ? 1.0 : 0.0;
    bool any = false;
    for (Eigen::Index l = 0; l < L; ++l) {
        if (!ok[static_cast<std::size_t>(l)]) {
            ++est.skipped;
            continue;
        }
        const double v = values[static_cast<std::size_t>(l)] + shift;
        est.per_projection.push_back({dirs.col(l), v});
        est.value = any ? std::max(est.value, v) : v;
        any = true;
    }
    if (!any) fail(ErrorKind::NoValidProjection, "memory estimation: every projection was degenerate");
}

}  // namespace

MemoryEstimate estimate_d(const FunctionalSeries& series, const MemoryConfig& config, Rng& rng) {
    require(config.L >= 1 && config.J >= 1, "estimate_d: L and J must be positive");
    const std::size_t p = series.dim();
    require(config.J <= p, "estimate_d: J must not exceed the basis dimension");
    require(series.length() >= 3, "estimate_d: need at least 3 observations");

    const FunctionalSeries z = config.method == MemoryMethod::Differenced ? first_difference(series)
                                                                           : initialize(series);
    MemoryEstimate est;
    est.target = MemoryTarget::D;
    est.method = config.method;
    est.m = bandwidth_for(z.length(), config);

    const Matrix G = cross_gram(series.basis(), Basis(config.direction_basis, config.J), config.J);
    const std::uint64_t base = draw_seed(rng);
    Matrix dirs(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(config.L));
    for (std::size_t l = 0; l < config.L; ++l) {
        Rng r = substream(base, {l});
        std::normal_distribution<double> coef(1.0, 1.0);
        Vector a(static_cast<Eigen::Index>(config.J));
        for (auto& v : a) v = coef(r);
        dirs.col(static_cast<Eigen::Index>(l)) = G * a;
    }
    fill_estimates(est, z.coeffs(), dirs,
                   config.method == MemoryMethod::Differenced ? AdmissibleRange::stationary()
                                                              : AdmissibleRange::nonstationary());
    return est;
}

MemoryEstimate estimate_d_minus_b(const FunctionalSeries& series, std::size_t q_d, const MemoryConfig& config,
                                  Rng& rng) {
    require(config.L >= 1 && config.J >= 1, "estimate_d_minus_b: L and J must be positive");
    const std::size_t p = series.dim();
    require(q_d + config.J <= p, "estimate_d_minus_b: need q_d + J <= p");
    const FunctionalSeries zbar = center(series);
    MemoryEstimate est;
    est.target = MemoryTarget::DMinusB;
    est.method = MemoryMethod::Levels;
    est.m = bandwidth_for(zbar.length(), config);

    const EigenSystem eigs = eigen(sample_cov(zbar, false));
    const std::uint64_t base = draw_seed(rng);
    Matrix dirs(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(config.L));
    for (std::size_t l = 0; l < config.L; ++l) {
        Rng r = substream(base, {l});
        std::normal_distribution<double> coef(0.0, 1.0);
        Vector v = eigs.vectors.col(static_cast<Eigen::Index>(q_d));
        for (std::size_t j = 1; j < config.J; ++j) v += coef(r) * eigs.vectors.col(static_cast<Eigen::Index>(q_d + j));
        dirs.col(static_cast<Eigen::Index>(l)) = v;
    }
    fill_estimates(est, zbar.coeffs(), dirs, AdmissibleRange::stationary());
    return est;
}

MemoryEstimate baseline_d(const FunctionalSeries& series, std::size_t m) {
    const FunctionalSeries z0 = initialize(series);
    MemoryEstimate est;
    est.target = MemoryTarget::D;
    est.method = MemoryMethod::Levels;
    MemoryConfig cfg;
    cfg.m = m;
    est.m = bandwidth_for(z0.length(), cfg);
    const EigenSystem eigs = eigen(sample_cov(z0, false));
    fill_estimates(est, z0.coeffs(), eigs.vectors.leftCols(1), AdmissibleRange::nonstationary());
    return est;
}

MemoryEstimate baseline_d_minus_b(const FunctionalSeries& series, std::size_t q_d, std::size_t m) {
    require(q_d + 1 <= series.dim(), "baseline_d_minus_b: need q_d < p");
    const FunctionalSeries zbar = center(series);
    MemoryEstimate est;
    est.target = MemoryTarget::DMinusB;
    est.method = MemoryMethod::Levels;
    MemoryConfig cfg;
    cfg.m = m;
    est.m = bandwidth_for(zbar.length(), cfg);
    const EigenSystem eigs = eigen(sample_cov(zbar, false));
    fill_estimates(est, zbar.coeffs(), eigs.vectors.middleCols(static_cast<Eigen::Index>(q_d), 1),
                   AdmissibleRange::stationary());
    return est;
}

MemoryEstimate memory_ci(MemoryEstimate est, double level) {
    est.ci = lw_confidence(est.value, est.m, level);
    est.ci_level = level;
    return est;
}

}  // namespace fraccurve

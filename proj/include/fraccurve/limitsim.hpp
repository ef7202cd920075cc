#pragma once

#include <cstddef>
#include <cstdint>
#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "fraccurve/funcspace.hpp"
#include "fraccurve/rng.hpp"

namespace fraccurve {

/// Discretized type-II fractional Brownian motion on k/n, k = 0..n.
struct FbmPath {
    double d = 0.0;
    std::size_t n = 0;
    std::vector<double> values;  ///< values[0] = 0
};

/// values[k] = n^{1/2-d} y_k with y = Delta_+^{-d} eps, eps i.i.d. N(0,1).
/// Requires d > -1/2 and n >= 16.
[[nodiscard]] FbmPath simulate_fbm(double d, std::size_t n, Rng& rng);

/// n x q matrix of i.i.d. N(0,1) draws, column by column from rng.
[[nodiscard]] Matrix gaussian_matrix(std::size_t n, std::size_t q, Rng& rng);

struct NullDraw {
    Vector nu;  ///< ascending
    double stat_max = 0.0;
    double stat_trace = 0.0;
};

/// One draw of the null law by running the finite-sample statistic on q
/// independent truncated I(d) series built from the shocks eps (n x q).
[[nodiscard]] NullDraw null_draw_from_shocks(const Matrix& eps, double d, double alpha);

/// Pipeline draw with fresh shocks; a singular pencil is retried with new
/// shocks up to 3 times before the error propagates.
[[nodiscard]] NullDraw null_draw(std::size_t q, double d, double alpha, std::size_t n, Rng& rng);

/// Which path average multiplies the deterministic tilt r^alpha / Gamma(alpha + 1).
/// Level: int B_d, the limit of T^{1/2-d} Ybar that the statistic subtracts.
/// Integrated: int B_{d+alpha}; this variant does not match the statistic's limit
/// and is kept only to demonstrate the difference.
enum class TiltMean { Level, Integrated };

/// Independent discretization of the limit functional: B_delta from cell
/// averages of the kernel (s - r)^{delta-1} / Gamma(delta), demeaned B_d,
/// tilted B_{d+alpha} - mean * r^alpha / Gamma(alpha + 1), and Riemann sums
/// for the two integrals.
[[nodiscard]] NullDraw null_draw_direct_from_shocks(const Matrix& eps, double d, double alpha,
                                                    TiltMean tilt_mean = TiltMean::Level);
[[nodiscard]] NullDraw null_draw_direct(std::size_t q, double d, double alpha, std::size_t n, Rng& rng,
                                        TiltMean tilt_mean = TiltMean::Level);

/// Batch form of the pipeline draw for fixed (d, alpha, n): uses
/// Delta_+^{-alpha}(y - ybar) = Delta_+^{-(d+alpha)} eps - ybar * cumsum(pi(alpha))
/// with both filters applied by FFT, and returns the draws for every
/// q = 1..q_max from the leading q columns of the same shocks.
class NullSimulator {
public:
    NullSimulator(std::size_t q_max, double d, double alpha, std::size_t n);

    [[nodiscard]] std::size_t q_max() const noexcept { return q_max_; }
    [[nodiscard]] std::size_t n() const noexcept { return n_; }

    /// eps is n x q_max; result[q-1] is the draw for dimension q.
    [[nodiscard]] std::vector<NullDraw> draw(const Matrix& eps) const;

private:
    std::size_t q_max_;
    double d_;
    double alpha_;
    std::size_t n_;
    std::size_t fft_n_;
    std::vector<std::complex<double>> level_kernel_;
    std::vector<std::complex<double>> tilde_kernel_;
    std::vector<double> tilt_;  ///< cumulative sums of the Delta^{-alpha} coefficients
};

struct CriticalLookup {
    double crit_max = 0.0;
    double crit_trace = 0.0;
    bool clamped = false;  ///< d fell outside the grid and was clamped to its edge
};

struct CvTableMeta {
    std::size_t n = 1000;
    std::size_t R = 10000;
    std::uint64_t seed = 0;
    int version = 1;
};

struct CvRow {
    std::size_t q = 0;
    double alpha = 0.0;
    double d = 0.0;
    double eta = 0.0;
    double crit_max = 0.0;
    double crit_trace = 0.0;
};

/// Simulated (1 - eta) quantiles of Lambda^0 and Lambda^1 under the null,
/// indexed by (q, alpha, d, eta). Rows are kept sorted.
class CriticalValueTable {
public:
    CriticalValueTable() = default;
    CriticalValueTable(CvTableMeta meta, std::vector<CvRow> rows);

    [[nodiscard]] const CvTableMeta& meta() const noexcept { return meta_; }
    [[nodiscard]] const std::vector<CvRow>& rows() const noexcept { return rows_; }
    [[nodiscard]] bool empty() const noexcept { return rows_.empty(); }

    /// Linear interpolation in d between grid cells, exact at grid points,
    /// clamped outside the grid. Throws TableMiss naming the cell when
    /// (q, alpha, eta) has no rows.
    [[nodiscard]] CriticalLookup lookup(std::size_t q, double d, double alpha, double eta) const;

    [[nodiscard]] bool covers(std::size_t q, double alpha, double eta) const;
    [[nodiscard]] std::vector<std::size_t> dimensions() const;

    /// Adds rows from another table with identical meta; existing cells are kept.
    void merge(const CriticalValueTable& other);

    /// First line "# {json meta}", then the header and one row per cell.
    /// Written to a temporary file and renamed into place.
    void write_csv(const std::filesystem::path& path) const;
    [[nodiscard]] static CriticalValueTable read_csv(const std::filesystem::path& path);

private:
    CvTableMeta meta_;
    std::vector<CvRow> rows_;
};

struct CvBuildConfig {
    std::vector<std::size_t> qs{1, 2, 3, 4};
    double alpha = 0.5;
    std::vector<double> d_grid;  ///< empty: 0.51, 0.52, ..., 1.49
    std::vector<double> etas{0.01, 0.05, 0.10};
    std::size_t n = 1000;
    std::size_t R = 10000;
    std::uint64_t seed = 20240601;
};

[[nodiscard]] std::vector<double> default_d_grid();

/// Draws run in parallel; shocks for draw r, column c at grid point d come
/// from the substream (seed, round(1e6 d), r, c), so every q shares columns
/// and the table does not depend on the thread count.
[[nodiscard]] CriticalValueTable build_cv_table(const CvBuildConfig& config);

/// Raw statistic draws (R x |qs|) for one d, in draw order; used by the table
/// builder and by convergence checks.
struct NullSample {
    std::vector<std::size_t> qs;
    Matrix stat_max;    ///< R x |qs|
    Matrix stat_trace;  ///< R x |qs|
};
[[nodiscard]] NullSample simulate_null_sample(const std::vector<std::size_t>& qs, double d, double alpha,
                                              std::size_t n, std::size_t R, std::uint64_t seed,
                                              std::size_t first_draw = 0);

/// Type-7 sample quantile (linear interpolation between order statistics).
[[nodiscard]] double sample_quantile(std::vector<double> values, double prob);

}  // namespace fraccurve

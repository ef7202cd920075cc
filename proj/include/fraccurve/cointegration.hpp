#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fraccurve/covariance.hpp"
#include "fraccurve/funcspace.hpp"

namespace fraccurve {

class CriticalValueTable;

struct RatioEstimate {
    std::size_t q = 0;
    Projection P;
    Vector ratios;  ///< mu_j / mu_{j+1}, j = 1..K
};

/// argmax_{1<=j<=K} mu_j / mu_{j+1} (smallest index on ties) and the projection
/// onto the leading q eigenvectors. Eigenvalues below 1e-12 mu_1 inside the
/// window count as zero.
[[nodiscard]] RatioEstimate ratio_estimate_qd(const EigenSystem& eigs, std::size_t K);

/// Generalized eigenvalues of the variance-ratio pencil for one frame.
struct VrPencil {
    Vector nu_scaled;  ///< T^{2 alpha} nu_1..nu_K, ascending
    Matrix w;          ///< p x K unit-norm generalized eigenvectors (frame coordinates mapped back)
    Matrix u;          ///< p x K unit-norm left eigenvectors B w_j (equivalently A w_j)
};

/// Core of the variance-ratio statistic on a centered T x p matrix: X = Zbar F,
/// Xtilde = Delta_+^{-alpha} X, A = X'X, B = Xtilde'Xtilde, nu B w = A w.
/// F is an orthonormal p x K frame (identity when K = p).
[[nodiscard]] VrPencil vr_pencil(const Matrix& zbar, const Matrix& frame, double alpha);

struct RankTestOutcome {
    std::size_t q_tested = 0;
    std::size_t K_used = 0;
    double alpha = 0.5;
    double d_used = 0.0;
    Vector nu_scaled;      ///< T^{2 alpha} nu_1..nu_q
    Vector nu_all_scaled;  ///< all K scaled eigenvalues
    Matrix w;              ///< p x K generalized eigenvectors
    Matrix u;              ///< p x K left eigenvectors B w_j, normalized
    double stat_max = 0.0;
    double stat_trace = 0.0;
    double crit_max = 0.0;
    double crit_trace = 0.0;
    double eta = 0.0;
    bool reject_max = false;
    bool reject_trace = false;
    bool crit_clamped = false;  ///< d_used fell outside the table's d grid
};

/// Lambda^0 = T^{2 alpha} max_{j<=q} nu_j and Lambda^1 = T^{2 alpha} sum_{j<=q} nu_j
/// with the pencil restricted to the K leading eigenvectors of the sample
/// covariance of the centered series. Requires q <= K <= p and T >= 10.
[[nodiscard]] RankTestOutcome vr_statistics(const FunctionalSeries& series, std::size_t q, std::size_t K,
                                            double alpha);

enum class RankStatistic { Max, Trace };

struct SequentialConfig {
    std::size_t q_max = 0;  ///< 0: ratio estimate (K = min(7, p-1)) + 2, capped at p - 2
    double alpha = 0.5;
    double eta = 0.05;
    std::size_t K_offset = 2;  ///< K = q + K_offset at each step
    RankStatistic statistic = RankStatistic::Max;
};

struct SequentialResult {
    std::size_t q_bar = 0;        ///< decision from the configured statistic
    std::size_t q_bar_max = 0;    ///< decision using Lambda^0
    std::size_t q_bar_trace = 0;  ///< decision using Lambda^1
    std::size_t q_max = 0;
    Projection P_tilde;           ///< span of B w_1..B w_{q_bar} at the stopping step
    std::vector<RankTestOutcome> steps;  ///< q_max, q_max-1, ... in test order
};

/// Tests H0: q_d = q against q_d < q for q = q_max..1 and stops at the first
/// non-rejection; all rejections give q_bar = 0. Both statistics are computed
/// at every step so both decisions can be reported; the sequence is run until
/// both have stopped.
[[nodiscard]] SequentialResult sequential_rank_test(const FunctionalSeries& series, const SequentialConfig& config,
                                                    double d_hat, const CriticalValueTable& table);

/// Default q_max: eigenvalue-ratio estimate with K = min(7, p-1), plus 2.
[[nodiscard]] std::size_t default_q_max(const FunctionalSeries& series);

struct LrdSrdSplit {
    std::size_t q_db = 0;
    Projection Q;      ///< LRD directions inside the complement of P_bar
    Projection srd;    ///< I - P_bar - Q
    EigenSystem spectrum;  ///< of (I - P_bar) Lambda_hat (I - P_bar)
    Vector ratios;
};

/// Eigenvalue-ratio split of the stationary part via the Bartlett long-run
/// operator of the centered series projected off P_bar. Requires K < p - rank(P_bar).
[[nodiscard]] LrdSrdSplit lrd_srd_split(const FunctionalSeries& series, const Projection& P_bar, std::size_t h,
                                        std::size_t K);

/// Both presets are floor(1 + T^e) with e = 0.3 or 0.4.
[[nodiscard]] std::size_t lrcov_bandwidth(std::size_t T, double exponent);

}  // namespace fraccurve

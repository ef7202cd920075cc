#include "fraccurve/cointegration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fraccurve/errors.hpp"
#include "fraccurve/fracdiff.hpp"
#include "fraccurve/limitsim.hpp"

namespace fraccurve {

namespace {

void fix_signs(Matrix& v) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        v.col(j).normalize();
        Eigen::Index arg = 0;
        v.col(j).cwiseAbs().maxCoeff(&arg);
        if (v(arg, j) < 0.0) v.col(j) *= -1.0;
    }
}

// Centered coefficients with the spectrum of their sample covariance.
struct Prepared {
    Matrix zbar;
    EigenSystem eigs;
};

Prepared prepare(const FunctionalSeries& series) {
    Prepared out;
    out.zbar = center(series).coeffs();
    const auto T = static_cast<double>(out.zbar.rows());
    out.eigs = eigen(Matrix(out.zbar.transpose() * out.zbar / T));
    return out;
}

RankTestOutcome vr_from_prepared(const Prepared& prep, std::size_t q, std::size_t K, double alpha) {
    const auto p = static_cast<std::size_t>(prep.zbar.cols());
    require(q >= 1 && q <= K, "vr_statistics: need 1 <= q <= K");
    require(K <= p, "vr_statistics: K exceeds the basis dimension");
    require(alpha > 0.0 && std::isfinite(alpha), "vr_statistics: alpha must be positive");
    const VrPencil pencil = vr_pencil(prep.zbar, prep.eigs.leading(K), alpha);
    RankTestOutcome out;
    out.q_tested = q;
    out.K_used = K;
    out.alpha = alpha;
    out.nu_all_scaled = pencil.nu_scaled;
    out.nu_scaled = pencil.nu_scaled.head(static_cast<Eigen::Index>(q));
    out.w = pencil.w;
    out.u = pencil.u;
    out.stat_max = out.nu_scaled.maxCoeff();
    out.stat_trace = out.nu_scaled.sum();
    return out;
}

}  // namespace

RatioEstimate ratio_estimate_qd(const EigenSystem& eigs, std::size_t K) {
    const std::size_t p = eigs.size();
    require(K >= 1, "ratio estimator: K must be at least 1");
    require(K + 1 <= p, "ratio estimator: need K + 1 <= p");
    const Vector& mu = eigs.values;
    if (!(mu(0) > 0.0)) fail(ErrorKind::DegenerateSpectrum, "ratio estimator: leading eigenvalue is not positive");
    RatioEstimate out;
    out.ratios.resize(static_cast<Eigen::Index>(K));
    std::size_t best = 0;
    for (std::size_t j = 0; j < K; ++j) {
        const double next = mu(static_cast<Eigen::Index>(j + 1));
        if (!(next > 1e-12 * mu(0)))
            fail(ErrorKind::DegenerateSpectrum, "ratio estimator: eigenvalue " + std::to_string(j + 2) +
                                                    " is zero inside the ratio window (reduce K)");
        out.ratios(static_cast<Eigen::Index>(j)) = mu(static_cast<Eigen::Index>(j)) / next;
        // ties within rounding keep the smaller index
        if (out.ratios(static_cast<Eigen::Index>(j)) >
            out.ratios(static_cast<Eigen::Index>(best)) * (1.0 + 1e-12))
            best = j;
    }
    out.q = best + 1;
    out.P = Projection::onto(eigs.leading(out.q), p);
    return out;
}

VrPencil vr_pencil(const Matrix& zbar, const Matrix& frame, double alpha) {
    require(frame.rows() == zbar.cols() && frame.cols() >= 1, "vr_pencil: frame shape mismatch");
    const Matrix X = zbar * frame;
    const Matrix Xt = frac_filter(X, -alpha);
    const GeneralizedEigen ge = gen_eigen_compressed(X.transpose() * X, Xt.transpose() * Xt);
    VrPencil out;
    out.nu_scaled = ge.values * std::pow(static_cast<double>(zbar.rows()), 2.0 * alpha);
    out.w = frame * ge.vectors;
    fix_signs(out.w);
    out.u = frame * (Xt.transpose() * (Xt * ge.vectors));
    for (Eigen::Index j = 0; j < out.u.cols(); ++j) out.u.col(j).normalize();
    fix_signs(out.u);
    return out;
}

RankTestOutcome vr_statistics(const FunctionalSeries& series, std::size_t q, std::size_t K, double alpha) {
    if (series.length() < 10) fail(ErrorKind::InsufficientData, "vr_statistics: need at least 10 observations");
    return vr_from_prepared(prepare(series), q, K, alpha);
}

std::size_t default_q_max(const FunctionalSeries& series) {
    const std::size_t p = series.dim();
    require(p >= 3, "default q_max: basis dimension must be at least 3");
    const Prepared prep = prepare(series);
    const std::size_t K = std::min<std::size_t>(7, p - 1);
    const std::size_t q = ratio_estimate_qd(prep.eigs, K).q;
    return std::min(q + 2, p - 2);
}

SequentialResult sequential_rank_test(const FunctionalSeries& series, const SequentialConfig& config, double d_hat,
                                      const CriticalValueTable& table) {
    require(config.eta > 0.0 && config.eta < 1.0, "sequential test: eta must lie in (0,1)");
    if (series.length() < 10) fail(ErrorKind::InsufficientData, "sequential test: need at least 10 observations");
    const std::size_t p = series.dim();
    SequentialResult out;
    out.q_max = config.q_max == 0 ? default_q_max(series) : config.q_max;
    require(out.q_max >= 1, "sequential test: q_max must be at least 1");
    require(out.q_max + config.K_offset <= p, "sequential test: q_max + K offset exceeds the basis dimension");

    const Prepared prep = prepare(series);
    bool stopped_max = false;
    bool stopped_trace = false;
    Matrix w_max, w_trace;
    for (std::size_t q = out.q_max; q >= 1 && !(stopped_max && stopped_trace); --q) {
        RankTestOutcome step = vr_from_prepared(prep, q, q + config.K_offset, config.alpha);
        const CriticalLookup cv = table.lookup(q, d_hat, config.alpha, config.eta);
        step.d_used = d_hat;
        step.eta = config.eta;
        step.crit_max = cv.crit_max;
        step.crit_trace = cv.crit_trace;
        step.crit_clamped = cv.clamped;
        step.reject_max = step.stat_max > cv.crit_max;
        step.reject_trace = step.stat_trace > cv.crit_trace;
        if (!stopped_max && !step.reject_max) {
            stopped_max = true;
            out.q_bar_max = q;
            w_max = step.u.leftCols(static_cast<Eigen::Index>(q));
        }
        if (!stopped_trace && !step.reject_trace) {
            stopped_trace = true;
            out.q_bar_trace = q;
            w_trace = step.u.leftCols(static_cast<Eigen::Index>(q));
        }
        out.steps.push_back(std::move(step));
    }
    const bool use_max = config.statistic == RankStatistic::Max;
    out.q_bar = use_max ? out.q_bar_max : out.q_bar_trace;
    const Matrix& w = use_max ? w_max : w_trace;
    out.P_tilde = out.q_bar == 0 ? Projection::zero(p) : Projection::onto(w, p);
    return out;
}

std::size_t lrcov_bandwidth(std::size_t T, double exponent) {
    return static_cast<std::size_t>(std::floor(1.0 + std::pow(static_cast<double>(T), exponent)));
}

LrdSrdSplit lrd_srd_split(const FunctionalSeries& series, const Projection& P_bar, std::size_t h, std::size_t K) {
    const std::size_t p = series.dim();
    require(P_bar.dim() == p, "lrd_srd_split: projection dimension mismatch");
    require(K + 1 <= p - P_bar.rank(), "lrd_srd_split: need K < p - rank(P_bar)");
    const Matrix zbar = center(series).coeffs();
    const Matrix lambda = bartlett_lrcov(zbar, h);
    const Matrix C = P_bar.complement();
    Matrix M = C * lambda * C;
    M = 0.5 * (M + M.transpose()).eval();

    LrdSrdSplit out;
    out.spectrum = eigen(M);
    const RatioEstimate est = ratio_estimate_qd(out.spectrum, K);
    out.q_db = est.q;
    out.ratios = est.ratios;
    out.Q = est.P;

    const EigenSystem rest = eigen(Matrix(C - out.Q.matrix()));
    Eigen::Index r = 0;
    while (r < rest.values.size() && rest.values(r) > 0.5) ++r;
    out.srd = Projection::onto(rest.vectors.leftCols(r), p);
    return out;
}

}  // namespace fraccurve

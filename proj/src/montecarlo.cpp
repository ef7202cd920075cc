#include "fraccurve/montecarlo.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fraccurve/cointegration.hpp"
#include "fraccurve/errors.hpp"
#include "fraccurve/limitsim.hpp"
#include "fraccurve/version.hpp"

namespace fraccurve {

const char* to_string(McTable table) noexcept {
    switch (table) {
        case McTable::T1: return "T1";
        case McTable::T2: return "T2";
        case McTable::T3: return "T3";
        case McTable::T4: return "T4";
        case McTable::T5: return "T5";
        case McTable::SizePower: return "SizePower";
    }
    return "?";
}

McTable mc_table_from_string(const std::string& name) {
    for (McTable t : {McTable::T1, McTable::T2, McTable::T3, McTable::T4, McTable::T5, McTable::SizePower})
        if (name == to_string(t)) return t;
    fail(ErrorKind::InvalidArgument, "unknown table '" + name + "' (expected T1, T2, T3, T4, T5 or SizePower)");
}

void MCConfig::validate() const {
    require(reps >= 1, "mc: reps must be at least 1");
    require(!T_list.empty(), "mc: empty T list");
    for (std::size_t T : T_list) require(T >= 10, "mc: every T must be at least 10");
    dgp.validate();
    require(q_max >= 1 && q_max + 2 <= dgp.p, "mc: q_max + 2 must not exceed p");
    require(alpha > 0.0, "mc: alpha must be positive");
    require(eta > 0.0 && eta < 1.0, "mc: eta must lie in (0,1)");
    require(ci_level > 0.0 && ci_level < 1.0, "mc: ci level must lie in (0,1)");
}

double interval_score(double lo, double hi, double x, double a) {
    double s = hi - lo;
    if (x < lo) s += 2.0 / a * (lo - x);
    if (x > hi) s += 2.0 / a * (x - hi);
    return s;
}

namespace {

enum class Kind { Frequency, Bias, Variance, Mse, AbsDiff, Mean };

struct MetricDef {
    std::string metric;
    std::string method;
    Kind kind;
    std::size_t raw;       ///< column of the per-replication record
    double reference = 0;  ///< truth for Bias/Mse, target for AbsDiff
};

struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

double mean_of(const std::vector<double>& x) {
    Kahan k;
    for (double v : x) k.add(v);
    return k.sum / static_cast<double>(x.size());
}

// divisor n; the standard error of a mean uses the same variance
double var_of(const std::vector<double>& x, double m) {
    Kahan k;
    for (double v : x) k.add((v - m) * (v - m));
    return k.sum / static_cast<double>(x.size());
}

MCCell reduce(const MetricDef& def, const std::vector<double>& x, std::size_t T) {
    MCCell cell{def.metric, def.method, T, std::numeric_limits<double>::quiet_NaN(), 0.0, x.size()};
    if (x.empty()) return cell;
    const double n = static_cast<double>(x.size());
    const double m = mean_of(x);
    switch (def.kind) {
        case Kind::Frequency:
            cell.value = m;
            cell.se = std::sqrt(m * (1.0 - m) / n);
            break;
        case Kind::AbsDiff:
            cell.value = std::abs(m - def.reference);
            cell.se = std::sqrt(m * (1.0 - m) / n);
            break;
        case Kind::Mean:
            cell.value = m;
            cell.se = std::sqrt(var_of(x, m) / n);
            break;
        case Kind::Bias:
            cell.value = m - def.reference;
            cell.se = std::sqrt(var_of(x, m) / n);
            break;
        case Kind::Variance: {
            cell.value = var_of(x, m);
            std::vector<double> sq;
            sq.reserve(x.size());
            for (double v : x) sq.push_back((v - m) * (v - m));
            const double sm = mean_of(sq);
            cell.se = std::sqrt(var_of(sq, sm) / n);
            break;
        }
        case Kind::Mse: {
            std::vector<double> sq;
            sq.reserve(x.size());
            for (double v : x) sq.push_back((v - def.reference) * (v - def.reference));
            cell.value = mean_of(sq);
            cell.se = std::sqrt(var_of(sq, cell.value) / n);
            break;
        }
    }
    return cell;
}

std::vector<MetricDef> metrics_for(const MCConfig& c) {
    const double d = c.dgp.d, db = c.dgp.d_minus_b;
    switch (c.table) {
        case McTable::T1:
            return {{"correct", "Proposed", Kind::Frequency, 0},   {"correct", "Proposed-trace", Kind::Frequency, 2},
                    {"correct", "LRS-type", Kind::Frequency, 4},   {"under", "Proposed", Kind::Frequency, 1},
                    {"under", "Proposed-trace", Kind::Frequency, 3}, {"under", "LRS-type", Kind::Frequency, 5},
                    {"plugin-d", "mean", Kind::Mean, 6}};
        case McTable::SizePower:
            return {{"size", "max-test", Kind::Frequency, 0},
                    {"power", "max-test", Kind::Frequency, 2},
                    {"size", "trace-test", Kind::Frequency, 1},
                    {"power", "trace-test", Kind::Frequency, 3}};
        case McTable::T2:
            return {{"correct", "Proposed", Kind::Frequency, 0},
                    {"under", "Proposed", Kind::Frequency, 1},
                    {"over", "Proposed", Kind::Frequency, 2},
                    {"correct", "true-P", Kind::Frequency, 3}};
        case McTable::T3:
            return {{"bias", "Proposed", Kind::Bias, 0, d},     {"variance", "Proposed", Kind::Variance, 0},
                    {"mse", "Proposed", Kind::Mse, 0, d},       {"bias", "LRS-type", Kind::Bias, 1, d},
                    {"variance", "LRS-type", Kind::Variance, 1}, {"mse", "LRS-type", Kind::Mse, 1, d}};
        case McTable::T4:
            return {{"bias", "Proposed", Kind::Bias, 0, db},     {"variance", "Proposed", Kind::Variance, 0},
                    {"mse", "Proposed", Kind::Mse, 0, db},       {"bias", "LRS-type", Kind::Bias, 1, db},
                    {"variance", "LRS-type", Kind::Variance, 1}, {"mse", "LRS-type", Kind::Mse, 1, db}};
        case McTable::T5:
            return {{"coverage-diff-d", "Proposed", Kind::AbsDiff, 0, c.ci_level},
                    {"interval-score-d", "Proposed", Kind::Mean, 1},
                    {"coverage-diff-d", "LRS-type", Kind::AbsDiff, 2, c.ci_level},
                    {"interval-score-d", "LRS-type", Kind::Mean, 3},
                    {"coverage-diff-d-b", "Proposed", Kind::AbsDiff, 4, c.ci_level},
                    {"interval-score-d-b", "Proposed", Kind::Mean, 5},
                    {"coverage-diff-d-b", "LRS-type", Kind::AbsDiff, 6, c.ci_level},
                    {"interval-score-d-b", "LRS-type", Kind::Mean, 7}};
    }
    return {};
}

double flag(bool b) { return b ? 1.0 : 0.0; }

MemoryConfig d_config(const MCConfig& c) {
    MemoryConfig m;
    m.L = c.L;
    m.J = c.J_d;
    m.method = c.d_method;
    m.direction_basis = c.direction_basis;
    m.bandwidth_exponent = c.m_exponent;
    return m;
}

MemoryConfig db_config(const MCConfig& c) {
    MemoryConfig m;
    m.L = c.L;
    m.J = c.J_db;
    m.bandwidth_exponent = c.m_exponent;
    return m;
}

std::vector<double> replicate(const MCConfig& c, const CriticalValueTable* table, std::size_t T, Rng& rng) {
    const DGPDraw draw = gen_dgp(c.dgp, T, rng);
    const FunctionalSeries& z = draw.series;
    const std::size_t qd = c.dgp.q_d;
    switch (c.table) {
        case McTable::T1: {
            const double dhat = estimate_d(z, d_config(c), rng).value;
            SequentialConfig sc;
            sc.q_max = c.q_max;
            sc.alpha = c.alpha;
            sc.eta = c.eta;
            const SequentialResult seq = sequential_rank_test(z, sc, dhat, *table);
            const std::size_t K = c.K_ratio == 0 ? c.q_max : c.K_ratio;
            const std::size_t qhat = ratio_estimate_qd(eigen(sample_cov(z, true)), K).q;
            return {flag(seq.q_bar_max == qd), flag(seq.q_bar_max < qd), flag(seq.q_bar_trace == qd),
                    flag(seq.q_bar_trace < qd), flag(qhat == qd),          flag(qhat < qd),
                    dhat};
        }
        case McTable::SizePower: {
            const double dhat = estimate_d(z, d_config(c), rng).value;
            std::vector<double> out;
            for (std::size_t q : {qd, qd + 1}) {
                RankTestOutcome o = vr_statistics(z, q, std::max(c.K_size, q), c.alpha);
                const CriticalLookup cv = table->lookup(q, dhat, c.alpha, c.eta);
                out.push_back(flag(o.stat_max > cv.crit_max));
                out.push_back(flag(o.stat_trace > cv.crit_trace));
            }
            return out;
        }
        case McTable::T2: {
            const std::size_t h = lrcov_bandwidth(T, c.h_exponent);
            const Projection Pbar = Projection::onto(eigen(sample_cov(z, true)).leading(qd), c.dgp.p);
            const std::size_t q = lrd_srd_split(z, Pbar, h, c.K_split).q_db;
            const std::size_t q_true_P = lrd_srd_split(z, draw.P, h, c.K_split).q_db;
            const std::size_t target = c.dgp.q_db;
            return {flag(q == target), flag(q < target), flag(q > target), flag(q_true_P == target)};
        }
        case McTable::T3:
            return {estimate_d(z, d_config(c), rng).value, baseline_d(z).value};
        case McTable::T4:
            return {estimate_d_minus_b(z, qd, db_config(c), rng).value, baseline_d_minus_b(z, qd).value};
        case McTable::T5: {
            const double a = 1.0 - c.ci_level;
            MemoryConfig bcfg;
            bcfg.bandwidth_exponent = c.m_exponent;
            const std::size_t m_lev = default_bandwidth(T - 1, c.m_exponent);
            const std::size_t m_bar = default_bandwidth(T, c.m_exponent);
            std::vector<double> out;
            auto score = [&](const MemoryEstimate& e, double truth) {
                const Interval ci = *memory_ci(e, c.ci_level).ci;
                out.push_back(flag(ci.contains(truth)));
                out.push_back(interval_score(ci.lo, ci.hi, truth, a));
            };
            score(estimate_d(z, d_config(c), rng), c.dgp.d);
            score(baseline_d(z, m_lev), c.dgp.d);
            score(estimate_d_minus_b(z, qd, db_config(c), rng), c.dgp.d_minus_b);
            score(baseline_d_minus_b(z, qd, m_bar), c.dgp.d_minus_b);
            return out;
        }
    }
    return {};
}

bool is_data_error(ErrorKind k) {
    return k == ErrorKind::SingularPencil || k == ErrorKind::DegenerateSpectrum ||
           k == ErrorKind::NoValidProjection || k == ErrorKind::DegenerateInput;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

const MCCell& MCReport::cell(const std::string& metric, const std::string& method, std::size_t T) const {
    for (const auto& c : cells)
        if (c.metric == metric && c.method == method && c.T == T) return c;
    fail(ErrorKind::InvalidArgument, "report has no cell " + metric + "/" + method + "/T=" + std::to_string(T));
}

std::string MCReport::to_csv() const {
    std::ostringstream os;
    os << "metric,method";
    for (std::size_t T : config.T_list) os << ",T=" << T << ",se_T=" << T;
    os << '\n';
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& c : cells) {
        const std::pair<std::string, std::string> k{c.metric, c.method};
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    for (const auto& [metric, method] : keys) {
        os << metric << ',' << method;
        for (std::size_t T : config.T_list) {
            const MCCell& c = cell(metric, method, T);
            os << ',' << fmt(c.value) << ',' << fmt(c.se);
        }
        os << '\n';
    }
    return os.str();
}

MCReport run_table(const MCConfig& config, const CriticalValueTable* table) {
    config.validate();
    const bool needs_cv = config.table == McTable::T1 || config.table == McTable::SizePower;
    if (needs_cv) {
        if (table == nullptr || table->empty())
            fail(ErrorKind::TableMiss, std::string("mc table ") + to_string(config.table) + " needs a critical-value table");
        const std::size_t top = config.table == McTable::T1 ? config.q_max : config.dgp.q_d + 1;
        for (std::size_t q = 1; q <= top; ++q)
            if (!table->covers(q, config.alpha, config.eta))
                fail(ErrorKind::TableMiss, "critical-value table lacks q=" + std::to_string(q) +
                                               ", alpha=" + std::to_string(config.alpha) +
                                               ", eta=" + std::to_string(config.eta));
    }
    if (config.table == McTable::T4 || config.table == McTable::T5)
        require(config.dgp.q_d + config.J_db <= config.dgp.p, "mc: q_d + J must not exceed p");

    const auto defs = metrics_for(config);
    MCReport report;
    report.config = config;
    for (std::size_t T : config.T_list) {
        std::vector<std::vector<double>> records(config.reps);
        std::vector<char> ok(config.reps, 0);
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t r = 0; r < static_cast<std::int64_t>(config.reps); ++r) {
            try {
                Rng rng = substream(config.seed, {static_cast<std::uint64_t>(T), static_cast<std::uint64_t>(r)});
                records[static_cast<std::size_t>(r)] = replicate(config, table, T, rng);
                ok[static_cast<std::size_t>(r)] = 1;
            } catch (const Error& e) {
                if (!is_data_error(e.kind())) {
#pragma omp critical(fraccurve_mc)
                    if (!failure) failure = std::current_exception();
                }
            } catch (...) {
#pragma omp critical(fraccurve_mc)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        std::size_t failed = 0;
        for (char k : ok) failed += k ? 0 : 1;
        report.failed.push_back(failed);
        for (const auto& def : defs) {
            std::vector<double> x;
            x.reserve(config.reps);
            for (std::size_t r = 0; r < config.reps; ++r)
                if (ok[r]) x.push_back(records[r][def.raw]);
            report.cells.push_back(reduce(def, x, T));
        }
    }

    nlohmann::json prov;
    prov["tool"] = std::string("fraccurve ") + kVersion;
    prov["table"] = to_string(config.table);
    prov["seed"] = config.seed;
    prov["reps"] = config.reps;
    prov["T"] = config.T_list;
    prov["failed_reps"] = report.failed;
    prov["stream"] = "replication r at sample size T uses substream (seed, T, r)";
    prov["dgp"] = {{"d", config.dgp.d},
                   {"d_minus_b", config.dgp.d_minus_b},
                   {"q_d", config.dgp.q_d},
                   {"q_db", config.dgp.q_db},
                   {"p", config.dgp.p},
                   {"basis", "fourier"},
                   {"arma_range", config.dgp.arma_range},
                   {"band", config.dgp.band},
                   {"innov_decay", config.dgp.innov_decay},
                   {"innov_rank", config.dgp.innov_rank},
                   {"burn_in", config.dgp.burn_in},
                   {"score_innovations", "N(0,1)"},
                   {"unstated_choices", {"burn_in", "score_innovations"}}};
    nlohmann::json est = {{"alpha", config.alpha},
                          {"eta", config.eta},
                          {"q_max", config.q_max},
                          {"K_ratio", config.K_ratio == 0 ? config.q_max : config.K_ratio},
                          {"K_size", config.K_size},
                          {"K_split", config.K_split},
                          {"h_exponent", config.h_exponent},
                          {"d_method", to_string(config.d_method)},
                          {"direction_basis", to_string(config.direction_basis)},
                          {"m_exponent", config.m_exponent},
                          {"L", config.L},
                          {"J_d", config.J_d},
                          {"J_db", config.J_db},
                          {"ci_level", config.ci_level},
                          {"ci_note", "normal approximation applied at the max over projections"}};
    prov["estimators"] = est;
    prov["standard_errors"] = "binomial for frequencies, sd/sqrt(n) otherwise; variances use divisor n";
    if (needs_cv)
        prov["critical_values"] = {{"n", table->meta().n},
                                   {"R", table->meta().R},
                                   {"seed", table->meta().seed},
                                   {"version", table->meta().version}};
    report.provenance = std::move(prov);
    return report;
}

}  // namespace fraccurve

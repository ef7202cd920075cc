#include "fraccurve/pipeline.hpp"

#include <algorithm>

#include "fraccurve/covariance.hpp"
#include "fraccurve/errors.hpp"
#include "fraccurve/io.hpp"
#include "fraccurve/limitsim.hpp"
#include "fraccurve/rng.hpp"
#include "fraccurve/spectra.hpp"
#include "fraccurve/version.hpp"

namespace fraccurve {

using nlohmann::json;

void PipelineConfig::validate() const {
    require(alpha > 0.0, "pipeline: alpha must be positive");
    require(eta > 0.0 && eta < 1.0, "pipeline: eta must lie in (0,1)");
    require(q_max >= 1, "pipeline: q_max must be at least 1");
    require(K_ratio >= 1 && K_split >= 1, "pipeline: K must be at least 1");
    require(h_exponent > 0.0 && h_exponent < 1.0, "pipeline: h exponent must lie in (0,1)");
    require(m_exponent > 0.0 && m_exponent < 1.0, "pipeline: m exponent must lie in (0,1)");
    require(L >= 1 && J_d >= 1 && J_db >= 1, "pipeline: L and J must be positive");
    require(ci_level > 0.0 && ci_level < 1.0, "pipeline: ci level must lie in (0,1)");
    for (std::size_t j : score_indices) require(j >= 1, "pipeline: score indices are 1-based");
}

json PipelineConfig::to_json() const {
    return {{"alpha", alpha},
            {"eta", eta},
            {"q_max", q_max},
            {"K_offset", K_offset},
            {"statistic", statistic == RankStatistic::Max ? "max" : "trace"},
            {"K_ratio", K_ratio},
            {"h_exponent", h_exponent},
            {"K_split", K_split},
            {"m_exponent", m_exponent},
            {"m", m},
            {"L", L},
            {"J_d", J_d},
            {"J_db", J_db},
            {"d_method", fraccurve::to_string(d_method)},
            {"direction_basis", fraccurve::to_string(direction_basis)},
            {"ci_level", ci_level},
            {"score_indices", score_indices},
            {"seed", seed}};
}

json memory_json(const MemoryEstimate& est) {
    json projections = json::array();
    for (const auto& p : est.per_projection)
        projections.push_back({{"d_hat", p.d_hat}, {"direction", to_json(p.direction)}});
    json out = {{"target", est.target == MemoryTarget::D ? "d" : "d_minus_b"},
                {"method", to_string(est.method)},
                {"value", est.value},
                {"m", est.m},
                {"skipped", est.skipped},
                {"projections", std::move(projections)}};
    if (est.ci) {
        out["ci"] = {est.ci->lo, est.ci->hi};
        out["ci_level"] = est.ci_level;
    } else {
        out["ci"] = nullptr;
    }
    return out;
}

json rank_test_json(const SequentialResult& result) {
    json steps = json::array();
    for (const auto& s : result.steps)
        steps.push_back({{"q", s.q_tested},
                         {"K", s.K_used},
                         {"alpha", s.alpha},
                         {"d_used", s.d_used},
                         {"eta", s.eta},
                         {"stat_max", s.stat_max},
                         {"stat_trace", s.stat_trace},
                         {"crit_max", s.crit_max},
                         {"crit_trace", s.crit_trace},
                         {"reject_max", s.reject_max},
                         {"reject_trace", s.reject_trace},
                         {"crit_clamped", s.crit_clamped},
                         {"nu_scaled", to_json(s.nu_all_scaled)}});
    return {{"q_bar", result.q_bar},
            {"q_bar_max", result.q_bar_max},
            {"q_bar_trace", result.q_bar_trace},
            {"q_max", result.q_max},
            {"steps", std::move(steps)}};
}

json split_json(const LrdSrdSplit& split, std::size_t h, std::size_t K) {
    return {{"q_db", split.q_db},
            {"h", h},
            {"K", K},
            {"ratios", to_json(split.ratios)},
            {"eigenvalues", to_json(split.spectrum.values)}};
}

json series_json(const FunctionalSeries& series) {
    return {{"label", series.label()},
            {"T", series.length()},
            {"p", series.dim()},
            {"basis", to_string(series.basis().kind())}};
}

PipelineResult run_pipeline(const FunctionalSeries& series, const PipelineConfig& config,
                            const CriticalValueTable& table) {
    config.validate();
    const std::size_t T = series.length();
    const std::size_t p = series.dim();
    require(config.q_max + config.K_offset <= p, "pipeline: q_max + K offset must not exceed p");
    require(config.K_ratio + 1 <= p, "pipeline: eigenvalue-ratio K must be below p");
    require(T >= 10, "pipeline: need at least 10 observations");
    std::vector<std::string> flags;

    MemoryConfig dcfg;
    dcfg.L = config.L;
    dcfg.J = config.J_d;
    dcfg.m = config.m;
    dcfg.bandwidth_exponent = config.m_exponent;
    dcfg.method = config.d_method;
    dcfg.direction_basis = config.direction_basis;
    Rng rng_d = substream(config.seed, {1});
    const MemoryEstimate d_prop = memory_ci(estimate_d(series, dcfg, rng_d), config.ci_level);
    const std::size_t m_levels = config.m ? config.m : default_bandwidth(T - 1, config.m_exponent);
    const MemoryEstimate d_lrs = memory_ci(baseline_d(series, m_levels), config.ci_level);

    SequentialConfig sc;
    sc.q_max = config.q_max;
    sc.alpha = config.alpha;
    sc.eta = config.eta;
    sc.K_offset = config.K_offset;
    sc.statistic = config.statistic;
    const SequentialResult seq = sequential_rank_test(series, sc, d_prop.value, table);
    const std::size_t q_bar = seq.q_bar;
    if (q_bar == 0) flags.emplace_back(kNoDominantSubspace);
    if (std::any_of(seq.steps.begin(), seq.steps.end(), [](const RankTestOutcome& s) { return s.crit_clamped; }))
        flags.emplace_back("plug-in d outside the critical-value grid; critical values clamped");

    const EigenSystem eigs = eigen(sample_cov(series, true));
    const RatioEstimate ratio = ratio_estimate_qd(eigs, config.K_ratio);

    const Projection P_bar = q_bar ? Projection::onto(eigs.leading(q_bar), p) : Projection::zero(p);
    const std::size_t h = lrcov_bandwidth(T, config.h_exponent);
    require(config.K_split + 1 + q_bar <= p, "pipeline: K_split + 1 + q_bar must not exceed p");
    const LrdSrdSplit split = lrd_srd_split(series, P_bar, h, config.K_split);

    MemoryConfig dbcfg;
    dbcfg.L = config.L;
    dbcfg.J = config.J_db;
    dbcfg.m = config.m;
    dbcfg.bandwidth_exponent = config.m_exponent;
    Rng rng_db = substream(config.seed, {2});
    const MemoryEstimate db_prop = memory_ci(estimate_d_minus_b(series, q_bar, dbcfg, rng_db), config.ci_level);
    const std::size_t m_bar = config.m ? config.m : default_bandwidth(T, config.m_exponent);
    const MemoryEstimate db_lrs = memory_ci(baseline_d_minus_b(series, q_bar, m_bar), config.ci_level);

    std::vector<std::size_t> idx = config.score_indices;
    if (idx.empty()) idx = {1, q_bar + 1, q_bar + split.q_db + 1};
    std::vector<std::size_t> kept;
    for (std::size_t j : idx)
        if (j <= p && std::find(kept.begin(), kept.end(), j) == kept.end()) kept.push_back(j);
    const FunctionalSeries z0 = initialize(series);
    const EigenSystem eig0 = eigen(sample_cov(z0, false));
    Matrix scores(static_cast<Eigen::Index>(z0.length()), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k)
        scores.col(static_cast<Eigen::Index>(k)) = z0.project(eig0.vectors.col(static_cast<Eigen::Index>(kept[k] - 1)));
    json score_eigs = json::array();
    for (std::size_t j : kept) score_eigs.push_back(eig0.values(static_cast<Eigen::Index>(j - 1)));

    json report = {
        {"format", "fraccurve-pipeline-report"},
        {"version", kVersion},
        {"input", series_json(series)},
        {"config", config.to_json()},
        {"critical_values",
         {{"n", table.meta().n}, {"R", table.meta().R}, {"seed", table.meta().seed}, {"version", table.meta().version}}},
        {"d", {{"proposed", memory_json(d_prop)}, {"lrs", memory_json(d_lrs)}}},
        {"rank",
         {{"sequential", rank_test_json(seq)},
          {"ratio", {{"q_hat", ratio.q}, {"K", config.K_ratio}, {"ratios", to_json(ratio.ratios)}}}}},
        {"split", split_json(split, h, config.K_split)},
        {"d_minus_b", {{"proposed", memory_json(db_prop)}, {"lrs", memory_json(db_lrs)}, {"q_d_used", q_bar}}},
        {"scores", {{"indices", kept}, {"eigenvalues", std::move(score_eigs)}, {"T", z0.length()}}},
        {"flags", flags}};
    return {std::move(report), std::move(scores), std::move(kept)};
}

namespace {

struct FieldRule {
    const char* pointer;
    json::value_t type;
};

bool type_matches(const json& v, json::value_t type) {
    switch (type) {
        case json::value_t::number_float: return v.is_number();
        case json::value_t::number_unsigned: return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
        default: return v.type() == type;
    }
}

const char* type_name(json::value_t type) {
    switch (type) {
        case json::value_t::number_float: return "number";
        case json::value_t::number_unsigned: return "nonnegative integer";
        case json::value_t::string: return "string";
        case json::value_t::array: return "array";
        case json::value_t::object: return "object";
        case json::value_t::boolean: return "boolean";
        default: return "value";
    }
}

void check_memory(const json& report, const std::string& base, std::vector<std::string>& errors) {
    const json::json_pointer ptr(base);
    if (!report.contains(ptr)) return;
    const json& m = report.at(ptr);
    if (m.contains("ci") && !m.at("ci").is_null()) {
        const json& ci = m.at("ci");
        if (!ci.is_array() || ci.size() != 2 || !ci[0].is_number() || !ci[1].is_number())
            errors.push_back(base + "/ci: expected [lo, hi]");
        else if (m.at("value").is_number() &&
                 !(ci[0].get<double>() <= m.at("value").get<double>() && m.at("value").get<double>() <= ci[1].get<double>()))
            errors.push_back(base + "/ci: interval does not contain the value");
    }
    if (m.contains("projections") && m.at("projections").is_array()) {
        if (m.at("projections").empty()) errors.push_back(base + "/projections: empty");
        double best = -1e300;
        for (const auto& pr : m.at("projections"))
            if (pr.contains("d_hat") && pr.at("d_hat").is_number()) best = std::max(best, pr.at("d_hat").get<double>());
        if (m.at("value").is_number() && !m.at("projections").empty() && best != m.at("value").get<double>())
            errors.push_back(base + "/value: not the maximum over projections");
    }
}

}  // namespace

std::vector<std::string> validate_pipeline_report(const json& report) {
    using vt = json::value_t;
    static const FieldRule rules[] = {
        {"/format", vt::string},
        {"/version", vt::string},
        {"/input/T", vt::number_unsigned},
        {"/input/p", vt::number_unsigned},
        {"/input/basis", vt::string},
        {"/config", vt::object},
        {"/config/seed", vt::number_unsigned},
        {"/critical_values/R", vt::number_unsigned},
        {"/critical_values/n", vt::number_unsigned},
        {"/d/proposed/value", vt::number_float},
        {"/d/proposed/m", vt::number_unsigned},
        {"/d/proposed/method", vt::string},
        {"/d/proposed/projections", vt::array},
        {"/d/lrs/value", vt::number_float},
        {"/rank/sequential/q_bar", vt::number_unsigned},
        {"/rank/sequential/q_max", vt::number_unsigned},
        {"/rank/sequential/steps", vt::array},
        {"/rank/ratio/q_hat", vt::number_unsigned},
        {"/rank/ratio/ratios", vt::array},
        {"/split/q_db", vt::number_unsigned},
        {"/split/h", vt::number_unsigned},
        {"/d_minus_b/proposed/value", vt::number_float},
        {"/d_minus_b/lrs/value", vt::number_float},
        {"/scores/indices", vt::array},
        {"/flags", vt::array},
    };
    std::vector<std::string> errors;
    if (!report.is_object()) return {"report: expected an object"};
    for (const auto& r : rules) {
        const json::json_pointer ptr(r.pointer);
        if (!report.contains(ptr))
            errors.push_back(std::string(r.pointer) + ": missing");
        else if (!type_matches(report.at(ptr), r.type))
            errors.push_back(std::string(r.pointer) + ": expected " + type_name(r.type));
    }
    if (report.contains("/format"_json_pointer) && report.at("/format"_json_pointer) != "fraccurve-pipeline-report")
        errors.emplace_back("/format: unexpected value");
    for (const char* base : {"/d/proposed", "/d/lrs", "/d_minus_b/proposed", "/d_minus_b/lrs"})
        check_memory(report, base, errors);
    if (report.contains("/rank/sequential/steps"_json_pointer) && report.at("/rank/sequential/steps"_json_pointer).is_array()) {
        for (const auto& s : report.at("/rank/sequential/steps"_json_pointer)) {
            for (const char* key : {"q", "K", "stat_max", "stat_trace", "crit_max", "crit_trace", "reject_max",
                                    "reject_trace", "nu_scaled"})
                if (!s.contains(key)) errors.push_back(std::string("/rank/sequential/steps: missing ") + key);
            if (s.contains("stat_max") && s.contains("stat_trace") && s.contains("q") && s.at("stat_max").is_number() &&
                s.at("stat_trace").is_number() && s.at("q").is_number()) {
                const double mx = s.at("stat_max").get<double>(), tr = s.at("stat_trace").get<double>();
                const double q = s.at("q").get<double>();
                const double tol = 1e-9 * std::max(1.0, std::abs(tr));
                if (!(mx <= tr + tol && tr <= q * mx + tol))
                    errors.emplace_back("/rank/sequential/steps: violates max <= trace <= q max");
            }
        }
    }
    if (report.contains("/rank/sequential/q_bar"_json_pointer) && report.contains("/flags"_json_pointer) &&
        report.at("/flags"_json_pointer).is_array() && report.at("/rank/sequential/q_bar"_json_pointer).is_number()) {
        const auto& flags = report.at("/flags"_json_pointer);
        const bool flagged = std::find(flags.begin(), flags.end(), json(kNoDominantSubspace)) != flags.end();
        if (flagged != (report.at("/rank/sequential/q_bar"_json_pointer).get<double>() == 0.0))
            errors.emplace_back("/flags: dominant-subspace flag inconsistent with q_bar");
    }
    return errors;
}

}  // namespace fraccurve

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fraccurve/cointegration.hpp"
#include "fraccurve/covariance.hpp"
#include "fraccurve/dgp.hpp"
#include "fraccurve/errors.hpp"
#include "fraccurve/hmd.hpp"
#include "fraccurve/io.hpp"
#include "fraccurve/limitsim.hpp"
#include "fraccurve/memest.hpp"
#include "fraccurve/montecarlo.hpp"
#include "fraccurve/pipeline.hpp"
#include "fraccurve/spectra.hpp"
#include "fraccurve/version.hpp"

namespace fs = std::filesystem;
using namespace fraccurve;
using nlohmann::json;

namespace {

constexpr int kExitData = 2;
constexpr int kExitConfig = 3;

struct InputOptions {
    std::string path;
    std::string format = "series";
    std::string basis = "legendre";
    std::size_t p = 0;

    void add(CLI::App* app) {
        app->add_option("--input,-i", path, "input series")->required();
        app->add_option("--format", format, "series (coefficient CSV + sidecar), long (t,x,value) or wide (grid header)")
            ->check(CLI::IsMember({"series", "long", "wide"}));
        app->add_option("--basis", basis, "basis for long/wide input")->check(CLI::IsMember({"legendre", "fourier"}));
        app->add_option("--p", p, "basis size for long/wide input");
    }

    [[nodiscard]] FunctionalSeries load() const {
        if (format == "series") return read_series(path);
        require(p >= 1, "--p is required for long and wide input");
        const GridData g = format == "long" ? read_long_csv(path) : read_wide_csv(path);
        return project_curves(g.values, g.grid, Basis(basis_kind_from_string(basis), p), fs::path(path).stem().string());
    }
};

BasisKind parse_basis(const std::string& s) { return basis_kind_from_string(s); }

void emit_json(const json& j, const std::string& out) {
    const std::string text = j.dump(2) + "\n";
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_text_atomic(out, text);
}

std::vector<double> d_grid_from(double lo, double hi, double step) {
    require(step > 0.0 && lo <= hi, "critical values: need d-min <= d-max and a positive step");
    std::vector<double> grid;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) grid.push_back(std::round((lo + static_cast<double>(i) * step) * 1e10) / 1e10);
    return grid;
}

RankStatistic parse_statistic(const std::string& s) { return s == "trace" ? RankStatistic::Trace : RankStatistic::Max; }

// ---------------------------------------------------------------- import-hmd
struct ImportHmd {
    std::string input, gender = "Male", basis = "legendre", out;
    std::size_t p = 40;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("import-hmd", "log mortality curves from an HMD Mx_1x1 file");
        c->add_option("--input,-i", input, "HMD text file")->required();
        c->add_option("--gender", gender, "Female, Male or Total");
        c->add_option("--basis", basis)->check(CLI::IsMember({"legendre", "fourier"}));
        c->add_option("--p", p, "basis size");
        c->add_option("--out,-o", out, "series CSV (sidecar written to <out>.json)")->required();
        c->callback([this] { run(); });
    }

    void run() const {
        const FunctionalSeries s = import_hmd(input, gender_from_string(gender), Basis(parse_basis(basis), p));
        write_series(out, s);
        std::cout << "wrote " << out << " (T = " << s.length() << ", p = " << s.dim() << ")\n";
    }
};

// ---------------------------------------------------------------- simulate
struct Simulate {
    DGPParams dgp;
    std::size_t T = 500;
    std::optional<std::uint64_t> seed;
    std::string out;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("simulate", "draw one series from the simulation design");
        c->add_option("--T", T, "sample size")->required();
        c->add_option("--seed", seed)->required();
        c->add_option("--d", dgp.d);
        c->add_option("--d-minus-b", dgp.d_minus_b);
        c->add_option("--q-d", dgp.q_d);
        c->add_option("--q-db", dgp.q_db);
        c->add_option("--p", dgp.p);
        c->add_option("--out,-o", out, "series CSV; truth written to <out>.truth.json")->required();
        c->callback([this] { run(); });
    }

    void run() const {
        Rng rng = substream(*seed, {0});
        const DGPDraw draw = gen_dgp(dgp, T, rng);
        write_series(out, draw.series);
        const json truth = {{"seed", *seed},
                            {"T", T},
                            {"d", dgp.d},
                            {"d_minus_b", dgp.d_minus_b},
                            {"q_d", dgp.q_d},
                            {"q_db", dgp.q_db},
                            {"permutation", draw.permutation},
                            {"P_frame", to_json(draw.P.frame())},
                            {"Q_frame", to_json(draw.Q.frame())}};
        write_text_atomic(out + ".truth.json", truth.dump(2) + "\n");
    }
};

// ---------------------------------------------------------------- mc
struct Mc {
    MCConfig cfg;
    std::string table = "T1", cv, out, d_method = "differenced", dir_basis = "legendre";
    std::optional<std::uint64_t> seed;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("mc", "Monte Carlo table over the simulation design");
        c->add_option("--table", table)->check(CLI::IsMember({"T1", "T2", "T3", "T4", "T5", "SizePower"}));
        c->add_option("--reps", cfg.reps);
        c->add_option("--seed", seed)->required();
        c->add_option("--T", cfg.T_list, "sample sizes")->delimiter(',');
        c->add_option("--cv", cv, "critical-value table (T1, SizePower)");
        c->add_option("--q-max", cfg.q_max);
        c->add_option("--alpha", cfg.alpha);
        c->add_option("--eta", cfg.eta);
        c->add_option("--K-ratio", cfg.K_ratio);
        c->add_option("--K-size", cfg.K_size);
        c->add_option("--h-exponent", cfg.h_exponent);
        c->add_option("--K-split", cfg.K_split);
        c->add_option("--m-exponent", cfg.m_exponent);
        c->add_option("--L", cfg.L);
        c->add_option("--J-d", cfg.J_d);
        c->add_option("--J-db", cfg.J_db);
        c->add_option("--d-method", d_method)->check(CLI::IsMember({"levels", "differenced"}));
        c->add_option("--direction-basis", dir_basis)->check(CLI::IsMember({"legendre", "fourier"}));
        c->add_option("--ci-level", cfg.ci_level);
        c->add_option("--out,-o", out, "output directory")->required();
        c->callback([this] { run(); });
    }

    void run() {
        cfg.table = mc_table_from_string(table);
        cfg.seed = *seed;
        cfg.d_method = memory_method_from_string(d_method);
        cfg.direction_basis = parse_basis(dir_basis);
        std::optional<CriticalValueTable> t;
        if (!cv.empty()) t = CriticalValueTable::read_csv(cv);
        const MCReport r = run_table(cfg, t ? &*t : nullptr);
        fs::create_directories(out);
        write_text_atomic(fs::path(out) / (table + ".csv"), r.to_csv());
        json cells = json::array();
        for (const auto& cell : r.cells)
            cells.push_back({{"metric", cell.metric},
                             {"method", cell.method},
                             {"T", cell.T},
                             {"value", cell.value},
                             {"se", cell.se},
                             {"n", cell.n}});
        write_text_atomic(fs::path(out) / (table + ".json"),
                          json{{"provenance", r.provenance}, {"cells", cells}}.dump(2) + "\n");
        std::cout << r.to_csv();
    }
};

// ---------------------------------------------------------------- critical-values
struct CriticalValues {
    CvBuildConfig cfg;
    std::vector<double> d_list;
    double d_min = 0.51, d_max = 1.49, d_step = 0.01;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool extend = false;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("critical-values", "simulate null quantiles of the variance-ratio statistics");
        c->add_option("--q", cfg.qs, "dimensions")->delimiter(',');
        c->add_option("--alpha", cfg.alpha);
        c->add_option("--d", d_list, "explicit d grid")->delimiter(',');
        c->add_option("--d-min", d_min);
        c->add_option("--d-max", d_max);
        c->add_option("--d-step", d_step);
        c->add_option("--eta", cfg.etas)->delimiter(',');
        c->add_option("--n", cfg.n, "path steps");
        c->add_option("--R", cfg.R, "replications");
        c->add_option("--seed", seed)->required();
        c->add_option("--out,-o", out, "table CSV")->required();
        c->add_flag("--extend", extend, "merge into an existing table with the same (n, R, seed)");
        c->callback([this] { run(); });
    }

    void run() {
        cfg.seed = *seed;
        cfg.d_grid = d_list.empty() ? d_grid_from(d_min, d_max, d_step) : d_list;
        CriticalValueTable table = build_cv_table(cfg);
        if (extend && fs::exists(out)) {
            CriticalValueTable existing = CriticalValueTable::read_csv(out);
            existing.merge(table);
            table = std::move(existing);
        }
        table.write_csv(out);
        std::cout << "wrote " << table.rows().size() << " rows to " << out << "\n";
    }
};

// ---------------------------------------------------------------- test-rank
struct TestRank {
    InputOptions in;
    SequentialConfig cfg;
    std::string cv, statistic = "max", out;
    std::optional<double> d;
    std::optional<std::uint64_t> seed;
    MemoryConfig mem;
    std::string d_method = "differenced";

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("test-rank", "sequential variance-ratio test for the dominant dimension");
        in.add(c);
        c->add_option("--cv", cv)->required();
        c->add_option("--q-max", cfg.q_max, "0: eigenvalue-ratio estimate + 2");
        c->add_option("--alpha", cfg.alpha);
        c->add_option("--eta", cfg.eta);
        c->add_option("--K-offset", cfg.K_offset);
        c->add_option("--statistic", statistic)->check(CLI::IsMember({"max", "trace"}));
        c->add_option("--d", d, "memory used for the critical values; estimated when absent");
        c->add_option("--seed", seed, "required when d is estimated");
        c->add_option("--d-method", d_method)->check(CLI::IsMember({"levels", "differenced"}));
        c->add_option("--L", mem.L);
        c->add_option("--J", mem.J);
        c->add_option("--out,-o", out, "JSON report (stdout when absent)");
        c->callback([this] { run(); });
    }

    void run() {
        require(d.has_value() || seed.has_value(), "test-rank: --seed is required unless --d is given");
        cfg.statistic = parse_statistic(statistic);
        const FunctionalSeries s = in.load();
        const CriticalValueTable table = CriticalValueTable::read_csv(cv);
        json report = {{"format", "fraccurve-rank-test"}, {"version", kVersion}, {"input", series_json(s)}};
        double d_used = 0.0;
        if (d) {
            d_used = *d;
            report["d"] = {{"value", d_used}, {"source", "user"}};
        } else {
            mem.method = memory_method_from_string(d_method);
            Rng rng = substream(*seed, {1});
            const MemoryEstimate est = estimate_d(s, mem, rng);
            d_used = est.value;
            report["d"] = memory_json(est);
            report["seed"] = *seed;
        }
        const SequentialResult r = sequential_rank_test(s, cfg, d_used, table);
        report["config"] = {{"alpha", cfg.alpha},
                            {"eta", cfg.eta},
                            {"q_max", r.q_max},
                            {"K_offset", cfg.K_offset},
                            {"statistic", statistic}};
        report["rank"] = rank_test_json(r);
        report["P_tilde_frame"] = to_json(r.P_tilde.frame());
        report["flags"] = r.q_bar == 0 ? json::array({kNoDominantSubspace}) : json::array();
        emit_json(report, out);
    }
};

// ---------------------------------------------------------------- estimate-memory
struct EstimateMemory {
    InputOptions in;
    MemoryConfig mem;
    std::string target = "d", method = "differenced", dir_basis = "legendre", out;
    std::size_t q_d = 0;
    double level = 0.95;
    std::optional<std::uint64_t> seed;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("estimate-memory", "max-over-projections local Whittle estimates of d or d - b");
        in.add(c);
        c->add_option("--target", target)->check(CLI::IsMember({"d", "d-b"}));
        c->add_option("--q-d", q_d, "dominant dimension (target d-b)");
        c->add_option("--method", method)->check(CLI::IsMember({"levels", "differenced"}));
        c->add_option("--direction-basis", dir_basis)->check(CLI::IsMember({"legendre", "fourier"}));
        c->add_option("--L", mem.L);
        c->add_option("--J", mem.J);
        c->add_option("--m", mem.m, "bandwidth; 0: floor(1 + T^e)");
        c->add_option("--m-exponent", mem.bandwidth_exponent);
        c->add_option("--level", level, "confidence level");
        c->add_option("--seed", seed)->required();
        c->add_option("--out,-o", out, "JSON report (stdout when absent)");
        c->callback([this] { run(); });
    }

    void run() {
        const FunctionalSeries s = in.load();
        mem.method = memory_method_from_string(method);
        mem.direction_basis = parse_basis(dir_basis);
        Rng rng = substream(*seed, {target == "d" ? 1u : 2u});
        json report = {{"format", "fraccurve-memory"}, {"version", kVersion}, {"input", series_json(s)}, {"seed", *seed}};
        if (target == "d") {
            const std::size_t m_lev = mem.m ? mem.m : default_bandwidth(s.length() - 1, mem.bandwidth_exponent);
            report["proposed"] = memory_json(memory_ci(estimate_d(s, mem, rng), level));
            report["lrs"] = memory_json(memory_ci(baseline_d(s, m_lev), level));
        } else {
            if (mem.J == MemoryConfig{}.J) mem.J = 2;
            const std::size_t m_bar = mem.m ? mem.m : default_bandwidth(s.length(), mem.bandwidth_exponent);
            report["q_d"] = q_d;
            report["proposed"] = memory_json(memory_ci(estimate_d_minus_b(s, q_d, mem, rng), level));
            report["lrs"] = memory_json(memory_ci(baseline_d_minus_b(s, q_d, m_bar), level));
        }
        report["config"] = {{"L", mem.L}, {"J", mem.J}, {"m_exponent", mem.bandwidth_exponent}, {"level", level}};
        emit_json(report, out);
    }
};

// ---------------------------------------------------------------- decompose
struct Decompose {
    InputOptions in;
    std::size_t q_d = 0, K = 4;
    double h_exponent = 0.4;
    std::string out, projections;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("decompose", "split the stationary part into LRD and SRD subspaces");
        in.add(c);
        c->add_option("--q-d", q_d, "dominant dimension")->required();
        c->add_option("--K", K);
        c->add_option("--h-exponent", h_exponent);
        c->add_option("--out,-o", out, "JSON report (stdout when absent)");
        c->add_option("--projections", projections, "directory for P, Q and SRD frames as CSV");
        c->callback([this] { run(); });
    }

    void run() const {
        const FunctionalSeries s = in.load();
        const std::size_t p = s.dim();
        require(q_d < p, "decompose: q_d must be below p");
        const EigenSystem eigs = eigen(sample_cov(s, true));
        const Projection P = q_d ? Projection::onto(eigs.leading(q_d), p) : Projection::zero(p);
        const std::size_t h = lrcov_bandwidth(s.length(), h_exponent);
        const LrdSrdSplit split = lrd_srd_split(s, P, h, K);
        const json report = {{"format", "fraccurve-decomposition"},
                             {"version", kVersion},
                             {"input", series_json(s)},
                             {"q_d", q_d},
                             {"split", split_json(split, h, K)},
                             {"covariance_eigenvalues", to_json(eigs.values)}};
        if (!projections.empty()) {
            fs::create_directories(projections);
            auto frame_csv = [&](const std::string& name, const Matrix& f) {
                std::vector<std::string> header;
                for (Eigen::Index j = 0; j < f.cols(); ++j) header.push_back("v" + std::to_string(j + 1));
                write_matrix_csv(fs::path(projections) / name, f, header);
            };
            frame_csv("P_frame.csv", P.frame());
            frame_csv("Q_frame.csv", split.Q.frame());
            frame_csv("srd_frame.csv", split.srd.frame());
        }
        emit_json(report, out);
    }
};

// ---------------------------------------------------------------- pipeline
struct Pipeline {
    InputOptions in;
    PipelineConfig cfg;
    std::string cv, out, statistic = "max", d_method = "differenced", dir_basis = "legendre";
    std::optional<std::uint64_t> seed;

    void add(CLI::App& root) {
        auto* c = root.add_subcommand("pipeline", "full analysis: memory, dominant dimension, decomposition, scores");
        in.add(c);
        c->add_option("--cv", cv)->required();
        c->add_option("--seed", seed)->required();
        c->add_option("--alpha", cfg.alpha);
        c->add_option("--eta", cfg.eta);
        c->add_option("--q-max", cfg.q_max);
        c->add_option("--K-offset", cfg.K_offset);
        c->add_option("--statistic", statistic)->check(CLI::IsMember({"max", "trace"}));
        c->add_option("--K-ratio", cfg.K_ratio);
        c->add_option("--h-exponent", cfg.h_exponent);
        c->add_option("--K-split", cfg.K_split);
        c->add_option("--m", cfg.m);
        c->add_option("--m-exponent", cfg.m_exponent);
        c->add_option("--L", cfg.L);
        c->add_option("--J-d", cfg.J_d);
        c->add_option("--J-db", cfg.J_db);
        c->add_option("--d-method", d_method)->check(CLI::IsMember({"levels", "differenced"}));
        c->add_option("--direction-basis", dir_basis)->check(CLI::IsMember({"legendre", "fourier"}));
        c->add_option("--ci-level", cfg.ci_level);
        c->add_option("--scores", cfg.score_indices, "eigenvector indices for score series")->delimiter(',');
        c->add_option("--out,-o", out, "output directory (report.json, scores.csv)")->required();
        c->callback([this] { run(); });
    }

    void run() {
        cfg.seed = *seed;
        cfg.statistic = parse_statistic(statistic);
        cfg.d_method = memory_method_from_string(d_method);
        cfg.direction_basis = parse_basis(dir_basis);
        const FunctionalSeries s = in.load();
        const CriticalValueTable table = CriticalValueTable::read_csv(cv);
        const PipelineResult r = run_pipeline(s, cfg, table);
        const auto problems = validate_pipeline_report(r.report);
        if (!problems.empty()) {
            std::string msg = "pipeline report failed schema validation:";
            for (const auto& p : problems) msg += "\n  " + p;
            throw std::logic_error(msg);
        }
        fs::create_directories(out);
        write_text_atomic(fs::path(out) / "report.json", r.report.dump(2) + "\n");
        Matrix m(r.scores.rows(), r.scores.cols() + 1);
        std::vector<std::string> header{"t"};
        for (Eigen::Index t = 0; t < m.rows(); ++t) m(t, 0) = static_cast<double>(t + 2);
        m.rightCols(r.scores.cols()) = r.scores;
        for (std::size_t j : r.score_indices) header.push_back("score_" + std::to_string(j));
        write_matrix_csv(fs::path(out) / "scores.csv", m, header);
        const auto& rk = r.report["rank"];
        std::cout << "d_hat " << r.report["d"]["proposed"]["value"].get<double>() << ", q_bar "
                  << rk["sequential"]["q_bar"] << ", q_hat " << rk["ratio"]["q_hat"] << ", q_db "
                  << r.report["split"]["q_db"] << ", d-b_hat " << r.report["d_minus_b"]["proposed"]["value"].get<double>()
                  << "\n";
        for (const auto& f : r.report["flags"]) std::cout << "flag: " << f.get<std::string>() << "\n";
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraccurve: fractionally integrated curve time series"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    ImportHmd import_hmd_cmd;
    Simulate simulate_cmd;
    Mc mc_cmd;
    CriticalValues cv_cmd;
    TestRank test_rank_cmd;
    EstimateMemory memory_cmd;
    Decompose decompose_cmd;
    Pipeline pipeline_cmd;
    import_hmd_cmd.add(app);
    simulate_cmd.add(app);
    mc_cmd.add(app);
    cv_cmd.add(app);
    test_rank_cmd.add(app);
    memory_cmd.add(app);
    decompose_cmd.add(app);
    pipeline_cmd.add(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return e.is_configuration_error() ? kExitConfig : kExitData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error (io): " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

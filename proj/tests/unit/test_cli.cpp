#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fraccurve/dgp.hpp"
#include "fraccurve/errors.hpp"
#include "fraccurve/hmd.hpp"
#include "fraccurve/io.hpp"
#include "fraccurve/limitsim.hpp"
#include "fraccurve/pipeline.hpp"
#include "helpers.hpp"
#include "json.hpp"

using namespace fraccurve;
namespace fs = std::filesystem;
using fctest::max_abs;

namespace {

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / "fraccurve_cli_test";
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path path = scratch() / name;
    std::ofstream(path) << content;
    return path;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

/// Mx_1x1 layout with two preamble lines; rate(year, age) supplies each cell as text.
template <class F>
std::string hmd_text(int first_year, int years, F rate) {
    std::ostringstream os;
    os << "Synthetic country, Death rates (period 1x1)\n\n";
    os << "  Year          Age             Female            Male           Total\n";
    for (int y = first_year; y < first_year + years; ++y)
        for (int a = 0; a <= 110; ++a) {
            os << "  " << y << "  " << (a == 110 ? std::string("110+") : std::to_string(a));
            for (int g = 0; g < 3; ++g) os << "  " << rate(y, a, g);
            os << "\n";
        }
    return os.str();
}

template <class F>
void expect_error(ErrorKind kind, const std::string& needle, F fn) {
    try {
        fn();
        FAIL() << "no error thrown";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), kind) << e.what();
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

int run_cli(const std::string& args, const std::string& log = "cli.log") {
    const std::string cmd = std::string(FRACCURVE_CLI) + " " + args + " > " + (scratch() / log).string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const fs::path& cv_table_path() {
    static const fs::path path = [] {
        CvBuildConfig c;
        c.qs = {1, 2, 3, 4, 5};
        c.d_grid = {0.6, 0.8, 1.0, 1.2, 1.4};
        c.etas = {0.05};
        c.n = 300;
        c.R = 1000;
        c.seed = 4;
        const fs::path p = scratch() / "cv.csv";
        build_cv_table(c).write_csv(p);
        return p;
    }();
    return path;
}

}  // namespace

TEST(SeriesIo, RoundTripIsBitIdentical) {
    Matrix m = fctest::random_matrix(17, 4, 1);
    m(3, 2) = 1.0 / 3.0;
    m(5, 1) = -1e-300;
    m(7, 0) = 6.02214076e23;
    const FunctionalSeries s(m, Basis(BasisKind::Fourier, 4), "round trip");
    const fs::path p = scratch() / "series.csv";
    write_series(p, s);
    EXPECT_TRUE(fs::exists(p.string() + ".json"));
    const FunctionalSeries back = read_series(p);
    EXPECT_EQ(back.basis(), s.basis());
    EXPECT_EQ(back.label(), "round trip");
    ASSERT_EQ(back.coeffs().rows(), 17);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) EXPECT_EQ(back.coeffs()(i, j), m(i, j));
}

TEST(SeriesIo, ErrorsCarryLocation) {
    const FunctionalSeries s(fctest::random_matrix(3, 2, 2), Basis(BasisKind::ShiftedLegendre, 2));
    const fs::path p = scratch() / "broken.csv";
    write_series(p, s);
    std::string text = slurp(p);
    text.replace(text.rfind('\n', text.size() - 2) + 1, std::string::npos, "3,abc,1\n");
    std::ofstream(p) << text;
    expect_error(ErrorKind::Parse, "broken.csv:4", [&] { (void)read_series(p); });
    expect_error(ErrorKind::Io, "missing.csv", [&] { (void)read_series(scratch() / "missing.csv"); });
}

TEST(GridReaders, LongAndWideAgree) {
    const fs::path lp = write_file("long.csv", "t,x,value\n1,0,1\n1,0.5,2\n1,1,3\n2,0,4\n2,0.5,5\n2,1,6\n");
    const fs::path wp = write_file("wide.csv", "0,0.5,1\n1,2,3\n4,5,6\n");
    const GridData l = read_long_csv(lp), w = read_wide_csv(wp);
    EXPECT_EQ(l.grid, (std::vector<double>{0, 0.5, 1}));
    EXPECT_EQ(w.grid, l.grid);
    EXPECT_EQ(max_abs(l.values - w.values), 0.0);
    EXPECT_EQ(l.values(1, 2), 6.0);
}

TEST(GridReaders, RejectMalformedInput) {
    const fs::path ragged = write_file("ragged.csv", "t,x,value\n1,0,1\n1,1,2\n2,0,3\n");
    EXPECT_THROW((void)read_long_csv(ragged), Error);
    const fs::path header = write_file("header.csv", "t,y,value\n1,0,1\n");
    EXPECT_THROW((void)read_long_csv(header), Error);
    const fs::path order = write_file("order.csv", "0,0.6,0.5\n1,2,3\n");
    EXPECT_THROW((void)read_wide_csv(order), Error);
    const fs::path width = write_file("width.csv", "0,0.5,1\n1,2\n");
    expect_error(ErrorKind::Parse, "width.csv:2", [&] { (void)read_wide_csv(width); });
}

TEST(Hmd, ConstantRatesGiveConstantCurves) {
    const fs::path p = write_file("const.txt", hmd_text(2000, 4, [](int, int, int) { return std::string("0.01"); }));
    const HMDTable t = read_hmd(p);
    EXPECT_EQ(t.years, (std::vector<int>{2000, 2001, 2002, 2003}));
    EXPECT_EQ(t.ages.size(), 111u);
    EXPECT_EQ(t.ages.back(), 110);
    const FunctionalSeries s = hmd_series(t, Gender::Male, Basis(BasisKind::ShiftedLegendre, 6));
    EXPECT_EQ(s.length(), 4u);
    for (Eigen::Index y = 0; y < 4; ++y) {
        EXPECT_NEAR(s.coeffs()(y, 0), std::log(0.01), 1e-10);
        EXPECT_LE(s.coeffs().row(y).tail(5).cwiseAbs().maxCoeff(), 1e-10);
    }
    EXPECT_EQ(gender_from_string("female"), Gender::Female);
    EXPECT_EQ(gender_from_string("Total"), Gender::Total);
    EXPECT_THROW((void)gender_from_string("other"), Error);
}

TEST(Hmd, MissingCellsAreInterpolated) {
    const fs::path p = write_file("gaps.txt", hmd_text(1990, 2, [](int y, int a, int) {
        if (y == 1990 && (a == 40 || a == 41)) return std::string(".");
        if (y == 1991 && a == 0) return std::string("0.000000");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", 0.001 * (1 + a));
        return std::string(buf);
    }));
    const HMDTable t = read_hmd(p);
    EXPECT_TRUE(std::isnan(t.female(0, 40)));
    const Matrix f = fill_rates(t.female, t.years);
    EXPECT_NEAR(f(0, 40), 0.001 * 41, 1e-12);
    EXPECT_NEAR(f(0, 41), 0.001 * 42, 1e-12);
    EXPECT_NEAR(f(1, 0), 0.002, 1e-12);
}

TEST(Hmd, YearWithoutRatesRejected) {
    const fs::path p = write_file("empty_year.txt", hmd_text(1950, 3, [](int y, int, int) {
        return y == 1951 ? std::string(".") : std::string("0.02");
    }));
    expect_error(ErrorKind::InvalidData, "1951", [&] { (void)import_hmd(p, Gender::Female, Basis(BasisKind::ShiftedLegendre, 4)); });
}

TEST(Hmd, ParseErrorsCarryLineNumbers) {
    std::string text = hmd_text(2000, 1, [](int, int a, int) { return a == 5 ? std::string("x.y") : std::string("0.01"); });
    const fs::path p = write_file("bad_hmd.txt", text);
    expect_error(ErrorKind::Parse, ":9", [&] { (void)read_hmd(p); });
    const fs::path none = write_file("no_header.txt", "Year Age\n2000 0 1 1 1\n");
    EXPECT_THROW((void)read_hmd(none), Error);
}

TEST(Pipeline, ReportMatchesSchema) {
    DGPParams params;
    Rng rng(12);
    const FunctionalSeries s = gen_dgp(params, 400, rng).series;
    PipelineConfig cfg;
    cfg.seed = 3;
    cfg.q_max = 5;
    const PipelineResult r = run_pipeline(s, cfg, CriticalValueTable::read_csv(cv_table_path()));
    EXPECT_TRUE(validate_pipeline_report(r.report).empty());
    EXPECT_EQ(r.report["format"], "fraccurve-pipeline-report");
    EXPECT_EQ(r.scores.rows(), 399);
    EXPECT_EQ(static_cast<std::size_t>(r.scores.cols()), r.score_indices.size());
    const auto q_bar = r.report["rank"]["sequential"]["q_bar"].get<std::size_t>();
    EXPECT_GE(q_bar, 1u);
    EXPECT_EQ(r.report["rank"]["sequential"]["steps"].size(), 6 - q_bar);

    nlohmann::json broken = r.report;
    broken["d"]["proposed"]["value"] = -5.0;
    EXPECT_FALSE(validate_pipeline_report(broken).empty());
    broken = r.report;
    broken.erase("rank");
    EXPECT_FALSE(validate_pipeline_report(broken).empty());
}

TEST(Pipeline, WhiteNoiseFlagsMissingDominantSubspace) {
    const FunctionalSeries s(fctest::random_matrix(600, 12, 13), Basis(BasisKind::ShiftedLegendre, 12));
    PipelineConfig cfg;
    cfg.seed = 1;
    cfg.q_max = 3;
    const PipelineResult r = run_pipeline(s, cfg, CriticalValueTable::read_csv(cv_table_path()));
    EXPECT_EQ(r.report["rank"]["sequential"]["q_bar"], 0);
    bool flagged = false;
    for (const auto& f : r.report["flags"]) flagged = flagged || f.get<std::string>() == kNoDominantSubspace;
    EXPECT_TRUE(flagged);
    EXPECT_TRUE(validate_pipeline_report(r.report).empty());
}

TEST(Cli, SimulateThenPipeline) {
    const fs::path out = scratch() / "sim.csv";
    ASSERT_EQ(run_cli("simulate --T 300 --seed 8 --out " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out.string() + ".truth.json"));
    const fs::path dir = scratch() / "pipe";
    fs::remove_all(dir);
    ASSERT_EQ(run_cli("pipeline --input " + out.string() + " --cv " + cv_table_path().string() +
                      " --seed 2 --q-max 5 --out " + dir.string()),
              0)
        << slurp(scratch() / "cli.log");
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_TRUE(validate_pipeline_report(report).empty());
    const std::string scores = slurp(dir / "scores.csv");
    EXPECT_EQ(scores.rfind("t,score_1", 0), 0u);
    EXPECT_NE(scores.find("\n2,"), std::string::npos);

    const fs::path again = scratch() / "pipe2";
    fs::remove_all(again);
    ASSERT_EQ(run_cli("pipeline --input " + out.string() + " --cv " + cv_table_path().string() +
                      " --seed 2 --q-max 5 --out " + again.string()),
              0);
    EXPECT_EQ(slurp(again / "report.json"), slurp(dir / "report.json"));
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("--version"), 0);
    EXPECT_EQ(run_cli("simulate --T 100 --out " + (scratch() / "x.csv").string()), 3);
    EXPECT_EQ(run_cli("no-such-command"), 3);
    EXPECT_EQ(run_cli("test-rank --input " + (scratch() / "absent.csv").string() + " --cv " + cv_table_path().string() +
                      " --seed 1"),
              2);
    std::string rows = "0,0.5,1\n";
    for (int t = 0; t < 40; ++t) rows += "1,1,1\n";
    const fs::path flat = write_file("flat.csv", rows);
    EXPECT_EQ(run_cli("estimate-memory --input " + flat.string() + " --format wide --p 2 --J 2 --seed 1"), 2);
    EXPECT_EQ(run_cli("estimate-memory --input " + flat.string() + " --format wide --p 2 --J 3 --seed 1"), 3);
}

TEST(Cli, ImportHmdWritesSeries) {
    const fs::path p = write_file("cli_hmd.txt", hmd_text(2000, 3, [](int, int, int) { return std::string("0.05"); }));
    const fs::path out = scratch() / "hmd_series.csv";
    ASSERT_EQ(run_cli("import-hmd --input " + p.string() + " --gender male --p 5 --out " + out.string()), 0)
        << slurp(scratch() / "cli.log");
    const FunctionalSeries s = read_series(out);
    EXPECT_EQ(s.length(), 3u);
    EXPECT_NEAR(s.coeffs()(2, 0), std::log(0.05), 1e-10);
}

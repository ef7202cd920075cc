#include "fraccurve/hmd.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fraccurve/errors.hpp"

namespace fraccurve {

const char* to_string(Gender g) noexcept {
    switch (g) {
        case Gender::Female: return "Female";
        case Gender::Male: return "Male";
        case Gender::Total: return "Total";
    }
    return "?";
}

Gender gender_from_string(const std::string& name) {
    for (Gender g : {Gender::Female, Gender::Male, Gender::Total}) {
        std::string lower = to_string(g);
        for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (name == to_string(g) || name == lower) return g;
    }
    fail(ErrorKind::InvalidArgument, "unknown gender '" + name + "' (expected Female, Male or Total)");
}

const Matrix& HMDTable::rates(Gender g) const {
    switch (g) {
        case Gender::Female: return female;
        case Gender::Male: return male;
        case Gender::Total: return total;
    }
    return total;
}

namespace {

bool parse_int(const std::string& s, int& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_rate(const std::string& s, double& out) {
    if (s == ".") {
        out = std::numeric_limits<double>::quiet_NaN();
        return true;
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out) && out >= 0.0;
}

}  // namespace

HMDTable read_hmd(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::Io, "cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    auto error = [&](const std::string& why) {
        fail(ErrorKind::Parse, path.string() + ":" + std::to_string(lineno) + ": " + why);
    };
    bool header = false;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok == std::vector<std::string>{"Year", "Age", "Female", "Male", "Total"}) {
            header = true;
            break;
        }
    }
    if (!header) fail(ErrorKind::Parse, path.string() + ": no 'Year Age Female Male Total' header line");

    struct Row {
        int year, age;
        double f, m, t;
    };
    std::vector<Row> rows;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        if (tok.size() != 5) error("expected 5 fields");
        Row r{};
        if (!parse_int(tok[0], r.year)) error("bad year '" + tok[0] + "'");
        std::string age = tok[1];
        if (!age.empty() && age.back() == '+') age.pop_back();
        if (!parse_int(age, r.age) || r.age < 0) error("bad age '" + tok[1] + "'");
        if (!parse_rate(tok[2], r.f) || !parse_rate(tok[3], r.m) || !parse_rate(tok[4], r.t))
            error("bad rate (expected a nonnegative number or '.')");
        rows.push_back(r);
    }
    if (rows.empty()) fail(ErrorKind::Parse, path.string() + ": no data rows");

    HMDTable out;
    for (const Row& r : rows) {
        if (out.years.empty() || out.years.back() != r.year) {
            if (!out.years.empty() && r.year <= out.years.back())
                fail(ErrorKind::Parse, path.string() + ": years must be increasing (year " + std::to_string(r.year) + ")");
            out.years.push_back(r.year);
        }
    }
    const std::size_t A = rows.size() / out.years.size();
    if (A * out.years.size() != rows.size())
        fail(ErrorKind::Parse, path.string() + ": every year must list the same ages");
    for (std::size_t a = 0; a < A; ++a) out.ages.push_back(static_cast<int>(a));
    const auto Y = static_cast<Eigen::Index>(out.years.size());
    const auto Ae = static_cast<Eigen::Index>(A);
    out.female.resize(Y, Ae);
    out.male.resize(Y, Ae);
    out.total.resize(Y, Ae);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        const auto y = static_cast<Eigen::Index>(i / A);
        const auto a = static_cast<Eigen::Index>(i % A);
        if (r.year != out.years[static_cast<std::size_t>(y)] || r.age != static_cast<int>(a))
            fail(ErrorKind::Parse, path.string() + ": year " + std::to_string(r.year) +
                                       " does not list contiguous ages from 0 (found age " + std::to_string(r.age) + ")");
        out.female(y, a) = r.f;
        out.male(y, a) = r.m;
        out.total(y, a) = r.t;
    }
    return out;
}

Matrix fill_rates(const Matrix& rates, const std::vector<int>& years) {
    Matrix out = rates;
    const Eigen::Index A = rates.cols();
    for (Eigen::Index y = 0; y < rates.rows(); ++y) {
        std::vector<Eigen::Index> good;
        for (Eigen::Index a = 0; a < A; ++a)
            if (std::isfinite(rates(y, a)) && rates(y, a) > 0.0) good.push_back(a);
        if (good.empty())
            fail(ErrorKind::InvalidData,
                 "year " + std::to_string(years[static_cast<std::size_t>(y)]) + " has no positive mortality rate");
        std::size_t k = 0;
        for (Eigen::Index a = 0; a < A; ++a) {
            while (k + 1 < good.size() && good[k + 1] <= a) ++k;
            if (a <= good.front()) {
                out(y, a) = rates(y, good.front());
            } else if (a >= good.back()) {
                out(y, a) = rates(y, good.back());
            } else if (good[k] != a) {
                const Eigen::Index lo = good[k], hi = good[k + 1];
                const double w = static_cast<double>(a - lo) / static_cast<double>(hi - lo);
                out(y, a) = (1.0 - w) * rates(y, lo) + w * rates(y, hi);
            }
        }
    }
    return out;
}

FunctionalSeries hmd_series(const HMDTable& table, Gender g, const Basis& basis) {
    const Matrix filled = fill_rates(table.rates(g), table.years);
    const Matrix logs = filled.array().log().matrix();
    std::vector<double> grid;
    for (int a : table.ages) grid.push_back(static_cast<double>(a) / 110.0);
    return project_curves(logs, grid, basis, std::string("hmd-") + to_string(g));
}

FunctionalSeries import_hmd(const std::filesystem::path& path, Gender g, const Basis& basis) {
    return hmd_series(read_hmd(path), g, basis);
}

}  // namespace fraccurve

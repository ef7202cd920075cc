#include "fraccurve/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fraccurve/errors.hpp"
#include "fraccurve/version.hpp"

namespace fraccurve {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json to_json(const Vector& v) {
    nlohmann::json out = nlohmann::json::array();
    for (double x : v) out.push_back(x);
    return out;
}

nlohmann::json to_json(const Matrix& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
    return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) fail(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
        os << text;
        os.flush();
        if (!os) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            fail(ErrorKind::Io, "write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorKind::Io, "cannot move output into " + path.string());
    }
}

namespace {

class LineReader {
public:
    explicit LineReader(const std::filesystem::path& path) : path_(path), is_(path) {
        if (!is_) fail(ErrorKind::Io, "cannot open " + path.string());
    }

    bool next(std::string& line) {
        while (std::getline(is_, line)) {
            ++lineno_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void error(const std::string& why) const {
        fail(ErrorKind::Parse, path_.string() + ":" + std::to_string(lineno_) + ": " + why);
    }

    [[nodiscard]] std::size_t lineno() const { return lineno_; }

private:
    std::filesystem::path path_;
    std::ifstream is_;
    std::size_t lineno_ = 0;
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t");
        const auto e = cell.find_last_not_of(" \t");
        cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_number(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

double number_or_fail(const LineReader& r, const std::string& s) {
    double v = 0.0;
    if (!parse_number(s, v)) r.error("bad number '" + s + "'");
    return v;
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
    std::filesystem::path s = path;
    s += ".json";
    return s;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, const std::vector<std::string>& header) {
    require(header.size() == static_cast<std::size_t>(m.cols()), "write_matrix_csv: header size must match columns");
    std::string text;
    for (std::size_t j = 0; j < header.size(); ++j) text += (j ? "," : "") + header[j];
    text += '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) text += (j ? "," : "") + format_double(m(i, j));
        text += '\n';
    }
    write_text_atomic(path, text);
}

void write_series(const std::filesystem::path& path, const FunctionalSeries& series) {
    const Matrix& c = series.coeffs();
    std::string text = "t";
    for (std::size_t j = 1; j <= series.dim(); ++j) text += ",c" + std::to_string(j);
    text += '\n';
    for (Eigen::Index t = 0; t < c.rows(); ++t) {
        text += std::to_string(t + 1);
        for (Eigen::Index j = 0; j < c.cols(); ++j) text += "," + format_double(c(t, j));
        text += '\n';
    }
    const nlohmann::json meta = {{"format", "fraccurve-series"},
                                 {"version", kVersion},
                                 {"basis", to_string(series.basis().kind())},
                                 {"p", series.dim()},
                                 {"T", series.length()},
                                 {"label", series.label()}};
    write_text_atomic(path, text);
    write_text_atomic(sidecar(path), meta.dump(2) + "\n");
}

FunctionalSeries read_series(const std::filesystem::path& path) {
    nlohmann::json meta;
    {
        std::ifstream is(sidecar(path));
        if (!is) fail(ErrorKind::Io, "missing basis sidecar " + sidecar(path).string());
        try {
            meta = nlohmann::json::parse(is);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::Parse, sidecar(path).string() + ": " + e.what());
        }
    }
    BasisKind kind{};
    std::size_t p = 0;
    std::string label;
    try {
        kind = basis_kind_from_string(meta.at("basis").get<std::string>());
        p = meta.at("p").get<std::size_t>();
        label = meta.value("label", std::string{});
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, sidecar(path).string() + ": " + e.what());
    }
    LineReader r(path);
    std::string line;
    if (!r.next(line)) r.error("empty file");
    if (split_csv(line).size() != p + 1) r.error("header does not match p = " + std::to_string(p));
    std::vector<double> values;
    std::size_t T = 0;
    while (r.next(line)) {
        const auto cells = split_csv(line);
        if (cells.size() != p + 1) r.error("expected " + std::to_string(p + 1) + " fields");
        for (std::size_t j = 1; j <= p; ++j) values.push_back(number_or_fail(r, cells[j]));
        ++T;
    }
    if (T == 0) r.error("no observations");
    Matrix c(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(p));
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t j = 0; j < p; ++j)
            c(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = values[t * p + j];
    return FunctionalSeries(std::move(c), Basis(kind, p), label);
}

GridData read_long_csv(const std::filesystem::path& path) {
    LineReader r(path);
    std::string line;
    if (!r.next(line)) r.error("empty file");
    if (split_csv(line) != std::vector<std::string>{"t", "x", "value"}) r.error("expected header 't,x,value'");
    std::map<double, std::map<double, double>> cells;
    while (r.next(line)) {
        const auto f = split_csv(line);
        if (f.size() != 3) r.error("expected 3 fields");
        const double t = number_or_fail(r, f[0]);
        const double x = number_or_fail(r, f[1]);
        const double v = number_or_fail(r, f[2]);
        if (!cells[t].emplace(x, v).second) r.error("duplicate (t, x) cell");
    }
    if (cells.empty()) r.error("no observations");
    GridData out;
    for (const auto& [x, v] : cells.begin()->second) out.grid.push_back(x);
    out.values.resize(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(out.grid.size()));
    Eigen::Index row = 0;
    for (const auto& [t, curve] : cells) {
        if (curve.size() != out.grid.size() ||
            !std::equal(curve.begin(), curve.end(), out.grid.begin(), [](const auto& kv, double x) { return kv.first == x; }))
            fail(ErrorKind::Parse, path.string() + ": observation t = " + format_double(t) + " is not on the common grid");
        Eigen::Index col = 0;
        for (const auto& [x, v] : curve) out.values(row, col++) = v;
        ++row;
    }
    return out;
}

GridData read_wide_csv(const std::filesystem::path& path) {
    LineReader r(path);
    std::string line;
    if (!r.next(line)) r.error("empty file");
    GridData out;
    for (const auto& cell : split_csv(line)) out.grid.push_back(number_or_fail(r, cell));
    if (!std::is_sorted(out.grid.begin(), out.grid.end()) ||
        std::adjacent_find(out.grid.begin(), out.grid.end()) != out.grid.end())
        r.error("grid points must be strictly increasing");
    const std::size_t G = out.grid.size();
    std::vector<double> values;
    std::size_t T = 0;
    while (r.next(line)) {
        const auto cells = split_csv(line);
        if (cells.size() != G) r.error("expected " + std::to_string(G) + " fields");
        for (const auto& c : cells) values.push_back(number_or_fail(r, c));
        ++T;
    }
    if (T == 0) r.error("no observations");
    out.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(G));
    return out;
}

}  // namespace fraccurve

#include "fraccurve/limitsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <unistd.h>

#include "json.hpp"

#include "fraccurve/cointegration.hpp"
#include "fraccurve/covariance.hpp"
#include "fraccurve/errors.hpp"
#include "fraccurve/fft.hpp"
#include "fraccurve/fracdiff.hpp"

namespace fraccurve {

Matrix gaussian_matrix(std::size_t n, std::size_t q, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix eps(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q));
    for (Eigen::Index c = 0; c < eps.cols(); ++c)
        for (Eigen::Index t = 0; t < eps.rows(); ++t) eps(t, c) = normal(rng);
    return eps;
}

FbmPath simulate_fbm(double d, std::size_t n, Rng& rng) {
    require(n >= 16, "simulate_fbm: need n >= 16");
    require(std::isfinite(d) && d > -0.5, "simulate_fbm: need d > -1/2");
    const Matrix y = frac_filter(gaussian_matrix(n, 1, rng), -d);
    FbmPath path{d, n, std::vector<double>(n + 1, 0.0)};
    const double scale = std::pow(static_cast<double>(n), 0.5 - d);
    for (std::size_t k = 1; k <= n; ++k) path.values[k] = scale * y(static_cast<Eigen::Index>(k - 1), 0);
    return path;
}

namespace {

void check_null_args(std::size_t q, double d, double alpha, std::size_t n) {
    require(q >= 1, "null draw: q must be at least 1");
    require(d > 0.5 && d < 1.5, "null draw: d must lie in (1/2, 3/2)");
    require(alpha > 0.0 && std::isfinite(alpha), "null draw: alpha must be positive");
    require(n >= 16, "null draw: need n >= 16");
}

NullDraw finish(Vector nu) {
    NullDraw out;
    out.stat_max = nu.maxCoeff();
    out.stat_trace = nu.sum();
    out.nu = std::move(nu);
    return out;
}

// n^{1/2-delta} sum_{i<=k} ((k-i+1)^delta - (k-i)^delta) / Gamma(delta+1) eps_i, k = 1..n
Matrix kernel_average_paths(const Matrix& eps, double delta) {
    const auto n = static_cast<std::size_t>(eps.rows());
    std::vector<double> b(n);
    const double g = std::tgamma(delta + 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double jj = static_cast<double>(j);
        b[j] = (std::pow(jj + 1.0, delta) - std::pow(jj, delta)) / g;
    }
    const double scale = std::pow(static_cast<double>(n), 0.5 - delta);
    Matrix out(eps.rows(), eps.cols());
    for (Eigen::Index c = 0; c < eps.cols(); ++c) {
        const auto conv = fft_convolve_truncated(b, std::span<const double>(eps.col(c).data(), n), n);
        for (std::size_t t = 0; t < n; ++t) out(static_cast<Eigen::Index>(t), c) = scale * conv[t];
    }
    return out;
}

}  // namespace

NullDraw null_draw_from_shocks(const Matrix& eps, double d, double alpha) {
    const Matrix y = frac_filter(eps, -d);
    const Matrix ybar = y.rowwise() - y.colwise().mean();
    const auto q = eps.cols();
    return finish(vr_pencil(ybar, Matrix::Identity(q, q), alpha).nu_scaled);
}

NullDraw null_draw(std::size_t q, double d, double alpha, std::size_t n, Rng& rng) {
    check_null_args(q, d, alpha, n);
    for (int attempt = 0;; ++attempt) {
        try {
            return null_draw_from_shocks(gaussian_matrix(n, q, rng), d, alpha);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularPencil || attempt >= 3) throw;
        }
    }
}

NullDraw null_draw_direct_from_shocks(const Matrix& eps, double d, double alpha, TiltMean tilt_mean) {
    const auto n = static_cast<double>(eps.rows());
    const Matrix bd = kernel_average_paths(eps, d);
    const Matrix bda = kernel_average_paths(eps, d + alpha);
    const Matrix bbar = bd.rowwise() - bd.colwise().mean();
    Vector tilt(eps.rows());
    const double g = std::tgamma(alpha + 1.0);
    for (Eigen::Index k = 0; k < tilt.size(); ++k) tilt(k) = std::pow(static_cast<double>(k + 1) / n, alpha) / g;
    const Matrix& centre = tilt_mean == TiltMean::Level ? bd : bda;
    const Matrix btilde = bda - tilt * centre.colwise().mean();
    const Matrix A = bbar.transpose() * bbar / n;
    const Matrix B = btilde.transpose() * btilde / n;
    return finish(gen_eigen_compressed(A, B).values);
}

NullDraw null_draw_direct(std::size_t q, double d, double alpha, std::size_t n, Rng& rng, TiltMean tilt_mean) {
    check_null_args(q, d, alpha, n);
    for (int attempt = 0;; ++attempt) {
        try {
            return null_draw_direct_from_shocks(gaussian_matrix(n, q, rng), d, alpha, tilt_mean);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularPencil || attempt >= 3) throw;
        }
    }
}

NullSimulator::NullSimulator(std::size_t q_max, double d, double alpha, std::size_t n)
    : q_max_(q_max), d_(d), alpha_(alpha), n_(n), fft_n_(good_fft_size(2 * n - 1)) {
    check_null_args(q_max, d, alpha, n);
    RealFft fft(fft_n_);
    level_kernel_.resize(fft.spectrum_size());
    tilde_kernel_.resize(fft.spectrum_size());
    fft.forward(frac_coeffs(-d, n).coeffs, level_kernel_);
    fft.forward(frac_coeffs(-(d + alpha), n).coeffs, tilde_kernel_);
    const auto pi = frac_coeffs(-alpha, n).coeffs;
    tilt_.resize(n);
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) tilt_[t] = acc += pi[t];
}

std::vector<NullDraw> NullSimulator::draw(const Matrix& eps) const {
    require(static_cast<std::size_t>(eps.rows()) == n_ && static_cast<std::size_t>(eps.cols()) == q_max_,
            "NullSimulator::draw: shocks must be n x q_max");
    RealFft fft(fft_n_);
    std::vector<std::complex<double>> spec(fft.spectrum_size()), work(fft.spectrum_size());
    std::vector<double> buf(fft_n_);
    const double inv = 1.0 / static_cast<double>(fft_n_);
    Matrix X(eps.rows(), eps.cols()), Xt(eps.rows(), eps.cols());
    for (Eigen::Index c = 0; c < eps.cols(); ++c) {
        fft.forward(std::span<const double>(eps.col(c).data(), n_), spec);
        for (std::size_t k = 0; k < spec.size(); ++k) work[k] = spec[k] * level_kernel_[k];
        fft.inverse(work, buf);
        double mean = 0.0;
        for (std::size_t t = 0; t < n_; ++t) mean += buf[t] * inv;
        mean /= static_cast<double>(n_);
        for (std::size_t t = 0; t < n_; ++t) X(static_cast<Eigen::Index>(t), c) = buf[t] * inv - mean;
        for (std::size_t k = 0; k < spec.size(); ++k) work[k] = spec[k] * tilde_kernel_[k];
        fft.inverse(work, buf);
        for (std::size_t t = 0; t < n_; ++t) Xt(static_cast<Eigen::Index>(t), c) = buf[t] * inv - mean * tilt_[t];
    }
    const Matrix A = X.transpose() * X;
    const Matrix B = Xt.transpose() * Xt;
    const double scale = std::pow(static_cast<double>(n_), 2.0 * alpha_);
    std::vector<NullDraw> out;
    out.reserve(q_max_);
    for (std::size_t q = 1; q <= q_max_; ++q) {
        const auto k = static_cast<Eigen::Index>(q);
        out.push_back(finish(gen_eigen_compressed(A.topLeftCorner(k, k), B.topLeftCorner(k, k)).values * scale));
    }
    return out;
}

double sample_quantile(std::vector<double> values, double prob) {
    require(!values.empty(), "sample_quantile: empty sample");
    require(prob >= 0.0 && prob <= 1.0, "sample_quantile: probability must lie in [0,1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<double> default_d_grid() {
    std::vector<double> grid;
    for (int i = 51; i <= 149; ++i) grid.push_back(static_cast<double>(i) / 100.0);
    return grid;
}

NullSample simulate_null_sample(const std::vector<std::size_t>& qs, double d, double alpha, std::size_t n,
                                std::size_t R, std::uint64_t seed, std::size_t first_draw) {
    require(!qs.empty(), "null sample: no dimensions requested");
    const std::size_t q_max = *std::max_element(qs.begin(), qs.end());
    const NullSimulator sim(q_max, d, alpha, n);
    const auto dkey = static_cast<std::uint64_t>(std::llround(d * 1e6));
    NullSample out;
    out.qs = qs;
    out.stat_max.resize(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(qs.size()));
    out.stat_trace.resizeLike(out.stat_max);

    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(R); ++r) {
        try {
            const std::uint64_t draw = first_draw + static_cast<std::uint64_t>(r);
            std::vector<NullDraw> res;
            for (std::uint64_t attempt = 0;; ++attempt) {
                Matrix eps(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q_max));
                for (std::size_t c = 0; c < q_max; ++c) {
                    Rng rng = attempt == 0 ? substream(seed, {dkey, draw, c}) : substream(seed, {dkey, draw, c, attempt});
                    eps.col(static_cast<Eigen::Index>(c)) = gaussian_matrix(n, 1, rng);
                }
                try {
                    res = sim.draw(eps);
                    break;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::SingularPencil || attempt >= 3) throw;
                }
            }
            for (std::size_t i = 0; i < qs.size(); ++i) {
                out.stat_max(r, static_cast<Eigen::Index>(i)) = res[qs[i] - 1].stat_max;
                out.stat_trace(r, static_cast<Eigen::Index>(i)) = res[qs[i] - 1].stat_trace;
            }
        } catch (...) {
#pragma omp critical(fraccurve_null_sample)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-9; }

auto row_key(const CvRow& r) { return std::make_tuple(r.q, r.alpha, r.eta, r.d); }

void sort_rows(std::vector<CvRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const CvRow& a, const CvRow& b) { return row_key(a) < row_key(b); });
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

CriticalValueTable::CriticalValueTable(CvTableMeta meta, std::vector<CvRow> rows)
    : meta_(meta), rows_(std::move(rows)) {
    sort_rows(rows_);
}

bool CriticalValueTable::covers(std::size_t q, double alpha, double eta) const {
    return std::any_of(rows_.begin(), rows_.end(),
                       [&](const CvRow& r) { return r.q == q && near(r.alpha, alpha) && near(r.eta, eta); });
}

std::vector<std::size_t> CriticalValueTable::dimensions() const {
    std::vector<std::size_t> qs;
    for (const auto& r : rows_)
        if (qs.empty() || qs.back() != r.q) qs.push_back(r.q);
    return qs;
}

CriticalLookup CriticalValueTable::lookup(std::size_t q, double d, double alpha, double eta) const {
    std::vector<const CvRow*> cells;
    for (const auto& r : rows_)
        if (r.q == q && near(r.alpha, alpha) && near(r.eta, eta)) cells.push_back(&r);
    if (cells.empty() || !std::isfinite(d)) {
        std::ostringstream msg;
        msg << "critical-value table has no cell for q=" << q << ", alpha=" << alpha << ", eta=" << eta
            << " (needed at d=" << d << "); build it with `fraccurve critical-values`";
        fail(ErrorKind::TableMiss, msg.str());
    }
    CriticalLookup out;
    if (d <= cells.front()->d) {
        out.clamped = d < cells.front()->d;
        out.crit_max = cells.front()->crit_max;
        out.crit_trace = cells.front()->crit_trace;
        return out;
    }
    if (d >= cells.back()->d) {
        out.clamped = d > cells.back()->d;
        out.crit_max = cells.back()->crit_max;
        out.crit_trace = cells.back()->crit_trace;
        return out;
    }
    std::size_t hi = 1;
    while (cells[hi]->d < d) ++hi;
    const CvRow& b = *cells[hi];
    if (b.d == d) {
        out.crit_max = b.crit_max;
        out.crit_trace = b.crit_trace;
        return out;
    }
    const CvRow& a = *cells[hi - 1];
    const double w = (d - a.d) / (b.d - a.d);
    out.crit_max = a.crit_max + w * (b.crit_max - a.crit_max);
    out.crit_trace = a.crit_trace + w * (b.crit_trace - a.crit_trace);
    return out;
}

void CriticalValueTable::merge(const CriticalValueTable& other) {
    if (rows_.empty()) {
        meta_ = other.meta_;
    } else if (!other.rows_.empty()) {
        require(meta_.n == other.meta_.n && meta_.R == other.meta_.R && meta_.seed == other.meta_.seed &&
                    meta_.version == other.meta_.version,
                "critical-value tables with different (n, R, seed, version) cannot be merged");
    }
    for (const auto& r : other.rows_) {
        const bool present = std::any_of(rows_.begin(), rows_.end(), [&](const CvRow& x) {
            return x.q == r.q && near(x.alpha, r.alpha) && near(x.eta, r.eta) && near(x.d, r.d);
        });
        if (!present) rows_.push_back(r);
    }
    sort_rows(rows_);
}

void CriticalValueTable::write_csv(const std::filesystem::path& path) const {
    nlohmann::json meta = {{"format", "fraccurve-critical-values"},
                           {"version", meta_.version},
                           {"n", meta_.n},
                           {"R", meta_.R},
                           {"seed", meta_.seed},
                           {"quantile", "type7"}};
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) fail(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
        os << "# " << meta.dump() << "\n";
        os << "q,alpha,d,eta,crit_max,crit_trace\n";
        for (const auto& r : rows_)
            os << r.q << ',' << fmt(r.alpha) << ',' << fmt(r.d) << ',' << fmt(r.eta) << ',' << fmt(r.crit_max) << ','
               << fmt(r.crit_trace) << '\n';
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
        fail(ErrorKind::Io, "cannot move critical-value table into " + path.string());
    }
}

CriticalValueTable CriticalValueTable::read_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::Io, "cannot open critical-value table " + path.string());
    std::string line;
    std::size_t lineno = 0;
    auto parse_error = [&](const std::string& why) {
        fail(ErrorKind::Parse, path.string() + ":" + std::to_string(lineno) + ": " + why);
    };
    CvTableMeta meta;
    if (!std::getline(is, line)) parse_error("empty file");
    ++lineno;
    if (line.rfind("# ", 0) != 0) parse_error("missing '# {json}' metadata line");
    try {
        const auto j = nlohmann::json::parse(line.substr(2));
        meta.n = j.at("n").get<std::size_t>();
        meta.R = j.at("R").get<std::size_t>();
        meta.seed = j.at("seed").get<std::uint64_t>();
        meta.version = j.at("version").get<int>();
    } catch (const nlohmann::json::exception& e) {
        parse_error(std::string("bad metadata: ") + e.what());
    }
    if (!std::getline(is, line)) parse_error("missing header");
    ++lineno;
    if (line != "q,alpha,d,eta,crit_max,crit_trace") parse_error("unexpected header '" + line + "'");
    std::vector<CvRow> rows;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) parse_error("expected 6 fields");
        CvRow r;
        try {
            std::size_t pos = 0;
            const long long q = std::stoll(cells[0], &pos);
            if (pos != cells[0].size() || q < 1) parse_error("bad q");
            r.q = static_cast<std::size_t>(q);
            double* fields[] = {&r.alpha, &r.d, &r.eta, &r.crit_max, &r.crit_trace};
            for (std::size_t i = 0; i < 5; ++i) {
                *fields[i] = std::stod(cells[i + 1], &pos);
                if (pos != cells[i + 1].size() || !std::isfinite(*fields[i])) parse_error("bad number");
            }
        } catch (const std::logic_error&) {
            parse_error("bad number");
        }
        rows.push_back(r);
    }
    return CriticalValueTable(meta, std::move(rows));
}

CriticalValueTable build_cv_table(const CvBuildConfig& config) {
    require(!config.qs.empty(), "critical values: empty q list");
    require(!config.etas.empty(), "critical values: empty eta list");
    require(config.R >= 1000, "critical values: need R >= 1000");
    for (double eta : config.etas) require(eta > 0.0 && eta < 1.0, "critical values: eta must lie in (0,1)");
    const std::vector<double> grid = config.d_grid.empty() ? default_d_grid() : config.d_grid;
    std::vector<CvRow> rows;
    for (double d : grid) {
        const NullSample s = simulate_null_sample(config.qs, d, config.alpha, config.n, config.R, config.seed);
        for (std::size_t i = 0; i < config.qs.size(); ++i) {
            const auto col = static_cast<Eigen::Index>(i);
            std::vector<double> mx(s.stat_max.col(col).data(), s.stat_max.col(col).data() + config.R);
            std::vector<double> tr(s.stat_trace.col(col).data(), s.stat_trace.col(col).data() + config.R);
            for (double eta : config.etas)
                rows.push_back({config.qs[i], config.alpha, d, eta, sample_quantile(mx, 1.0 - eta),
                                sample_quantile(tr, 1.0 - eta)});
        }
    }
    CvTableMeta meta;
    meta.n = config.n;
    meta.R = config.R;
    meta.seed = config.seed;
    return CriticalValueTable(meta, std::move(rows));
}

}  // namespace fraccurve

#include "fraccurve/fracdiff.hpp"

#include <cmath>

#include "fraccurve/errors.hpp"
#include "fraccurve/fft.hpp"

namespace fraccurve {

FracCoefficients frac_coeffs(double d, std::size_t n) {
    require(n >= 1, "frac_coeffs: n must be at least 1");
    require(std::isfinite(d), "frac_coeffs: d must be finite");
    FracCoefficients out{d, std::vector<double>(n)};
    out.coeffs[0] = 1.0;
    for (std::size_t j = 1; j < n; ++j) {
        const double jj = static_cast<double>(j);
        out.coeffs[j] = out.coeffs[j - 1] * (jj - 1.0 - d) / jj;
    }
    return out;
}

namespace {

void direct_column(const std::vector<double>& c, const Matrix& in, Matrix& out, Eigen::Index col) {
    const Eigen::Index T = in.rows();
    const double* x = in.col(col).data();
    double* y = out.col(col).data();
    for (Eigen::Index t = 0; t < T; ++t) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j <= t; ++j) acc += c[static_cast<std::size_t>(j)] * x[t - j];
        y[t] = acc;
    }
}

void check_input(const Matrix& in) {
    require(in.rows() >= 1 && in.cols() >= 1, "frac_filter: empty input");
    if (!in.allFinite()) fail(ErrorKind::InvalidData, "frac_filter: non-finite input");
}

}  // namespace

Matrix frac_filter_serial(const Matrix& in, double d) {
    check_input(in);
    const auto c = frac_coeffs(d, static_cast<std::size_t>(in.rows())).coeffs;
    Matrix out(in.rows(), in.cols());
    for (Eigen::Index col = 0; col < in.cols(); ++col) direct_column(c, in, out, col);
    return out;
}

Matrix frac_filter_direct(const Matrix& in, double d) {
    check_input(in);
    const auto c = frac_coeffs(d, static_cast<std::size_t>(in.rows())).coeffs;
    Matrix out(in.rows(), in.cols());
    const Eigen::Index cols = in.cols();
#pragma omp parallel for schedule(static) if (cols > 1)
    for (Eigen::Index col = 0; col < cols; ++col) direct_column(c, in, out, col);
    return out;
}

Matrix frac_filter_fft(const Matrix& in, double d) {
    check_input(in);
    const auto T = static_cast<std::size_t>(in.rows());
    const auto c = frac_coeffs(d, T).coeffs;
    const std::size_t n = good_fft_size(2 * T - 1);
    Matrix out(in.rows(), in.cols());

    // kernel spectrum shared by all columns
    std::vector<std::complex<double>> kspec;
    {
        RealFft fft(n);
        kspec.resize(fft.spectrum_size());
        fft.forward(c, kspec);
    }
    const Eigen::Index cols = in.cols();
    const double scale = 1.0 / static_cast<double>(n);
#pragma omp parallel if (cols > 1)
    {
        RealFft fft(n);
        std::vector<std::complex<double>> spec(fft.spectrum_size());
        std::vector<double> buf(n);
#pragma omp for schedule(static)
        for (Eigen::Index col = 0; col < cols; ++col) {
            fft.forward(std::span<const double>(in.col(col).data(), T), spec);
            for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= kspec[k];
            fft.inverse(spec, buf);
            for (std::size_t t = 0; t < T; ++t) out(static_cast<Eigen::Index>(t), col) = buf[t] * scale;
        }
    }
    return out;
}

Matrix frac_filter(const Matrix& in, double d) {
    if (static_cast<std::size_t>(in.rows()) > kFftThreshold) return frac_filter_fft(in, d);
    return frac_filter_direct(in, d);
}

FunctionalSeries frac_filter(const FunctionalSeries& series, double d) {
    return series.with_coeffs(frac_filter(series.coeffs(), d), series.label());
}

}  // namespace fraccurve
